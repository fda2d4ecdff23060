//! Independent oracles shared by the integration tests: exhaustive
//! enumeration of sampled walks, brute-force values, reaches and regrets,
//! and a plain outcome-sampling MCCFR written without baselines.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use vrcfr::baselines::{BaselineKind, BaselineStore, BaselineUpdate};
use vrcfr::game::{GameTree, Owner, Player, Reach, StrategyProfile};
use vrcfr::os::{walk_from, OsConfig, StepRecord, StrategySource, WalkParams, WalkResult};
use vrcfr::pos::{walk_public_from, PosConfig, PublicStepRecord, PublicWalkParams, PublicWalkResult, UniformSuccessors};
use vrcfr::sampling::{walk_rng, SamplingScheme, ScriptedChooser};
use vrcfr::solver::regret_matching;

/// Strictly positive random strategy at every infoset.
pub fn random_profile(tree: &GameTree, rng: &mut impl Rng) -> StrategyProfile {
    let mut probs = vec![0.0; tree.num_infoset_actions()];
    for info in tree.infosets() {
        let w: Vec<f64> = (0..info.num_actions).map(|_| 0.05 + rng.gen::<f64>()).collect();
        let total: f64 = w.iter().sum();
        for (a, x) in w.iter().enumerate() {
            probs[info.offset + a] = x / total;
        }
    }
    StrategyProfile::from_vec(tree, probs).unwrap()
}

/// Store of `kind` filled with arbitrary values in [-3, 3].
pub fn random_store(tree: &GameTree, kind: BaselineKind, rng: &mut impl Rng) -> BaselineStore {
    let len = match kind {
        BaselineKind::Zero => 0,
        BaselineKind::LearnedInfoset => tree.num_aug_slots(),
        _ => tree.num_edges(),
    };
    let values = (0..len).map(|_| rng.gen_range(-3.0..3.0)).collect();
    BaselineStore::with_values(tree, kind, values)
}

pub fn action_prob(tree: &GameTree, profile: &StrategyProfile, node: usize, a: usize) -> f64 {
    let n = tree.node(node);
    match n.owner {
        Owner::Chance => tree.edges(node)[a].chance_prob,
        _ => profile.infoset(tree, n.infoset.unwrap())[a],
    }
}

/// Player-one value of every history by plain recursion.
pub fn oracle_values(tree: &GameTree, profile: &StrategyProfile) -> Vec<f64> {
    fn rec(tree: &GameTree, profile: &StrategyProfile, node: usize, out: &mut [f64]) -> f64 {
        let n = tree.node(node);
        let v = match n.utility {
            Some(u) => u,
            None => (0..n.num_actions)
                .map(|a| action_prob(tree, profile, node, a) * rec(tree, profile, tree.child(node, a), out))
                .sum(),
        };
        out[node] = v;
        v
    }
    let mut out = vec![0.0; tree.num_nodes()];
    rec(tree, profile, GameTree::ROOT, &mut out);
    out
}

/// `[player one, player two, chance]` reach, multiplied up the parent chain.
pub fn oracle_reach(tree: &GameTree, profile: &StrategyProfile, node: usize) -> [f64; 3] {
    let mut r = [1.0; 3];
    let mut x = node;
    while let Some(p) = tree.node(x).parent {
        let a = (0..tree.node(p).num_actions).find(|&a| tree.child(p, a) == x).unwrap();
        let slot = match tree.node(p).owner {
            Owner::Player(pl) => pl.index(),
            _ => 2,
        };
        r[slot] *= action_prob(tree, profile, p, a);
        x = p;
    }
    r
}

pub fn opponent_reach(r: [f64; 3], player: Player) -> f64 {
    r[player.opponent().index()] * r[2]
}

/// Counterfactual regret of every infoset action by direct summation.
pub fn oracle_regrets(tree: &GameTree, profile: &StrategyProfile) -> Vec<f64> {
    let values = oracle_values(tree, profile);
    let mut out = vec![0.0; tree.num_infoset_actions()];
    for info in tree.infosets() {
        for &h in &info.members {
            let w = opponent_reach(oracle_reach(tree, profile, h), info.owner);
            for a in 0..info.num_actions {
                let d = values[tree.child(h, a)] - values[h];
                out[info.offset + a] += w * d * info.owner.sign();
            }
        }
    }
    out
}

/// Outcome-sampling distribution at `node`, written out from the scheme's definition.
pub fn oracle_sampling(
    tree: &GameTree,
    profile: &StrategyProfile,
    scheme: SamplingScheme,
    updating: Option<Player>,
    node: usize,
) -> Vec<f64> {
    let n = tree.node(node);
    let k = n.num_actions;
    match n.owner {
        Owner::Chance => (0..k).map(|a| action_prob(tree, profile, node, a)).collect(),
        Owner::Player(p) => {
            let on_policy = scheme == SamplingScheme::OpponentOnPolicy && updating.is_some() && updating != Some(p);
            if on_policy {
                (0..k).map(|a| action_prob(tree, profile, node, a)).collect()
            } else {
                vec![1.0 / k as f64; k]
            }
        }
        Owner::Terminal => Vec::new(),
    }
}

/// Every action script from `node` to a terminal with its sampling probability.
pub fn os_scripts(
    tree: &GameTree,
    profile: &StrategyProfile,
    scheme: SamplingScheme,
    updating: Option<Player>,
    node: usize,
) -> Vec<(Vec<usize>, f64)> {
    if tree.node(node).is_terminal() {
        return vec![(Vec::new(), 1.0)];
    }
    let s = oracle_sampling(tree, profile, scheme, updating, node);
    let mut out = Vec::new();
    for (a, &q) in s.iter().enumerate() {
        if q <= 0.0 {
            continue;
        }
        for (rest, p) in os_scripts(tree, profile, scheme, updating, tree.child(node, a)) {
            let mut script = vec![a];
            script.extend(rest);
            out.push((script, q * p));
        }
    }
    out
}

pub struct OsOutcome {
    pub prob: f64,
    pub trace: Vec<StepRecord>,
    pub result: WalkResult,
    pub pending: Vec<BaselineUpdate>,
}

impl OsOutcome {
    /// Record of the walk's start history (pushed last).
    pub fn top(&self) -> &StepRecord {
        self.trace.last().unwrap()
    }
}

/// Runs a frozen walk from `start` along every possible trajectory.
pub fn enumerate_os(
    tree: &GameTree,
    profile: &StrategyProfile,
    store: &BaselineStore,
    params: WalkParams,
    start: usize,
    start_reach: Reach,
) -> Vec<OsOutcome> {
    os_scripts(tree, profile, params.config.scheme, params.updating, start)
        .into_iter()
        .map(|(script, prob)| {
            let mut chooser = ScriptedChooser::new(script);
            let mut trace = Vec::new();
            let mut pending = Vec::new();
            let result = walk_from(
                tree,
                StrategySource::Frozen(profile),
                store,
                params,
                start,
                start_reach,
                &mut chooser,
                &mut pending,
                Some(&mut trace),
            )
            .unwrap();
            OsOutcome {
                prob,
                trace,
                result,
                pending,
            }
        })
        .collect()
}

pub fn frozen_params(scheme: SamplingScheme, updating: Option<Player>, perspective: Player) -> WalkParams {
    WalkParams {
        config: OsConfig {
            scheme,
            ..OsConfig::default()
        },
        updating,
        perspective,
        iteration: 1,
    }
}

/// Every successor script from public state `state` to a terminal public state.
pub fn public_scripts(tree: &GameTree, state: usize) -> Vec<(Vec<usize>, f64)> {
    let s = tree.public_state(state);
    if s.successors.is_empty() {
        return vec![(Vec::new(), 1.0)];
    }
    let q = 1.0 / s.successors.len() as f64;
    let mut out = Vec::new();
    for (k, &next) in s.successors.iter().enumerate() {
        for (rest, p) in public_scripts(tree, next) {
            let mut script = vec![k];
            script.extend(rest);
            out.push((script, q * p));
        }
    }
    out
}

pub struct PosOutcome {
    pub prob: f64,
    pub trace: Vec<PublicStepRecord>,
    pub result: PublicWalkResult,
}

/// Reaches of the members of `state` under `profile`, in member order.
pub fn member_reaches(tree: &GameTree, profile: &StrategyProfile, state: usize) -> Vec<Reach> {
    tree.public_state(state)
        .members
        .iter()
        .map(|&h| {
            let r = oracle_reach(tree, profile, h);
            Reach {
                player: [r[0], r[1]],
                chance: r[2],
            }
        })
        .collect()
}

/// Runs a frozen public walk from `state` along every possible public trajectory.
pub fn enumerate_pos(tree: &GameTree, profile: &StrategyProfile, store: &BaselineStore, state: usize) -> Vec<PosOutcome> {
    let reaches = member_reaches(tree, profile, state);
    let params = PublicWalkParams {
        config: PosConfig::default(),
        iteration: 1,
        successors: &UniformSuccessors,
    };
    public_scripts(tree, state)
        .into_iter()
        .map(|(script, prob)| {
            let mut chooser = ScriptedChooser::new(script);
            let mut trace = Vec::new();
            let mut pending = Vec::new();
            let result = walk_public_from(
                tree,
                StrategySource::Frozen(profile),
                store,
                params,
                state,
                &reaches,
                &mut chooser,
                &mut pending,
                Some(&mut trace),
            )
            .unwrap();
            PosOutcome { prob, trace, result }
        })
        .collect()
}

/// Mean and variance of `x` under the enumerated distribution.
pub fn moments(items: impl IntoIterator<Item = (f64, f64)>) -> (f64, f64) {
    let (mut m1, mut m2, mut total) = (0.0, 0.0, 0.0);
    for (p, x) in items {
        m1 += p * x;
        m2 += p * x * x;
        total += p;
    }
    assert!((total - 1.0).abs() < 1e-12, "probabilities sum to {total}");
    (m1, m2 - m1 * m1)
}

/// Predictive-baseline target for every edge: the value of the child under
/// `profile` with unsampled terminals counted as zero.
pub fn predictive_target(tree: &GameTree, profile: &StrategyProfile, sampled: &[bool]) -> Vec<f64> {
    fn part(tree: &GameTree, profile: &StrategyProfile, sampled: &[bool], node: usize, out: &mut [f64]) -> f64 {
        let n = tree.node(node);
        if let Some(u) = n.utility {
            return if sampled[node] { u } else { 0.0 };
        }
        let mut v = 0.0;
        for a in 0..n.num_actions {
            let c = part(tree, profile, sampled, tree.child(node, a), out);
            out[n.first_edge + a] = c;
            v += action_prob(tree, profile, node, a) * c;
        }
        v
    }
    let mut out = vec![0.0; tree.num_edges()];
    part(tree, profile, sampled, GameTree::ROOT, &mut out);
    out
}

/// Plain outcome-sampling MCCFR with sampled values `u/q` on the sampled
/// action and 0 elsewhere, alternating updates, regret matching+ and
/// linearly weighted averaging. Mirrors the draw order of the library
/// (one uniform per history, walk `k` on stream `k`).
pub struct PlainMccfr<'a> {
    tree: &'a GameTree,
    pub cumulative: Vec<f64>,
    pub average: Vec<f64>,
    seed: u64,
    walks: u64,
    iteration: u64,
}

fn draw(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (k, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = k;
        if u < acc {
            return k;
        }
    }
    last
}

impl<'a> PlainMccfr<'a> {
    pub fn new(tree: &'a GameTree, seed: u64) -> Self {
        PlainMccfr {
            tree,
            cumulative: vec![0.0; tree.num_infoset_actions()],
            average: vec![0.0; tree.num_infoset_actions()],
            seed,
            walks: 0,
            iteration: 0,
        }
    }

    pub fn step(&mut self) {
        self.iteration += 1;
        for p in Player::BOTH {
            let mut rng = walk_rng(self.seed, self.walks);
            self.walks += 1;
            self.visit(GameTree::ROOT, p, [1.0, 1.0], 1.0, 1.0, &mut rng);
        }
    }

    fn visit(&mut self, node: usize, i: Player, pi: [f64; 2], chance: f64, s: f64, rng: &mut ChaCha8Rng) -> f64 {
        let tree = self.tree;
        let n = tree.node(node);
        if let Some(u) = n.utility {
            return u;
        }
        let k = n.num_actions;
        let (sigma, probs) = match n.owner {
            Owner::Chance => {
                let c: Vec<f64> = tree.edges(node).iter().map(|e| e.chance_prob).collect();
                (c.clone(), c)
            }
            _ => {
                let info = tree.infoset(n.infoset.unwrap());
                (regret_matching(&self.cumulative[info.range()]), vec![1.0 / k as f64; k])
            }
        };
        let u: f64 = rng.gen();
        let a = draw(&probs, u);
        let q = probs[a];
        let (mut pi2, mut chance2) = (pi, chance);
        match n.owner {
            Owner::Player(p) => pi2[p.index()] *= sigma[a],
            _ => chance2 *= sigma[a],
        }
        let child = self.visit(tree.child(node, a), i, pi2, chance2, s * q, rng);
        let mut values = vec![0.0; k];
        values[a] = child / q;
        let v: f64 = values.iter().zip(&sigma).map(|(x, p)| x * p).sum();
        if n.owner == Owner::Player(i) {
            let info = tree.infoset(n.infoset.unwrap());
            let w = pi[i.opponent().index()] * chance / s;
            for (j, c) in self.cumulative[info.range()].iter_mut().enumerate() {
                *c += w * (values[j] - v) * i.sign();
                if *c < 0.0 {
                    *c = 0.0;
                }
            }
            let weight = pi[i.index()] / s * self.iteration as f64;
            for (x, p) in self.average[info.range()].iter_mut().zip(&sigma) {
                *x += weight * p;
            }
        }
        v
    }
}
