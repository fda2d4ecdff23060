//! Public outcome sampling: walks the public tree, sampling one successor
//! public state per level and evaluating every history of each visited state.

use crate::baselines::{corrected_value, mix_by_strategy, BaselineKind, BaselineStore, BaselineUpdate};
use crate::game::{expected_utility, GameTree, Owner, Player, Reach, StrategyProfile};
use crate::os::StrategySource;
use crate::sampling::{check_width, walk_rng, Chooser, RngChooser, SampleError};
use crate::solver::{apply_exact_iteration, CfrConfig, RegretTable, StrategyAveraging};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosConfig {
    pub plus: bool,
    pub linear_averaging: bool,
    pub strategy_averaging: StrategyAveraging,
}

impl Default for PosConfig {
    fn default() -> Self {
        PosConfig {
            plus: true,
            linear_averaging: true,
            strategy_averaging: StrategyAveraging::Weighted,
        }
    }
}

/// Distribution over the successors of a public state.
pub trait SuccessorSampling {
    /// Writes a full-support distribution over `count` successors.
    fn distribution(&self, count: usize, out: &mut Vec<f64>);
}

#[derive(Debug, Clone, Copy, Default)]
pub struct UniformSuccessors;

impl SuccessorSampling for UniformSuccessors {
    fn distribution(&self, count: usize, out: &mut Vec<f64>) {
        out.clear();
        out.resize(count, 1.0 / count as f64);
    }
}

/// Record of one visited public state, pushed bottom-up.
#[derive(Debug, Clone, PartialEq)]
pub struct PublicStepRecord {
    pub state: usize,
    pub successor: usize,
    pub sample_prob: f64,
    /// Corrected action values per member, in member order (first value stream).
    pub action_values: Vec<Vec<f64>>,
    /// Value of every member (first value stream).
    pub values: Vec<f64>,
    pub next_values: Vec<f64>,
    /// Sampled regret per infoset of the acting player.
    pub regrets: Vec<(usize, Vec<f64>)>,
}

/// Values of the members of the start state.
#[derive(Debug, Clone, PartialEq)]
pub struct PublicWalkResult {
    /// Per member, the value in each perspective stream (both equal unless
    /// the learned infoset baseline is used).
    pub values: Vec<[f64; 2]>,
    pub next_values: Vec<f64>,
    pub nodes: u64,
    /// Terminal public state reached.
    pub terminal: usize,
}

struct Level {
    values: Vec<[f64; 2]>,
    next: Vec<f64>,
}

struct Walker<'a, 'b, C> {
    tree: &'a GameTree,
    source: StrategySource<'b>,
    store: &'b BaselineStore,
    config: PosConfig,
    iteration: u64,
    successors: &'b dyn SuccessorSampling,
    chooser: &'b mut C,
    pending: &'b mut Vec<BaselineUpdate>,
    trace: Option<&'b mut Vec<PublicStepRecord>>,
    nodes: u64,
    terminal: usize,
}

impl<C: Chooser> Walker<'_, '_, C> {
    fn infoset_strategy(&self, info: usize) -> Vec<f64> {
        let tree = self.tree;
        match &self.source {
            StrategySource::Learning(table) => table.current_strategy(tree.infoset(info)),
            StrategySource::Frozen(p) => p.infoset(tree, info).to_vec(),
        }
    }

    fn visit(&mut self, sid: usize, reaches: &[Reach], sample_reach: f64) -> Result<Level, SampleError> {
        let tree = self.tree;
        let s = tree.public_state(sid);
        self.nodes += s.members.len() as u64;
        if s.is_terminal() {
            self.terminal = sid;
            let values = s
                .members
                .iter()
                .map(|&z| {
                    let u = tree.node(z).utility.unwrap();
                    [u, u]
                })
                .collect();
            let next = s.members.iter().map(|&z| tree.node(z).utility.unwrap()).collect();
            return Ok(Level { values, next });
        }
        let owner = s.owner;

        // Strategy of every member, flat with per-member offsets.
        let info_strategies: Vec<Vec<f64>> = s.infosets.iter().map(|&i| self.infoset_strategy(i)).collect();
        let info_index = |node: usize| s.infosets.iter().position(|&i| Some(i) == tree.node(node).infoset).unwrap();
        let mut offsets = Vec::with_capacity(s.members.len() + 1);
        let mut sigma = Vec::new();
        for &h in &s.members {
            offsets.push(sigma.len());
            match owner {
                Owner::Chance => sigma.extend(tree.edges(h).iter().map(|e| e.chance_prob)),
                _ => sigma.extend_from_slice(&info_strategies[info_index(h)]),
            }
        }
        offsets.push(sigma.len());

        if let (Owner::Player(p), StrategySource::Learning(table)) = (owner, &mut self.source) {
            let t = self.iteration;
            for (&i, strategy) in s.infosets.iter().zip(&info_strategies) {
                let info = tree.infoset(i);
                match self.config.strategy_averaging {
                    StrategyAveraging::Weighted => {
                        let scale = if self.config.linear_averaging { t as f64 } else { 1.0 };
                        let own = reaches[tree.member_position(info.members[0])].own(p);
                        table.update_average(info, strategy, own / sample_reach * scale);
                    }
                    StrategyAveraging::Pseudocode => table.blend_average(info, strategy, t),
                }
            }
        }

        let mut probs = Vec::new();
        self.successors.distribution(s.successors.len(), &mut probs);
        let pick = self.chooser.choose(&probs);
        let q = probs[pick];
        if q <= 0.0 {
            return Err(SampleError::ZeroProbability {
                node: s.members[0],
                action: pick,
                prob: q,
            });
        }
        let next_sid = s.successors[pick];
        let next_state = tree.public_state(next_sid);
        let sampled = |child: usize| tree.node(child).public_state == next_sid;

        let mut child_reaches = vec![Reach::ROOT; next_state.members.len()];
        for (m, &h) in s.members.iter().enumerate() {
            for (a, e) in tree.edges(h).iter().enumerate() {
                if sampled(e.child) {
                    child_reaches[tree.member_position(e.child)] = reaches[m].extend(owner, sigma[offsets[m] + a]);
                }
            }
        }
        let below = self.visit(next_sid, &child_reaches, sample_reach * q)?;

        let streams = self.store.streams();
        let mut action_values = [vec![0.0; sigma.len()], vec![0.0; if streams == 2 { sigma.len() } else { 0 }]];
        let mut values = vec![[0.0; 2]; s.members.len()];
        for (m, &h) in s.members.iter().enumerate() {
            let n = tree.node(h);
            let range = offsets[m]..offsets[m + 1];
            for st in 0..streams {
                let perspective = Player::from_index(st);
                for (a, e) in tree.edges(h).iter().enumerate() {
                    let b = self.store.value(tree, n.first_edge + a, perspective);
                    action_values[st][offsets[m] + a] = if sampled(e.child) {
                        let child = below.values[tree.member_position(e.child)][st];
                        corrected_value(b, child, true, q).expect("successor probability is positive")
                    } else {
                        b
                    };
                }
                values[m][st] = mix_by_strategy(&action_values[st][range.clone()], &sigma[range.clone()]);
            }
            if streams == 1 {
                values[m][1] = values[m][0];
            }
        }

        let mut regrets = Vec::new();
        if let Owner::Player(p) = owner {
            let st = if streams == 2 { p.index() } else { 0 };
            for &i in &s.infosets {
                let info = tree.infoset(i);
                let mut delta = vec![0.0; info.num_actions];
                for &h in &info.members {
                    let m = tree.member_position(h);
                    let w = reaches[m].others(p);
                    for (a, d) in delta.iter_mut().enumerate() {
                        *d += w * (action_values[st][offsets[m] + a] - values[m][st]);
                    }
                }
                for d in delta.iter_mut() {
                    *d = *d / sample_reach * p.sign();
                }
                if let StrategySource::Learning(table) = &mut self.source {
                    table.accumulate(info, &delta, self.config.plus);
                }
                regrets.push((i, delta));
            }
        }

        let kind = self.store.kind();
        match kind {
            BaselineKind::LearnedHistory => {
                for &h in &s.members {
                    for (a, e) in tree.edges(h).iter().enumerate() {
                        if sampled(e.child) {
                            let sample = below.values[tree.member_position(e.child)][0];
                            let key = tree.node(h).first_edge + a;
                            self.pending.push(BaselineUpdate::Learned { key, sample });
                        }
                    }
                }
            }
            BaselineKind::LearnedInfoset => {
                for p in Player::BOTH {
                    // (slot, weighted value sum, weight sum) in first-seen order.
                    let mut slots: Vec<(usize, f64, f64)> = Vec::new();
                    for (m, &h) in s.members.iter().enumerate() {
                        let w = reaches[m].others(p);
                        for (a, e) in tree.edges(h).iter().enumerate() {
                            if !sampled(e.child) {
                                continue;
                            }
                            let slot = tree.aug_slot(p, tree.node(h).first_edge + a);
                            let v = below.values[tree.member_position(e.child)][p.index()];
                            match slots.iter_mut().find(|x| x.0 == slot) {
                                Some(x) => {
                                    x.1 += w * v;
                                    x.2 += w;
                                }
                                None => slots.push((slot, w * v, w)),
                            }
                        }
                    }
                    for (key, num, den) in slots {
                        if den > 0.0 {
                            self.pending.push(BaselineUpdate::Learned { key, sample: num / den });
                        }
                    }
                }
            }
            BaselineKind::Predictive => {
                for &h in &s.members {
                    for (a, e) in tree.edges(h).iter().enumerate() {
                        if sampled(e.child) {
                            let value = below.next[tree.member_position(e.child)];
                            let edge = tree.node(h).first_edge + a;
                            self.pending.push(BaselineUpdate::Predictive { edge, value });
                        }
                    }
                }
            }
            _ => {}
        }

        let next: Vec<f64> = if kind == BaselineKind::Predictive {
            let next_strategies: Vec<Vec<f64>> = match owner {
                Owner::Player(_) => s.infosets.iter().map(|&i| self.infoset_strategy(i)).collect(),
                _ => Vec::new(),
            };
            s.members
                .iter()
                .enumerate()
                .map(|(m, &h)| {
                    let n = tree.node(h);
                    let strategy = match owner {
                        Owner::Chance => &sigma[offsets[m]..offsets[m + 1]],
                        _ => &next_strategies[info_index(h)][..],
                    };
                    tree.edges(h)
                        .iter()
                        .enumerate()
                        .map(|(a, e)| {
                            let v = if sampled(e.child) {
                                below.next[tree.member_position(e.child)]
                            } else {
                                self.store.value(tree, n.first_edge + a, Player::One)
                            };
                            strategy[a] * v
                        })
                        .sum()
                })
                .collect()
        } else {
            values.iter().map(|v| v[0]).collect()
        };

        if let Some(trace) = self.trace.as_deref_mut() {
            trace.push(PublicStepRecord {
                state: sid,
                successor: next_sid,
                sample_prob: q,
                action_values: (0..s.members.len())
                    .map(|m| action_values[0][offsets[m]..offsets[m + 1]].to_vec())
                    .collect(),
                values: values.iter().map(|v| v[0]).collect(),
                next_values: next.clone(),
                regrets,
            });
        }
        Ok(Level { values, next })
    }
}

/// Fixed parameters of one public walk.
#[derive(Clone, Copy)]
pub struct PublicWalkParams<'s> {
    pub config: PosConfig,
    pub iteration: u64,
    pub successors: &'s dyn SuccessorSampling,
}

/// Runs one public walk from `start` with the given member reaches and
/// sampling reach 1 at `start`. Baseline writes are collected in `pending`.
#[allow(clippy::too_many_arguments)]
pub fn walk_public_from<C: Chooser>(
    tree: &GameTree,
    source: StrategySource<'_>,
    store: &BaselineStore,
    params: PublicWalkParams<'_>,
    start: usize,
    start_reaches: &[Reach],
    chooser: &mut C,
    pending: &mut Vec<BaselineUpdate>,
    trace: Option<&mut Vec<PublicStepRecord>>,
) -> Result<PublicWalkResult, SampleError> {
    let mut walker = Walker {
        tree,
        source,
        store,
        config: params.config,
        iteration: params.iteration,
        successors: params.successors,
        chooser,
        pending,
        trace,
        nodes: 0,
        terminal: start,
    };
    let level = walker.visit(start, start_reaches, 1.0)?;
    Ok(PublicWalkResult {
        values: level.values,
        next_values: level.next,
        nodes: walker.nodes,
        terminal: walker.terminal,
    })
}

/// One learning walk from the root public state at the table's current
/// iteration, updating both players. Covers the plain and the predictive
/// variants; the store's kind decides.
pub fn pos_iteration<C: Chooser>(
    tree: &GameTree,
    table: &mut RegretTable,
    store: &mut BaselineStore,
    config: PosConfig,
    chooser: &mut C,
    trace: Option<&mut Vec<PublicStepRecord>>,
) -> Result<PublicWalkResult, SampleError> {
    if store.kind() == BaselineKind::Oracle {
        store.refresh_oracle(tree, &table.current_profile(tree));
    }
    let root_state = tree.node(GameTree::ROOT).public_state;
    let params = PublicWalkParams {
        config,
        iteration: table.iteration(),
        successors: &UniformSuccessors,
    };
    let mut pending = Vec::new();
    let result = walk_public_from(
        tree,
        StrategySource::Learning(table),
        store,
        params,
        root_state,
        &[Reach::ROOT],
        chooser,
        &mut pending,
        trace,
    )?;
    for u in pending {
        store.apply(u);
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapResult {
    /// Root value under the first-iteration (uniform) strategy.
    pub root_value: f64,
    pub nodes: u64,
}

/// First iteration as an exact full-tree update of both players; the
/// predictive baseline is then seeded with exact child values under the
/// updated strategy.
pub fn full_walk_bootstrap(
    tree: &GameTree,
    table: &mut RegretTable,
    store: &mut BaselineStore,
    config: PosConfig,
) -> BootstrapResult {
    let t = table.begin_iteration();
    let root_value = expected_utility(tree, &table.current_profile(tree), GameTree::ROOT);
    let exact = CfrConfig {
        plus: config.plus,
        alternating: false,
        linear_averaging: config.linear_averaging,
    };
    apply_exact_iteration(tree, table, exact, t, None);
    if store.kind() == BaselineKind::Predictive {
        store.seed_from_profile(tree, &table.current_profile(tree));
    }
    BootstrapResult {
        root_value,
        nodes: tree.num_nodes() as u64,
    }
}

/// Public-outcome-sampling MCCFR run state. Iteration `k` (from 0) draws
/// from stream `k` of the run seed.
pub struct PosSolver<'a> {
    tree: &'a GameTree,
    table: RegretTable,
    store: BaselineStore,
    config: PosConfig,
    seed: u64,
    walks: u64,
    nodes_touched: u64,
    covered: Vec<bool>,
    bootstrapped: bool,
}

impl<'a> PosSolver<'a> {
    pub fn new(tree: &'a GameTree, store: BaselineStore, config: PosConfig, seed: u64) -> Result<Self, SampleError> {
        check_width(tree)?;
        Ok(PosSolver {
            tree,
            table: RegretTable::new(tree),
            store,
            config,
            seed,
            walks: 0,
            nodes_touched: 0,
            covered: vec![false; tree.public_states().len()],
            bootstrapped: false,
        })
    }

    /// Runs the full-walk first iteration. Only valid before any other iteration.
    pub fn bootstrap(&mut self) -> Result<BootstrapResult, SampleError> {
        if self.table.iteration() != 0 {
            return Err(SampleError::Unsupported("bootstrap must be the first iteration".into()));
        }
        let r = full_walk_bootstrap(self.tree, &mut self.table, &mut self.store, self.config);
        self.nodes_touched += r.nodes;
        self.bootstrapped = true;
        Ok(r)
    }

    pub fn step(&mut self) -> Result<u64, SampleError> {
        self.table.begin_iteration();
        let mut chooser = RngChooser::new(walk_rng(self.seed, self.walks));
        self.walks += 1;
        let r = pos_iteration(self.tree, &mut self.table, &mut self.store, self.config, &mut chooser, None)?;
        self.covered[r.terminal] = true;
        self.nodes_touched += r.nodes;
        Ok(r.nodes)
    }

    /// True once every terminal public state has been sampled, or after a bootstrap.
    pub fn all_terminals_covered(&self) -> bool {
        self.bootstrapped
            || self
                .tree
                .public_states()
                .iter()
                .all(|s| !s.is_terminal() || self.covered[s.id])
    }

    pub fn iteration(&self) -> u64 {
        self.table.iteration()
    }

    pub fn nodes_touched(&self) -> u64 {
        self.nodes_touched
    }

    pub fn table(&self) -> &RegretTable {
        &self.table
    }

    pub fn store(&self) -> &BaselineStore {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut BaselineStore {
        &mut self.store
    }

    pub fn config(&self) -> PosConfig {
        self.config
    }

    pub fn average_profile(&self) -> StrategyProfile {
        self.table.average_profile(self.tree)
    }

    pub fn current_profile(&self) -> StrategyProfile {
        self.table.current_profile(self.tree)
    }
}
