//! Outcome-sampling MCCFR with baseline-corrected values.
//!
//! One walk samples a single trajectory root to terminal. On the way back up
//! every visited history gets baseline-corrected action values, a regret
//! update (for the updating player) and, with the predictive baseline, a
//! second value under the post-update strategy.

use crate::baselines::{corrected_value, mix_by_strategy, BaselineKind, BaselineStore, BaselineUpdate};
use crate::game::{GameTree, Owner, Player, Reach, StrategyProfile};
use crate::sampling::{check_width, sample_action, walk_rng, Chooser, RngChooser, SampleError, SamplingScheme, MAX_ACTIONS};
use crate::solver::{RegretTable, StrategyAveraging};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateMode {
    /// One walk per player per iteration, each updating only that player.
    Alternating,
    /// One walk per iteration updating both players.
    Simultaneous,
}

impl std::str::FromStr for UpdateMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "alternating" => Ok(UpdateMode::Alternating),
            "simultaneous" => Ok(UpdateMode::Simultaneous),
            _ => Err(format!("unknown update mode '{s}'")),
        }
    }
}

impl std::fmt::Display for UpdateMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            UpdateMode::Alternating => "alternating",
            UpdateMode::Simultaneous => "simultaneous",
        })
    }
}

impl UpdateMode {
    /// Updating player of each walk in one iteration.
    pub fn walks(self) -> &'static [Option<Player>] {
        match self {
            UpdateMode::Alternating => &[Some(Player::One), Some(Player::Two)],
            UpdateMode::Simultaneous => &[None],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OsConfig {
    pub scheme: SamplingScheme,
    pub plus: bool,
    pub linear_averaging: bool,
    pub strategy_averaging: StrategyAveraging,
}

impl Default for OsConfig {
    fn default() -> Self {
        OsConfig {
            scheme: SamplingScheme::Uniform,
            plus: true,
            linear_averaging: true,
            strategy_averaging: StrategyAveraging::Weighted,
        }
    }
}

/// Where a walk reads strategies from.
pub enum StrategySource<'b> {
    /// Regret matching on a table that the walk updates.
    Learning(&'b mut RegretTable),
    /// A fixed profile; nothing is updated.
    Frozen(&'b StrategyProfile),
}

/// Per-history record of a walk, pushed bottom-up (terminal side first).
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub node: usize,
    pub action: usize,
    pub sample_prob: f64,
    /// Current strategy, or the chance distribution.
    pub strategy: Vec<f64>,
    /// Baseline-corrected action values.
    pub action_values: Vec<f64>,
    pub value: f64,
    /// Value under the post-update strategy; equals `value` without the predictive baseline.
    pub next_value: f64,
    /// Sampled regret delta, present at the updating player's histories.
    pub regret: Option<Vec<f64>>,
}

/// Fixed parameters of one walk.
#[derive(Debug, Clone, Copy)]
pub struct WalkParams {
    pub config: OsConfig,
    /// Player whose regrets are updated; `None` updates both.
    pub updating: Option<Player>,
    /// Perspective used by the learned infoset baseline.
    pub perspective: Player,
    /// Iteration number used for linear averaging.
    pub iteration: u64,
}

/// Outcome of one walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkResult {
    pub value: f64,
    pub next_value: f64,
    pub nodes: u64,
}

struct Walker<'a, 'b, C> {
    tree: &'a GameTree,
    source: StrategySource<'b>,
    store: &'b BaselineStore,
    params: WalkParams,
    chooser: &'b mut C,
    pending: &'b mut Vec<BaselineUpdate>,
    trace: Option<&'b mut Vec<StepRecord>>,
    nodes: u64,
}

impl<C: Chooser> Walker<'_, '_, C> {
    fn visit(&mut self, node: usize, reach: Reach, sample_reach: f64) -> Result<(f64, f64), SampleError> {
        self.nodes += 1;
        let tree = self.tree;
        let n = tree.node(node);
        if let Some(u) = n.utility {
            return Ok((u, u));
        }
        let k = n.num_actions;
        let mut sigma = [0.0; MAX_ACTIONS];
        match n.owner {
            Owner::Chance => {
                for (s, e) in sigma.iter_mut().zip(tree.edges(node)) {
                    *s = e.chance_prob;
                }
            }
            Owner::Player(_) => {
                let info = tree.infoset(n.infoset.unwrap());
                match &self.source {
                    StrategySource::Learning(table) => table.current_strategy_into(info, &mut sigma[..k]),
                    StrategySource::Frozen(p) => sigma[..k].copy_from_slice(p.infoset(tree, info.id)),
                }
            }
            Owner::Terminal => unreachable!(),
        }
        let config = self.params.config;
        let (a, q) = sample_action(tree, config.scheme, node, &sigma[..k], self.params.updating, self.chooser)?;
        let child = tree.child(node, a);
        let (child_value, child_next) = self.visit(child, reach.extend(n.owner, sigma[a]), sample_reach * q)?;

        let mut b = [0.0; MAX_ACTIONS];
        for (j, bj) in b[..k].iter_mut().enumerate() {
            *bj = self.store.value(tree, n.first_edge + j, self.params.perspective);
        }
        let mut values = b;
        values[a] = corrected_value(b[a], child_value, true, q).expect("sampled actions have q > 0");
        let v = mix_by_strategy(&values[..k], &sigma[..k]);

        let mut regret = None;
        if let Owner::Player(pl) = n.owner {
            if self.params.updating.is_none_or(|u| u == pl) {
                let w = reach.others(pl) / sample_reach;
                let mut delta = [0.0; MAX_ACTIONS];
                for j in 0..k {
                    delta[j] = w * (values[j] - v) * pl.sign();
                }
                if let StrategySource::Learning(table) = &mut self.source {
                    let info = tree.infoset(n.infoset.unwrap());
                    table.accumulate(info, &delta[..k], config.plus);
                    let t = self.params.iteration;
                    match config.strategy_averaging {
                        StrategyAveraging::Weighted => {
                            let scale = if config.linear_averaging { t as f64 } else { 1.0 };
                            let weight = reach.own(pl) / sample_reach * scale;
                            table.update_average(info, &sigma[..k], weight);
                        }
                        StrategyAveraging::Pseudocode => table.blend_average(info, &sigma[..k], t),
                    }
                }
                regret = Some(delta[..k].to_vec());
            }
        }

        let edge = n.first_edge + a;
        let kind = self.store.kind();
        match kind {
            BaselineKind::LearnedHistory | BaselineKind::LearnedInfoset => {
                let key = self.store.key(tree, edge, self.params.perspective).unwrap();
                self.pending.push(BaselineUpdate::Learned { key, sample: child_value });
            }
            BaselineKind::Predictive => self.pending.push(BaselineUpdate::Predictive { edge, value: child_next }),
            _ => {}
        }

        let next = if kind == BaselineKind::Predictive {
            let mut sigma_next = sigma;
            if let (Owner::Player(_), StrategySource::Learning(table)) = (n.owner, &self.source) {
                table.current_strategy_into(tree.infoset(n.infoset.unwrap()), &mut sigma_next[..k]);
            }
            let mut next_values = b;
            next_values[a] = child_next;
            mix_by_strategy(&next_values[..k], &sigma_next[..k])
        } else {
            v
        };

        if let Some(trace) = self.trace.as_deref_mut() {
            trace.push(StepRecord {
                node,
                action: a,
                sample_prob: q,
                strategy: sigma[..k].to_vec(),
                action_values: values[..k].to_vec(),
                value: v,
                next_value: next,
                regret,
            });
        }
        Ok((v, next))
    }
}

/// Runs one sampled walk from `start`, whose reach is `start_reach`, with
/// sampling reach 1 at `start`. Baseline writes are collected in `pending`
/// rather than applied.
#[allow(clippy::too_many_arguments)]
pub fn walk_from<C: Chooser>(
    tree: &GameTree,
    source: StrategySource<'_>,
    store: &BaselineStore,
    params: WalkParams,
    start: usize,
    start_reach: Reach,
    chooser: &mut C,
    pending: &mut Vec<BaselineUpdate>,
    trace: Option<&mut Vec<StepRecord>>,
) -> Result<WalkResult, SampleError> {
    let mut walker = Walker {
        tree,
        source,
        store,
        params,
        chooser,
        pending,
        trace,
        nodes: 0,
    };
    let (value, next_value) = walker.visit(start, start_reach, 1.0)?;
    Ok(WalkResult {
        value,
        next_value,
        nodes: walker.nodes,
    })
}

/// One learning walk from the root at the table's current iteration.
///
/// Covers both the plain and the predictive variants: the store's kind
/// decides. The oracle baseline is refreshed from the current strategy first.
pub fn os_iteration<C: Chooser>(
    tree: &GameTree,
    table: &mut RegretTable,
    store: &mut BaselineStore,
    config: OsConfig,
    updating: Option<Player>,
    chooser: &mut C,
    trace: Option<&mut Vec<StepRecord>>,
) -> Result<WalkResult, SampleError> {
    if store.kind() == BaselineKind::Oracle {
        store.refresh_oracle(tree, &table.current_profile(tree));
    }
    let params = WalkParams {
        config,
        updating,
        perspective: updating.unwrap_or(Player::One),
        iteration: table.iteration(),
    };
    let mut pending = Vec::new();
    let result = walk_from(
        tree,
        StrategySource::Learning(table),
        store,
        params,
        GameTree::ROOT,
        Reach::ROOT,
        chooser,
        &mut pending,
        trace,
    )?;
    for u in pending {
        store.apply(u);
    }
    Ok(result)
}

/// Outcome-sampling MCCFR run state.
///
/// Walk `k` (counted from 0 over the whole run) draws from stream `k` of the
/// run seed, so any walk can be replayed in isolation.
pub struct OsSolver<'a> {
    tree: &'a GameTree,
    table: RegretTable,
    store: BaselineStore,
    config: OsConfig,
    updates: UpdateMode,
    seed: u64,
    walks: u64,
    nodes_touched: u64,
}

impl<'a> OsSolver<'a> {
    pub fn new(
        tree: &'a GameTree,
        store: BaselineStore,
        config: OsConfig,
        updates: UpdateMode,
        seed: u64,
    ) -> Result<Self, SampleError> {
        check_width(tree)?;
        if store.kind() == BaselineKind::LearnedInfoset && updates == UpdateMode::Simultaneous {
            return Err(SampleError::Unsupported(
                "learned infoset baseline with outcome sampling needs alternating updates".into(),
            ));
        }
        if config.scheme == SamplingScheme::OpponentOnPolicy && updates == UpdateMode::Simultaneous {
            return Err(SampleError::Unsupported(
                "opponent on-policy sampling needs alternating updates".into(),
            ));
        }
        Ok(OsSolver {
            tree,
            table: RegretTable::new(tree),
            store,
            config,
            updates,
            seed,
            walks: 0,
            nodes_touched: 0,
        })
    }

    /// Runs one iteration (one walk per updating player) and returns the histories touched.
    pub fn step(&mut self) -> Result<u64, SampleError> {
        self.table.begin_iteration();
        let mut touched = 0;
        for &updating in self.updates.walks() {
            let mut chooser = RngChooser::new(walk_rng(self.seed, self.walks));
            self.walks += 1;
            let r = os_iteration(
                self.tree,
                &mut self.table,
                &mut self.store,
                self.config,
                updating,
                &mut chooser,
                None,
            )?;
            touched += r.nodes;
        }
        self.nodes_touched += touched;
        Ok(touched)
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

    pub fn config(&self) -> OsConfig {
        self.config
    }

    pub fn updates(&self) -> UpdateMode {
        self.updates
    }

    pub fn average_profile(&self) -> StrategyProfile {
        self.table.average_profile(self.tree)
    }

    pub fn current_profile(&self) -> StrategyProfile {
        self.table.current_profile(self.tree)
    }
}
