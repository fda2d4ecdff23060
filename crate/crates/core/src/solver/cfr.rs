use super::RegretTable;
use crate::game::{expected_utilities, reaches, GameTree, Player, StrategyProfile};

/// Exact instantaneous counterfactual regrets of `profile`, flat by infoset
/// offset, each in the acting player's own utility:
/// `r(I, a) = sum over h in I of pi_{-i}(h) * (v(ha) - v(h))`.
pub fn counterfactual_regrets(tree: &GameTree, profile: &StrategyProfile) -> Vec<f64> {
    let reach = reaches(tree, profile);
    let values = expected_utilities(tree, profile);
    let mut out = vec![0.0; tree.num_infoset_actions()];
    for info in tree.infosets() {
        let sign = info.owner.sign();
        for &h in &info.members {
            let w = reach[h].others(info.owner);
            for (a, e) in tree.edges(h).iter().enumerate() {
                out[info.offset + a] += sign * w * (values[e.child] - values[h]);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CfrConfig {
    /// Clamp cumulative regrets at zero after each update.
    pub plus: bool,
    /// Update player one, then player two against the refreshed profile.
    pub alternating: bool,
    /// Weight the average strategy by the iteration number.
    pub linear_averaging: bool,
}

impl CfrConfig {
    pub fn cfr() -> Self {
        CfrConfig {
            plus: false,
            alternating: false,
            linear_averaging: false,
        }
    }

    pub fn cfr_plus() -> Self {
        CfrConfig {
            plus: true,
            alternating: true,
            linear_averaging: true,
        }
    }
}

/// Full-tree CFR. Every walk touches every history once.
pub struct CfrSolver<'a> {
    tree: &'a GameTree,
    table: RegretTable,
    config: CfrConfig,
    nodes_touched: u64,
}

impl<'a> CfrSolver<'a> {
    pub fn new(tree: &'a GameTree, config: CfrConfig) -> Self {
        CfrSolver {
            tree,
            table: RegretTable::new(tree),
            config,
            nodes_touched: 0,
        }
    }

    pub fn table(&self) -> &RegretTable {
        &self.table
    }

    pub fn table_mut(&mut self) -> &mut RegretTable {
        &mut self.table
    }

    pub fn nodes_touched(&self) -> u64 {
        self.nodes_touched
    }

    pub fn iteration(&self) -> u64 {
        self.table.iteration()
    }

    /// Runs one iteration and returns the histories touched.
    pub fn step(&mut self) -> u64 {
        let t = self.table.begin_iteration();
        let before = self.nodes_touched;
        if self.config.alternating {
            for p in Player::BOTH {
                self.walk(t, Some(p));
            }
        } else {
            self.walk(t, None);
        }
        self.nodes_touched - before
    }

    pub fn run(&mut self, iterations: u64) {
        for _ in 0..iterations {
            self.step();
        }
    }

    fn walk(&mut self, t: u64, updating: Option<Player>) {
        apply_exact_iteration(self.tree, &mut self.table, self.config, t, updating);
        self.nodes_touched += self.tree.num_nodes() as u64;
    }

    pub fn average_profile(&self) -> StrategyProfile {
        self.table.average_profile(self.tree)
    }

    pub fn current_profile(&self) -> StrategyProfile {
        self.table.current_profile(self.tree)
    }
}

/// One exact regret and average-strategy update for `updating` (both players
/// when `None`) against the table's current profile.
pub(crate) fn apply_exact_iteration(
    tree: &GameTree,
    table: &mut RegretTable,
    config: CfrConfig,
    t: u64,
    updating: Option<Player>,
) {
    let profile = table.current_profile(tree);
    let regrets = counterfactual_regrets(tree, &profile);
    let reach = reaches(tree, &profile);
    let scale = if config.linear_averaging { t as f64 } else { 1.0 };
    for info in tree.infosets() {
        if updating.is_some_and(|p| p != info.owner) {
            continue;
        }
        let sigma = profile.infoset(tree, info.id);
        let own = reach[info.members[0]].own(info.owner);
        table.update_average(info, sigma, own * scale);
        table.accumulate(info, &regrets[info.range()], config.plus);
    }
}

/// Runs `iterations` of CFR (or CFR+ with `plus`) and returns the average profile.
pub fn run_cfr(tree: &GameTree, iterations: u64, plus: bool) -> StrategyProfile {
    let config = if plus { CfrConfig::cfr_plus() } else { CfrConfig::cfr() };
    let mut solver = CfrSolver::new(tree, config);
    solver.run(iterations);
    solver.average_profile()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{exploitability, expected_utility};
    use crate::games;

    #[test]
    fn matching_pennies_regrets_at_pure_profile() {
        let tree = games::matching_pennies();
        let mut probs = StrategyProfile::uniform(&tree).as_slice().to_vec();
        let p1 = tree.node(GameTree::ROOT).infoset.unwrap();
        probs[tree.infoset(p1).offset] = 1.0;
        probs[tree.infoset(p1).offset + 1] = 0.0;
        let profile = StrategyProfile::from_vec(&tree, probs).unwrap();
        let r = counterfactual_regrets(&tree, &profile);
        // Player two facing heads: guessing heads loses 1 for player one.
        let p2 = tree.node(tree.child(GameTree::ROOT, 0)).infoset.unwrap();
        let range = tree.infoset(p2).range();
        assert!((r[range.start] + 1.0).abs() < 1e-12);
        assert!((r[range.start + 1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kuhn_cfr_plus_converges() {
        let tree = games::kuhn();
        let avg = run_cfr(&tree, 2000, true);
        assert!(exploitability(&tree, &avg) < 5e-3);
        let v = expected_utility(&tree, &avg, GameTree::ROOT);
        assert!((v + 1.0 / 18.0).abs() < 5e-3);
    }

    #[test]
    fn plain_cfr_decreases_exploitability() {
        let tree = games::kuhn();
        let early = run_cfr(&tree, 10, false);
        let late = run_cfr(&tree, 1000, false);
        assert!(exploitability(&tree, &late) < exploitability(&tree, &early));
    }

    #[test]
    fn node_count_per_iteration() {
        let tree = games::kuhn();
        let mut s = CfrSolver::new(&tree, CfrConfig::cfr_plus());
        assert_eq!(s.step(), 2 * tree.num_nodes() as u64);
        let mut s = CfrSolver::new(&tree, CfrConfig::cfr());
        assert_eq!(s.step(), tree.num_nodes() as u64);
    }
}
