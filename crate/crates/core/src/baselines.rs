//! Baseline functions `b(h, a)` and the baseline-corrected value rule.

use std::str::FromStr;

use crate::game::{expected_utilities, GameError, GameTree, Player, StrategyProfile};
use crate::games::always_call_values;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    Zero,
    /// Values of a fixed known profile (always call) computed once.
    Static,
    LearnedHistory,
    /// Keyed by the updating player's augmented infoset and action label.
    LearnedInfoset,
    Predictive,
    /// Exact values of the current profile, recomputed every iteration.
    Oracle,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 6] = [
        BaselineKind::Zero,
        BaselineKind::Static,
        BaselineKind::LearnedHistory,
        BaselineKind::LearnedInfoset,
        BaselineKind::Predictive,
        BaselineKind::Oracle,
    ];

    pub fn is_learned(self) -> bool {
        matches!(self, BaselineKind::LearnedHistory | BaselineKind::LearnedInfoset)
    }
}

impl FromStr for BaselineKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" | "zero" => Ok(BaselineKind::Zero),
            "static" => Ok(BaselineKind::Static),
            "learned_history" => Ok(BaselineKind::LearnedHistory),
            "learned_infoset" => Ok(BaselineKind::LearnedInfoset),
            "predictive" => Ok(BaselineKind::Predictive),
            "oracle" => Ok(BaselineKind::Oracle),
            _ => Err(format!("unknown baseline '{s}'")),
        }
    }
}

impl std::fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BaselineKind::Zero => "none",
            BaselineKind::Static => "static",
            BaselineKind::LearnedHistory => "learned_history",
            BaselineKind::LearnedInfoset => "learned_infoset",
            BaselineKind::Predictive => "predictive",
            BaselineKind::Oracle => "oracle",
        })
    }
}

/// Weighting of past samples in learned baselines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Averaging {
    /// Mean over the iterations at which the entry was sampled.
    Simple,
    /// `new = old * (1 - alpha) + alpha * sample`.
    Exponential(f64),
}

impl FromStr for Averaging {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "simple" {
            return Ok(Averaging::Simple);
        }
        let alpha: f64 = s
            .strip_prefix("exp:")
            .and_then(|a| a.parse().ok())
            .ok_or_else(|| format!("unknown averaging '{s}'"))?;
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(format!("exponential alpha {alpha} outside (0, 1]"));
        }
        Ok(Averaging::Exponential(alpha))
    }
}

impl std::fmt::Display for Averaging {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Averaging::Simple => f.write_str("simple"),
            Averaging::Exponential(a) => write!(f, "exp:{a}"),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum BaselineError {
    #[error("sampled action has sampling probability {0}")]
    NonPositiveSampleProb(f64),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Baseline-corrected value of one action: `b + (child - b) / q` if sampled, `b` otherwise.
pub fn corrected_value(b: f64, child: f64, sampled: bool, q: f64) -> Result<f64, BaselineError> {
    if !sampled {
        return Ok(b);
    }
    if q <= 0.0 {
        return Err(BaselineError::NonPositiveSampleProb(q));
    }
    Ok(b + (child - b) / q)
}

pub fn mix_by_strategy(values: &[f64], strategy: &[f64]) -> f64 {
    values.iter().zip(strategy).map(|(v, p)| v * p).sum()
}

/// Pending write produced by a walk and applied once it finishes.
///
/// Walks never read an entry they have written in the same walk (every
/// key on a trajectory is distinct), so deferring writes is exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineUpdate {
    /// A learned sample for a value key.
    Learned { key: usize, sample: f64 },
    /// Predictive overwrite of an edge.
    Predictive { edge: usize, value: f64 },
}

/// Baseline values for one run.
///
/// History-keyed kinds index by edge; the learned infoset kind indexes by
/// augmented-infoset slot (see [`GameTree::aug_slot`]).
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineStore {
    kind: BaselineKind,
    averaging: Averaging,
    values: Vec<f64>,
    counts: Vec<u64>,
}

impl BaselineStore {
    pub fn new(tree: &GameTree, kind: BaselineKind, averaging: Averaging) -> Result<Self, BaselineError> {
        let values = match kind {
            BaselineKind::Zero => Vec::new(),
            BaselineKind::Static => always_call_values(tree)?,
            BaselineKind::LearnedInfoset => vec![0.0; tree.num_aug_slots()],
            _ => vec![0.0; tree.num_edges()],
        };
        let counts = vec![0; values.len()];
        Ok(BaselineStore {
            kind,
            averaging,
            values,
            counts,
        })
    }

    /// A store holding arbitrary values (edge-indexed, or slot-indexed for
    /// the learned infoset kind). Used to check estimators against fixed baselines.
    pub fn with_values(tree: &GameTree, kind: BaselineKind, values: Vec<f64>) -> Self {
        let expected = match kind {
            BaselineKind::Zero => 0,
            BaselineKind::LearnedInfoset => tree.num_aug_slots(),
            _ => tree.num_edges(),
        };
        assert_eq!(values.len(), expected, "baseline table size");
        let counts = vec![0; values.len()];
        BaselineStore {
            kind,
            averaging: Averaging::Simple,
            values,
            counts,
        }
    }

    pub fn kind(&self) -> BaselineKind {
        self.kind
    }

    pub fn averaging(&self) -> Averaging {
        self.averaging
    }

    pub fn raw_values(&self) -> &[f64] {
        &self.values
    }

    /// Number of value streams a public-state walk keeps: the learned infoset
    /// baseline differs by perspective, every other kind does not.
    pub fn streams(&self) -> usize {
        if self.kind == BaselineKind::LearnedInfoset {
            2
        } else {
            1
        }
    }

    /// Storage key of `b(h, a)` for the edge `(h, a)` as seen by `perspective`.
    pub fn key(&self, tree: &GameTree, edge: usize, perspective: Player) -> Option<usize> {
        match self.kind {
            BaselineKind::Zero => None,
            BaselineKind::LearnedInfoset => Some(tree.aug_slot(perspective, edge)),
            _ => Some(edge),
        }
    }

    #[inline]
    pub fn value(&self, tree: &GameTree, edge: usize, perspective: Player) -> f64 {
        match self.kind {
            BaselineKind::Zero => 0.0,
            BaselineKind::LearnedInfoset => self.values[tree.aug_slot(perspective, edge)],
            _ => self.values[edge],
        }
    }

    /// `b(h, a)` for `node`'s action `action`.
    pub fn baseline_value(&self, tree: &GameTree, node: usize, action: usize, perspective: Player) -> f64 {
        self.value(tree, tree.node(node).first_edge + action, perspective)
    }

    /// Baseline of every edge as seen by `perspective`.
    pub fn edge_values(&self, tree: &GameTree, perspective: Player) -> Vec<f64> {
        (0..tree.num_edges()).map(|e| self.value(tree, e, perspective)).collect()
    }

    /// Folds one sample into a learned entry.
    pub fn update_learned(&mut self, key: usize, sample: f64) {
        debug_assert!(self.kind.is_learned());
        let v = &mut self.values[key];
        match self.averaging {
            Averaging::Simple => {
                self.counts[key] += 1;
                *v += (sample - *v) / self.counts[key] as f64;
            }
            Averaging::Exponential(alpha) => *v = *v * (1.0 - alpha) + alpha * sample,
        }
    }

    pub fn update_predictive(&mut self, edge: usize, value: f64) {
        debug_assert_eq!(self.kind, BaselineKind::Predictive);
        self.values[edge] = value;
    }

    /// Public-state update of a learned infoset entry from
    /// `(opponent reach, child value)` pairs of the member histories.
    /// Skipped when every reach is zero.
    pub fn update_learned_infoset_pos(&mut self, key: usize, samples: impl IntoIterator<Item = (f64, f64)>) {
        let (num, den) = samples
            .into_iter()
            .fold((0.0, 0.0), |(n, d), (w, v)| (n + w * v, d + w));
        if den > 0.0 {
            self.update_learned(key, num / den);
        }
    }

    pub fn apply(&mut self, update: BaselineUpdate) {
        match update {
            BaselineUpdate::Learned { key, sample } => self.update_learned(key, sample),
            BaselineUpdate::Predictive { edge, value } => self.update_predictive(edge, value),
        }
    }

    /// Sets every history-keyed entry to the child value under `profile`.
    pub fn seed_from_profile(&mut self, tree: &GameTree, profile: &StrategyProfile) {
        if matches!(self.kind, BaselineKind::Zero | BaselineKind::LearnedInfoset) {
            return;
        }
        let values = expected_utilities(tree, profile);
        for (e, v) in self.values.iter_mut().enumerate() {
            *v = values[tree.edge(e).child];
        }
    }

    /// Oracle refresh: `b(h, a)` becomes the exact value of `(ha)` under `profile`.
    pub fn refresh_oracle(&mut self, tree: &GameTree, profile: &StrategyProfile) {
        if self.kind == BaselineKind::Oracle {
            self.seed_from_profile(tree, profile);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games;

    #[test]
    fn corrected_value_examples() {
        assert_eq!(corrected_value(3.0, 5.0, true, 0.5).unwrap(), 7.0);
        assert_eq!(corrected_value(2.0, 9.0, false, 0.0).unwrap(), 2.0);
        let expectation = 0.5 * corrected_value(3.0, 5.0, true, 0.5).unwrap() + 0.5 * 3.0;
        assert_eq!(expectation, 5.0);
        assert!(corrected_value(1.0, 1.0, true, 0.0).is_err());
    }

    #[test]
    fn mix_examples() {
        assert_eq!(mix_by_strategy(&[1.0, 3.0], &[0.5, 0.5]), 2.0);
        assert_eq!(mix_by_strategy(&[4.0, -7.0, 2.0], &[0.0, 1.0, 0.0]), -7.0);
        assert_eq!(mix_by_strategy(&[0.0, 0.0], &[0.3, 0.7]), 0.0);
    }

    fn learned(averaging: Averaging) -> BaselineStore {
        let tree = games::kuhn();
        BaselineStore::new(&tree, BaselineKind::LearnedHistory, averaging).unwrap()
    }

    #[test]
    fn simple_averaging() {
        let mut s = learned(Averaging::Simple);
        s.update_learned(3, 2.0);
        s.update_learned(3, 4.0);
        assert_eq!(s.raw_values()[3], 3.0);
        s.update_learned(4, -1.5);
        assert_eq!(s.raw_values()[4], -1.5);
    }

    #[test]
    fn exponential_averaging() {
        let mut s = learned(Averaging::Exponential(0.5));
        s.update_learned(0, 4.0);
        assert_eq!(s.raw_values()[0], 2.0);
    }

    #[test]
    fn infoset_pos_weighting() {
        let tree = games::kuhn();
        let mut s = BaselineStore::new(&tree, BaselineKind::LearnedInfoset, Averaging::Simple).unwrap();
        s.update_learned_infoset_pos(0, [(0.5, 2.0), (0.5, 4.0)]);
        assert_eq!(s.raw_values()[0], 3.0);
        s.update_learned_infoset_pos(1, [(1.0, 5.0), (0.0, 9.0)]);
        assert_eq!(s.raw_values()[1], 5.0);
        s.update_learned_infoset_pos(2, [(0.0, 5.0)]);
        assert_eq!(s.raw_values()[2], 0.0);
        s.update_learned_infoset_pos(2, [(0.25, -1.0)]);
        assert_eq!(s.raw_values()[2], -1.0);
    }

    #[test]
    fn predictive_overwrites_only_its_edge() {
        let tree = games::kuhn();
        let mut s = BaselineStore::new(&tree, BaselineKind::Predictive, Averaging::Simple).unwrap();
        s.update_predictive(5, -2.0);
        assert_eq!(s.raw_values()[5], -2.0);
        assert!(s.raw_values().iter().enumerate().all(|(e, &v)| e == 5 || v == 0.0));
    }

    #[test]
    fn static_values_on_leduc() {
        let tree = games::leduc(0.0);
        let s = BaselineStore::new(&tree, BaselineKind::Static, Averaging::Simple).unwrap();
        let expected = always_call_values(&tree).unwrap();
        assert_eq!(s.edge_values(&tree, Player::One), expected);
    }

    #[test]
    fn learned_infoset_shares_entries_within_augmented_infoset() {
        let tree = games::kuhn();
        let s = BaselineStore::with_values(
            &tree,
            BaselineKind::LearnedInfoset,
            (0..tree.num_aug_slots()).map(|k| k as f64).collect(),
        );
        for aug in tree.augmented_infosets() {
            let p = aug.player;
            for &h in &aug.members {
                for a in 0..tree.node(h).num_actions {
                    let e = tree.node(h).first_edge + a;
                    let label = tree.edge(e).label;
                    let k = aug.labels.iter().position(|&l| l == label).unwrap();
                    assert_eq!(s.value(&tree, e, p), (aug.slot_offset + k) as f64);
                }
            }
        }
    }

    #[test]
    fn zero_reads_zero() {
        let tree = games::kuhn();
        let s = BaselineStore::new(&tree, BaselineKind::Zero, Averaging::Simple).unwrap();
        assert!(s.edge_values(&tree, Player::Two).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn oracle_refresh_matches_expected_utilities() {
        let tree = games::tiny();
        let mut s = BaselineStore::new(&tree, BaselineKind::Oracle, Averaging::Simple).unwrap();
        let profile = StrategyProfile::uniform(&tree);
        s.refresh_oracle(&tree, &profile);
        let values = expected_utilities(&tree, &profile);
        for e in 0..tree.num_edges() {
            assert_eq!(s.value(&tree, e, Player::One), values[tree.edge(e).child]);
        }
    }

    #[test]
    fn parse_config_values() {
        assert_eq!("none".parse::<BaselineKind>().unwrap(), BaselineKind::Zero);
        assert_eq!("exp:0.5".parse::<Averaging>().unwrap(), Averaging::Exponential(0.5));
        assert!("exp:0".parse::<Averaging>().is_err());
        assert!("weird".parse::<BaselineKind>().is_err());
        for k in BaselineKind::ALL {
            assert_eq!(k.to_string().parse::<BaselineKind>().unwrap(), k);
        }
    }
}
