use super::{GameTree, Owner, RUNTIME_TOLERANCE};

/// A behavioral strategy profile: one distribution per information set,
/// stored flat in infoset-offset order.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfile {
    probs: Vec<f64>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ProfileError {
    #[error("profile has {got} entries, tree needs {expected}")]
    Length { expected: usize, got: usize },
    #[error("distribution at infoset {key} sums to {sum}")]
    NotNormalized { key: String, sum: f64 },
    #[error("probability {value} at infoset {key} is outside [0, 1]")]
    OutOfRange { key: String, value: f64 },
}

impl StrategyProfile {
    pub fn uniform(tree: &GameTree) -> Self {
        let mut probs = vec![0.0; tree.num_infoset_actions()];
        for info in tree.infosets() {
            let p = 1.0 / info.num_actions as f64;
            probs[info.range()].iter_mut().for_each(|x| *x = p);
        }
        StrategyProfile { probs }
    }

    /// Wraps flat probabilities, checking every infoset distribution.
    pub fn from_vec(tree: &GameTree, probs: Vec<f64>) -> Result<Self, ProfileError> {
        let profile = StrategyProfile { probs };
        profile.validate(tree)?;
        Ok(profile)
    }

    pub(crate) fn from_vec_unchecked(probs: Vec<f64>) -> Self {
        StrategyProfile { probs }
    }

    pub fn validate(&self, tree: &GameTree) -> Result<(), ProfileError> {
        if self.probs.len() != tree.num_infoset_actions() {
            return Err(ProfileError::Length {
                expected: tree.num_infoset_actions(),
                got: self.probs.len(),
            });
        }
        for info in tree.infosets() {
            let dist = &self.probs[info.range()];
            if let Some(&value) = dist.iter().find(|&&p| !(-RUNTIME_TOLERANCE..=1.0 + RUNTIME_TOLERANCE).contains(&p)) {
                return Err(ProfileError::OutOfRange {
                    key: info.key.clone(),
                    value,
                });
            }
            let sum: f64 = dist.iter().sum();
            if (sum - 1.0).abs() > RUNTIME_TOLERANCE {
                return Err(ProfileError::NotNormalized {
                    key: info.key.clone(),
                    sum,
                });
            }
        }
        Ok(())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn infoset(&self, tree: &GameTree, infoset: usize) -> &[f64] {
        &self.probs[tree.infoset(infoset).range()]
    }

    pub fn infoset_mut(&mut self, tree: &GameTree, infoset: usize) -> &mut [f64] {
        &mut self.probs[tree.infoset(infoset).range()]
    }

    /// Probability of `action` at `node`, using the chance distribution at chance nodes.
    pub fn action_prob(&self, tree: &GameTree, node: usize, action: usize) -> f64 {
        let n = tree.node(node);
        match n.owner {
            Owner::Chance => tree.edge(n.first_edge + action).chance_prob,
            Owner::Player(_) => self.probs[tree.infoset(n.infoset.unwrap()).offset + action],
            Owner::Terminal => panic!("terminal node {node} has no actions"),
        }
    }

    /// Fills `out` with the action distribution at `node`.
    pub fn node_distribution(&self, tree: &GameTree, node: usize, out: &mut Vec<f64>) {
        out.clear();
        let n = tree.node(node);
        match n.owner {
            Owner::Chance => out.extend(tree.edges(node).iter().map(|e| e.chance_prob)),
            Owner::Player(_) => out.extend_from_slice(self.infoset(tree, n.infoset.unwrap())),
            Owner::Terminal => {}
        }
    }
}
