use std::str::FromStr;

use crate::game::{GameTree, InfoSet, StrategyProfile};

/// Writes the regret-matching distribution of `regrets` into `out`:
/// proportional to the positive parts, uniform when none is positive.
pub fn regret_matching_into(regrets: &[f64], out: &mut [f64]) {
    let positive: f64 = regrets.iter().map(|r| r.max(0.0)).sum();
    if positive > 0.0 {
        for (o, r) in out.iter_mut().zip(regrets) {
            *o = r.max(0.0) / positive;
        }
    } else {
        let uniform = 1.0 / regrets.len() as f64;
        out[..regrets.len()].iter_mut().for_each(|o| *o = uniform);
    }
}

pub fn regret_matching(regrets: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; regrets.len()];
    regret_matching_into(regrets, &mut out);
    out
}

/// How the average strategy accumulates the current strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyAveraging {
    /// Reach-weighted sum, importance-corrected when sampling.
    Weighted,
    /// The literal `(t-1)/t` running blend at visited infosets.
    Pseudocode,
}

impl FromStr for StrategyAveraging {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "weighted" => Ok(StrategyAveraging::Weighted),
            "pseudocode" => Ok(StrategyAveraging::Pseudocode),
            _ => Err(format!("unknown strategy averaging '{s}'")),
        }
    }
}

impl std::fmt::Display for StrategyAveraging {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StrategyAveraging::Weighted => "weighted",
            StrategyAveraging::Pseudocode => "pseudocode",
        })
    }
}

/// Cumulative regrets and average-strategy accumulators per (infoset, action).
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTable {
    cumulative: Vec<f64>,
    average: Vec<f64>,
    iteration: u64,
}

impl RegretTable {
    pub fn new(tree: &GameTree) -> Self {
        RegretTable {
            cumulative: vec![0.0; tree.num_infoset_actions()],
            average: vec![0.0; tree.num_infoset_actions()],
            iteration: 0,
        }
    }

    /// Iteration currently being run (0 before the first).
    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    /// Advances to the next iteration and returns its 1-based index.
    pub fn begin_iteration(&mut self) -> u64 {
        self.iteration += 1;
        self.iteration
    }

    pub fn cumulative(&self, info: &InfoSet) -> &[f64] {
        &self.cumulative[info.range()]
    }

    pub fn average_accumulator(&self, info: &InfoSet) -> &[f64] {
        &self.average[info.range()]
    }

    /// Adds regret deltas; in plus mode every entry is clamped at zero afterwards.
    pub fn accumulate(&mut self, info: &InfoSet, deltas: &[f64], plus: bool) {
        for (c, d) in self.cumulative[info.range()].iter_mut().zip(deltas) {
            *c += d;
            if plus && *c < 0.0 {
                *c = 0.0;
            }
        }
    }

    pub fn current_strategy_into(&self, info: &InfoSet, out: &mut [f64]) {
        regret_matching_into(&self.cumulative[info.range()], out);
    }

    pub fn current_strategy(&self, info: &InfoSet) -> Vec<f64> {
        regret_matching(&self.cumulative[info.range()])
    }

    /// Adds `weight * current` to the average accumulator.
    pub fn update_average(&mut self, info: &InfoSet, current: &[f64], weight: f64) {
        debug_assert!(weight >= 0.0);
        for (s, p) in self.average[info.range()].iter_mut().zip(current) {
            *s += weight * p;
        }
    }

    /// Replaces the accumulator by `(t-1)/t * old + current / t`.
    pub fn blend_average(&mut self, info: &InfoSet, current: &[f64], t: u64) {
        let t = t as f64;
        for (s, p) in self.average[info.range()].iter_mut().zip(current) {
            *s = (t - 1.0) / t * *s + p / t;
        }
    }

    pub fn current_profile(&self, tree: &GameTree) -> StrategyProfile {
        let mut probs = vec![0.0; tree.num_infoset_actions()];
        for info in tree.infosets() {
            regret_matching_into(&self.cumulative[info.range()], &mut probs[info.range()]);
        }
        StrategyProfile::from_vec_unchecked(probs)
    }

    /// Normalized average strategy; infosets never accumulated are uniform.
    pub fn average_profile(&self, tree: &GameTree) -> StrategyProfile {
        let mut probs = vec![0.0; tree.num_infoset_actions()];
        for info in tree.infosets() {
            let acc = &self.average[info.range()];
            let total: f64 = acc.iter().sum();
            let out = &mut probs[info.range()];
            if total > 0.0 {
                for (o, a) in out.iter_mut().zip(acc) {
                    *o = a / total;
                }
            } else {
                out.iter_mut().for_each(|o| *o = 1.0 / info.num_actions as f64);
            }
        }
        StrategyProfile::from_vec_unchecked(probs)
    }

    pub fn cumulative_slice(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn average_slice(&self) -> &[f64] {
        &self.average
    }
}
