//! Action choice for sampled walks.
//!
//! Walks never touch an RNG directly: they hand a probability vector to a
//! [`Chooser`]. Production runs use [`RngChooser`]; tests replay fixed
//! trajectories with [`ScriptedChooser`] to enumerate sampling distributions
//! exactly.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{GameTree, Owner, Player};

/// Largest action count the sampled walkers support.
pub const MAX_ACTIONS: usize = 16;

pub trait Chooser {
    /// Picks an index with probability `probs[k]`.
    fn choose(&mut self, probs: &[f64]) -> usize;
}

/// Inverse-CDF sampling from one uniform draw per decision.
pub struct RngChooser<R: Rng> {
    rng: R,
}

impl<R: Rng> RngChooser<R> {
    pub fn new(rng: R) -> Self {
        RngChooser { rng }
    }
}

/// Index selected by the uniform draw `u` under `probs`. Never returns a
/// zero-probability index.
pub fn inverse_cdf(probs: &[f64], u: f64) -> usize {
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

impl<R: Rng> Chooser for RngChooser<R> {
    fn choose(&mut self, probs: &[f64]) -> usize {
        let u: f64 = self.rng.gen();
        inverse_cdf(probs, u)
    }
}

/// Replays a fixed list of choices.
#[derive(Debug, Clone)]
pub struct ScriptedChooser {
    script: Vec<usize>,
    pos: usize,
}

impl ScriptedChooser {
    pub fn new(script: Vec<usize>) -> Self {
        ScriptedChooser { script, pos: 0 }
    }
}

impl Chooser for ScriptedChooser {
    fn choose(&mut self, _: &[f64]) -> usize {
        let a = self.script[self.pos];
        self.pos += 1;
        a
    }
}

/// Generator for one walk: seeded by the run seed, with the walk index as
/// the stream so any walk can be replayed on its own.
pub fn walk_rng(seed: u64, walk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(walk);
    rng
}

/// How outcome sampling picks actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingScheme {
    /// Uniform over the actions of both players; chance follows its distribution.
    Uniform,
    /// Uniform at the updating player's histories, on-policy elsewhere.
    OpponentOnPolicy,
}

impl FromStr for SamplingScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(SamplingScheme::Uniform),
            "opponent_onpolicy" => Ok(SamplingScheme::OpponentOnPolicy),
            _ => Err(format!("unknown sampling scheme '{s}'")),
        }
    }
}

impl std::fmt::Display for SamplingScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SamplingScheme::Uniform => "uniform",
            SamplingScheme::OpponentOnPolicy => "opponent_onpolicy",
        })
    }
}

impl SamplingScheme {
    /// Writes the sampling distribution at a history owned by `owner` whose
    /// current strategy (or chance distribution) is `strategy`.
    ///
    /// With simultaneous updates (`updating == None`) on-policy sampling has
    /// no updating player and degenerates to uniform at player histories.
    pub fn distribution(&self, owner: Owner, strategy: &[f64], updating: Option<Player>, out: &mut [f64]) {
        let k = strategy.len();
        match (owner, self) {
            (Owner::Chance, _) => out[..k].copy_from_slice(strategy),
            (Owner::Player(p), SamplingScheme::OpponentOnPolicy) if updating.is_some_and(|u| u != p) => {
                out[..k].copy_from_slice(strategy)
            }
            (Owner::Player(_), _) => out[..k].iter_mut().for_each(|x| *x = 1.0 / k as f64),
            (Owner::Terminal, _) => {}
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SampleError {
    #[error("sampled action {action} at node {node} has probability {prob}")]
    ZeroProbability { node: usize, action: usize, prob: f64 },
    #[error("game needs {0} actions per node, walkers support {MAX_ACTIONS}")]
    TooManyActions(usize),
    #[error("unsupported combination: {0}")]
    Unsupported(String),
}

/// Samples one action at `node` and returns it with its sampling probability.
pub fn sample_action<C: Chooser>(
    tree: &GameTree,
    scheme: SamplingScheme,
    node: usize,
    strategy: &[f64],
    updating: Option<Player>,
    chooser: &mut C,
) -> Result<(usize, f64), SampleError> {
    let mut probs = [0.0; MAX_ACTIONS];
    let k = strategy.len();
    scheme.distribution(tree.node(node).owner, strategy, updating, &mut probs);
    let a = chooser.choose(&probs[..k]);
    let q = probs[a];
    if q <= 0.0 {
        return Err(SampleError::ZeroProbability { node, action: a, prob: q });
    }
    Ok((a, q))
}

pub(crate) fn check_width(tree: &GameTree) -> Result<(), SampleError> {
    let width = tree.max_actions();
    if width > MAX_ACTIONS {
        return Err(SampleError::TooManyActions(width));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games;

    #[test]
    fn uniform_over_three_actions() {
        let mut out = [0.0; 3];
        SamplingScheme::Uniform.distribution(Owner::Player(Player::One), &[0.2, 0.3, 0.5], None, &mut out);
        assert!(out.iter().all(|&p| p == 1.0 / 3.0));
    }

    #[test]
    fn chance_is_on_policy() {
        let mut out = [0.0; 2];
        for scheme in [SamplingScheme::Uniform, SamplingScheme::OpponentOnPolicy] {
            scheme.distribution(Owner::Chance, &[0.6, 0.4], Some(Player::One), &mut out);
            assert_eq!(out, [0.6, 0.4]);
        }
    }

    #[test]
    fn opponent_follows_strategy() {
        let mut out = [0.0; 2];
        let scheme = SamplingScheme::OpponentOnPolicy;
        scheme.distribution(Owner::Player(Player::Two), &[0.9, 0.1], Some(Player::One), &mut out);
        assert_eq!(out, [0.9, 0.1]);
        scheme.distribution(Owner::Player(Player::One), &[0.9, 0.1], Some(Player::One), &mut out);
        assert_eq!(out, [0.5, 0.5]);
    }

    #[test]
    fn zero_probability_sample_is_an_error() {
        let tree = games::kuhn();
        let deal = tree.child(GameTree::ROOT, 0);
        let p2 = tree.child(deal, 0);
        let mut chooser = ScriptedChooser::new(vec![1]);
        let err = sample_action(
            &tree,
            SamplingScheme::OpponentOnPolicy,
            p2,
            &[1.0, 0.0],
            Some(Player::One),
            &mut chooser,
        );
        assert!(matches!(err, Err(SampleError::ZeroProbability { .. })));
    }

    #[test]
    fn inverse_cdf_skips_zero_mass() {
        assert_eq!(inverse_cdf(&[0.0, 1.0, 0.0], 0.999_999), 1);
        assert_eq!(inverse_cdf(&[0.5, 0.5], 0.25), 0);
        assert_eq!(inverse_cdf(&[0.5, 0.5], 0.75), 1);
        assert_eq!(inverse_cdf(&[0.5, 0.5, 0.0], 1.0), 1);
    }

    #[test]
    fn walk_streams_are_reproducible() {
        let a: Vec<f64> = (0..4).map(|_| walk_rng(7, 3).gen()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let b: f64 = walk_rng(7, 4).gen();
        assert_ne!(a[0], b);
    }
}
