//! Counterfactual-value variance: empirical measurement over a frozen
//! strategy and baseline, plus the analytical bound and decomposition for
//! outcome sampling.

use rand_chacha::ChaCha8Rng;

use crate::baselines::BaselineStore;
use crate::game::{expected_utilities, reaches, GameTree, Owner, Player, Reach, StrategyProfile};
use crate::os::{walk_from, OsConfig, StrategySource, WalkParams};
use crate::pos::{walk_public_from, PosConfig, PublicWalkParams, UniformSuccessors};
use crate::sampling::{walk_rng, RngChooser, SampleError, SamplingScheme, MAX_ACTIONS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureSampler {
    Outcome(SamplingScheme),
    Public,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairVariance {
    pub infoset: usize,
    pub action: usize,
    pub variance: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceReport {
    pub pairs: Vec<PairVariance>,
    /// Mean variance over all (infoset, action) pairs.
    pub mean: f64,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum VarianceError {
    #[error("need at least 2 samples per pair, got {0}")]
    TooFewSamples(usize),
    #[error(transparent)]
    Sample(#[from] SampleError),
}

/// Unbiased (n - 1) sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
}

/// Samples of `sum over h in I of pi_{-i}(h) * v((ha))` for every pair,
/// with pairs ordered by infoset then action.
///
/// Outcome sampling: each sample forces `a` at every `h` in `I` and walks
/// one independent trajectory below each `(ha)`. Public sampling: each walk
/// starts at a successor public state and yields one sample for every pair
/// leading into it. Histories with zero opponent reach contribute nothing.
pub fn cfv_samples(
    tree: &GameTree,
    profile: &StrategyProfile,
    store: &BaselineStore,
    sampler: MeasureSampler,
    samples: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>, VarianceError> {
    let reach = reaches(tree, profile);
    let mut index = Vec::with_capacity(tree.infosets().len());
    let mut total = 0;
    for info in tree.infosets() {
        index.push(total);
        total += info.num_actions;
    }
    let mut out = vec![vec![0.0; samples]; total];
    match sampler {
        MeasureSampler::Outcome(scheme) => {
            for info in tree.infosets() {
                let i = info.owner;
                let members: Vec<(usize, f64)> = info
                    .members
                    .iter()
                    .map(|&h| (h, reach[h].others(i)))
                    .filter(|&(_, w)| w > 0.0)
                    .collect();
                let params = WalkParams {
                    config: OsConfig {
                        scheme,
                        ..OsConfig::default()
                    },
                    updating: Some(i),
                    perspective: i,
                    iteration: 1,
                };
                for a in 0..info.num_actions {
                    let pair = index[info.id] + a;
                    let mut chooser: RngChooser<ChaCha8Rng> = RngChooser::new(walk_rng(seed, pair as u64));
                    let mut pending = Vec::new();
                    for k in 0..samples {
                        for &(h, w) in &members {
                            let start = reach[h].extend(Owner::Player(i), profile.infoset(tree, info.id)[a]);
                            pending.clear();
                            let r = walk_from(
                                tree,
                                StrategySource::Frozen(profile),
                                store,
                                params,
                                tree.child(h, a),
                                start,
                                &mut chooser,
                                &mut pending,
                                None,
                            )?;
                            out[pair][k] += w * r.value;
                        }
                    }
                }
            }
        }
        MeasureSampler::Public => {
            let params = PublicWalkParams {
                config: PosConfig::default(),
                iteration: 1,
                successors: &UniformSuccessors,
            };
            for state in tree.public_states() {
                let Some(pred) = state.predecessor else { continue };
                if !matches!(tree.public_state(pred).owner, Owner::Player(_)) {
                    continue;
                }
                // (pair, member position, opponent reach of the parent) feeding this state.
                let mut feeds = Vec::new();
                for (m, &child) in state.members.iter().enumerate() {
                    let h = tree.node(child).parent.unwrap();
                    let n = tree.node(h);
                    let Owner::Player(i) = n.owner else { unreachable!() };
                    let a = tree.action_to(h, child).unwrap();
                    let w = reach[h].others(i);
                    if w > 0.0 {
                        feeds.push((index[n.infoset.unwrap()] + a, m, w, i));
                    }
                }
                if feeds.is_empty() {
                    continue;
                }
                let start: Vec<Reach> = state.members.iter().map(|&h| reach[h]).collect();
                let mut chooser: RngChooser<ChaCha8Rng> = RngChooser::new(walk_rng(seed, state.id as u64));
                let mut pending = Vec::new();
                for k in 0..samples {
                    pending.clear();
                    let r = walk_public_from(
                        tree,
                        StrategySource::Frozen(profile),
                        store,
                        params,
                        state.id,
                        &start,
                        &mut chooser,
                        &mut pending,
                        None,
                    )?;
                    for &(pair, m, w, i) in &feeds {
                        out[pair][k] += w * r.values[m][i.index()];
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Empirical variance of counterfactual values for every (infoset, action)
/// pair under a frozen profile and baseline, averaged over pairs.
pub fn measure_cfv_variance(
    tree: &GameTree,
    profile: &StrategyProfile,
    store: &BaselineStore,
    sampler: MeasureSampler,
    samples_per_pair: usize,
    seed: u64,
) -> Result<VarianceReport, VarianceError> {
    if samples_per_pair < 2 {
        return Err(VarianceError::TooFewSamples(samples_per_pair));
    }
    let samples = cfv_samples(tree, profile, store, sampler, samples_per_pair, seed)?;
    let mut pairs = Vec::with_capacity(samples.len());
    let mut it = samples.iter();
    for info in tree.infosets() {
        for action in 0..info.num_actions {
            let xs = it.next().unwrap();
            pairs.push(PairVariance {
                infoset: info.id,
                action,
                variance: sample_variance(xs),
                samples: xs.len(),
            });
        }
    }
    let mean = pairs.iter().map(|p| p.variance).sum::<f64>() / pairs.len() as f64;
    Ok(VarianceReport { pairs, mean })
}

/// Outcome-sampling probability of every edge, for `updating` as the updating player.
pub fn sampling_probabilities(
    tree: &GameTree,
    profile: &StrategyProfile,
    scheme: SamplingScheme,
    updating: Player,
) -> Vec<f64> {
    let mut out = vec![0.0; tree.num_edges()];
    let mut strategy = Vec::new();
    let mut probs = [0.0; MAX_ACTIONS];
    for (h, n) in tree.nodes().iter().enumerate() {
        if n.is_terminal() {
            continue;
        }
        profile.node_distribution(tree, h, &mut strategy);
        scheme.distribution(n.owner, &strategy, Some(updating), &mut probs);
        out[n.edge_range()].copy_from_slice(&probs[..n.num_actions]);
    }
    out
}

fn edge_strategy(tree: &GameTree, profile: &StrategyProfile) -> Vec<f64> {
    let mut out = vec![0.0; tree.num_edges()];
    for (h, n) in tree.nodes().iter().enumerate() {
        for a in 0..n.num_actions {
            out[n.first_edge + a] = profile.action_prob(tree, h, a);
        }
    }
    out
}

/// Right-hand side of the variance bound for the action value at `(node, action)`:
/// the sum over pairs `(h'a')` at or below `(ha)` of
/// `pi_sigma((ha), (h'a'))^2 / pi_s(h, (h'a')) * (v(h'a') - b(h', a'))^2`.
///
/// `baseline` and `sampling` are indexed by edge.
pub fn variance_bound(
    tree: &GameTree,
    profile: &StrategyProfile,
    baseline: &[f64],
    sampling: &[f64],
    node: usize,
    action: usize,
) -> f64 {
    let values = expected_utilities(tree, profile);
    let sigma = edge_strategy(tree, profile);
    let edge = tree.node(node).first_edge + action;
    let ratio = 1.0 / sampling[edge];
    let own = values[tree.edge(edge).child] - baseline[edge];
    let mut total = ratio * own * own;
    let mut stack = vec![(tree.edge(edge).child, ratio)];
    while let Some((x, r)) = stack.pop() {
        for e in tree.node(x).edge_range() {
            let r2 = r * sigma[e] * sigma[e] / sampling[e];
            let d = values[tree.edge(e).child] - baseline[e];
            total += r2 * d * d;
            stack.push((tree.edge(e).child, r2));
        }
    }
    total
}

/// Exact variance of the sampled value at `node`, decomposed over the
/// subtree: the sum over `h'` at or below `node` of
/// `pi_sigma(h, h')^2 / pi_s(h, h') * Var_{a' ~ s}[sigma/s * (v(h'a') - b(h', a'))]`.
pub fn exact_variance_decomposition(
    tree: &GameTree,
    profile: &StrategyProfile,
    baseline: &[f64],
    sampling: &[f64],
    node: usize,
) -> f64 {
    let values = expected_utilities(tree, profile);
    let sigma = edge_strategy(tree, profile);
    let mut total = 0.0;
    let mut stack = vec![(node, 1.0)];
    while let Some((x, r)) = stack.pop() {
        let n = tree.node(x);
        if n.is_terminal() {
            continue;
        }
        let (mut m1, mut m2) = (0.0, 0.0);
        for e in n.edge_range() {
            let s = sampling[e];
            let y = sigma[e] / s * (values[tree.edge(e).child] - baseline[e]);
            m1 += s * y;
            m2 += s * y * y;
        }
        total += r * (m2 - m1 * m1);
        for e in n.edge_range() {
            stack.push((tree.edge(e).child, r * sigma[e] * sigma[e] / sampling[e]));
        }
    }
    total
}
