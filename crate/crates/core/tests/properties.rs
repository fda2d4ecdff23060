mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vrcfr::baselines::{corrected_value, BaselineKind};
use vrcfr::experiment::{checkpoint_schedule, RunConfig};
use vrcfr::game::{expected_utilities, exploitability, GameTree, Player, Reach};
use vrcfr::games;
use vrcfr::sampling::SamplingScheme;
use vrcfr::solver::{regret_matching, RegretTable};
use vrcfr::variance::{exact_variance_decomposition, sampling_probabilities, variance_bound};

fn scheme(k: u8) -> SamplingScheme {
    if k.is_multiple_of(2) {
        SamplingScheme::Uniform
    } else {
        SamplingScheme::OpponentOnPolicy
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 48,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn corrected_values_are_unbiased_per_action(b in -5.0..5.0f64, child in -5.0..5.0f64, q in 0.01..1.0f64) {
        let e = q * corrected_value(b, child, true, q).unwrap() + (1.0 - q) * corrected_value(b, child, false, q).unwrap();
        prop_assert!((e - child).abs() <= 1e-9);
    }

    #[test]
    fn regret_matching_is_a_distribution(r in prop::collection::vec(-10.0..10.0f64, 1..8)) {
        let s = regret_matching(&r);
        prop_assert!((s.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        if r.iter().any(|&x| x > 0.0) {
            for (p, x) in s.iter().zip(&r) {
                prop_assert!(*x > 0.0 || *p == 0.0);
            }
        }
    }

    #[test]
    fn average_is_scale_invariant(w in prop::collection::vec(0.01..1.0f64, 3), c in 0.001..1000.0f64) {
        let tree = games::kuhn();
        let info = &tree.infosets()[0];
        let total: f64 = w[..info.num_actions].iter().sum();
        let sigma: Vec<f64> = w[..info.num_actions].iter().map(|x| x / total).collect();
        let (mut a, mut b) = (RegretTable::new(&tree), RegretTable::new(&tree));
        a.update_average(info, &sigma, 1.0);
        b.update_average(info, &sigma, c);
        let (pa, pb) = (a.average_profile(&tree), b.average_profile(&tree));
        for (x, y) in pa.infoset(&tree, 0).iter().zip(pb.infoset(&tree, 0)) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn values_and_exploitability_on_random_profiles(seed in any::<u64>()) {
        for tree in [games::tiny(), games::kuhn()] {
            let profile = random_profile(&tree, &mut ChaCha8Rng::seed_from_u64(seed));
            let fast = expected_utilities(&tree, &profile);
            let slow = oracle_values(&tree, &profile);
            for (x, y) in fast.iter().zip(&slow) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
            prop_assert!(exploitability(&tree, &profile) >= -1e-9);
        }
    }

    #[test]
    fn tiny_estimates_are_unbiased(seed in any::<u64>(), k in 0..6usize, s in any::<u8>()) {
        let tree = games::tiny();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let profile = random_profile(&tree, &mut rng);
        let store = random_store(&tree, BaselineKind::ALL[k], &mut rng);
        let exact = oracle_values(&tree, &profile);
        let updating = Player::from_index(usize::from(s / 2 % 2));
        let params = frozen_params(scheme(s), Some(updating), updating);
        for h in (0..tree.num_nodes()).filter(|&h| !tree.node(h).is_terminal()) {
            let outcomes = enumerate_os(&tree, &profile, &store, params, h, Reach::ROOT);
            for a in 0..tree.node(h).num_actions {
                let mean: f64 = outcomes.iter().map(|o| o.prob * o.top().action_values[a]).sum();
                prop_assert!((mean - exact[tree.child(h, a)]).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn variance_bound_and_decomposition(seed in any::<u64>(), s in any::<u8>()) {
        let tree = games::tiny();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let profile = random_profile(&tree, &mut rng);
        let store = random_store(&tree, BaselineKind::LearnedHistory, &mut rng);
        let updating = Player::from_index(usize::from(s / 2 % 2));
        let params = frozen_params(scheme(s), Some(updating), updating);
        let baseline = store.edge_values(&tree, updating);
        let sampling = sampling_probabilities(&tree, &profile, scheme(s), updating);
        for h in (0..tree.num_nodes()).filter(|&h| !tree.node(h).is_terminal()) {
            let outcomes = enumerate_os(&tree, &profile, &store, params, h, Reach::ROOT);
            for a in 0..tree.node(h).num_actions {
                let (_, var) = moments(outcomes.iter().map(|o| (o.prob, o.top().action_values[a])));
                prop_assert!(var <= variance_bound(&tree, &profile, &baseline, &sampling, h, a) + 1e-12);
            }
            let (_, var) = moments(outcomes.iter().map(|o| (o.prob, o.top().value)));
            prop_assert!((var - exact_variance_decomposition(&tree, &profile, &baseline, &sampling, h)).abs() <= 1e-10);
        }
    }

    #[test]
    fn checkpoints_are_increasing_and_end_at_total(t in 1..10_000_000u64, k in 1..40usize) {
        let c = checkpoint_schedule(t, k);
        prop_assert!(!c.is_empty() && c.len() <= k);
        prop_assert_eq!(*c.last().unwrap(), t);
        prop_assert!(c.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(c[0] >= 1);
    }

    #[test]
    fn config_round_trips(
        game in prop::sample::select(vec!["kuhn", "leduc", "tiny"]),
        baseline in prop::sample::select(vec!["none", "static", "learned_history", "learned_infoset", "predictive", "oracle"]),
        sampler in prop::sample::select(vec!["os", "pos"]),
        averaging in prop::sample::select(vec!["simple", "exp:0.5", "exp:1"]),
        iterations in 1..100_000u64,
        seeds in prop::collection::vec(any::<u64>(), 1..4),
    ) {
        prop_assume!(!(game == "tiny" && baseline == "static"));
        let updates = if sampler == "pos" { "simultaneous" } else { "alternating" };
        let mut text = format!(
            "game={game}\nsolver=mccfr\nsampler={sampler}\nbaseline={baseline}\naveraging={averaging}\nupdates={updates}\niterations={iterations}\n"
        );
        for s in &seeds {
            text.push_str(&format!("seed={s}\n"));
        }
        let config = RunConfig::parse(&text).unwrap();
        let again = RunConfig::parse(&config.to_config_string(None)).unwrap();
        prop_assert_eq!(&again, &config);
        let one = RunConfig::parse(&config.to_config_string(Some(seeds[0]))).unwrap();
        prop_assert_eq!(one.seeds, vec![seeds[0]]);
    }
}

#[test]
fn random_profiles_are_valid() {
    let tree = games::leduc(0.0);
    let profile = random_profile(&tree, &mut ChaCha8Rng::seed_from_u64(0));
    assert!(profile.validate(&tree).is_ok());
    assert_eq!(tree.node(GameTree::ROOT).parent, None);
}
