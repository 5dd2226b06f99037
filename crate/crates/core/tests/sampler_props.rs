mod common;

use common::*;
use mergm_core::netcore::{MultilevelNetwork, NodeId, TieLevel};
use mergm_core::sampler::{chain_rng, simulate_sample, Chain, ChainConfig, Theta};
use mergm_core::statcat::{statistic_vector, ModelSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ties(net: &MultilevelNetwork, level: TieLevel) -> Vec<(NodeId, NodeId)> {
    let (n, m) = (net.n_actors(), net.n_objects());
    let mut out = Vec::new();
    match level {
        TieLevel::A => {
            for i in 0..n {
                for j in i + 1..n {
                    if net.tie_a(i, j) {
                        out.push((NodeId::actor(i), NodeId::actor(j)));
                    }
                }
            }
        }
        TieLevel::B => {
            for o in 0..m {
                for p in o + 1..m {
                    if net.tie_b(o, p) {
                        out.push((NodeId::object(o), NodeId::object(p)));
                    }
                }
            }
        }
        TieLevel::X => {
            for i in 0..n {
                for o in 0..m {
                    if net.tie_x(i, o) {
                        out.push((NodeId::actor(i), NodeId::object(o)));
                    }
                }
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn chains_respect_fixed_levels_and_groups(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_network(&mut rng, 7, 7);
        let free: Vec<TieLevel> = TieLevel::ALL.into_iter().filter(|_| rng.gen_bool(0.6)).collect();
        prop_assume!(!free.is_empty() && free.iter().all(|&l| net.toggleable_count(l) > 0));
        let terms = all_terms(&mut rng);
        let model = ModelSpec::<f64>::new(terms, free.iter().copied()).unwrap();
        let theta = Theta((0..model.len()).map(|_| rng.gen_range(-0.3..0.3)).collect());
        let mut chain = Chain::new(net.clone(), &theta, &model, None, chain_rng(seed, 0)).unwrap();
        for _ in 0..20 {
            chain.run(25).unwrap();
            let state = chain.state();
            for level in TieLevel::ALL {
                let now = ties(state, level);
                if !free.contains(&level) {
                    prop_assert_eq!(&now, &ties(&net, level));
                }
                for (u, v) in now {
                    prop_assert!(state.partition().same_group(u, v));
                }
            }
            let recount = statistic_vector(state, &model).unwrap().0;
            for (k, (a, b)) in chain.stats().iter().zip(&recount).enumerate() {
                prop_assert!((a - b).abs() <= 1e-8 * (1.0 + b.abs()), "{}: {} vs {}", model.keys()[k], a, b);
            }
        }
    }

    #[test]
    fn same_seed_same_sample(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_network(&mut rng, 6, 6);
        let model = small_model();
        let theta = Theta(vec![-0.5, -0.5, 0.2, 0.1]);
        let cfg = ChainConfig { burn_in: 200, thinning: 5, sample_size: 50, seed, keep_draws: true, ..Default::default() };
        let a = simulate_sample(&net, &theta, &model, &cfg).unwrap();
        let b = simulate_sample(&net, &theta, &model, &cfg).unwrap();
        prop_assert_eq!(a.draws, b.draws);
        prop_assert_eq!(a.final_state, b.final_state);
    }
}
