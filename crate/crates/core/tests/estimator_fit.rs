mod common;

use common::{exact_mle, random_density_network, small_model, small_network};
use mergm_core::estimator::{estimate, estimate_correlations, EstimationSettings};
use mergm_core::netcore::{MultilevelNetwork, TieLevel};
use mergm_core::sampler::ChainConfig;
use mergm_core::statcat::{ModelSpec, Side, StatDescriptor, StatId};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn quick_chain(seed: u64) -> ChainConfig {
    ChainConfig {
        burn_in: 20_000,
        seed,
        ..Default::default()
    }
}

#[test]
fn edge_only_matches_logit_density() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let net = random_density_network(&mut rng, 30, 109);
    let model = ModelSpec::<f64>::new(vec![StatDescriptor::new(StatId::Edge(Side::A))], [TieLevel::A]).unwrap();
    let fit = estimate(&net, &model, &EstimationSettings::default(), &quick_chain(1)).unwrap();
    let expected = (109.0f64 / 326.0).ln();
    assert!((fit.theta_init.0[0] - expected).abs() < 1e-12);
    assert!(fit.converged, "{:?}", fit.conv_t_ratios);
    assert!((fit.theta_hat.0[0] - expected).abs() < 0.05, "{}", fit.theta_hat.0[0]);
    assert!(fit.std_errors[0] > 0.0);
}

#[test]
fn edge_terms_on_all_levels() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut net = MultilevelNetwork::single_group(16, 12);
    let mut counts = [0usize; 3];
    for (k, level) in TieLevel::ALL.into_iter().enumerate() {
        for d in net.toggleable_dyads(level) {
            if rand::Rng::gen::<f64>(&mut rng) < 0.3 {
                net.apply_toggle(d).unwrap();
                counts[k] += 1;
            }
        }
    }
    let model = ModelSpec::<f64>::new(
        vec![
            StatDescriptor::new(StatId::Edge(Side::A)),
            StatDescriptor::new(StatId::Edge(Side::B)),
            StatDescriptor::new(StatId::XEdge),
        ],
        TieLevel::ALL,
    )
    .unwrap();
    let fit = estimate(&net, &model, &EstimationSettings::default(), &quick_chain(2)).unwrap();
    for (k, level) in TieLevel::ALL.into_iter().enumerate() {
        let total = net.toggleable_count(level) as f64;
        let p = counts[k] as f64 / total;
        let logit = (p / (1.0 - p)).ln();
        assert!((fit.theta_hat.0[k] - logit).abs() < 0.05, "{level}: {} vs {logit}", fit.theta_hat.0[k]);
    }
    let corr = estimate_correlations(&fit).unwrap();
    for r in 0..3 {
        assert_eq!(corr[r][r], 1.0);
        for c in 0..3 {
            assert_eq!(corr[r][c], corr[c][r]);
            assert!(corr[r][c].abs() <= 1.0);
        }
    }
}

#[test]
fn enumerable_instance_matches_exact_mle() {
    let net = small_network();
    let model = small_model();
    let mle = exact_mle(&net, &model);
    let settings = EstimationSettings {
        subphase_base_iterations: Some(200),
        phase3_draws: 5000,
        ..Default::default()
    };
    let fit = estimate(&net, &model, &settings, &quick_chain(5)).unwrap();
    for k in 0..model.len() {
        assert!(
            (fit.theta_hat.0[k] - mle[k]).abs() < 0.1,
            "{}: {} vs {}",
            model.keys()[k],
            fit.theta_hat.0[k],
            mle[k]
        );
    }
}

#[test]
fn fit_serializes_to_json() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let net = random_density_network(&mut rng, 10, 12);
    let model = ModelSpec::<f64>::new(vec![StatDescriptor::new(StatId::Edge(Side::A))], [TieLevel::A]).unwrap();
    let fit = estimate(&net, &model, &EstimationSettings::default(), &quick_chain(1)).unwrap();
    let json = serde_json::to_string(&fit).unwrap();
    let back: mergm_core::estimator::FitResult<f64> = serde_json::from_str(&json).unwrap();
    assert_eq!(back, fit);
}
