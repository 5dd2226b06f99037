mod common;

use common::random_density_network;
use mergm_core::estimator::{estimate, EstimationSettings};
use mergm_core::gof::{default_aux, run_gof, t_ratio, Verdict};
use mergm_core::netcore::TieLevel;
use mergm_core::sampler::ChainConfig;
use mergm_core::statcat::{ModelSpec, Side, StatDescriptor, StatId};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn t_ratio_is_antisymmetric(mean in -1e3f64..1e3, resid in -1e3f64..1e3, sd in 1e-3f64..1e3) {
        let (up, _) = t_ratio(mean + resid, mean, sd);
        let (down, _) = t_ratio(mean - resid, mean, sd);
        let (plain, _) = t_ratio(resid, 0.0, sd);
        let (neg, _) = t_ratio(-resid, 0.0, sd);
        prop_assert_eq!(plain, -neg);
        prop_assert!((up + down).abs() <= 1e-9 * (1.0 + up.abs()));
    }
}

fn model() -> ModelSpec<f64> {
    ModelSpec::new(
        vec![
            StatDescriptor::new(StatId::Edge(Side::A)),
            StatDescriptor::new(StatId::Star(Side::A, 2)),
        ],
        [TieLevel::A],
    )
    .unwrap()
}

fn gof_chain(seed: u64) -> ChainConfig {
    ChainConfig {
        burn_in: 20_000,
        thinning: 100,
        sample_size: 1000,
        seed,
        ..Default::default()
    }
}

#[test]
fn fitted_model_reproduces_modeled_statistics() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let net = random_density_network(&mut rng, 14, 25);
    let model = model();
    let cfg = ChainConfig {
        burn_in: 20_000,
        seed: 1,
        ..Default::default()
    };
    let fit = estimate(&net, &model, &EstimationSettings::default(), &cfg).unwrap();
    let table = run_gof(&net, &fit, &model, &default_aux(&net, &model), &gof_chain(99)).unwrap();
    assert_eq!(table.modeled().count(), 2);
    for row in table.modeled() {
        assert!(row.t_ratio.abs() <= 0.15, "{row:?}");
    }
    assert!(table.auxiliary().any(|r| r.statistic == "TriangleA"));
    assert!(table.auxiliary().any(|r| r.statistic == "clusteringA"));
    assert!(table.auxiliary().all(|r| r.statistic != "EdgeA"));
    let mut csv = Vec::new();
    table.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("statistic,observed,mean,sd,t_ratio,modeled,verdict\n"));
    assert_eq!(text.lines().count(), table.rows.len() + 1);
    assert!(table.to_text().contains("Modeled statistics"));
}

#[test]
fn auxiliary_statistics_do_not_touch_the_chain() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let net = random_density_network(&mut rng, 10, 12);
    let model = model();
    let fit = estimate(
        &net,
        &model,
        &EstimationSettings::default(),
        &ChainConfig { burn_in: 5000, ..Default::default() },
    )
    .unwrap();
    let with = run_gof(&net, &fit, &model, &default_aux(&net, &model), &gof_chain(3)).unwrap();
    let without = run_gof(&net, &fit, &model, &[], &gof_chain(3)).unwrap();
    let modeled: Vec<_> = with.modeled().cloned().collect();
    let bare: Vec<_> = without.rows.clone();
    assert_eq!(modeled, bare);
}

#[test]
fn misfit_is_reported() {
    // parameters far from the data must fail the modeled rows
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let net = random_density_network(&mut rng, 10, 12);
    let model = model();
    let mut fit = estimate(
        &net,
        &model,
        &EstimationSettings::default(),
        &ChainConfig { burn_in: 5000, ..Default::default() },
    )
    .unwrap();
    fit.theta_hat.0[0] += 2.0;
    let table = run_gof(&net, &fit, &model, &[], &gof_chain(4)).unwrap();
    assert!(table.modeled().all(|r| r.verdict == Verdict::Fail));
}
