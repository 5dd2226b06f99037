mod common;

use mergm_core::descriptives::{density, describe, diversity, DescribeOptions};
use mergm_core::netcore::TieLevel;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn adding_a_tie_never_lowers_density(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = common::random_network(&mut rng, 9, 7);
        for level in TieLevel::ALL {
            let Some(absent) = net.toggleable_dyads(level).into_iter().find(|d| !net.has_tie(*d)) else {
                continue;
            };
            let more = net.toggled(absent).unwrap();
            prop_assert!(density(&more, level) >= density(&net, level));
        }
        let before = describe(&[("g".into(), net.clone())], &DescribeOptions::default()).unwrap();
        for r in &before.rows {
            if let Some(v) = r.values[0] {
                if r.metric == "Density" || r.metric.contains("centralization") || r.metric == "Genre diversity" {
                    prop_assert!((0.0..=1.0 + 1e-12).contains(&v), "{} = {}", r.metric, v);
                }
            }
        }
    }

    #[test]
    fn diversity_ignores_label_names(labels in prop::collection::vec(0u32..5, 1..20), shift in 1u32..100) {
        let renamed: Vec<u32> = labels.iter().map(|l| (l * 7 + shift) % 1000).collect();
        prop_assert_eq!(diversity(&labels, false), diversity(&renamed, false));
    }

    #[test]
    fn aggregate_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let groups: Vec<_> = (0..3)
            .map(|k| (format!("g{k}"), common::random_network(&mut rng, 8, 6)))
            .collect();
        let report = describe(&groups, &DescribeOptions::default()).unwrap();
        for r in &report.rows {
            if let (Some(lo), Some(avg), Some(hi)) = (r.min, r.average, r.max) {
                prop_assert!(lo <= avg + 1e-12 && avg <= hi + 1e-12);
            }
        }
    }
}
