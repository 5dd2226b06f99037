#![allow(dead_code)]

use mergm_core::netcore::{DyadRef, MultilevelNetwork, TieLevel};
use mergm_core::statcat::{StatDescriptor, StatId};
use rand::Rng;

pub const ATTRS: [&str; 3] = ["gender", "education", "genre"];

/// Random two-group network with three categorical actor attributes.
pub fn random_network<R: Rng>(rng: &mut R, max_actors: usize, max_objects: usize) -> MultilevelNetwork {
    let n = rng.gen_range(2..=max_actors);
    let m = rng.gen_range(2..=max_objects);
    let groups = rng.gen_range(1..=2u32);
    let actor_groups: Vec<u32> = (0..n).map(|_| rng.gen_range(0..groups)).collect();
    let object_groups: Vec<u32> = (0..m).map(|_| rng.gen_range(0..groups)).collect();
    let values: Vec<Vec<u32>> = [2u32, 2, 3]
        .iter()
        .map(|&k| (0..n).map(|_| rng.gen_range(0..k)).collect())
        .collect();
    let mut net = MultilevelNetwork::empty(&actor_groups, &object_groups, &ATTRS, &values);
    for level in TieLevel::ALL {
        let p: f64 = rng.gen_range(0.1..0.7);
        for d in net.toggleable_dyads(level) {
            if rng.gen::<f64>() < p {
                net.apply_toggle(d).unwrap();
            }
        }
    }
    net
}

/// Every non-summary catalog statistic, attribute statistics once per
/// attribute, with a random lambda on alternating ones.
pub fn all_terms<R: Rng>(rng: &mut R) -> Vec<StatDescriptor<f64>> {
    let mut out = Vec::new();
    for id in StatId::all().into_iter().filter(|id| !id.is_summary()) {
        let lambda = if id.is_alternating() { rng.gen_range(1.2..4.0) } else { 2.0 };
        if id.attribute_mode().is_some() {
            for a in ATTRS {
                out.push(StatDescriptor::new(id).with_attribute(a).with_lambda(lambda));
            }
        } else {
            out.push(StatDescriptor::new(id).with_lambda(lambda));
        }
    }
    out
}

pub fn random_dyad<R: Rng>(rng: &mut R, net: &MultilevelNetwork) -> Option<DyadRef> {
    let levels: Vec<TieLevel> = TieLevel::ALL
        .into_iter()
        .filter(|&l| net.toggleable_count(l) > 0)
        .collect();
    if levels.is_empty() {
        return None;
    }
    let level = levels[rng.gen_range(0..levels.len())];
    let dyads = net.toggleable_dyads(level);
    Some(dyads[rng.gen_range(0..dyads.len())])
}

/// `sum_{k=2}^{n-1} (-1)^k S_k / lambda^(k-2)` with `S_k = sum_v C(d_v, k)`.
pub fn truncated_alternating_star(degrees: &[u32], lambda: f64, max_k: usize) -> f64 {
    let mut total = 0.0;
    for k in 2..=max_k {
        let s_k: f64 = degrees.iter().map(|&d| binomial(d as u64, k as u64)).sum();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * s_k / lambda.powi(k as i32 - 2);
    }
    total
}

pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Maximizer of the enumerated log-likelihood by damped Newton ascent.
pub fn exact_mle(
    obs: &MultilevelNetwork,
    model: &mergm_core::statcat::ModelSpec<f64>,
) -> Vec<f64> {
    use mergm_core::linalg::{invert, mat_vec};
    use mergm_core::sampler::{exact_enumerate, Theta};
    use mergm_core::statcat::statistic_vector;
    let z = statistic_vector(obs, model).unwrap();
    let mut theta = Theta(vec![0.0; model.len()]);
    let mut dist = exact_enumerate(obs, model, &theta).unwrap();
    for _ in 0..200 {
        let grad: Vec<f64> = z.iter().zip(&dist.mean).map(|(a, b)| a - b).collect();
        if grad.iter().all(|g| g.abs() < 1e-10) {
            break;
        }
        let step = mat_vec(&invert(&dist.covariance).expect("information singular"), &grad);
        let current = dist.log_likelihood(&theta, &z);
        let mut scale = 1.0;
        loop {
            let next = Theta(theta.0.iter().zip(&step).map(|(t, s)| t + scale * s).collect());
            let cand = exact_enumerate(obs, model, &next).unwrap();
            if cand.log_likelihood(&next, &z) >= current - 1e-12 || scale < 1e-6 {
                theta = next;
                dist = cand;
                break;
            }
            scale *= 0.5;
        }
    }
    theta.0
}

/// 3 actors and 2 objects with every level free (1024 states), with the
/// observed statistics strictly inside their ranges for [`small_model`].
pub fn small_network() -> MultilevelNetwork {
    let mut net = MultilevelNetwork::single_group(3, 2);
    for d in [
        DyadRef::actors(0, 1).unwrap(),
        DyadRef::actors(1, 2).unwrap(),
        DyadRef::objects(0, 1).unwrap(),
        DyadRef::usage(0, 0),
        DyadRef::usage(0, 1),
        DyadRef::usage(1, 0),
        DyadRef::usage(2, 1),
    ] {
        net.apply_toggle(d).unwrap();
    }
    net
}

pub fn small_model() -> mergm_core::statcat::ModelSpec<f64> {
    use mergm_core::statcat::{ModelSpec, Side};
    ModelSpec::new(
        vec![
            StatDescriptor::new(StatId::Edge(Side::A)),
            StatDescriptor::new(StatId::XEdge),
            StatDescriptor::new(StatId::TriangleXAX),
            StatDescriptor::new(StatId::TriangleXBX),
        ],
        TieLevel::ALL,
    )
    .unwrap()
}

/// `n` actors in one group with exactly `edges` ties placed at random.
pub fn random_density_network<R: Rng>(rng: &mut R, n: usize, edges: usize) -> MultilevelNetwork {
    use rand::seq::SliceRandom;
    let mut net = MultilevelNetwork::single_group(n, 0);
    let mut dyads = net.toggleable_dyads(TieLevel::A);
    dyads.shuffle(rng);
    for d in dyads.into_iter().take(edges) {
        net.apply_toggle(d).unwrap();
    }
    net
}
