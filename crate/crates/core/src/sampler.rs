//! Metropolis-Hastings tie-toggle sampling over the free levels of a
//! multilevel network, and exact enumeration for tiny state spaces.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{Matrix, Moments};
use crate::netcore::{DyadRef, MultilevelNetwork, TieLevel};
use crate::scalar::Scalar;
use crate::statcat::{change_into, statistic_vector, ModelSpec, StatError, StatVector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error(transparent)]
    Stat(#[from] StatError),
    #[error("model has no free level")]
    NoFreeLevel,
    #[error("free levels have no toggleable dyads")]
    NoToggleableDyads,
    #[error("theta has {got} entries, model has {expected}")]
    ThetaLength { expected: usize, got: usize },
    #[error("theta has non-finite entries")]
    NonFiniteTheta,
    #[error("invalid chain configuration: {0}")]
    InvalidConfig(String),
    #[error("{dyads} free dyads exceed the enumeration limit of {limit}")]
    StateSpaceTooLarge { dyads: usize, limit: usize },
}

/// Model parameters aligned with a [`ModelSpec`].
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Theta<S>(pub Vec<S>);

impl<S: Scalar> Theta<S> {
    pub fn zeros(n: usize) -> Self {
        Theta(vec![S::zero(); n])
    }

    pub fn check(&self, model: &ModelSpec<S>) -> Result<(), SamplerError> {
        if self.0.len() != model.len() {
            return Err(SamplerError::ThetaLength {
                expected: model.len(),
                got: self.0.len(),
            });
        }
        if self.0.iter().any(|t| !t.is_finite()) {
            return Err(SamplerError::NonFiniteTheta);
        }
        Ok(())
    }
}

fn default_burn_in() -> u64 {
    100_000
}
fn default_thinning() -> u64 {
    10
}
fn default_sample_size() -> usize {
    10_000
}

/// Chain length and seeding. Defaults: 100,000 burn-in steps, then 10,000
/// draws ten steps apart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    #[serde(default = "default_burn_in")]
    pub burn_in: u64,
    #[serde(default = "default_thinning")]
    pub thinning: u64,
    #[serde(default = "default_sample_size")]
    pub sample_size: usize,
    #[serde(default)]
    pub seed: u64,
    /// Stream of `seed` used by the chain, so that separate runs under one
    /// seed stay independent.
    #[serde(default)]
    pub stream: u64,
    /// Proposal weight per free level. Missing: proportional to the number
    /// of toggleable dyads.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_choice: Option<BTreeMap<TieLevel, f64>>,
    /// Keep every retained statistic vector in the summary.
    #[serde(default)]
    pub keep_draws: bool,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            burn_in: default_burn_in(),
            thinning: default_thinning(),
            sample_size: default_sample_size(),
            seed: 0,
            stream: 0,
            level_choice: None,
            keep_draws: false,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<(), SamplerError> {
        if self.thinning < 1 {
            return Err(SamplerError::InvalidConfig("thinning must be >= 1".into()));
        }
        if self.sample_size < 1 {
            return Err(SamplerError::InvalidConfig("sample_size must be >= 1".into()));
        }
        if let Some(w) = &self.level_choice {
            if w.values().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(SamplerError::InvalidConfig(
                    "level weights must be finite and >= 0".into(),
                ));
            }
        }
        Ok(())
    }
}

/// RNG for chain number `stream` under a top-level seed.
pub fn chain_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Proposal distribution: pick a free level by weight, then a toggleable dyad
/// of that level uniformly.
#[derive(Clone, Debug)]
pub struct Proposal {
    levels: Vec<(TieLevel, Vec<DyadRef>)>,
    cumulative: Vec<f64>,
}

impl Proposal {
    pub fn new<S: Scalar>(
        net: &MultilevelNetwork,
        model: &ModelSpec<S>,
        weights: Option<&BTreeMap<TieLevel, f64>>,
    ) -> Result<Self, SamplerError> {
        if model.free_levels().is_empty() {
            return Err(SamplerError::NoFreeLevel);
        }
        let mut levels = Vec::new();
        let mut cumulative = Vec::new();
        let mut total = 0.0;
        for &level in model.free_levels() {
            let dyads = net.toggleable_dyads(level);
            if dyads.is_empty() {
                continue;
            }
            let w = match weights {
                Some(map) => map.get(&level).copied().unwrap_or(0.0),
                None => dyads.len() as f64,
            };
            if w <= 0.0 {
                continue;
            }
            total += w;
            cumulative.push(total);
            levels.push((level, dyads));
        }
        if levels.is_empty() {
            return Err(SamplerError::NoToggleableDyads);
        }
        for c in &mut cumulative {
            *c /= total;
        }
        Ok(Proposal { levels, cumulative })
    }

    pub fn levels(&self) -> impl Iterator<Item = TieLevel> + '_ {
        self.levels.iter().map(|(l, _)| *l)
    }

    pub fn dyad_count(&self) -> usize {
        self.levels.iter().map(|(_, d)| d.len()).sum()
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> DyadRef {
        let k = if self.levels.len() == 1 {
            0
        } else {
            let u: f64 = rng.gen();
            self.cumulative
                .iter()
                .position(|&c| u < c)
                .unwrap_or(self.levels.len() - 1)
        };
        let dyads = &self.levels[k].1;
        dyads[rng.gen_range(0..dyads.len())]
    }
}

/// One proposal: returns the signed statistic change if it was accepted.
pub fn mh_step<S: Scalar, R: Rng + ?Sized>(
    state: &mut MultilevelNetwork,
    theta: &Theta<S>,
    model: &ModelSpec<S>,
    proposal: &Proposal,
    rng: &mut R,
) -> Result<Option<StatVector<S>>, SamplerError> {
    let mut delta = StatVector::zeros(model.len());
    let accepted = step_with_buffer(state, &theta.0, model, proposal, rng, &mut delta)?;
    Ok(accepted.then_some(delta))
}

/// Core MH update; `delta` receives the change toward the proposed state.
fn step_with_buffer<S: Scalar, R: Rng + ?Sized>(
    state: &mut MultilevelNetwork,
    theta: &[S],
    model: &ModelSpec<S>,
    proposal: &Proposal,
    rng: &mut R,
    delta: &mut [S],
) -> Result<bool, SamplerError> {
    let dyad = proposal.draw(rng);
    change_into(state, dyad, model.stats(), delta)?;
    if state.has_tie(dyad) {
        for d in delta.iter_mut() {
            *d = -*d;
        }
    }
    let log_ratio: S = theta.iter().zip(delta.iter()).map(|(t, d)| *t * *d).sum();
    let accept = log_ratio >= S::zero() || {
        let u: f64 = rng.gen();
        u < log_ratio.as_f64().exp()
    };
    if accept {
        state.toggle_unchecked(dyad);
    }
    Ok(accept)
}

/// A running chain with incrementally tracked statistics.
pub struct Chain<'m, S, R> {
    state: MultilevelNetwork,
    stats: Vec<S>,
    theta: Vec<S>,
    model: &'m ModelSpec<S>,
    proposal: Proposal,
    rng: R,
    delta: Vec<S>,
    proposed: u64,
    accepted: u64,
}

impl<'m, S: Scalar, R: Rng> Chain<'m, S, R> {
    pub fn new(
        start: MultilevelNetwork,
        theta: &Theta<S>,
        model: &'m ModelSpec<S>,
        weights: Option<&BTreeMap<TieLevel, f64>>,
        rng: R,
    ) -> Result<Self, SamplerError> {
        theta.check(model)?;
        model.check_network(&start)?;
        let proposal = Proposal::new(&start, model, weights)?;
        let stats = statistic_vector(&start, model)?.0;
        Ok(Chain {
            state: start,
            stats,
            theta: theta.0.clone(),
            model,
            proposal,
            rng,
            delta: vec![S::zero(); model.len()],
            proposed: 0,
            accepted: 0,
        })
    }

    pub fn set_theta(&mut self, theta: &[S]) {
        self.theta.copy_from_slice(theta);
    }

    pub fn step(&mut self) -> Result<bool, SamplerError> {
        self.proposed += 1;
        let accepted = step_with_buffer(
            &mut self.state,
            &self.theta,
            self.model,
            &self.proposal,
            &mut self.rng,
            &mut self.delta,
        )?;
        if accepted {
            self.accepted += 1;
            for (z, d) in self.stats.iter_mut().zip(&self.delta) {
                *z += *d;
            }
        }
        Ok(accepted)
    }

    pub fn run(&mut self, steps: u64) -> Result<(), SamplerError> {
        for _ in 0..steps {
            self.step()?;
        }
        Ok(())
    }

    pub fn stats(&self) -> &[S] {
        &self.stats
    }

    pub fn state(&self) -> &MultilevelNetwork {
        &self.state
    }

    pub fn into_state(self) -> MultilevelNetwork {
        self.state
    }

    pub fn proposal(&self) -> &Proposal {
        &self.proposal
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }
}

/// Mean and spread of the retained draws.
#[derive(Clone, Debug)]
pub struct SampleSummary<S> {
    pub mean: Vec<S>,
    pub sd: Vec<S>,
    pub covariance: Matrix<S>,
    pub draws: Option<Vec<StatVector<S>>>,
    pub final_state: MultilevelNetwork,
    pub acceptance_rate: f64,
    /// Some statistic moved monotonically over the second half of the
    /// sample. Advisory only.
    pub degeneracy_warning: bool,
}

/// Tracks whether any coordinate is monotone over a window.
struct MonotoneWatch<S> {
    first: Option<Vec<S>>,
    last: Vec<S>,
    nondecreasing: Vec<bool>,
    nonincreasing: Vec<bool>,
    seen: usize,
}

impl<S: Scalar> MonotoneWatch<S> {
    fn new(dim: usize) -> Self {
        MonotoneWatch {
            first: None,
            last: vec![S::zero(); dim],
            nondecreasing: vec![true; dim],
            nonincreasing: vec![true; dim],
            seen: 0,
        }
    }

    fn push(&mut self, x: &[S]) {
        if self.first.is_none() {
            self.first = Some(x.to_vec());
        } else {
            for k in 0..x.len() {
                if x[k] < self.last[k] {
                    self.nondecreasing[k] = false;
                }
                if x[k] > self.last[k] {
                    self.nonincreasing[k] = false;
                }
            }
        }
        self.last.copy_from_slice(x);
        self.seen += 1;
    }

    fn flagged(&self) -> bool {
        let Some(first) = &self.first else {
            return false;
        };
        self.seen >= 3
            && (0..first.len()).any(|k| {
                (self.nondecreasing[k] || self.nonincreasing[k]) && first[k] != self.last[k]
            })
    }
}

/// Runs burn-in, then calls `observe` on each retained draw with the state
/// and the model statistics.
pub fn simulate_with<S, F>(
    start: &MultilevelNetwork,
    theta: &Theta<S>,
    model: &ModelSpec<S>,
    cfg: &ChainConfig,
    mut observe: F,
) -> Result<SampleSummary<S>, SamplerError>
where
    S: Scalar,
    F: FnMut(&MultilevelNetwork, &[S]),
{
    cfg.validate()?;
    let mut chain = Chain::new(
        start.clone(),
        theta,
        model,
        cfg.level_choice.as_ref(),
        chain_rng(cfg.seed, cfg.stream),
    )?;
    chain.run(cfg.burn_in)?;
    let mut moments = Moments::new(model.len());
    let mut watch = MonotoneWatch::new(model.len());
    let mut draws = cfg.keep_draws.then(|| Vec::with_capacity(cfg.sample_size));
    let half = cfg.sample_size / 2;
    for k in 0..cfg.sample_size {
        chain.run(cfg.thinning)?;
        let z = chain.stats();
        moments.push(z);
        if k >= half {
            watch.push(z);
        }
        if let Some(d) = draws.as_mut() {
            d.push(StatVector(z.to_vec()));
        }
        observe(chain.state(), z);
    }
    let acceptance_rate = chain.acceptance_rate();
    Ok(SampleSummary {
        mean: moments.mean().to_vec(),
        sd: moments.std_devs(),
        covariance: moments.covariance(),
        draws,
        final_state: chain.into_state(),
        acceptance_rate,
        degeneracy_warning: watch.flagged(),
    })
}

pub fn simulate_sample<S: Scalar>(
    start: &MultilevelNetwork,
    theta: &Theta<S>,
    model: &ModelSpec<S>,
    cfg: &ChainConfig,
) -> Result<SampleSummary<S>, SamplerError> {
    simulate_with(start, theta, model, cfg, |_, _| {})
}

/// Largest number of free dyads [`exact_enumerate`] accepts.
pub const ENUMERATION_LIMIT: usize = 25;

/// Exact distribution over every configuration of the free dyads.
#[derive(Clone, Debug)]
pub struct ExactDistribution<S> {
    pub states: u64,
    pub log_z: S,
    /// Normalizing constant; may overflow to infinity where `log_z` does not.
    pub z: S,
    pub mean: Vec<S>,
    pub covariance: Matrix<S>,
}

impl<S: Scalar> ExactDistribution<S> {
    /// Log-likelihood of an observed statistic vector.
    pub fn log_likelihood(&self, theta: &Theta<S>, observed: &[S]) -> S {
        theta.0.iter().zip(observed).map(|(t, z)| *t * *z).sum::<S>() - self.log_z
    }
}

/// Enumerates all tie configurations of the model's free levels (ties on
/// fixed levels are taken from `template`).
pub fn exact_enumerate<S: Scalar>(
    template: &MultilevelNetwork,
    model: &ModelSpec<S>,
    theta: &Theta<S>,
) -> Result<ExactDistribution<S>, SamplerError> {
    theta.check(model)?;
    model.check_network(template)?;
    let dyads: Vec<DyadRef> = model
        .free_levels()
        .iter()
        .flat_map(|&l| template.toggleable_dyads(l))
        .collect();
    if dyads.len() > ENUMERATION_LIMIT {
        return Err(SamplerError::StateSpaceTooLarge {
            dyads: dyads.len(),
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut net = template.clone();
    for &level in model.free_levels() {
        net.clear_level(level);
    }
    let dim = model.len();
    // streaming log-sum-exp: sums are scaled by exp(-shift)
    let mut shift = S::neg_infinity();
    let mut w_sum = S::zero();
    let mut z_sum = vec![S::zero(); dim];
    let mut zz_sum = vec![vec![S::zero(); dim]; dim];
    let states: u64 = 1 << dyads.len();
    for k in 0..states {
        if k > 0 {
            // Gray code: flip the lowest set bit of k
            let bit = k.trailing_zeros() as usize;
            net.toggle_unchecked(dyads[bit]);
        }
        let z = statistic_vector(&net, model)?;
        let lw = z.dot(&theta.0);
        if lw > shift {
            let rescale = (shift - lw).exp();
            w_sum *= rescale;
            for r in 0..dim {
                z_sum[r] *= rescale;
                for c in 0..dim {
                    zz_sum[r][c] *= rescale;
                }
            }
            shift = lw;
        }
        let w = (lw - shift).exp();
        w_sum += w;
        for r in 0..dim {
            z_sum[r] += w * z[r];
            for c in 0..dim {
                zz_sum[r][c] += w * z[r] * z[c];
            }
        }
    }
    let mean: Vec<S> = z_sum.iter().map(|s| *s / w_sum).collect();
    let covariance = (0..dim)
        .map(|r| {
            (0..dim)
                .map(|c| zz_sum[r][c] / w_sum - mean[r] * mean[c])
                .collect()
        })
        .collect();
    let log_z = shift + w_sum.ln();
    Ok(ExactDistribution {
        states,
        log_z,
        z: log_z.exp(),
        mean,
        covariance,
    })
}
