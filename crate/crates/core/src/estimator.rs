//! Robbins-Monro MCMC maximum likelihood estimation.
//!
//! Phase 1 estimates a scaling matrix from statistic (co)variances at the
//! starting values, phase 2 runs subphases of stochastic approximation
//! updates with a halving gain, and phase 3 checks convergence and derives
//! standard errors from the statistic covariance at the estimate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{invert, mat_vec, Matrix, Moments};
use crate::netcore::{MultilevelNetwork, NetworkError, TieLevel};
use crate::sampler::{chain_rng, Chain, ChainConfig, SamplerError, Theta};
use crate::scalar::Scalar;
use crate::statcat::{statistic_vector, ModelSpec, StatError, StatId, StatVector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimationError {
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Stat(#[from] StatError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("statistic `{0}` cannot vary over the free dyads")]
    ConstantStatistic(String),
    #[error("statistic covariance is singular (`{first}` and `{second}`)")]
    SingularCovariance { first: String, second: String },
    #[error("invalid estimation settings: {0}")]
    InvalidSettings(String),
    #[error("parameter `{0}` has zero variance")]
    ZeroVariance(String),
}

fn d_phase1() -> usize {
    500
}
fn d_subphases() -> usize {
    5
}
fn d_gain() -> f64 {
    0.1
}
fn d_phase3() -> usize {
    2000
}
fn d_restarts() -> usize {
    3
}
fn d_threshold() -> f64 {
    0.1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimationSettings {
    #[serde(default = "d_phase1")]
    pub phase1_draws: usize,
    #[serde(default = "d_subphases")]
    pub subphase_count: usize,
    #[serde(default = "d_gain")]
    pub initial_gain: f64,
    #[serde(default = "d_phase3")]
    pub phase3_draws: usize,
    #[serde(default = "d_restarts")]
    pub max_restarts: usize,
    #[serde(default = "d_threshold")]
    pub convergence_threshold: f64,
    /// Scale updates by the full phase-1 covariance instead of its diagonal.
    #[serde(default)]
    pub full_scaling: bool,
    /// MH steps between consecutive draws. Defaults to the number of free
    /// dyads.
    #[serde(default)]
    pub steps_per_draw: Option<u64>,
    /// Iterations of the first subphase; subphase `k` runs
    /// `base * 2^(4(k-1)/3)`. Defaults to `7 + p`.
    #[serde(default)]
    pub subphase_base_iterations: Option<usize>,
}

impl Default for EstimationSettings {
    fn default() -> Self {
        EstimationSettings {
            phase1_draws: d_phase1(),
            subphase_count: d_subphases(),
            initial_gain: d_gain(),
            phase3_draws: d_phase3(),
            max_restarts: d_restarts(),
            convergence_threshold: d_threshold(),
            full_scaling: false,
            steps_per_draw: None,
            subphase_base_iterations: None,
        }
    }
}

impl EstimationSettings {
    pub fn validate(&self) -> Result<(), EstimationError> {
        let bad = |m: &str| Err(EstimationError::InvalidSettings(m.to_string()));
        if self.phase1_draws < 2 || self.phase3_draws < 2 {
            return bad("phase 1 and phase 3 need at least two draws");
        }
        if self.subphase_count < 1 {
            return bad("subphase_count must be >= 1");
        }
        if !(self.initial_gain > 0.0 && self.initial_gain <= 1.0) {
            return bad("initial_gain must be in (0, 1]");
        }
        if !(self.convergence_threshold > 0.0) {
            return bad("convergence_threshold must be > 0");
        }
        if self.steps_per_draw == Some(0) || self.subphase_base_iterations == Some(0) {
            return bad("iteration counts must be >= 1");
        }
        Ok(())
    }

    fn subphase_iterations(&self, k: usize, p: usize) -> usize {
        let base = self.subphase_base_iterations.unwrap_or(7 + p) as f64;
        (base * 2f64.powf(4.0 * (k as f64 - 1.0) / 3.0)).round() as usize
    }
}

/// Estimates, standard errors and convergence diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult<S> {
    pub statistics: Vec<String>,
    pub theta_hat: Theta<S>,
    /// Starting values: logit of the observed density on edge terms, 0
    /// elsewhere.
    pub theta_init: Theta<S>,
    pub std_errors: Vec<S>,
    pub conv_t_ratios: Vec<S>,
    pub param_covariance: Matrix<S>,
    pub converged: bool,
    pub observed_stats: StatVector<S>,
    pub sim_mean: Vec<S>,
    pub sim_sd: Vec<S>,
    pub restarts: usize,
}

impl<S: Scalar> FitResult<S> {
    pub fn max_abs_t_ratio(&self) -> S {
        self.conv_t_ratios
            .iter()
            .fold(S::zero(), |m, t| m.max(t.abs()))
    }
}

/// Initial parameters: edge terms at the logit of observed density over the
/// toggleable dyads of their level, everything else 0.
pub fn initial_theta<S: Scalar>(obs: &MultilevelNetwork, model: &ModelSpec<S>) -> Theta<S> {
    Theta(
        model
            .stats()
            .iter()
            .map(|d| {
                let level = match d.id {
                    StatId::Edge(crate::statcat::Side::A) => TieLevel::A,
                    StatId::Edge(crate::statcat::Side::B) => TieLevel::B,
                    StatId::XEdge => TieLevel::X,
                    _ => return S::zero(),
                };
                let total = obs.toggleable_count(level);
                if !model.is_free(level) || total == 0 {
                    return S::zero();
                }
                let half = 0.5 / total as f64;
                let density = (obs.edge_count(level) as f64 / total as f64).clamp(half, 1.0 - half);
                S::lit((density / (1.0 - density)).ln())
            })
            .collect(),
    )
}

/// Network and model for the lagged design: actor ties from wave 1 held
/// fixed, object and usage ties from wave 2 free.
pub fn lagged_design<S: Scalar>(
    wave1: &MultilevelNetwork,
    wave2: &MultilevelNetwork,
    model: &ModelSpec<S>,
) -> Result<(MultilevelNetwork, ModelSpec<S>), EstimationError> {
    let net = wave2.with_level_from(wave1, TieLevel::A)?;
    let model = model.with_free_levels([TieLevel::B, TieLevel::X])?;
    Ok((net, model))
}

fn check_variable<S: Scalar>(model: &ModelSpec<S>) -> Result<(), EstimationError> {
    for d in model.stats() {
        if !d.id.touches().iter().any(|l| model.is_free(*l)) {
            return Err(EstimationError::ConstantStatistic(d.key()));
        }
    }
    Ok(())
}

fn singular_pair<S: Scalar>(model: &ModelSpec<S>, cov: &Matrix<S>) -> EstimationError {
    let keys = model.keys();
    if let Some(k) = (0..cov.len()).find(|&k| cov[k][k] <= S::zero()) {
        return EstimationError::SingularCovariance {
            first: keys[k].clone(),
            second: keys[k].clone(),
        };
    }
    let mut best = (0, 0, S::neg_infinity());
    for r in 0..cov.len() {
        for c in r + 1..cov.len() {
            let corr = (cov[r][c] / (cov[r][r] * cov[c][c]).sqrt()).abs();
            if corr > best.2 {
                best = (r, c, corr);
            }
        }
    }
    EstimationError::SingularCovariance {
        first: keys[best.0].clone(),
        second: keys[best.1.max(best.0)].clone(),
    }
}

fn draw_moments<S: Scalar, R: rand::Rng>(
    chain: &mut Chain<'_, S, R>,
    draws: usize,
    steps: u64,
) -> Result<Moments<S>, EstimationError> {
    let mut m = Moments::new(chain.stats().len());
    for _ in 0..draws {
        chain.run(steps)?;
        m.push(chain.stats());
    }
    Ok(m)
}

/// MCMC maximum likelihood fit of `model` to `obs`. Non-convergence after
/// all restarts is reported through `converged = false`, not as an error.
pub fn estimate<S: Scalar>(
    obs: &MultilevelNetwork,
    model: &ModelSpec<S>,
    settings: &EstimationSettings,
    cfg: &ChainConfig,
) -> Result<FitResult<S>, EstimationError> {
    settings.validate()?;
    cfg.validate()?;
    model.check_network(obs)?;
    check_variable(model)?;
    let p = model.len();
    let keys = model.keys();
    let z_obs = statistic_vector(obs, model)?;
    let theta_init = initial_theta(obs, model);
    let mut theta = theta_init.0.clone();

    let mut chain = Chain::new(
        obs.clone(),
        &theta_init,
        model,
        cfg.level_choice.as_ref(),
        chain_rng(cfg.seed, cfg.stream),
    )?;
    let steps = settings
        .steps_per_draw
        .unwrap_or(chain.proposal().dyad_count() as u64)
        .max(1);
    chain.run(cfg.burn_in)?;

    let mut restarts = 0;
    loop {
        // phase 1
        chain.set_theta(&theta);
        let m1 = draw_moments(&mut chain, settings.phase1_draws, steps)?;
        let cov1 = m1.covariance();
        if let Some(k) = (0..p).find(|&k| cov1[k][k] <= S::zero()) {
            return Err(EstimationError::ConstantStatistic(keys[k].clone()));
        }
        let scaling: Matrix<S> = if settings.full_scaling {
            invert(&cov1).ok_or_else(|| singular_pair(model, &cov1))?
        } else {
            (0..p)
                .map(|r| {
                    (0..p)
                        .map(|c| if r == c { cov1[r][r].recip() } else { S::zero() })
                        .collect()
                })
                .collect()
        };

        // phase 2
        let mut gain = S::lit(settings.initial_gain);
        for k in 1..=settings.subphase_count {
            let iterations = settings.subphase_iterations(k, p).max(1);
            let mut theta_sum = vec![S::zero(); p];
            for _ in 0..iterations {
                chain.run(steps)?;
                let dev: Vec<S> = chain
                    .stats()
                    .iter()
                    .zip(z_obs.iter())
                    .map(|(z, o)| *z - *o)
                    .collect();
                let step = mat_vec(&scaling, &dev);
                for r in 0..p {
                    theta[r] -= gain * step[r];
                    theta_sum[r] += theta[r];
                }
                if theta.iter().any(|t| !t.is_finite()) {
                    return Err(SamplerError::NonFiniteTheta.into());
                }
                chain.set_theta(&theta);
            }
            let n = S::from_count(iterations as u64);
            for r in 0..p {
                theta[r] = theta_sum[r] / n;
            }
            chain.set_theta(&theta);
            gain = gain * S::lit(0.5);
        }

        // phase 3
        let m3 = draw_moments(&mut chain, settings.phase3_draws, steps)?;
        let mean = m3.mean().to_vec();
        let sd = m3.std_devs();
        let cov3 = m3.covariance();
        let t: Vec<S> = (0..p).map(|k| conv_t_ratio(mean[k], z_obs[k], sd[k])).collect();
        let param_covariance = invert(&cov3).ok_or_else(|| singular_pair(model, &cov3))?;
        let std_errors = (0..p)
            .map(|k| param_covariance[k][k].max(S::zero()).sqrt())
            .collect();
        let threshold = S::lit(settings.convergence_threshold);
        let converged = t.iter().all(|x| x.abs() <= threshold);
        if converged || restarts >= settings.max_restarts {
            return Ok(FitResult {
                statistics: keys,
                theta_hat: Theta(theta),
                theta_init,
                std_errors,
                conv_t_ratios: t,
                param_covariance,
                converged,
                observed_stats: z_obs,
                sim_mean: mean,
                sim_sd: sd,
                restarts,
            });
        }
        restarts += 1;
    }
}

/// `(mean - observed) / sd`; 0 when the simulated statistic has no spread
/// and matches the observation.
pub fn conv_t_ratio<S: Scalar>(mean: S, observed: S, sd: S) -> S {
    let diff = mean - observed;
    if sd > S::zero() {
        diff / sd
    } else if diff == S::zero() {
        S::zero()
    } else {
        S::infinity().copysign(diff)
    }
}

/// Correlations between parameter estimates.
pub fn estimate_correlations<S: Scalar>(fit: &FitResult<S>) -> Result<Matrix<S>, EstimationError> {
    let cov = &fit.param_covariance;
    let p = cov.len();
    if let Some(k) = (0..p).find(|&k| !(cov[k][k] > S::zero())) {
        return Err(EstimationError::ZeroVariance(
            fit.statistics.get(k).cloned().unwrap_or_else(|| k.to_string()),
        ));
    }
    Ok((0..p)
        .map(|r| {
            (0..p)
                .map(|c| {
                    if r == c {
                        S::one()
                    } else {
                        (cov[r][c] / (cov[r][r] * cov[c][c]).sqrt()).max(-S::one()).min(S::one())
                    }
                })
                .collect()
        })
        .collect())
}
