//! Goodness of fit by simulation at fitted parameters.

use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimator::FitResult;
use crate::linalg::Moments;
use crate::netcore::MultilevelNetwork;
use crate::sampler::{simulate_with, ChainConfig, SamplerError};
use crate::scalar::Scalar;
use crate::statcat::{evaluate, statistic_vector, ModelSpec, StatDescriptor, StatError, StatId};

#[derive(Debug, Error)]
pub enum GofError {
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Stat(#[from] StatError),
    #[error("fit has {fit} parameters but the model has {model}")]
    FitMismatch { fit: usize, model: usize },
    #[error("empty sample")]
    EmptySample,
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub modeled: f64,
    pub auxiliary: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            modeled: 0.1,
            auxiliary: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GofRow<S> {
    pub statistic: String,
    pub observed: S,
    pub sim_mean: S,
    pub sim_sd: S,
    pub t_ratio: S,
    pub modeled: bool,
    pub zero_variance: bool,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GofTable<S> {
    pub rows: Vec<GofRow<S>>,
    pub thresholds: Thresholds,
    pub draws: usize,
}

/// `(observed - mean) / sd`, or 0 with the zero-variance flag set when
/// `sd` is 0.
pub fn t_ratio<S: Scalar>(observed: S, mean: S, sd: S) -> (S, bool) {
    if sd > S::zero() {
        ((observed - mean) / sd, false)
    } else {
        (S::zero(), true)
    }
}

impl<S: Scalar> GofRow<S> {
    pub fn new(statistic: String, observed: S, mean: S, sd: S, modeled: bool, thresholds: &Thresholds) -> Self {
        let (t, zero_variance) = t_ratio(observed, mean, sd);
        let limit = S::lit(if modeled {
            thresholds.modeled
        } else {
            thresholds.auxiliary
        });
        // a degenerate simulated distribution that misses the observation
        // cannot pass, whatever the nominal ratio
        let missed = zero_variance && (observed - mean).abs() > S::lit(1e-9) * (S::one() + observed.abs());
        let verdict = if t.abs() <= limit && !missed {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        GofRow {
            statistic,
            observed,
            sim_mean: mean,
            sim_sd: sd,
            t_ratio: t,
            modeled,
            zero_variance,
            verdict,
        }
    }
}

impl<S: Scalar> GofTable<S> {
    pub fn modeled(&self) -> impl Iterator<Item = &GofRow<S>> {
        self.rows.iter().filter(|r| r.modeled)
    }

    pub fn auxiliary(&self) -> impl Iterator<Item = &GofRow<S>> {
        self.rows.iter().filter(|r| !r.modeled)
    }

    pub fn failures(&self) -> impl Iterator<Item = &GofRow<S>> {
        self.rows.iter().filter(|r| r.verdict == Verdict::Fail)
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), GofError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["statistic", "observed", "mean", "sd", "t_ratio", "modeled", "verdict"])?;
        for r in &self.rows {
            w.write_record([
                r.statistic.clone(),
                r.observed.to_string(),
                r.sim_mean.to_string(),
                r.sim_sd.to_string(),
                r.t_ratio.to_string(),
                r.modeled.to_string(),
                r.verdict.as_str().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Aligned table: modeled statistics first, then the auxiliary ones.
    pub fn to_text(&self) -> String {
        let width = self
            .rows
            .iter()
            .map(|r| r.statistic.len())
            .max()
            .unwrap_or(0)
            .max(9);
        let mut s = String::new();
        let header = |s: &mut String, title: &str| {
            let _ = writeln!(s, "{title}");
            let _ = writeln!(
                s,
                "{:<width$} {:>12} {:>12} {:>12} {:>9}  verdict",
                "Statistic", "Observed", "Mean", "SD", "t-ratio"
            );
        };
        for (title, modeled) in [("Modeled statistics", true), ("Other statistics", false)] {
            let rows: Vec<_> = self.rows.iter().filter(|r| r.modeled == modeled).collect();
            if rows.is_empty() {
                continue;
            }
            if !s.is_empty() {
                s.push('\n');
            }
            header(&mut s, title);
            for r in rows {
                let flag = if r.zero_variance { " (zero variance)" } else { "" };
                let _ = writeln!(
                    s,
                    "{:<width$} {:>12} {:>12.3} {:>12.3} {:>9.3}  {}{flag}",
                    r.statistic,
                    format_observed(r.observed),
                    r.sim_mean.as_f64(),
                    r.sim_sd.as_f64(),
                    r.t_ratio.as_f64(),
                    r.verdict.as_str(),
                );
            }
        }
        let _ = writeln!(
            s,
            "\n{} draws; thresholds |t| <= {} (modeled), {} (other)",
            self.draws, self.thresholds.modeled, self.thresholds.auxiliary
        );
        s
    }
}

fn format_observed<S: Scalar>(v: S) -> String {
    let x = v.as_f64();
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{x:.0}")
    } else {
        format!("{x:.3}")
    }
}

/// Every catalog statistic, attribute statistics once per actor attribute
/// of `net`.
pub fn catalog_descriptors<S: Scalar>(net: &MultilevelNetwork) -> Vec<StatDescriptor<S>> {
    let mut out = Vec::new();
    for id in StatId::all() {
        if id.attribute_mode().is_some() {
            for a in net.attributes().names() {
                out.push(StatDescriptor::new(id).with_attribute(a.clone()));
            }
        } else {
            out.push(StatDescriptor::new(id));
        }
    }
    out
}

/// Catalog statistics not already in the model.
pub fn default_aux<S: Scalar>(net: &MultilevelNetwork, model: &ModelSpec<S>) -> Vec<StatDescriptor<S>> {
    let modeled = model.keys();
    let mut out = catalog_descriptors(net);
    out.retain(|d| !modeled.contains(&d.key()));
    out
}

/// Where the GOF chain starts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainStart {
    #[default]
    Observed,
    /// Observed network with every free level emptied.
    Empty,
}

/// GOF with the chain started at the observed network.
pub fn run_gof<S: Scalar>(
    obs: &MultilevelNetwork,
    fit: &FitResult<S>,
    model: &ModelSpec<S>,
    aux: &[StatDescriptor<S>],
    cfg: &ChainConfig,
) -> Result<GofTable<S>, GofError> {
    run_gof_with(obs, fit, model, aux, cfg, ChainStart::Observed, Thresholds::default())
}

pub fn run_gof_with<S: Scalar>(
    obs: &MultilevelNetwork,
    fit: &FitResult<S>,
    model: &ModelSpec<S>,
    aux: &[StatDescriptor<S>],
    cfg: &ChainConfig,
    start: ChainStart,
    thresholds: Thresholds,
) -> Result<GofTable<S>, GofError> {
    if fit.theta_hat.0.len() != model.len() {
        return Err(GofError::FitMismatch {
            fit: fit.theta_hat.0.len(),
            model: model.len(),
        });
    }
    if cfg.sample_size == 0 {
        return Err(GofError::EmptySample);
    }
    let modeled_keys = model.keys();
    let aux: Vec<StatDescriptor<S>> = aux
        .iter()
        .filter(|d| !modeled_keys.contains(&d.key()))
        .cloned()
        .collect();
    for d in &aux {
        d.validate()?;
    }
    let z_obs = statistic_vector(obs, model)?;
    let aux_obs = evaluate(obs, &aux)?;

    let mut begin = obs.clone();
    if start == ChainStart::Empty {
        for &level in model.free_levels() {
            begin.clear_level(level);
        }
    }

    let mut aux_moments = Moments::variances_only(aux.len());
    let mut aux_err = None;
    let summary = simulate_with(&begin, &fit.theta_hat, model, cfg, |net, _| {
        if aux_err.is_some() {
            return;
        }
        match evaluate(net, &aux) {
            Ok(v) => aux_moments.push(&v),
            Err(e) => aux_err = Some(e),
        }
    })?;
    if let Some(e) = aux_err {
        return Err(e.into());
    }

    let mut rows = Vec::with_capacity(model.len() + aux.len());
    for (k, key) in modeled_keys.into_iter().enumerate() {
        rows.push(GofRow::new(key, z_obs[k], summary.mean[k], summary.sd[k], true, &thresholds));
    }
    let sd = aux_moments.std_devs();
    for (k, d) in aux.iter().enumerate() {
        rows.push(GofRow::new(d.key(), aux_obs[k], aux_moments.mean()[k], sd[k], false, &thresholds));
    }
    Ok(GofTable {
        rows,
        thresholds,
        draws: cfg.sample_size,
    })
}
