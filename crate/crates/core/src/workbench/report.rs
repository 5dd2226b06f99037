//! Fit reports with significance stars, and correlation tables.

use std::fmt::Write as _;
use std::io;

use serde::Serialize;

use crate::estimator::{estimate_correlations, EstimationError, FitResult};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::statcat::StatDescriptor;

/// Sections in report order.
pub const SECTIONS: [&str; 4] = ["Social", "Material", "Object usage", "Socio-material"];

/// Critical values of the two-tailed normal test at 0.1, 0.05 and 0.01.
/// A ratio exactly on a boundary gets the stronger marker.
pub fn stars(z: f64) -> &'static str {
    let z = z.abs();
    if z >= 2.576 {
        "***"
    } else if z >= 1.960 {
        "**"
    } else if z >= 1.645 {
        "*"
    } else {
        ""
    }
}

/// Two-tailed normal p-value.
pub fn p_value(z: f64) -> f64 {
    libm::erfc(z.abs() / std::f64::consts::SQRT_2)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReportRow {
    pub statistic: String,
    pub label: String,
    pub section: String,
    pub parameter: f64,
    pub std_error: f64,
    pub z: Option<f64>,
    pub p_value: Option<f64>,
    pub stars: String,
    /// Standard error is zero or not finite; no test is reported.
    pub no_test: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReport {
    pub rows: Vec<FitReportRow>,
    pub converged: bool,
    pub max_abs_t_ratio: f64,
}

pub fn fit_report_row(statistic: String, label: String, section: String, parameter: f64, se: f64) -> FitReportRow {
    let testable = se.is_finite() && se > 0.0;
    let z = testable.then(|| parameter / se);
    FitReportRow {
        statistic,
        label,
        section,
        parameter,
        std_error: se,
        z,
        p_value: z.map(p_value),
        stars: z.map_or("", stars).to_string(),
        no_test: !testable,
    }
}

/// One row per statistic, in model order.
pub fn render_fit_report<S: Scalar>(fit: &FitResult<S>, labels: &[StatDescriptor<S>]) -> FitReport {
    let rows = labels
        .iter()
        .zip(&fit.theta_hat.0)
        .zip(&fit.std_errors)
        .map(|((d, theta), se)| {
            fit_report_row(
                d.key(),
                d.display_label(),
                d.id.level().section().to_string(),
                theta.as_f64(),
                se.as_f64(),
            )
        })
        .collect();
    FitReport {
        rows,
        converged: fit.converged,
        max_abs_t_ratio: fit.max_abs_t_ratio().as_f64(),
    }
}

impl FitReport {
    /// Rows grouped by section, model order within each section.
    pub fn to_text(&self) -> String {
        let label_w = self.rows.iter().map(|r| r.label.len()).max().unwrap_or(0).max(7);
        let mut s = String::new();
        let _ = writeln!(s, "{:<label_w$} {:>10} {:>10}", "Pattern", "Parameter", "SD");
        for section in SECTIONS {
            let rows: Vec<_> = self.rows.iter().filter(|r| r.section == section).collect();
            if rows.is_empty() {
                continue;
            }
            let _ = writeln!(s, "{section}");
            for r in rows {
                let mark = if r.no_test { " (no test: zero SD)" } else { r.stars.as_str() };
                let line = format!("{:<label_w$} {:>10.4} {:>10.3} {mark}", r.label, r.parameter, r.std_error);
                let _ = writeln!(s, "{}", line.trim_end());
            }
        }
        let _ = writeln!(s, "\n*p<0.1; **p<0.05; ***p<0.01 (two-tailed)");
        let _ = writeln!(
            s,
            "{}; max |convergence t-ratio| {:.3}",
            if self.converged { "converged" } else { "NOT converged" },
            self.max_abs_t_ratio
        );
        s
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["section", "statistic", "label", "parameter", "std_error", "z", "p_value", "stars"])?;
        let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
        for r in &self.rows {
            w.write_record([
                r.section.clone(),
                r.statistic.clone(),
                r.label.clone(),
                r.parameter.to_string(),
                r.std_error.to_string(),
                opt(r.z),
                opt(r.p_value),
                r.stars.clone(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `statistic,parameter,std_error,conv_t_ratio`
pub fn write_fit_csv<S: Scalar, W: io::Write>(fit: &FitResult<S>, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["statistic", "parameter", "std_error", "conv_t_ratio"])?;
    for k in 0..fit.statistics.len() {
        w.write_record([
            fit.statistics[k].clone(),
            fit.theta_hat.0[k].to_string(),
            fit.std_errors[k].to_string(),
            fit.conv_t_ratios[k].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub struct CorrelationTable {
    pub names: Vec<String>,
    pub values: Matrix<f64>,
}

pub fn correlation_table<S: Scalar>(fit: &FitResult<S>) -> Result<CorrelationTable, EstimationError> {
    let r = estimate_correlations(fit)?;
    Ok(CorrelationTable {
        names: fit.statistics.clone(),
        values: r
            .iter()
            .map(|row| row.iter().map(|v| v.as_f64()).collect())
            .collect(),
    })
}

impl CorrelationTable {
    /// Lower triangle with numbered columns.
    pub fn to_text(&self) -> String {
        let w = self.names.iter().map(|n| n.len()).max().unwrap_or(0) + 5;
        let mut s = String::new();
        let _ = write!(s, "{:<w$}", "");
        for c in 0..self.names.len() {
            let _ = write!(s, " {:>8}", format!("({})", c + 1));
        }
        s.push('\n');
        for (r, name) in self.names.iter().enumerate() {
            let _ = write!(s, "{:<w$}", format!("({}) {name}", r + 1));
            for c in 0..=r {
                let _ = write!(s, " {:>8.4}", self.values[r][c]);
            }
            s.push('\n');
        }
        s
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["statistic".to_string()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header)?;
        for (r, name) in self.names.iter().enumerate() {
            let mut row = vec![name.clone()];
            row.extend(self.values[r].iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}
