//! Per-group descriptive statistics with Average/Min/Max/Total summaries.

use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netcore::{MultilevelNetwork, TieLevel};
use crate::scalar::choose;

#[derive(Debug, Error)]
pub enum DescribeError {
    #[error("no groups to describe")]
    NoGroups,
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescribeOptions {
    pub gender_attribute: String,
    pub education_attribute: String,
    pub genre_attribute: String,
    /// Report `1 - sum p^2` instead of the normalized index.
    pub raw_diversity: bool,
}

impl Default for DescribeOptions {
    fn default() -> Self {
        DescribeOptions {
            gender_attribute: "gender".into(),
            education_attribute: "education".into(),
            genre_attribute: "genre".into(),
            raw_diversity: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    Count,
    Percent,
    Decimal,
}

/// One metric across groups. `None` marks an undefined value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub section: String,
    pub metric: String,
    pub format: Format,
    pub values: Vec<Option<f64>>,
    pub average: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub total: Option<f64>,
}

impl MetricRow {
    fn new(section: &str, metric: &str, format: Format, values: Vec<Option<f64>>) -> Self {
        let defined: Vec<f64> = values.iter().flatten().copied().collect();
        let (average, min, max) = if defined.is_empty() {
            (None, None, None)
        } else {
            (
                Some(defined.iter().sum::<f64>() / defined.len() as f64),
                defined.iter().copied().reduce(f64::min),
                defined.iter().copied().reduce(f64::max),
            )
        };
        let total = (format == Format::Count).then(|| defined.iter().sum());
        MetricRow {
            section: section.into(),
            metric: metric.into(),
            format,
            values,
            average,
            min,
            max,
            total,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveReport {
    pub groups: Vec<String>,
    pub rows: Vec<MetricRow>,
}

pub fn density(net: &MultilevelNetwork, level: TieLevel) -> Option<f64> {
    let pairs = match level {
        TieLevel::A => choose(net.n_actors() as u64, 2),
        TieLevel::B => choose(net.n_objects() as u64, 2),
        TieLevel::X => (net.n_actors() * net.n_objects()) as u64,
    };
    (pairs > 0).then(|| net.edge_count(level) as f64 / pairs as f64)
}

/// Freeman degree centralization of a one-mode level; undefined below three
/// nodes.
pub fn centralization(degrees: &[u32]) -> Option<f64> {
    let n = degrees.len();
    if n < 3 {
        return None;
    }
    let max = *degrees.iter().max()?;
    let spread: u64 = degrees.iter().map(|&d| u64::from(max - d)).sum();
    Some(spread as f64 / ((n - 1) * (n - 2)) as f64)
}

fn mean(degrees: &[u32]) -> Option<f64> {
    (!degrees.is_empty()).then(|| degrees.iter().map(|&d| f64::from(d)).sum::<f64>() / degrees.len() as f64)
}

/// Blau index over category labels, scaled by `n / (n - 1)` unless `raw`.
/// 0 for a single member.
pub fn diversity<T: Ord>(labels: &[T], raw: bool) -> Option<f64> {
    let n = labels.len();
    if n == 0 {
        return None;
    }
    if n == 1 {
        return Some(0.0);
    }
    let mut counts = std::collections::BTreeMap::new();
    for l in labels {
        *counts.entry(l).or_insert(0usize) += 1;
    }
    let blau = 1.0
        - counts
            .values()
            .map(|&c| (c as f64 / n as f64).powi(2))
            .sum::<f64>();
    Some(if raw { blau } else { blau * n as f64 / (n - 1) as f64 })
}

fn share(net: &MultilevelNetwork, attribute: &str, yes: &[&str]) -> Option<f64> {
    if !net.attributes().has(attribute) || net.n_actors() == 0 {
        return None;
    }
    let hits = (0..net.n_actors())
        .filter(|&i| {
            net.attributes()
                .label(attribute, i)
                .is_some_and(|l| yes.contains(&l.trim().to_ascii_lowercase().as_str()))
        })
        .count();
    Some(hits as f64 / net.n_actors() as f64)
}

const FEMALE: &[&str] = &["f", "female", "w", "woman"];
const YES: &[&str] = &["yes", "y", "1", "true"];

pub fn describe(
    groups: &[(String, MultilevelNetwork)],
    options: &DescribeOptions,
) -> Result<DescriptiveReport, DescribeError> {
    if groups.is_empty() {
        return Err(DescribeError::NoGroups);
    }
    let col = |f: &dyn Fn(&MultilevelNetwork) -> Option<f64>| -> Vec<Option<f64>> {
        groups.iter().map(|(_, g)| f(g)).collect()
    };
    let one_mode = |level: TieLevel, section: &str| -> Vec<MetricRow> {
        let degrees = |g: &MultilevelNetwork| -> Vec<u32> {
            match level {
                TieLevel::A => g.degrees_a().to_vec(),
                _ => g.degrees_b().to_vec(),
            }
        };
        vec![
            MetricRow::new(section, "Density", Format::Percent, col(&|g| density(g, level))),
            MetricRow::new(
                section,
                "Degree centralization",
                Format::Percent,
                col(&|g| centralization(&degrees(g))),
            ),
            MetricRow::new(section, "Average degree", Format::Decimal, col(&|g| mean(&degrees(g)))),
        ]
    };
    let mut rows = vec![
        MetricRow::new("", "Objects per group", Format::Count, col(&|g| Some(g.n_objects() as f64))),
        MetricRow::new("", "Actors per group", Format::Count, col(&|g| Some(g.n_actors() as f64))),
    ];
    rows.extend(one_mode(TieLevel::A, "Social"));
    rows.extend(one_mode(TieLevel::B, "Material"));
    rows.push(MetricRow::new(
        "Object usage",
        "Density",
        Format::Percent,
        col(&|g| density(g, TieLevel::X)),
    ));
    rows.push(MetricRow::new(
        "Object usage",
        "Average object degree",
        Format::Decimal,
        col(&|g| mean(g.degrees_x_object())),
    ));
    rows.push(MetricRow::new(
        "Object usage",
        "Average actor degree",
        Format::Decimal,
        col(&|g| mean(g.degrees_x_actor())),
    ));
    rows.push(MetricRow::new(
        "Attributes",
        "Female members",
        Format::Percent,
        col(&|g| share(g, &options.gender_attribute, FEMALE)),
    ));
    rows.push(MetricRow::new(
        "Attributes",
        "Members with artistic education",
        Format::Percent,
        col(&|g| share(g, &options.education_attribute, YES)),
    ));
    rows.push(MetricRow::new(
        "Attributes",
        "Genre diversity",
        Format::Decimal,
        col(&|g| {
            let codes = g.attributes().codes(&options.genre_attribute)?;
            diversity(codes, options.raw_diversity)
        }),
    ));
    Ok(DescriptiveReport {
        groups: groups.iter().map(|(name, _)| name.clone()).collect(),
        rows,
    })
}

fn cell(v: Option<f64>, format: Format) -> String {
    match v {
        None => "NA".into(),
        Some(x) => match format {
            Format::Count if x.fract() == 0.0 => format!("{x:.0}"),
            Format::Count => format!("{x:.1}"),
            Format::Percent => format!("{:.0}%", x * 100.0),
            Format::Decimal => format!("{x:.2}"),
        },
    }
}

impl DescriptiveReport {
    fn header(&self) -> Vec<String> {
        let mut h = vec!["section".to_string(), "metric".to_string()];
        h.extend(self.groups.iter().cloned());
        h.extend(["average", "min", "max", "total"].map(String::from));
        h
    }

    /// Raw values; undefined cells are `NA`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), DescribeError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        let raw = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
        for r in &self.rows {
            let mut rec = vec![r.section.clone(), r.metric.clone()];
            rec.extend(r.values.iter().map(|v| raw(*v)));
            rec.extend([r.average, r.min, r.max].map(raw));
            rec.push(r.total.map_or_else(String::new, |x| x.to_string()));
            w.write_record(rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut cells: Vec<Vec<String>> = Vec::new();
        let mut head = vec![String::new(), String::new()];
        head.extend(self.groups.iter().cloned());
        head.extend(["Average", "Min", "Max", "Total"].map(String::from));
        cells.push(head);
        let mut last_section = None;
        for r in &self.rows {
            let section = if last_section == Some(&r.section) {
                String::new()
            } else {
                r.section.clone()
            };
            last_section = Some(&r.section);
            let mut line = vec![section, r.metric.clone()];
            line.extend(r.values.iter().map(|v| cell(*v, r.format)));
            line.extend([r.average, r.min, r.max].map(|v| cell(v, r.format)));
            line.push(r.total.map_or_else(String::new, |t| cell(Some(t), r.format)));
            cells.push(line);
        }
        let widths: Vec<usize> = (0..cells[0].len())
            .map(|c| cells.iter().map(|l| l[c].len()).max().unwrap_or(0))
            .collect();
        let mut s = String::new();
        for line in &cells {
            let mut text = String::new();
            for (c, v) in line.iter().enumerate() {
                if c < 2 {
                    let _ = write!(text, "{:<w$}  ", v, w = widths[c]);
                } else {
                    let _ = write!(text, "{:>w$}  ", v, w = widths[c]);
                }
            }
            s.push_str(text.trim_end());
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::DyadRef;

    fn group(n: usize, ties: &[(usize, usize)], genres: &[u32]) -> MultilevelNetwork {
        let mut net = MultilevelNetwork::empty(
            &vec![0; n],
            &[],
            &["genre"],
            &[genres.to_vec()],
        );
        for &(i, j) in ties {
            net.apply_toggle(DyadRef::actors(i, j).unwrap()).unwrap();
        }
        net
    }

    #[test]
    fn star_is_maximally_central() {
        assert_eq!(centralization(&[4, 1, 1, 1, 1]), Some(1.0));
        assert_eq!(centralization(&[2, 2, 2]), Some(0.0));
        assert_eq!(centralization(&[1, 1]), None);
    }

    #[test]
    fn complete_triangle() {
        let net = group(3, &[(0, 1), (1, 2), (0, 2)], &[0, 0, 0]);
        let report = describe(&[("g".into(), net)], &DescribeOptions::default()).unwrap();
        let get = |section: &str, metric: &str| {
            report
                .rows
                .iter()
                .find(|r| r.section == section && r.metric == metric)
                .unwrap()
                .values[0]
        };
        assert_eq!(get("Social", "Density"), Some(1.0));
        assert_eq!(get("Social", "Average degree"), Some(2.0));
        assert_eq!(get("Social", "Degree centralization"), Some(0.0));
        assert_eq!(get("Material", "Density"), None);
        assert_eq!(get("Attributes", "Genre diversity"), Some(0.0));
    }

    #[test]
    fn diversity_extremes() {
        assert_eq!(diversity(&[1, 1, 1, 1], false), Some(0.0));
        assert!((diversity(&[0, 1, 2, 3], false).unwrap() - 1.0).abs() < 1e-12);
        assert!((diversity(&[0, 1, 2, 3], true).unwrap() - 0.75).abs() < 1e-12);
        assert_eq!(diversity(&[7], false), Some(0.0));
        assert_eq!(diversity::<u32>(&[], false), None);
    }

    #[test]
    fn aggregates_and_layout() {
        let a = group(3, &[(0, 1)], &[0, 1, 2]);
        let b = group(5, &[(0, 1), (0, 2), (0, 3), (0, 4)], &[0, 0, 1, 1, 1]);
        let report = describe(&[("first".into(), a), ("second".into(), b)], &DescribeOptions::default()).unwrap();
        let actors = &report.rows[1];
        assert_eq!(actors.total, Some(8.0));
        assert_eq!(actors.average, Some(4.0));
        for r in &report.rows {
            if let (Some(lo), Some(avg), Some(hi)) = (r.min, r.average, r.max) {
                assert!(lo <= avg && avg <= hi, "{}", r.metric);
            }
        }
        let text = report.to_text();
        assert!(text.lines().next().unwrap().contains("Average"));
        assert!(text.contains("Degree centralization"));
        assert!(text.contains("100%"));
        let mut csv = Vec::new();
        report.write_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().starts_with("section,metric,first,second,average,min,max,total"));
    }
}
