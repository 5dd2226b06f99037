//! JSON model, chain and estimation configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netcore::TieLevel;
use crate::scalar::Scalar;
use crate::statcat::{resolve_label, ModelSpec, StatDescriptor, StatError, StatId};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Read { path: PathBuf, message: String },
    #[error("unknown statistic `{0}`")]
    UnknownStatistic(String),
    #[error(transparent)]
    Stat(#[from] StatError),
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError::Read {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| ConfigError::Read {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatEntry {
    /// Catalog id, user alias, or English pattern label.
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attribute: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Disambiguates English labels shared by the social and material level.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<TieLevel>,
}

fn all_levels() -> Vec<TieLevel> {
    TieLevel::ALL.to_vec()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub stats: Vec<StatEntry>,
    #[serde(default = "all_levels")]
    pub free_levels: Vec<TieLevel>,
    /// Extra names mapped to catalog ids.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub aliases: BTreeMap<String, String>,
    /// Parameters for `simulate` when no fit is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
}

impl ModelConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        read_json(path)
    }

    fn resolve(&self, entry: &StatEntry) -> Result<(StatId, bool), ConfigError> {
        let name = self.aliases.get(&entry.id).unwrap_or(&entry.id);
        if let Some(id) = StatId::from_name(name) {
            return Ok((id, false));
        }
        resolve_label(name, entry.level)
            .map(|id| (id, true))
            .ok_or_else(|| ConfigError::UnknownStatistic(entry.id.clone()))
    }

    pub fn descriptors<S: Scalar>(&self) -> Result<Vec<StatDescriptor<S>>, ConfigError> {
        self.stats
            .iter()
            .map(|e| {
                let (id, by_label) = self.resolve(e)?;
                let mut d = StatDescriptor::new(id);
                if let Some(l) = e.lambda {
                    d = d.with_lambda(S::lit(l));
                }
                if let Some(a) = &e.attribute {
                    d = d.with_attribute(a.clone());
                }
                match (&e.label, by_label) {
                    (Some(l), _) => d = d.with_label(l.clone()),
                    (None, true) => d = d.with_label(e.id.clone()),
                    _ => {}
                }
                d.validate()?;
                Ok(d)
            })
            .collect()
    }

    pub fn to_spec<S: Scalar>(&self) -> Result<ModelSpec<S>, ConfigError> {
        Ok(ModelSpec::new(self.descriptors()?, self.free_levels.iter().copied())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_shape() {
        let cfg: ModelConfig = serde_json::from_str(
            r#"{"stats":[{"id":"TriangleXAX"},{"id":"ASA","lambda":2.0},{"id":"MatchA","attribute":"gender"},{"id":"EdgeB"}],
                "free_levels":["A","B","X"]}"#,
        )
        .unwrap();
        let spec: ModelSpec<f64> = cfg.to_spec().unwrap();
        assert_eq!(spec.keys(), vec!["TriangleXAX", "ASA", "gender_MatchA", "EdgeB"]);
        assert_eq!(spec.free_levels().len(), 3);
    }

    #[test]
    fn aliases_and_labels() {
        let cfg: ModelConfig = serde_json::from_str(
            r#"{"stats":[{"id":"ties"},{"id":"Influence of dyadic social ties on object sharing"}],"aliases":{"ties":"EdgeA"}}"#,
        )
        .unwrap();
        let d: Vec<StatDescriptor<f64>> = cfg.descriptors().unwrap();
        assert_eq!(d[0].id, StatId::Edge(crate::statcat::Side::A));
        assert_eq!(d[1].id, StatId::TriangleXAX);
        assert_eq!(d[1].display_label(), "Influence of dyadic social ties on object sharing");
        let bad: ModelConfig = serde_json::from_str(r#"{"stats":[{"id":"Nope"}]}"#).unwrap();
        assert!(matches!(bad.to_spec::<f64>(), Err(ConfigError::UnknownStatistic(_))));
    }
}
