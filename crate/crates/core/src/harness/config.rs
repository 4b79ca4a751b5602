//! Experiment configuration files (JSON).
//!
//! Rationals may be given as JSON numbers or, to keep them exact, as strings
//! such as `"3/10"`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Deserializer};

use crate::block_model::{
    check_index, BlockStructure, CovarianceProfile, EnsembleKind, EvanescentSchedule,
};
use crate::rational::{self, Rational};
use crate::word::{parse_word, BlockWord};
use crate::{Error, Result};

/// An exact rational read from a JSON string or number.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalValue(pub Rational);

impl<'de> Deserialize<'de> for RationalValue {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(serde_json::Number),
        }
        let text = match Raw::deserialize(de)? {
            Raw::Text(s) => s,
            Raw::Number(n) => n.to_string(),
        };
        rational::parse_rational(&text)
            .map(RationalValue)
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::Config(format!("unknown format {other:?}, expected csv or json"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub kind: EnsembleKind,
    pub r: usize,
    pub d: Vec<RationalValue>,
    #[serde(rename = "V")]
    pub v: BTreeMap<String, Vec<Vec<RationalValue>>>,
    /// Defaults to `kind == hermitian`.
    #[serde(default)]
    pub hermitian: Option<bool>,
    #[serde(default)]
    pub evanescent_alpha: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub word: String,
    pub q: usize,
    #[serde(default)]
    pub n_list: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

fn default_trials() -> usize {
    200
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: ReportFormat,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub ensemble: EnsembleConfig,
    #[serde(default)]
    pub experiment: Option<ExperimentSection>,
    #[serde(default)]
    pub outputs: OutputConfig,
}

/// Validated ensemble parameters, ready for sampling at any `n`.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub kind: EnsembleKind,
    pub structure: BlockStructure,
    pub profile: CovarianceProfile,
    pub schedule: EvanescentSchedule,
    pub seed: u64,
}

/// Validated experiment: the parsed word and where to take its partial trace.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub word: BlockWord,
    pub q: usize,
    pub n_list: Vec<usize>,
    pub trials: usize,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| json_error(text, e))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn experiment(&self) -> Result<Experiment> {
        let section = self
            .experiment
            .as_ref()
            .ok_or_else(|| Error::Config("config has no experiment section".into()))?;
        let ensemble = self.ensemble.resolve()?;
        ensemble.experiment(&section.word, section.q, section.n_list.clone(), section.trials)
    }
}

fn json_error(text: &str, e: serde_json::Error) -> Error {
    use serde_json::error::Category;
    match e.classify() {
        Category::Syntax | Category::Eof => {
            let offset = text
                .split_inclusive('\n')
                .take(e.line().saturating_sub(1))
                .map(str::len)
                .sum::<usize>()
                + e.column().saturating_sub(1);
            Error::Parse { offset, message: format!("config: {e}") }
        }
        _ => Error::Config(e.to_string()),
    }
}

impl EnsembleConfig {
    pub fn resolve(&self) -> Result<Ensemble> {
        let d: Vec<Rational> = self.d.iter().map(|x| x.0.clone()).collect();
        if d.len() != self.r {
            return Err(Error::Config(format!("r = {} but {} dimensions given", self.r, d.len())));
        }
        let v = self
            .v
            .iter()
            .map(|(label, m)| {
                let m = m.iter().map(|row| row.iter().map(|x| x.0.clone()).collect()).collect();
                (label.clone(), m)
            })
            .collect();
        let hermitian = self.hermitian.unwrap_or(self.kind == EnsembleKind::Hermitian);
        let profile = CovarianceProfile::new(self.r, v, hermitian)?;
        if self.kind == EnsembleKind::Hermitian && !hermitian {
            return Err(Error::Config("hermitian ensemble with hermitian = false".into()));
        }
        let schedule = match self.evanescent_alpha {
            Some(alpha) => EvanescentSchedule { alpha },
            None => EvanescentSchedule::default(),
        };
        if !(0.0..1.0).contains(&schedule.alpha) {
            return Err(Error::Config(format!("evanescent_alpha {} outside [0, 1)", schedule.alpha)));
        }
        Ok(Ensemble {
            kind: self.kind,
            structure: BlockStructure::normalized(d)?,
            profile,
            schedule,
            seed: self.seed,
        })
    }
}

impl Ensemble {
    pub fn experiment(&self, word: &str, q: usize, n_list: Vec<usize>, trials: usize) -> Result<Experiment> {
        let word = parse_word(word)?;
        word.bind(self.structure.r(), |l| self.profile.matrix(l).is_some())?;
        check_index(q, self.structure.r())?;
        Ok(Experiment { word, q, n_list, trials })
    }
}
