//! Experiment configuration files for `subord rmt`.
//!
//! ```toml
//! schema_version = 1
//! id = "semicircle-n2"
//! seed = 20241
//! n = 400
//! samples = 16
//! alpha = "1/2"
//! measure = "../measures/semicircle.measure"
//! experiments = ["freeness", "compression", "matricial", "triangular", "regularization"]
//! betas = ["i", "[[2i, 0], [1, 3i]]"]
//! eps = ["1", "1/2", "1/4", "1/8", "0"]
//! words = ["XPXP"]
//! moment_degree = 6
//! output = "results/semicircle-n2.jsonl"
//!
//! [envelope]
//! c = 0.027
//! c_prime = 1.4
//! ```
//!
//! Exactly one of `alpha` and `t = 1/α` is given. Paths are relative to the
//! config file.

use std::path::Path;

use anyhow::{anyhow, bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use subord_core::envelope::Envelope;
use subord_core::exact::parse_rational;
use subord_core::matrix::CMat;
use subord_core::rmt::{parse_word, Letter};
use subord_core::Rational;

use crate::literal::parse_matrix;
use crate::measure_file::FormatError;

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Freeness,
    Compression,
    Matricial,
    Triangular,
    Regularization,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Freeness => "freeness",
            Experiment::Compression => "compression",
            Experiment::Matricial => "matricial",
            Experiment::Triangular => "triangular",
            Experiment::Regularization => "regularization",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum XKind {
    /// Deterministic quantiles of the measure.
    #[default]
    Quantile,
    /// Eigenvalues of one GUE draw; the measure must be a centred semicircle.
    Gue,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeConfig {
    pub c: f64,
    pub c_prime: f64,
}

fn default_moment_degree() -> usize {
    6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub id: String,
    pub seed: u64,
    pub n: usize,
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    pub measure: String,
    #[serde(default)]
    pub x: XKind,
    pub experiments: Vec<Experiment>,
    #[serde(default)]
    pub betas: Vec<String>,
    #[serde(default)]
    pub eps: Vec<String>,
    #[serde(default)]
    pub words: Vec<String>,
    #[serde(default = "default_moment_degree")]
    pub moment_degree: usize,
    pub output: String,
    pub envelope: EnvelopeConfig,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| FormatError::from_toml(text, &e))?;
        config.validate().map_err(|e| FormatError { line: None, column: None, field: None, message: format!("{e:#}") })?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| path.display().to_string())?;
        ExperimentConfig::parse(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
    }

    /// Canonical text, the basis of the inputs hash.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs always serialize")
    }

    fn validate(&self) -> Result<()> {
        ensure!(
            self.schema_version == CONFIG_SCHEMA_VERSION,
            "field `schema_version`: unsupported version {}, expected {CONFIG_SCHEMA_VERSION}",
            self.schema_version
        );
        ensure!(self.n >= 2, "field `n`: matrix size must be at least 2");
        ensure!(self.samples >= 1, "field `samples`: need at least one sample");
        ensure!(!self.experiments.is_empty(), "field `experiments`: nothing to run");
        ensure!(
            self.envelope.c >= 0.0 && self.envelope.c_prime >= 0.0,
            "field `envelope`: constants must be non-negative"
        );
        self.alpha()?;
        self.betas()?;
        self.eps()?;
        self.words()?;
        let needs = |e: Experiment| self.experiments.contains(&e);
        if needs(Experiment::Matricial) || needs(Experiment::Triangular) || needs(Experiment::Regularization) {
            ensure!(!self.betas.is_empty(), "field `betas`: the matricial experiments need at least one β");
        }
        if needs(Experiment::Regularization) {
            ensure!(self.eps.len() >= 2, "field `eps`: the regularization sweep needs at least two ε values");
        }
        if needs(Experiment::Freeness) {
            ensure!(!self.words.is_empty(), "field `words`: the freeness diagnostic needs words");
        }
        Ok(())
    }

    /// `α`, from either `alpha` or `t`.
    pub fn alpha(&self) -> Result<Rational> {
        let one = Rational::from_integer(1.into());
        let alpha = match (&self.alpha, &self.t) {
            (Some(a), None) => parse_rational(a).ok_or_else(|| anyhow!("field `alpha`: {a:?} is not a rational"))?,
            (None, Some(t)) => {
                let t = parse_rational(t).ok_or_else(|| anyhow!("field `t`: {t:?} is not a rational"))?;
                ensure!(t >= one, "field `t`: t must be at least 1");
                t.recip()
            }
            _ => bail!("exactly one of `alpha` and `t` must be given"),
        };
        ensure!(alpha > Rational::from_integer(0.into()) && alpha <= one, "field `alpha`: α must lie in (0, 1]");
        Ok(alpha)
    }

    pub fn betas(&self) -> Result<Vec<CMat>> {
        self.betas
            .iter()
            .enumerate()
            .map(|(i, b)| parse_matrix(b).with_context(|| format!("field `betas[{i}]`")))
            .collect()
    }

    /// The ladder as exact rationals.
    pub fn eps(&self) -> Result<Vec<Rational>> {
        self.eps
            .iter()
            .enumerate()
            .map(|(i, e)| parse_rational(e).ok_or_else(|| anyhow!("field `eps[{i}]`: {e:?} is not a rational")))
            .collect()
    }

    pub fn words(&self) -> Result<Vec<Vec<Letter>>> {
        self.words
            .iter()
            .enumerate()
            .map(|(i, w)| parse_word(w).map_err(|e| anyhow!("field `words[{i}]`: {e}")))
            .collect()
    }

    pub fn envelope(&self) -> Envelope {
        Envelope::new(self.envelope.c, self.envelope.c_prime)
    }
}
