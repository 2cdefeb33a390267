//! The TOML run configuration and its command-line overrides.

use std::path::Path;

use finsler_core::dynamics::Method;
use finsler_core::oracle::OracleConfig;
use finsler_core::sampling::SamplingConfig;
use finsler_core::{catalog_metric, FinslerMetric, MetricDescriptor, ProjectivePair, TangentPoint};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairConfig {
    pub base: MetricDescriptor,
    pub comparison: MetricDescriptor,
    /// Metric whose geodesics carry the integrals; defaults to `base`.
    #[serde(default)]
    pub flow: Option<MetricDescriptor>,
}

impl Default for PairConfig {
    fn default() -> Self {
        PairConfig {
            base: MetricDescriptor::Euclidean,
            comparison: MetricDescriptor::Klein,
            flow: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingSection {
    pub count: usize,
    pub half_width: f64,
    pub speed: f64,
    pub max_attempts: usize,
}

impl Default for SamplingSection {
    fn default() -> Self {
        let s = SamplingConfig::default();
        SamplingSection {
            count: 20,
            half_width: s.half_width,
            speed: s.speed,
            max_attempts: s.max_attempts,
        }
    }
}

impl SamplingSection {
    pub fn sampler_config(&self) -> SamplingConfig {
        SamplingConfig {
            half_width: self.half_width,
            speed: self.speed,
            max_attempts: self.max_attempts,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorSection {
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(flatten)]
    pub method: Method,
}

fn default_t_end() -> f64 {
    1.0
}

impl Default for IntegratorSection {
    fn default() -> Self {
        IntegratorSection {
            t_end: default_t_end(),
            method: Method::DEFAULT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative drift allowed for each `f_α`.
    pub drift: f64,
    /// Relative drift allowed for `F²`; reported, not part of the verdict.
    pub energy: f64,
    pub rapcsak: f64,
    /// Closed-form identities (`f_1`, `I₀`, `I₁`).
    pub identity: f64,
    /// `f_{n-1}` against the trace of `H`.
    pub trace: f64,
    pub oracle_charpoly: f64,
    pub oracle_delta: f64,
    pub oracle_fd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            drift: 1e-6,
            energy: 1e-8,
            rapcsak: 1e-8,
            identity: 1e-9,
            trace: 1e-12,
            oracle_charpoly: 1e-9,
            oracle_delta: 1e-8,
            oracle_fd: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_format")]
    pub format: Format,
    #[serde(default)]
    pub pair: PairConfig,
    #[serde(default)]
    pub sampling: SamplingSection,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub oracle: OracleConfig,
    /// Explicit tangent points; when present they replace sampling.
    #[serde(default)]
    pub points: Vec<PointSpec>,
}

fn default_dimension() -> usize {
    2
}

fn default_format() -> Format {
    Format::Json
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            dimension: default_dimension(),
            seed: 0,
            format: default_format(),
            pair: PairConfig::default(),
            sampling: SamplingSection::default(),
            integrator: IntegratorSection::default(),
            tolerances: Tolerances::default(),
            oracle: OracleConfig::default(),
            points: Vec::new(),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub tolerance: Option<f64>,
}

/// Resolved metrics plus the validated configuration.
pub struct Setup {
    pub config: RunConfig,
    pub pair: ProjectivePair,
    pub flow: FinslerMetric,
    /// The command's headline tolerance after any `--tolerance` override.
    pub tolerance_override: Option<f64>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let config: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "schema_version {} unsupported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.dimension < 2 {
            return bad(format!("dimension must be at least 2, got {}", self.dimension));
        }
        if self.sampling.count == 0 {
            return bad("sampling.count must be at least 1".into());
        }
        self.sampling.sampler_config().validate()?;
        self.integrator.method.validate()?;
        if !(self.integrator.t_end.is_finite() && self.integrator.t_end != 0.0) {
            return bad(format!("integrator.t_end must be finite and nonzero, got {}", self.integrator.t_end));
        }
        self.oracle.validate()?;
        let t = &self.tolerances;
        for (name, v) in [
            ("drift", t.drift),
            ("energy", t.energy),
            ("rapcsak", t.rapcsak),
            ("identity", t.identity),
            ("trace", t.trace),
            ("oracle_charpoly", t.oracle_charpoly),
            ("oracle_delta", t.oracle_delta),
            ("oracle_fd", t.oracle_fd),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("tolerances.{name} must be positive, got {v}"));
            }
        }
        for (i, p) in self.points.iter().enumerate() {
            if p.x.len() != self.dimension || p.y.len() != self.dimension {
                return bad(format!(
                    "points[{i}] has lengths ({}, {}), expected {}",
                    p.x.len(),
                    p.y.len(),
                    self.dimension
                ));
            }
        }
        Ok(())
    }

    pub fn resolve(mut self, overrides: &Overrides) -> Result<Setup, CliError> {
        if let Some(seed) = overrides.seed {
            self.seed = seed;
        }
        if let Some(format) = overrides.format {
            self.format = format;
        }
        if let Some(t) = overrides.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Config(format!("--tolerance must be positive, got {t}")));
            }
        }
        self.validate()?;
        let n = self.dimension;
        let pair = ProjectivePair::from_descriptors(&self.pair.base, &self.pair.comparison, n)?;
        let flow = match &self.pair.flow {
            Some(d) => catalog_metric(d, n)?,
            None => pair.base.clone(),
        };
        Ok(Setup {
            config: self,
            pair,
            flow,
            tolerance_override: overrides.tolerance,
        })
    }
}

impl Setup {
    /// Explicit points if configured, otherwise a seeded sample inside both
    /// metrics' domains (and the flow metric's).
    pub fn tangent_points(&self) -> Result<Vec<TangentPoint>, CliError> {
        if !self.config.points.is_empty() {
            return self
                .config
                .points
                .iter()
                .map(|p| TangentPoint::new(p.x.clone(), p.y.clone()).map_err(CliError::from))
                .collect();
        }
        let mut sampler = finsler_core::sampling::Sampler::new(
            self.config.dimension,
            self.config.seed,
            self.config.sampling.sampler_config(),
        )?;
        let pts = sampler.tangent_points(self.config.sampling.count, |x| {
            self.pair.in_domain(x) && self.flow.in_domain(x)
        })?;
        Ok(pts)
    }

    pub fn tolerance_or(&self, default: f64) -> f64 {
        self.tolerance_override.unwrap_or(default)
    }
}
