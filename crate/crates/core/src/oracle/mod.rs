//! Independent brute-force checks: characteristic polynomials by
//! interpolation, the permutation-sum form of `δ_α`, central finite
//! differences and Christoffel symbols.
//!
//! Nothing here shares code paths with the forward-mode jets or with
//! Faddeev–LeVerrier beyond plain metric evaluation.

mod charpoly;
mod combinatorial;
mod extended;
mod finite_diff;

pub use charpoly::{charpoly_by_interpolation, default_nodes, CONDITION_LIMIT};
pub use combinatorial::{delta_alpha_combinatorial, permutation_sign};
pub use finite_diff::{christoffel_oracle, fd_derivative, fd_jet, Christoffel, FdValue};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `n` for which the `S_n × S_n` sum is enumerated.
pub const PERMUTATION_CUTOFF: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleConfig {
    pub fd_step: f64,
    /// Interpolation nodes; `None` means `0, 1, …, n` mapped onto `[-‖M‖_∞, ‖M‖_∞]`.
    pub nodes: Option<Vec<f64>>,
    pub permutation_cutoff: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            fd_step: 1e-5,
            nodes: None,
            permutation_cutoff: PERMUTATION_CUTOFF,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1e-8..=1e-3).contains(&self.fd_step) {
            return Err(Error::Config(format!(
                "fd_step {} outside [1e-8, 1e-3]",
                self.fd_step
            )));
        }
        if let Some(nodes) = &self.nodes {
            check_distinct(nodes)?;
        }
        if self.permutation_cutoff != PERMUTATION_CUTOFF {
            return Err(Error::Config(format!(
                "permutation cutoff is fixed at {PERMUTATION_CUTOFF}"
            )));
        }
        Ok(())
    }
}

pub(crate) fn check_distinct(nodes: &[f64]) -> Result<()> {
    for (i, a) in nodes.iter().enumerate() {
        if !a.is_finite() {
            return Err(Error::Config(format!("interpolation node {a} is not finite")));
        }
        if nodes[..i].contains(a) {
            return Err(Error::Config(format!("interpolation node {a} repeated")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(OracleConfig::default().validate().is_ok());
        let bad = OracleConfig {
            fd_step: 1e-2,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = OracleConfig {
            nodes: Some(vec![0.0, 1.0, 1.0]),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = OracleConfig {
            permutation_cutoff: 4,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
