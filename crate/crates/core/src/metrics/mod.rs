//! Finsler metric catalog, per-point tensor assembly and metric pairs.

mod catalog;
mod jet;

pub use catalog::{catalog_metric, FinslerMetric, MatrixField, MetricDescriptor, OneForm, DOMAIN_MARGIN};
pub use jet::{angular_rank_check, metric_jet, JetResiduals, MetricJet, RankReport, TangentPoint, RANK_THRESHOLD};

use crate::diffkit::ScalarField;
use crate::error::{Error, Result};

/// An ordered pair `(F, F̃)`: `base` supplies the spray, `comparison` the
/// angular metric `h̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivePair {
    pub base: FinslerMetric,
    pub comparison: FinslerMetric,
}

impl ProjectivePair {
    pub fn new(base: FinslerMetric, comparison: FinslerMetric) -> Result<Self> {
        if base.dimension() != comparison.dimension() {
            return Err(Error::Config(format!(
                "pair dimensions differ: {} vs {}",
                base.dimension(),
                comparison.dimension()
            )));
        }
        let origin = vec![0.0; base.dimension()];
        if !(base.in_domain(&origin) && comparison.in_domain(&origin)) {
            return Err(Error::Config(format!(
                "domains of {base} and {comparison} do not share the origin"
            )));
        }
        Ok(ProjectivePair { base, comparison })
    }

    pub fn from_descriptors(base: &MetricDescriptor, comparison: &MetricDescriptor, n: usize) -> Result<Self> {
        ProjectivePair::new(catalog_metric(base, n)?, catalog_metric(comparison, n)?)
    }

    pub fn dimension(&self) -> usize {
        self.base.dimension()
    }

    pub fn in_domain(&self, x: &[f64]) -> bool {
        self.base.in_domain(x) && self.comparison.in_domain(x)
    }

    /// Jets of `F` and `F̃` at `p`.
    pub fn jets(&self, p: &TangentPoint) -> Result<(MetricJet, MetricJet)> {
        Ok((metric_jet(&self.base, p)?, metric_jet(&self.comparison, p)?))
    }
}
