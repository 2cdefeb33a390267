//! Seeded tangent-point sampling: base points uniform in a box intersected
//! with the domain (by rejection), velocities uniform on the unit sphere
//! scaled by a fixed speed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::TangentPoint;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    /// Box `[-half_width, half_width]^n`.
    pub half_width: f64,
    pub speed: f64,
    pub max_attempts: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            half_width: 0.25,
            speed: 0.4,
            max_attempts: 10_000,
        }
    }
}

impl SamplingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(Error::Config(format!("half_width {} must be positive", self.half_width)));
        }
        if !(self.speed > 0.0 && self.speed.is_finite()) {
            return Err(Error::Config(format!("speed {} must be positive", self.speed)));
        }
        if self.max_attempts == 0 {
            return Err(Error::Config("max_attempts must be at least 1".into()));
        }
        Ok(())
    }
}

pub struct Sampler {
    rng: ChaCha8Rng,
    config: SamplingConfig,
    n: usize,
}

impl Sampler {
    pub fn new(n: usize, seed: u64, config: SamplingConfig) -> Result<Self> {
        config.validate()?;
        if n < 2 {
            return Err(Error::Config(format!("dimension {n} below 2")));
        }
        Ok(Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            config,
            n,
        })
    }

    /// A base point accepted by `inside`.
    pub fn point(&mut self, inside: impl Fn(&[f64]) -> bool) -> Result<Vec<f64>> {
        let w = self.config.half_width;
        for _ in 0..self.config.max_attempts {
            let x: Vec<f64> = (0..self.n).map(|_| self.rng.random_range(-w..=w)).collect();
            if inside(&x) {
                return Ok(x);
            }
        }
        Err(Error::Config(format!(
            "no in-domain point found in {} attempts within half-width {w}",
            self.config.max_attempts
        )))
    }

    /// A velocity of Euclidean length `speed` with uniformly random direction.
    pub fn velocity(&mut self) -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..self.n).map(|_| self.rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm > 1e-8 {
                return v.iter().map(|a| a * self.config.speed / norm).collect();
            }
        }
    }

    pub fn tangent_point(&mut self, inside: impl Fn(&[f64]) -> bool) -> Result<TangentPoint> {
        let x = self.point(inside)?;
        let y = self.velocity();
        TangentPoint::new(x, y)
    }

    pub fn tangent_points(&mut self, count: usize, inside: impl Fn(&[f64]) -> bool) -> Result<Vec<TangentPoint>> {
        (0..count).map(|_| self.tangent_point(&inside)).collect()
    }
}
