//! Comparison of geodesic paths as unparameterised curves.
//!
//! Trajectories are interpolated by cubic Hermite segments (positions and
//! velocities are both known at every sample), reparameterised by Euclidean
//! arc length, truncated to the shorter of the two and resampled at equal
//! arc-length stations.

use nalgebra::DVector;

use super::integrate::GeodesicTrajectory;

// 5-point Gauss–Legendre on [0, 1]
const GL_NODES: [f64; 5] = [
    0.046_910_077_030_668,
    0.230_765_344_947_158,
    0.5,
    0.769_234_655_052_842,
    0.953_089_922_969_332,
];
const GL_WEIGHTS: [f64; 5] = [
    0.118_463_442_528_095,
    0.239_314_335_249_683,
    0.284_444_444_444_444,
    0.239_314_335_249_683,
    0.118_463_442_528_095,
];

struct Segment<'a> {
    x0: &'a DVector<f64>,
    v0: &'a DVector<f64>,
    x1: &'a DVector<f64>,
    v1: &'a DVector<f64>,
    dt: f64,
}

impl Segment<'_> {
    fn point(&self, u: f64) -> DVector<f64> {
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        self.x0 * h00 + self.v0 * (h10 * self.dt) + self.x1 * h01 + self.v1 * (h11 * self.dt)
    }

    /// Euclidean speed with respect to `u`.
    fn speed(&self, u: f64) -> f64 {
        let u2 = u * u;
        let d00 = 6.0 * u2 - 6.0 * u;
        let d10 = 3.0 * u2 - 4.0 * u + 1.0;
        let d01 = -6.0 * u2 + 6.0 * u;
        let d11 = 3.0 * u2 - 2.0 * u;
        (self.x0 * d00 + self.v0 * (d10 * self.dt) + self.x1 * d01 + self.v1 * (d11 * self.dt)).norm()
    }

    /// Arc length over `[0, u]`.
    fn length_to(&self, u: f64) -> f64 {
        GL_NODES
            .iter()
            .zip(GL_WEIGHTS)
            .map(|(node, w)| w * self.speed(node * u))
            .sum::<f64>()
            * u
    }

    /// Parameter at which the arc length from the segment start equals `s`.
    fn invert(&self, s: f64, total: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut u = if total > 0.0 { s / total } else { 0.0 };
        for _ in 0..60 {
            let f = self.length_to(u) - s;
            if f.abs() <= 1e-15 * total.max(1e-300) {
                break;
            }
            if f > 0.0 {
                hi = u;
            } else {
                lo = u;
            }
            let sp = self.speed(u);
            let newton = u - f / sp;
            u = if sp > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        u
    }
}

/// Arc-length parameterisation of a trajectory's base-point path.
pub struct ArcLengthPath<'a> {
    traj: &'a GeodesicTrajectory,
    cumulative: Vec<f64>,
}

impl<'a> ArcLengthPath<'a> {
    pub fn new(traj: &'a GeodesicTrajectory) -> Self {
        let mut cumulative = vec![0.0];
        for k in 0..traj.len().saturating_sub(1) {
            let seg = Self::segment_of(traj, k);
            let last = *cumulative.last().unwrap();
            cumulative.push(last + seg.length_to(1.0));
        }
        ArcLengthPath { traj, cumulative }
    }

    fn segment_of(traj: &GeodesicTrajectory, k: usize) -> Segment<'_> {
        Segment {
            x0: &traj.states[k].x,
            v0: &traj.states[k].y,
            x1: &traj.states[k + 1].x,
            v1: &traj.states[k + 1].y,
            dt: traj.times[k + 1] - traj.times[k],
        }
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Point at arc length `s`, clamped to the path.
    pub fn at(&self, s: f64) -> DVector<f64> {
        if self.cumulative.len() < 2 || s <= 0.0 {
            return self.traj.states[0].x.clone();
        }
        let s = s.min(self.length());
        let k = match self.cumulative.binary_search_by(|c| c.total_cmp(&s)) {
            Ok(i) => i.min(self.cumulative.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.cumulative.len() - 2),
        };
        let seg = Self::segment_of(self.traj, k);
        let total = self.cumulative[k + 1] - self.cumulative[k];
        seg.point(seg.invert(s - self.cumulative[k], total))
    }

    pub fn resample(&self, length: f64, stations: usize) -> Vec<DVector<f64>> {
        let m = stations.max(2);
        (0..m)
            .map(|i| self.at(length * i as f64 / (m - 1) as f64))
            .collect()
    }
}

/// Largest distance between arc-length-matched stations of two paths, both
/// truncated to the shorter length. For two parameterisations of one curve
/// this is zero; in general it bounds the Hausdorff distance of the
/// truncated paths from above.
pub fn path_distance(a: &GeodesicTrajectory, b: &GeodesicTrajectory, stations: usize) -> f64 {
    let pa = ArcLengthPath::new(a);
    let pb = ArcLengthPath::new(b);
    let length = pa.length().min(pb.length());
    pa.resample(length, stations)
        .iter()
        .zip(pb.resample(length, stations))
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max)
}
