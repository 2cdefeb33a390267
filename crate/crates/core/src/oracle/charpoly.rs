use nalgebra::{DMatrix, DVector};

use super::check_distinct;
use crate::error::{Error, Result};

/// Vandermonde systems with a 2-norm condition number above this are refused.
pub const CONDITION_LIMIT: f64 = 1e12;

/// The integers `0, 1, …, n` mapped affinely onto `[-s, s]` with
/// `s = max(‖M‖_∞, 1)`.
///
/// Centring matters: on `[0, n·s]` the degree-6 Vandermonde solve loses
/// about four more digits than on the symmetric interval.
pub fn default_nodes(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let norm_inf = m
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let scale = norm_inf.max(1.0);
    let half = n as f64 / 2.0;
    (0..=n).map(|k| (k as f64 - half) / half * scale).collect()
}

/// Coefficients of `det(M + ΛI)` in ascending powers, recovered from its
/// values at `n + 1` nodes by solving the Vandermonde system.
pub fn charpoly_by_interpolation(m: &DMatrix<f64>, nodes: Option<&[f64]>) -> Result<Vec<f64>> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(Error::Config(format!(
            "characteristic polynomial needs a non-empty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    let owned;
    let nodes = match nodes {
        Some(v) => v,
        None => {
            owned = default_nodes(m);
            &owned
        }
    };
    if nodes.len() != n + 1 {
        return Err(Error::Config(format!(
            "{} interpolation nodes given, {} needed",
            nodes.len(),
            n + 1
        )));
    }
    check_distinct(nodes)?;

    let vander = DMatrix::from_fn(n + 1, n + 1, |i, j| nodes[i].powi(j as i32));
    let sv = vander.singular_values();
    let cond = sv.max() / sv.min();
    if !(cond <= CONDITION_LIMIT) {
        return Err(Error::OracleConditioning(cond));
    }
    let id = DMatrix::<f64>::identity(n, n);
    let values = DVector::from_iterator(
        n + 1,
        nodes.iter().map(|&l| (m + &id * l).determinant()),
    );
    let coeffs = vander
        .lu()
        .solve(&values)
        .ok_or(Error::OracleConditioning(f64::INFINITY))?;
    Ok(coeffs.as_slice().to_vec())
}
