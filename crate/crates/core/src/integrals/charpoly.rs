use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Coefficients of `det(M + ΛI)` in ascending powers `Λ⁰ … Λⁿ`.
///
/// Faddeev–LeVerrier applied to `A = -M`, since `det(M + ΛI) = det(ΛI - A)`:
/// with `c_n = 1` and `N_0 = 0`,
/// `N_k = A N_{k-1} + c_{n-k+1} I` and `c_{n-k} = -tr(A N_k) / k`.
/// The leading coefficient is exactly `1`.
pub fn charpoly_coefficients(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(Error::Config(format!(
            "characteristic polynomial needs a non-empty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    let a = -m;
    let id = DMatrix::<f64>::identity(n, n);
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut acc = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        acc = &a * &acc + &id * coeffs[n - k + 1];
        coeffs[n - k] = -(&a * &acc).trace() / k as f64;
    }
    Ok(coeffs)
}
