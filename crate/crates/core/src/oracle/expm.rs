use alloc::vec::Vec;

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};

/// Largest dimension accepted by the dense references.
pub const MAX_DENSE_DIM: usize = 512;

fn guard(h: &CMatrix) -> Result<()> {
    if h.nrows() != h.ncols() {
        return Err(Error::DimensionMismatch { expected: h.nrows(), found: h.ncols() });
    }
    if h.nrows() > MAX_DENSE_DIM {
        return Err(Error::DimensionTooLarge { dim: h.nrows(), max: MAX_DENSE_DIM });
    }
    Ok(())
}

/// `exp(−iHt) ψ₀` from the full eigendecomposition of the Hermitian `h`.
pub fn dense_expm_evolve(h: &CMatrix, psi0: &[C64], t: f64) -> Result<Vec<C64>> {
    guard(h)?;
    if psi0.len() != h.nrows() {
        return Err(Error::DimensionMismatch { expected: h.nrows(), found: psi0.len() });
    }
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let coeffs = v.adjoint() * CVector::from_column_slice(psi0);
    let phased = CVector::from_iterator(
        coeffs.len(),
        coeffs.iter().zip(eig.eigenvalues.iter()).map(|(c, e)| c * C64::new(0.0, -e * t).exp()),
    );
    Ok((v * phased).iter().cloned().collect())
}

/// `exp(−iHt)` by Taylor series with scaling and squaring.
pub fn taylor_expm(h: &CMatrix, t: f64) -> Result<CMatrix> {
    guard(h)?;
    let n = h.nrows();
    let a = h * C64::new(0.0, -t);
    let norm: f64 = (0..n).map(|r| (0..n).map(|c| a[(r, c)].norm()).sum::<f64>()).fold(0.0, f64::max);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = a * C64::new(scale, 0.0);
    let mut result = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for k in 1..40 {
        term = &term * &a * C64::new(1.0 / k as f64, 0.0);
        result += &term;
        if term.iter().all(|z| z.norm() < 1e-18) {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}
