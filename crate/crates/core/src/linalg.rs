//! Small dense complex linear-algebra helpers.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::C64;

pub type CMatrix = DMatrix<C64>;

/// Largest absolute entry of `m`.
pub fn max_norm(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// `‖U†U − I‖_max`.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let n = u.nrows();
    let prod = u.adjoint() * u;
    max_norm(&(prod - CMatrix::identity(n, n)))
}

/// `‖H − H†‖_max`.
pub fn hermiticity_residual(h: &CMatrix) -> f64 {
    max_norm(&(h - h.adjoint()))
}

/// `exp(i·t·H)` for Hermitian `H`, via the eigendecomposition `H = V Λ V†`.
///
/// The result is `V diag(e^{i t λ}) V†`, unitary to rounding because `V` is.
pub fn expm_i_hermitian(h: &CMatrix, t: f64) -> Result<CMatrix> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            what: "hermitian generator columns",
            expected: h.nrows(),
            got: h.ncols(),
        });
    }
    let scale = max_norm(h).max(1.0);
    let resid = hermiticity_residual(h);
    if resid > 1e-12 * scale {
        return Err(Error::Numerical(format!(
            "generator is not Hermitian (residual {resid:e})"
        )));
    }
    // Symmetrize so the eigensolver sees an exactly Hermitian input.
    let sym = (h + h.adjoint()).map(|z| z * 0.5);
    let eig = sym.symmetric_eigen();
    let v = eig.eigenvectors;
    let n = h.nrows();
    let mut scaled = v.clone();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = C64::from_polar(1.0, t * lambda);
        for r in 0..n {
            scaled[(r, k)] *= phase;
        }
    }
    Ok(scaled * v.adjoint())
}

/// `U / e^{i arg(U_00)}` style comparison: the largest entrywise difference
/// between `a` and `b` after removing the best-fit global phase.
pub fn distance_up_to_global_phase(a: &CMatrix, b: &CMatrix) -> f64 {
    let overlap: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    max_norm(&(a.map(|z| z * phase) - b))
}
