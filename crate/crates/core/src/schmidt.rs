//! Schmidt decomposition of bipartite pure states,
//! |ψ₁₂⟩ = Σ_i c_i |φ₁ᵢ⟩|φ₂ᵢ⟩ with c_i ≥ 0 descending.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Coefficients truncated below 1e-12 (a product state reports a single
/// coefficient); left basis vectors are eigenvectors of the reduced density
/// operator of subsystem 1. Degenerate coefficients are ordered
/// deterministically: descending by value, ties broken lexicographically on
/// the left vector entries, and each left vector's first significant entry
/// is made real and positive (comparisons are global-phase-free).
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub left_basis: Vec<DVector<C64>>,
    pub right_basis: Vec<DVector<C64>>,
}

impl SchmidtDecomposition {
    /// Rebuild Σ c_i |φ₁ᵢ⟩⊗|φ₂ᵢ⟩.
    pub fn reconstruct(&self) -> DVector<C64> {
        let d1 = self.left_basis[0].len();
        let d2 = self.right_basis[0].len();
        let mut psi = DVector::zeros(d1 * d2);
        for ((c, l), r) in self
            .coefficients
            .iter()
            .zip(&self.left_basis)
            .zip(&self.right_basis)
        {
            for i in 0..d1 {
                for j in 0..d2 {
                    psi[i * d2 + j] += C64::new(*c, 0.0) * l[i] * r[j];
                }
            }
        }
        psi
    }
}

const COEFF_CUTOFF: f64 = 1e-12;

pub fn schmidt_decompose(
    psi: &DVector<C64>,
    dims: (usize, usize),
) -> Result<SchmidtDecomposition> {
    let (d1, d2) = dims;
    if d1 * d2 != psi.len() || d1 == 0 || d2 == 0 {
        return Err(Error::DimensionMismatch(format!(
            "state of length {} is not bipartite {}x{}",
            psi.len(),
            d1,
            d2
        )));
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Unnormalized(norm));
    }
    // Coefficient matrix C_ij = ⟨i⊗j|ψ⟩; ψ = Σ σ_k u_k ⊗ conj(v-row_k).
    let cmat = DMatrix::from_fn(d1, d2, |i, j| psi[i * d2 + j]);
    let svd = cmat.svd(true, true);
    let u = svd.u.as_ref().ok_or_else(|| Error::Numerical("svd u".into()))?;
    let v_t = svd
        .v_t
        .as_ref()
        .ok_or_else(|| Error::Numerical("svd v_t".into()))?;

    let mut triples: Vec<(f64, DVector<C64>, DVector<C64>)> = Vec::new();
    for k in 0..svd.singular_values.len() {
        let c = svd.singular_values[k];
        if c < COEFF_CUTOFF {
            continue;
        }
        let mut left = DVector::from_fn(d1, |i, _| u[(i, k)]);
        let mut right = DVector::from_fn(d2, |j, _| v_t[(k, j)]);
        // phase fix: first significant left entry real positive
        if let Some(idx) = (0..d1).find(|&i| left[i].norm() > 1e-8) {
            let ph = left[idx] / left[idx].norm();
            left.iter_mut().for_each(|x| *x *= ph.conj());
            right.iter_mut().for_each(|x| *x *= ph);
        }
        triples.push((c, left, right));
    }
    triples.sort_by(|a, b| {
        b.0.total_cmp(&a.0).then_with(|| {
            for (x, y) in a.1.iter().zip(b.1.iter()) {
                let ord = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
                if ord != std::cmp::Ordering::Equal {
                    return ord;
                }
            }
            std::cmp::Ordering::Equal
        })
    });

    let out = SchmidtDecomposition {
        coefficients: triples.iter().map(|t| t.0).collect(),
        left_basis: triples.iter().map(|t| t.1.clone()).collect(),
        right_basis: triples.iter().map(|t| t.2.clone()).collect(),
    };

    let err = (out.reconstruct() - psi).norm();
    if err > 1e-10 {
        return Err(Error::Numerical(format!(
            "schmidt reconstruction error {err:.3e}"
        )));
    }
    Ok(out)
}
