//! Dense complex operators on finite-dimensional Hilbert spaces, with the
//! handful of decompositions everything else is built on.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// A square complex matrix acting on a finite-dimensional space.
///
/// Entries are validated to be finite on construction; everything downstream
/// (density operators, effects, projectors) wraps this type. Values are
/// immutable after construction and all operations are pure functions, so
/// operators can be shared freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: DMatrix<C64>,
}

impl Operator {
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() == 0 || mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "operator must be square and non-empty, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if !mat.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { mat })
    }

    /// Build from row-major entries.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for dim {}, got {}",
                dim * dim,
                dim,
                entries.len()
            )));
        }
        Self::from_matrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        Self::from_matrix(DMatrix::from_fn(dim, dim, f))
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
        }
    }

    /// Rank-one projector |v⟩⟨v| (input need not be normalized).
    pub fn outer(v: &DVector<C64>) -> Self {
        Self {
            mat: v * v.adjoint(),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self {
            mat: self.mat.clone() * s,
        }
    }

    /// Largest entry magnitude, the max-norm used by all validation checks.
    pub fn norm_max(&self) -> f64 {
        self.mat.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// ‖A − A†‖_max.
    pub fn hermiticity_defect(&self) -> f64 {
        let adj = self.mat.adjoint();
        (&self.mat - adj).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// ‖U†U − I‖_max.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let prod = self.mat.adjoint() * &self.mat;
        let eye = DMatrix::<C64>::identity(n, n);
        (prod - eye).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Kronecker product, left factor first: (A ⊗ B)ψ_o ⊗ ψ_a.
    pub fn tensor(&self, other: &Operator) -> Operator {
        Operator {
            mat: self.mat.kronecker(&other.mat),
        }
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.mat * v
    }

    /// ⟨v|A|v⟩.
    pub fn expectation(&self, v: &DVector<C64>) -> C64 {
        (v.adjoint() * &self.mat * v)[(0, 0)]
    }

    /// Eigendecomposition of a Hermitian operator; eigenvalues ascending.
    pub fn hermitian_eigen(&self, tol: f64) -> Result<HermitianEigen> {
        let defect = self.hermiticity_defect();
        if defect > tol {
            return Err(Error::NotHermitian {
                defect,
                tolerance: tol,
            });
        }
        // Symmetrize so roundoff below `tol` cannot leak into the solver.
        let herm = (&self.mat + self.mat.adjoint()) * C64::new(0.5, 0.0);
        let eig = herm.symmetric_eigen();
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = DMatrix::<C64>::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        Ok(HermitianEigen { values, vectors })
    }

    /// Smallest eigenvalue of a Hermitian operator.
    pub fn min_eigenvalue(&self, tol: f64) -> Result<f64> {
        Ok(self.hermitian_eigen(tol)?.values[0])
    }

    /// exp(−i·H·t) for Hermitian `self`, via eigendecomposition (ħ = 1).
    pub fn expi(&self, t: f64, tol: f64) -> Result<Operator> {
        let eig = self.hermitian_eigen(tol)?;
        Ok(eig.apply(|x| (C64::new(0.0, -1.0) * x * t).exp()))
    }
}

impl std::ops::Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions must match");
        Operator {
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl std::ops::Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions must match");
        Operator {
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl std::ops::Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions must match");
        Operator {
            mat: &self.mat * &rhs.mat,
        }
    }
}

/// Eigenvalues (ascending) and the matching unitary of eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, ordered like `values`.
    pub vectors: DMatrix<C64>,
}

impl HermitianEigen {
    /// V f(Λ) V†.
    pub fn apply(&self, mut f: impl FnMut(f64) -> C64) -> Operator {
        let n = self.values.len();
        let mut d = DMatrix::zeros(n, n);
        for i in 0..n {
            d[(i, i)] = f(self.values[i]);
        }
        Operator {
            mat: &self.vectors * d * self.vectors.adjoint(),
        }
    }

    /// V diag(values) V† with caller-replaced eigenvalues (index-aligned
    /// with `self.values`).
    pub fn with_values(&self, values: &[f64]) -> Operator {
        assert_eq!(values.len(), self.values.len());
        let n = values.len();
        let mut d = DMatrix::zeros(n, n);
        for i in 0..n {
            d[(i, i)] = C64::new(values[i], 0.0);
        }
        Operator {
            mat: &self.vectors * d * self.vectors.adjoint(),
        }
    }
}

/// [A, B]₋ = AB − BA. Panics if dimensions differ.
pub fn commutator(a: &Operator, b: &Operator) -> Operator {
    assert_eq!(a.dim(), b.dim(), "commutator needs equal dimensions");
    &(a * b) - &(b * a)
}

/// ‖A − B‖_max, the workhorse of every agreement check in the test suites.
pub fn max_abs_diff(a: &Operator, b: &Operator) -> f64 {
    assert_eq!(a.dim(), b.dim(), "operator dimensions must match");
    (&a.mat.clone() - &b.mat)
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
}

/// Orthonormal Hermitian operator basis for dimension `d` (d² elements,
/// orthonormal under Tr(AB)): normalized identity first, then the
/// generalized Gell-Mann matrices.
pub fn hermitian_basis(d: usize) -> Vec<Operator> {
    let mut basis = Vec::with_capacity(d * d);
    let norm = 1.0 / (d as f64).sqrt();
    basis.push(Operator::identity(d).scaled(C64::new(norm, 0.0)));
    basis.extend(traceless_hermitian_basis(d));
    basis
}

/// The d²−1 traceless generalized Gell-Mann matrices, orthonormal under
/// Tr(AB). Used for density-operator parametrizations with the trace pinned.
pub fn traceless_hermitian_basis(d: usize) -> Vec<Operator> {
    let mut basis = Vec::with_capacity(d * d - 1);
    let s = 1.0 / 2f64.sqrt();
    for i in 0..d {
        for j in (i + 1)..d {
            basis.push(
                Operator::from_fn(d, |r, c| {
                    if (r, c) == (i, j) || (r, c) == (j, i) {
                        C64::new(s, 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
                .expect("static basis element"),
            );
            basis.push(
                Operator::from_fn(d, |r, c| {
                    if (r, c) == (i, j) {
                        C64::new(0.0, -s)
                    } else if (r, c) == (j, i) {
                        C64::new(0.0, s)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
                .expect("static basis element"),
            );
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        basis.push(
            Operator::from_fn(d, |r, c| {
                if r != c {
                    C64::new(0.0, 0.0)
                } else if r < l {
                    C64::new(norm, 0.0)
                } else if r == l {
                    C64::new(-(l as f64) * norm, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .expect("static basis element"),
        );
    }
    basis
}
