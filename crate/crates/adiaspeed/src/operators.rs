//! Dense Hermitian linear algebra: operators, spectral decompositions, and
//! state vectors.
//!
//! Everything downstream (Hamiltonian families, eigenstate tracking, time
//! evolution, Gaussian filters) is built on the three types here. Matrices
//! are dense and eigendecomposition is the universal primitive; target
//! dimensions stay small enough (<= ~2^10) that O(d^3) is never the
//! bottleneck.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance for the Hermiticity check at construction.
const HERMITICITY_TOL: f64 = 1e-12;

/// Default threshold below which two eigenvalues count as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

/// A dense complex Hermitian matrix in dimensionless energy units.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    mat: DMatrix<Complex64>,
}

impl HermitianOperator {
    /// Validates Hermiticity (absolute tolerance 1e-12) and wraps the matrix.
    ///
    /// The worst offending entry pair is named in the error, so a failed
    /// load points straight at the data problem.
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch {
                context: "Hermitian operator must be square",
                got: mat.ncols(),
                expected: mat.nrows(),
            });
        }
        if mat.nrows() < 2 {
            return Err(Error::DimensionMismatch {
                context: "operator dimension must be at least 2",
                got: mat.nrows(),
                expected: 2,
            });
        }
        let mut worst = (0usize, 0usize, 0.0f64);
        for i in 0..mat.nrows() {
            for j in i..mat.ncols() {
                let diff = (mat[(i, j)] - mat[(j, i)].conj()).norm();
                if diff > worst.2 {
                    worst = (i, j, diff);
                }
            }
        }
        if worst.2 > HERMITICITY_TOL {
            let (i, j, diff) = worst;
            return Err(Error::NotHermitian {
                row: i,
                col: j,
                found: format!("{:+.6e}{:+.6e}i", mat[(i, j)].re, mat[(i, j)].im),
                expected: format!("{:+.6e}{:+.6e}i", mat[(j, i)].re, -mat[(j, i)].im),
                diff,
            });
        }
        Ok(Self { mat })
    }

    /// Builds from a row-major slice of entries.
    pub fn from_row_major(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                context: "row-major entry count",
                got: entries.len(),
                expected: dim * dim,
            });
        }
        let mat = DMatrix::from_fn(dim, dim, |i, j| entries[i * dim + j]);
        Self::new(mat)
    }

    /// The identity operator of the given dimension.
    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
        }
    }

    /// Real linear combination `a*h1 + b*h2`; closed on Hermitian inputs, so
    /// no re-validation is performed.
    pub fn linear_combination(a: f64, h1: &Self, b: f64, h2: &Self) -> Result<Self> {
        if h1.dim() != h2.dim() {
            return Err(Error::DimensionMismatch {
                context: "linear combination of operators",
                got: h2.dim(),
                expected: h1.dim(),
            });
        }
        let mat = &h1.mat * Complex64::new(a, 0.0) + &h2.mat * Complex64::new(b, 0.0);
        Ok(Self { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.mat[(i, j)]
    }

    /// Raw matrix access for numerics that want to stay in nalgebra land.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// Expectation value `<psi|H|psi>` (real for Hermitian H).
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "expectation value",
                got: psi.dim(),
                expected: self.dim(),
            });
        }
        let hv = &self.mat * &psi.v;
        Ok(psi.v.dotc(&hv).re)
    }

    /// Eigendecomposition with ascending eigenvalues and canonical phases.
    pub fn eig(&self) -> SpectralDecomposition {
        let se = self.mat.clone().symmetric_eigen();
        let dim = self.dim();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
        let eigenvalues: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
        let mut eigenvectors = DMatrix::zeros(dim, dim);
        for (col, &k) in order.iter().enumerate() {
            let mut v: DVector<Complex64> = se.eigenvectors.column(k).into_owned();
            canonicalize_phase(&mut v);
            eigenvectors.set_column(col, &v);
        }
        SpectralDecomposition {
            eigenvalues,
            eigenvectors,
        }
    }

    /// Largest absolute eigenvalue (the spectral norm, H being Hermitian).
    pub fn spectral_norm(&self) -> f64 {
        self.eig()
            .eigenvalues
            .iter()
            .fold(0.0, |m, &e| m.max(e.abs()))
    }
}

/// Rotates `v` so its largest-magnitude component (first such index on ties
/// within 1e-12) is real and positive, making decompositions deterministic.
fn canonicalize_phase(v: &mut DVector<Complex64>) {
    let mut best = 0usize;
    let mut best_mag = 0.0f64;
    for (i, c) in v.iter().enumerate() {
        let m = c.norm();
        if m > best_mag + 1e-12 {
            best_mag = m;
            best = i;
        }
    }
    let pivot = v[best];
    if pivot.norm() > 0.0 {
        let phase = pivot / pivot.norm();
        let correction = phase.conj();
        for c in v.iter_mut() {
            *c *= correction;
        }
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian
/// operator.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, k: usize) -> f64 {
        self.eigenvalues[k]
    }

    /// The k-th eigenvector as a normalized state.
    pub fn eigenstate(&self, k: usize) -> StateVector {
        StateVector {
            v: self.eigenvectors.column(k).into_owned(),
        }
    }

    /// Matrix of eigenvectors (columns ordered like the eigenvalues).
    pub fn eigenvector_matrix(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    /// Minimum distance from eigenvalue `k` to the rest of the spectrum,
    /// using the default degeneracy threshold.
    pub fn spectral_gap(&self, k: usize) -> Result<f64> {
        self.spectral_gap_with_threshold(k, DEGENERACY_THRESHOLD)
    }

    /// Same as [`spectral_gap`](Self::spectral_gap) with a caller-chosen
    /// degeneracy threshold.
    pub fn spectral_gap_with_threshold(&self, k: usize, threshold: f64) -> Result<f64> {
        let ek = self.eigenvalues[k];
        let gap = self
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, &e)| (e - ek).abs())
            .fold(f64::INFINITY, f64::min);
        if gap < threshold {
            return Err(Error::DegenerateLevel {
                level: k,
                gap,
                threshold,
            });
        }
        Ok(gap)
    }

    /// Applies `f(H)` in the eigenbasis: returns `sum_k f(E_k) <E_k|psi> |E_k>`.
    /// The output may be unnormalized.
    pub fn apply_function(
        &self,
        f: impl Fn(f64) -> Complex64,
        psi: &StateVector,
    ) -> Result<StateVector> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "matrix function application",
                got: psi.dim(),
                expected: self.dim(),
            });
        }
        let coeffs = self.eigenvectors.adjoint() * &psi.v;
        let scaled = DVector::from_fn(self.dim(), |k, _| coeffs[k] * f(self.eigenvalues[k]));
        Ok(StateVector {
            v: &self.eigenvectors * scaled,
        })
    }
}

/// Applies a scalar function of a Hermitian operator to a state via a fresh
/// eigendecomposition. Hot loops should decompose once and call
/// [`SpectralDecomposition::apply_function`] instead.
pub fn apply_matrix_function(
    h: &HermitianOperator,
    f: impl Fn(f64) -> Complex64,
    psi: &StateVector,
) -> Result<StateVector> {
    h.eig().apply_function(f, psi)
}

/// A complex state vector; normalized for physical states, unnormalized
/// only as a projector output.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    v: DVector<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        Self {
            v: DVector::from_vec(amplitudes),
        }
    }

    pub fn from_dvector(v: DVector<Complex64>) -> Self {
        Self { v }
    }

    /// Basis state |index> of the given dimension.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        Self { v }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn amplitude(&self, i: usize) -> Complex64 {
        self.v[i]
    }

    pub fn vector(&self) -> &DVector<Complex64> {
        &self.v
    }

    pub fn norm(&self) -> f64 {
        self.v.norm()
    }

    pub fn norm_squared(&self) -> f64 {
        self.v.norm_squared()
    }

    /// Inner product `<self|other>` (conjugate-linear in `self`).
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.v.dotc(&other.v)
    }

    /// Returns the unit-norm copy of this state.
    pub fn normalized(&self) -> StateVector {
        let n = self.norm();
        StateVector {
            v: &self.v / Complex64::new(n, 0.0),
        }
    }

    /// Multiplies by a complex scalar (used by gauge fixing).
    pub fn scaled(&self, c: Complex64) -> StateVector {
        StateVector { v: &self.v * c }
    }
}
