//! Density-operator algebra.
//!
//! Bipartite operators use a row-major index over `(a, b)`: the composite
//! index of `|a>|b>` is `a * d_b + b`, which is the ordering produced by the
//! Kronecker product `A ⊗ B`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measopt::MeasurementBasis;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Default tolerance for the Hermiticity and trace checks.
pub const VALIDATION_TOL: f64 = 1e-10;

/// Eigenvalues in `[-EIGEN_CLAMP, 0)` are treated as round-off and clamped to zero.
pub const EIGEN_CLAMP: f64 = 1e-9;

const UNITARY_TOL: f64 = 1e-10;
const EIGEN_MAX_ITERS: usize = 10_000;

/// Largest entrywise deviation of `m` from Hermiticity.
pub fn hermiticity_violation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entrywise deviation of `u† u` from the identity.
pub fn unitarity_violation(u: &CMatrix) -> f64 {
    let gram = u.adjoint() * u;
    let n = gram.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

pub(crate) fn check_unitary(u: &CMatrix) -> Result<()> {
    if !u.is_square() {
        return Err(Error::NotSquare {
            rows: u.nrows(),
            cols: u.ncols(),
        });
    }
    let violation = unitarity_violation(u);
    if violation > UNITARY_TOL {
        return Err(Error::NotUnitary { violation });
    }
    Ok(())
}

fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

fn clamp_eigenvalue(x: f64) -> f64 {
    if (-EIGEN_CLAMP..0.0).contains(&x) {
        0.0
    } else {
        x
    }
}

/// Eigendecomposition of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Sorted descending, unclamped.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    pub fn of_hermitian(m: &CMatrix) -> Result<Self> {
        let dim = m.nrows();
        let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, EIGEN_MAX_ITERS)
            .ok_or(Error::EigenConvergence { dim })?;
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let eigenvectors = CMatrix::from_fn(dim, dim, |i, k| eig.eigenvectors[(i, order[k])]);
        Ok(Spectrum {
            eigenvalues,
            eigenvectors,
        })
    }

    /// Eigenvalues with round-off negatives set to zero (no renormalization).
    pub fn clamped(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .map(|&x| clamp_eigenvalue(x))
            .collect()
    }

    /// `V Λ V†`.
    pub fn reassemble(&self) -> CMatrix {
        let lambda = CMatrix::from_diagonal(&CVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&x| Complex64::new(x, 0.0)),
        ));
        &self.eigenvectors * lambda * self.eigenvectors.adjoint()
    }
}

/// A validated density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates `m` at the default tolerances.
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::validate(m, VALIDATION_TOL)
    }

    /// Validates `m`. Hermiticity and trace are checked against `tol`;
    /// eigenvalues must be at least `-max(tol, EIGEN_CLAMP)`.
    /// The stored matrix is the Hermitian part of `m`.
    pub fn validate(m: CMatrix, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let violation = hermiticity_violation(&m);
        if violation > tol {
            return Err(Error::NotHermitian { violation });
        }
        let trace = m.trace();
        let violation = (trace - Complex64::new(1.0, 0.0)).norm();
        if violation > tol {
            return Err(Error::TraceNotOne { violation });
        }
        let matrix = hermitize(&m);
        let spectrum = Spectrum::of_hermitian(&matrix)?;
        let min_eigenvalue = spectrum.eigenvalues.last().copied().unwrap_or(0.0);
        if min_eigenvalue < -tol.max(EIGEN_CLAMP) {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(DensityOperator { matrix })
    }

    /// Wraps a matrix produced by a trace-preserving, positivity-preserving
    /// map of valid operators.
    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        DensityOperator {
            matrix: hermitize(&m),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let mut m = CMatrix::identity(dim, dim);
        m.scale_mut(1.0 / dim as f64);
        DensityOperator { matrix: m }
    }

    /// Diagonal operator from a probability vector.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let m = CMatrix::from_diagonal(&CVector::from_iterator(
            probs.len(),
            probs.iter().map(|&p| Complex64::new(p, 0.0)),
        ));
        Self::new(m)
    }

    /// `|ψ><ψ|`.
    pub fn from_pure(psi: &PureState) -> Self {
        let a = psi.amplitudes();
        DensityOperator {
            matrix: a * a.adjoint(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn spectral(&self) -> Result<Spectrum> {
        Spectrum::of_hermitian(&self.matrix)
    }

    /// Clamped eigenvalues, descending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.spectral()?.clamped())
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `U ρ U†`.
    pub fn rotate(&self, u: &CMatrix) -> Result<Self> {
        check_unitary(u)?;
        if u.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: u.nrows(),
            });
        }
        Ok(DensityOperator::from_trusted(
            u * &self.matrix * u.adjoint(),
        ))
    }

    /// Completely dephasing channel `Σ_i Π_i ρ Π_i` in `basis`.
    pub fn dephase(&self, basis: &MeasurementBasis) -> Result<Self> {
        let populations = self.populations(basis)?;
        let v = basis.vectors();
        let d = self.dim();
        let m = CMatrix::from_fn(d, d, |r, c| {
            (0..d)
                .map(|k| v[(r, k)] * v[(c, k)].conj() * populations[k])
                .sum()
        });
        Ok(DensityOperator::from_trusted(m))
    }

    /// The diagonal `<i|ρ|i>` in `basis`.
    pub fn populations(&self, basis: &MeasurementBasis) -> Result<Vec<f64>> {
        if basis.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: basis.dim(),
            });
        }
        let v = basis.vectors();
        Ok((0..self.dim())
            .map(|k| {
                let col = v.column(k);
                (col.adjoint() * &self.matrix * col)[(0, 0)].re
            })
            .collect())
    }

    /// The matrix `<i|ρ|j>` in `basis`.
    pub fn in_basis(&self, basis: &MeasurementBasis) -> Result<CMatrix> {
        if basis.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: basis.dim(),
            });
        }
        let v = basis.vectors();
        Ok(v.adjoint() * &self.matrix * v)
    }

    /// The incoherent part of `ρ` in the computational basis.
    pub fn incoherent_part(&self) -> IncoherentState {
        IncoherentState {
            diagonal: (0..self.dim())
                .map(|i| self.matrix[(i, i)].re.max(0.0))
                .collect(),
        }
    }
}

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let violation = (amplitudes.norm_squared() - 1.0).abs();
        if violation > VALIDATION_TOL {
            return Err(Error::NotNormalized { violation });
        }
        Ok(PureState { amplitudes })
    }

    pub fn from_slice(amplitudes: &[Complex64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(amplitudes))
    }

    /// Normalizes real amplitudes; convenient for states written as sums of kets.
    pub fn from_real_unnormalized(amplitudes: &[f64]) -> Result<Self> {
        let v = CVector::from_iterator(
            amplitudes.len(),
            amplitudes.iter().map(|&a| Complex64::new(a, 0.0)),
        );
        let norm = v.norm();
        Self::new(v.unscale(norm))
    }

    /// The computational basis vector `|k>`.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[k] = Complex64::new(1.0, 0.0);
        PureState { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator::from_pure(self)
    }
}

/// A state diagonal in the reference basis.
#[derive(Debug, Clone, PartialEq)]
pub struct IncoherentState {
    diagonal: Vec<f64>,
}

impl IncoherentState {
    pub fn new(diagonal: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = diagonal.iter().find(|&&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::NotPositive {
                min_eigenvalue: bad,
            });
        }
        let violation = (diagonal.iter().sum::<f64>() - 1.0).abs();
        if violation > VALIDATION_TOL {
            return Err(Error::TraceNotOne { violation });
        }
        Ok(IncoherentState { diagonal })
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn to_operator(&self) -> DensityOperator {
        let d = self.diagonal.len();
        DensityOperator::from_trusted(CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                Complex64::new(self.diagonal[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// A density operator on `H_A ⊗ H_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    dims: (usize, usize),
    op: DensityOperator,
}

impl BipartiteState {
    pub fn new(op: DensityOperator, dims: (usize, usize)) -> Result<Self> {
        let expected = dims.0 * dims.1;
        if op.dim() != expected || dims.0 == 0 || dims.1 == 0 {
            return Err(Error::DimensionMismatch {
                expected,
                actual: op.dim(),
            });
        }
        Ok(BipartiteState { dims, op })
    }

    pub fn from_pure(psi: &PureState, dims: (usize, usize)) -> Result<Self> {
        Self::new(psi.to_density(), dims)
    }

    /// `a ⊗ b`.
    pub fn tensor(a: &DensityOperator, b: &DensityOperator) -> Self {
        BipartiteState {
            dims: (a.dim(), b.dim()),
            op: DensityOperator::from_trusted(a.matrix().kronecker(b.matrix())),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn op(&self) -> &DensityOperator {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    /// Element `<a b| ρ |a' b'>`.
    pub fn element(&self, a: usize, b: usize, a2: usize, b2: usize) -> Complex64 {
        let db = self.dims.1;
        self.op.matrix()[(a * db + b, a2 * db + b2)]
    }

    pub fn partial_trace(&self, keep: Subsystem) -> DensityOperator {
        let (da, db) = self.dims;
        let m = match keep {
            Subsystem::A => CMatrix::from_fn(da, da, |a, a2| {
                (0..db).map(|b| self.element(a, b, a2, b)).sum()
            }),
            Subsystem::B => CMatrix::from_fn(db, db, |b, b2| {
                (0..da).map(|a| self.element(a, b, a, b2)).sum()
            }),
        };
        DensityOperator::from_trusted(m)
    }

    pub fn reduced_a(&self) -> DensityOperator {
        self.partial_trace(Subsystem::A)
    }

    pub fn reduced_b(&self) -> DensityOperator {
        self.partial_trace(Subsystem::B)
    }

    /// `(U_A ⊗ U_B) ρ (U_A ⊗ U_B)†`.
    pub fn rotate_local(&self, ua: &CMatrix, ub: &CMatrix) -> Result<Self> {
        let op = self.op.rotate(&ua.kronecker(ub))?;
        Ok(BipartiteState {
            dims: self.dims,
            op,
        })
    }
}
