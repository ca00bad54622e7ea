use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{check_unitary, CMatrix};

/// An orthonormal basis `{|v_i>}`, i.e. the rank-1 projectors `Π_i = |v_i><v_i|`.
///
/// Stored as the unitary whose columns are the basis vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    vectors: CMatrix,
}

impl MeasurementBasis {
    pub fn new(vectors: CMatrix) -> Result<Self> {
        check_unitary(&vectors)?;
        Ok(MeasurementBasis { vectors })
    }

    pub fn computational(dim: usize) -> Self {
        MeasurementBasis {
            vectors: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    /// `{|a_i>|b_j>}` ordered row-major over `(i, j)`.
    pub fn product(&self, other: &MeasurementBasis) -> Self {
        MeasurementBasis {
            vectors: self.vectors.kronecker(&other.vectors),
        }
    }

    /// The basis `{U|v_i>}`.
    pub fn rotated(&self, u: &CMatrix) -> Result<Self> {
        check_unitary(u)?;
        if u.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: u.nrows(),
            });
        }
        Ok(MeasurementBasis {
            vectors: u * &self.vectors,
        })
    }

    /// Reorders the vectors: new vector `k` is old vector `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let d = self.dim();
        MeasurementBasis {
            vectors: CMatrix::from_fn(d, d, |r, k| self.vectors[(r, order[k])]),
        }
    }

    /// Multiplies vector `k` by `e^{i phases[k]}`; the projectors are unchanged.
    pub fn rephased(&self, phases: &[f64]) -> Self {
        let d = self.dim();
        MeasurementBasis {
            vectors: CMatrix::from_fn(d, d, |r, k| {
                self.vectors[(r, k)] * Complex64::from_polar(1.0, phases[k])
            }),
        }
    }

    /// Largest entrywise deviation of the Gram matrix from the identity.
    pub fn gram_residual(&self) -> f64 {
        crate::qstate::unitarity_violation(&self.vectors)
    }
}

/// Rotation angles and phases that generate a [`MeasurementBasis`].
///
/// For each pair `i < j` in lexicographic order the vector holds the angle
/// `θ_ij ∈ [0, π/2]` followed by the phase `φ_ij ∈ [0, 2π)`, so the length is
/// `d(d-1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamVector {
    dim: usize,
    params: Vec<f64>,
}

impl ParamVector {
    pub fn len_for(dim: usize) -> usize {
        dim * dim.saturating_sub(1)
    }

    pub fn new(dim: usize, params: Vec<f64>) -> Result<Self> {
        let expected = Self::len_for(dim);
        if params.len() != expected {
            return Err(Error::BadLength {
                dim,
                expected,
                actual: params.len(),
            });
        }
        Ok(ParamVector { dim, params })
    }

    pub fn zeros(dim: usize) -> Self {
        ParamVector {
            dim,
            params: vec![0.0; Self::len_for(dim)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.params
    }

    /// Angles clamped into `[0, π/2]`, phases wrapped into `[0, 2π)`.
    pub fn canonical(&self) -> Self {
        let params = self
            .params
            .iter()
            .enumerate()
            .map(|(k, &x)| {
                if is_phase(k) {
                    wrap_phase(x)
                } else {
                    x.clamp(0.0, FRAC_PI_2)
                }
            })
            .collect();
        ParamVector {
            dim: self.dim,
            params,
        }
    }

    pub fn to_basis(&self) -> MeasurementBasis {
        basis_from_params(self)
    }
}

pub(crate) fn is_phase(k: usize) -> bool {
    k % 2 == 1
}

pub(crate) fn wrap_phase(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Composes the two-level rotations `G_01 G_02 … G_(d-2)(d-1)` (lexicographic
/// pair order, applied to the identity from the right). `G_ij` acts on the
/// `(i, j)` plane as
///
/// ```text
/// [  cos θ           -e^{-iφ} sin θ ]
/// [  e^{iφ} sin θ     cos θ         ]
/// ```
///
/// so for `d = 2` the basis vectors are `(cos θ, e^{iφ} sin θ)` and
/// `(-e^{-iφ} sin θ, cos θ)`.
pub fn basis_from_params(p: &ParamVector) -> MeasurementBasis {
    let d = p.dim;
    let mut u = CMatrix::identity(d, d);
    let mut k = 0;
    for i in 0..d {
        for j in (i + 1)..d {
            let (theta, phi) = (p.params[k], p.params[k + 1]);
            k += 2;
            let (s, c) = theta.sin_cos();
            let e = Complex64::from_polar(1.0, phi);
            for r in 0..d {
                let ui = u[(r, i)];
                let uj = u[(r, j)];
                u[(r, i)] = ui * c + uj * e * s;
                u[(r, j)] = -ui * e.conj() * s + uj * c;
            }
        }
    }
    MeasurementBasis { vectors: u }
}
