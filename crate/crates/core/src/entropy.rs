//! Entropic functionals. All values are in bits.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qstate::{BipartiteState, DensityOperator, EIGEN_CLAMP};

/// Eigenvalues and overlaps at or below this are treated as zero when
/// deciding whether one support contains another.
pub const SUPPORT_TOL: f64 = 1e-9;

/// A relative entropy, which is infinite when the support condition fails.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum RelativeEntropy {
    Finite(f64),
    Infinite,
}

impl RelativeEntropy {
    pub fn value(self) -> f64 {
        match self {
            RelativeEntropy::Finite(x) => x,
            RelativeEntropy::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, RelativeEntropy::Finite(_))
    }
}

impl fmt::Display for RelativeEntropy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelativeEntropy::Finite(x) => write!(f, "{x}"),
            RelativeEntropy::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for RelativeEntropy {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RelativeEntropy::Finite(x) => s.serialize_f64(*x),
            RelativeEntropy::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Maps round-off negatives in `[-EIGEN_CLAMP, 0)` to zero.
pub fn clamp_bits(x: f64) -> f64 {
    if (-EIGEN_CLAMP..0.0).contains(&x) {
        0.0
    } else {
        x
    }
}

/// `-Σ p log₂ p` with `0 log 0 = 0`.
pub fn shannon(probs: &[f64]) -> f64 {
    clamp_bits(
        -probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.log2())
            .sum::<f64>(),
    )
}

pub fn von_neumann(rho: &DensityOperator) -> Result<f64> {
    Ok(shannon(&rho.eigenvalues()?))
}

/// `Tr ρ log₂ρ − Tr ρ log₂σ`, from the spectral decompositions of both.
pub fn relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<RelativeEntropy> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: sigma.dim(),
        });
    }
    let r = rho.spectral()?;
    let s = sigma.spectral()?;
    let r_vals = r.clamped();
    let s_vals = s.clamped();
    // overlaps[(k, j)] = |<r_k|s_j>|^2
    let overlaps = (r.eigenvectors.adjoint() * &s.eigenvectors).map(|z| z.norm_sqr());

    let mut cross = 0.0;
    for (k, &lambda) in r_vals.iter().enumerate() {
        if lambda <= SUPPORT_TOL {
            continue;
        }
        let mut null_overlap = 0.0;
        for (j, &mu) in s_vals.iter().enumerate() {
            if mu <= SUPPORT_TOL {
                null_overlap += overlaps[(k, j)];
            } else {
                cross += lambda * overlaps[(k, j)] * mu.log2();
            }
        }
        if null_overlap > SUPPORT_TOL {
            return Ok(RelativeEntropy::Infinite);
        }
    }
    let neg_entropy: f64 = r_vals
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.log2())
        .sum();
    Ok(RelativeEntropy::Finite(clamp_bits(neg_entropy - cross)))
}

/// `S(ρ_A) + S(ρ_B) − S(ρ_AB)`.
pub fn mutual_information(s: &BipartiteState) -> Result<f64> {
    let sa = von_neumann(&s.reduced_a())?;
    let sb = von_neumann(&s.reduced_b())?;
    let sab = von_neumann(s.op())?;
    Ok(clamp_bits(sa + sb - sab))
}

/// `log₂ d − S(ρ)`.
pub fn information_function(rho: &DensityOperator) -> Result<f64> {
    Ok(clamp_bits((rho.dim() as f64).log2() - von_neumann(rho)?))
}
