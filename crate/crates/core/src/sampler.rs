//! Seeded random states and unitaries.
//!
//! Every sampler draws from a `ChaCha20Rng` seeded with `seed_from_u64`. The
//! generator choice is part of the reproducibility contract: changing it
//! changes every sweep output.
//!
//! Complex normals are `(x + iy)/√2` with `x, y` independent `N(0, 1)` draws,
//! real part first.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::qstate::{CMatrix, DensityOperator, PureState};

pub type SampleRng = ChaCha20Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows x cols` matrix of complex normals, filled row by row.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let entries: Vec<Complex64> = (0..rows * cols).map(|_| complex_normal(rng)).collect();
    CMatrix::from_row_slice(rows, cols, &entries)
}

pub fn haar_pure_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> PureState {
    loop {
        let v = DVector::from_iterator(d, (0..d).map(|_| complex_normal(rng)));
        let norm = v.norm();
        if norm > 0.0 {
            if let Ok(psi) = PureState::new(v.unscale(norm)) {
                return psi;
            }
        }
    }
}

pub fn ginibre_density_with<R: Rng + ?Sized>(
    d: usize,
    rank: usize,
    rng: &mut R,
) -> Result<DensityOperator> {
    if rank == 0 || rank > d {
        return Err(Error::BadRank { rank, dim: d });
    }
    let g = gaussian_matrix(d, rank, rng);
    let mut m = &g * g.adjoint();
    let trace = m.trace().re;
    m.unscale_mut(trace);
    DensityOperator::new(m)
}

/// QR of a complex Gaussian matrix with each column of `Q` multiplied by the
/// phase of the matching diagonal entry of `R`, so that `R` has a positive
/// diagonal. Without that correction the result is not Haar distributed.
pub fn random_unitary_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let z = gaussian_matrix(d, d, rng);
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..d {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 {
            rkk / rkk.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Normalized vector of independent complex normals.
pub fn haar_pure(d: usize, seed: u64) -> PureState {
    haar_pure_with(d, &mut rng(seed))
}

/// `G G† / Tr(G G†)` with `G` a `d x rank` complex Gaussian matrix.
pub fn ginibre_density(d: usize, rank: usize, seed: u64) -> Result<DensityOperator> {
    ginibre_density_with(d, rank, &mut rng(seed))
}

/// Haar-random `d x d` unitary.
pub fn random_unitary(d: usize, seed: u64) -> CMatrix {
    random_unitary_with(d, &mut rng(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::unitarity_violation;
    use approx::assert_abs_diff_eq;

    #[test]
    fn one_dimensional_pure_state_has_unit_modulus() {
        let psi = haar_pure(1, 42);
        assert_abs_diff_eq!(psi.amplitudes()[0].norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn pure_states_are_normalized() {
        for seed in 0..100 {
            let psi = haar_pure(1 + (seed as usize % 6), seed);
            assert_abs_diff_eq!(psi.amplitudes().norm_squared(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn qubit_population_is_uniform_on_average() {
        // |a0|^2 is Beta(1, 1) = Uniform[0, 1] for d = 2.
        let n = 10_000;
        let mut r = rng(2024);
        let mean: f64 = (0..n)
            .map(|_| haar_pure_with(2, &mut r).amplitudes()[0].norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((0.48..=0.52).contains(&mean), "mean {mean}");
    }

    #[test]
    fn rank_one_ginibre_is_pure() {
        for seed in 0..10 {
            let rho = ginibre_density(4, 1, seed).unwrap();
            assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn full_rank_ginibre_validates() {
        for seed in 0..10 {
            let rho = ginibre_density(4, 4, seed).unwrap();
            let ev = rho.eigenvalues().unwrap();
            assert!(ev[3] > 0.0);
        }
    }

    #[test]
    fn bad_rank_is_rejected() {
        assert!(matches!(
            ginibre_density(3, 0, 1),
            Err(Error::BadRank { .. })
        ));
        assert!(matches!(
            ginibre_density(3, 4, 1),
            Err(Error::BadRank { rank: 4, dim: 3 })
        ));
    }

    #[test]
    fn samplers_are_deterministic() {
        assert_eq!(
            ginibre_density(4, 2, 7).unwrap(),
            ginibre_density(4, 2, 7).unwrap()
        );
        assert_eq!(random_unitary(3, 11), random_unitary(3, 11));
        assert_eq!(haar_pure(5, 13), haar_pure(5, 13));
        assert_ne!(
            ginibre_density(4, 2, 7).unwrap(),
            ginibre_density(4, 2, 8).unwrap()
        );
    }

    #[test]
    fn unitaries_are_unitary() {
        let u = random_unitary(1, 3);
        assert_abs_diff_eq!(u[(0, 0)].norm(), 1.0, epsilon = 1e-12);
        for seed in 0..20 {
            let u = random_unitary(1 + seed as usize % 8, seed);
            assert!(unitarity_violation(&u) <= 1e-10);
        }
    }

    #[test]
    fn rotated_states_stay_valid() {
        for seed in 0..10 {
            let rho = ginibre_density(4, 3, seed).unwrap();
            let u = random_unitary(4, seed + 100);
            let rotated = rho.rotate(&u).unwrap();
            DensityOperator::new(rotated.into_matrix()).unwrap();
        }
    }
}
