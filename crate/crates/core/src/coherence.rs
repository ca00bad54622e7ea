//! Coherence measures relative to a chosen basis.

use crate::entropy::{clamp_bits, shannon, von_neumann};
use crate::error::{Error, Result};
use crate::measopt::MeasurementBasis;
use crate::qstate::{BipartiteState, DensityOperator, PureState};

/// A coherence value together with the basis it was computed in.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceValue {
    pub value: f64,
    pub basis: MeasurementBasis,
}

/// Relative entropy of coherence, `S(ρ_diag) − S(ρ)` with `ρ_diag` the
/// dephased state in `basis`.
pub fn c_re(rho: &DensityOperator, basis: &MeasurementBasis) -> Result<CoherenceValue> {
    let populations = rho.populations(basis)?;
    let value = clamp_bits(shannon(&populations) - von_neumann(rho)?);
    Ok(CoherenceValue {
        value,
        basis: basis.clone(),
    })
}

/// `Σ_{i≠j} |<i|ρ|j>|`.
pub fn c_l1(rho: &DensityOperator, basis: &MeasurementBasis) -> Result<CoherenceValue> {
    let m = rho.in_basis(basis)?;
    let d = rho.dim();
    let mut value = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                value += m[(i, j)].norm();
            }
        }
    }
    Ok(CoherenceValue {
        value,
        basis: basis.clone(),
    })
}

/// The uniform superposition `Σ_i |i>/√d`.
pub fn maximally_coherent(d: usize) -> PureState {
    PureState::from_real_unnormalized(&vec![1.0; d]).expect("uniform vector normalizes")
}

/// `log₂ d − C_RE(ρ) − S(ρ)`, which reduces to `log₂ d − S(ρ_diag)`.
pub fn uncertainty_gap(rho: &DensityOperator, basis: &MeasurementBasis) -> Result<f64> {
    let c = c_re(rho, basis)?.value;
    Ok((rho.dim() as f64).log2() - c - von_neumann(rho)?)
}

/// `C_RE(ρ_AB) − C_RE(ρ_A) − C_RE(ρ_B)` in the product basis `basis_a ⊗ basis_b`.
pub fn superadditivity_gap(
    s: &BipartiteState,
    basis_a: &MeasurementBasis,
    basis_b: &MeasurementBasis,
) -> Result<f64> {
    let (da, db) = s.dims();
    if basis_a.dim() != da {
        return Err(Error::DimensionMismatch {
            expected: da,
            actual: basis_a.dim(),
        });
    }
    if basis_b.dim() != db {
        return Err(Error::DimensionMismatch {
            expected: db,
            actual: basis_b.dim(),
        });
    }
    let joint = c_re(s.op(), &basis_a.product(basis_b))?.value;
    let ca = c_re(&s.reduced_a(), basis_a)?.value;
    let cb = c_re(&s.reduced_b(), basis_b)?.value;
    Ok(joint - ca - cb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::CMatrix;
    use crate::sampler;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn comp(d: usize) -> MeasurementBasis {
        MeasurementBasis::computational(d)
    }

    fn bell() -> BipartiteState {
        BipartiteState::from_pure(
            &PureState::from_real_unnormalized(&[1.0, 0.0, 0.0, 1.0]).unwrap(),
            (2, 2),
        )
        .unwrap()
    }

    #[test]
    fn c_re_examples() {
        let psi1 = PureState::from_real_unnormalized(&[1.0, 1.0, -1.0, 1.0])
            .unwrap()
            .to_density();
        assert_abs_diff_eq!(c_re(&psi1, &comp(4)).unwrap().value, 2.0, epsilon = 1e-9);

        let diag = DensityOperator::diagonal(&[0.1, 0.6, 0.3]).unwrap();
        assert_abs_diff_eq!(c_re(&diag, &comp(3)).unwrap().value, 0.0, epsilon = 1e-12);

        assert_abs_diff_eq!(
            c_re(bell().op(), &comp(4)).unwrap().value,
            1.0,
            epsilon = 1e-9
        );

        assert!(matches!(
            c_re(&psi1, &comp(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn c_re_records_its_basis() {
        let basis = MeasurementBasis::new(sampler::random_unitary(2, 5)).unwrap();
        let rho = sampler::ginibre_density(2, 2, 1).unwrap();
        assert_eq!(c_re(&rho, &basis).unwrap().basis, basis);
    }

    #[test]
    fn c_l1_examples() {
        let diag = DensityOperator::diagonal(&[0.4, 0.6]).unwrap();
        assert_eq!(c_l1(&diag, &comp(2)).unwrap().value, 0.0);
        let plus = maximally_coherent(2).to_density();
        assert_abs_diff_eq!(c_l1(&plus, &comp(2)).unwrap().value, 1.0, epsilon = 1e-12);
        for d in 2..7 {
            let mcs = maximally_coherent(d).to_density();
            assert_abs_diff_eq!(
                c_l1(&mcs, &comp(d)).unwrap().value,
                (d - 1) as f64,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn maximally_coherent_examples() {
        let plus = maximally_coherent(2);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(plus.amplitudes()[0].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(plus.amplitudes()[1].re, s, epsilon = 1e-15);

        let psi3 = PureState::from_real_unnormalized(&[1.0; 4]).unwrap();
        assert!((maximally_coherent(4).amplitudes() - psi3.amplitudes()).norm() < 1e-15);
        assert_abs_diff_eq!(
            c_re(&maximally_coherent(4).to_density(), &comp(4))
                .unwrap()
                .value,
            2.0,
            epsilon = 1e-9
        );
        for d in 1..9 {
            let c = c_re(&maximally_coherent(d).to_density(), &comp(d))
                .unwrap()
                .value;
            assert_abs_diff_eq!(c, (d as f64).log2(), epsilon = 1e-9);
        }
    }

    #[test]
    fn uncertainty_gap_examples() {
        assert_abs_diff_eq!(
            uncertainty_gap(&maximally_coherent(4).to_density(), &comp(4)).unwrap(),
            0.0,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            uncertainty_gap(&DensityOperator::maximally_mixed(3), &comp(3)).unwrap(),
            0.0,
            epsilon = 1e-9
        );
        let zero = DensityOperator::diagonal(&[1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(
            uncertainty_gap(&zero, &comp(2)).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn superadditivity_examples() {
        let x = sampler::ginibre_density(2, 2, 3).unwrap();
        let y = sampler::ginibre_density(3, 3, 4).unwrap();
        let gap = superadditivity_gap(&BipartiteState::tensor(&x, &y), &comp(2), &comp(3)).unwrap();
        assert_abs_diff_eq!(gap, 0.0, epsilon = 1e-9);

        for d in 2..4 {
            let mcs = BipartiteState::from_pure(&maximally_coherent(d * d), (d, d)).unwrap();
            assert_abs_diff_eq!(
                superadditivity_gap(&mcs, &comp(d), &comp(d)).unwrap(),
                0.0,
                epsilon = 1e-9
            );
        }

        assert_abs_diff_eq!(
            superadditivity_gap(&bell(), &comp(2), &comp(2)).unwrap(),
            1.0,
            epsilon = 1e-9
        );
        assert!(superadditivity_gap(&bell(), &comp(3), &comp(2)).is_err());
    }

    #[test]
    fn coherence_is_covariant_under_basis_rotation() {
        for seed in 0..20 {
            let rho = sampler::ginibre_density(3, 2, seed).unwrap();
            let basis = MeasurementBasis::new(sampler::random_unitary(3, seed + 10)).unwrap();
            let u = sampler::random_unitary(3, seed + 20);
            let before = c_re(&rho, &basis).unwrap().value;
            let after = c_re(&rho.rotate(&u).unwrap(), &basis.rotated(&u).unwrap())
                .unwrap()
                .value;
            assert_abs_diff_eq!(before, after, epsilon = 1e-9);
        }
    }

    #[test]
    fn bound_chain_and_purity_equality() {
        for seed in 0..50 {
            let d = 2 + seed as usize % 3;
            let rank = 1 + seed as usize % d;
            let rho = sampler::ginibre_density(d, rank, seed).unwrap();
            let c = c_re(&rho, &comp(d)).unwrap().value;
            let s_diag = shannon(&rho.populations(&comp(d)).unwrap());
            assert!(c <= s_diag + 1e-9);
            assert!(s_diag <= (d as f64).log2() + 1e-9);
            let pure = (rho.purity() - 1.0).abs() <= 1e-8;
            assert_eq!((s_diag - c).abs() <= 1e-9, pure, "seed {seed}");
        }
    }

    #[test]
    fn incoherent_operations_do_not_increase_coherence() {
        for seed in 0..20 {
            let rho = sampler::ginibre_density(3, 3, seed).unwrap();
            let c = c_re(&rho, &comp(3)).unwrap().value;
            let dephased = rho.dephase(&comp(3)).unwrap();
            assert!(c_re(&dephased, &comp(3)).unwrap().value <= 1e-9);

            let perm = CMatrix::from_fn(3, 3, |i, j| {
                let one = j == (i + 1) % 3;
                num_complex::Complex64::new(if one { 1.0 } else { 0.0 }, 0.0)
            });
            assert_abs_diff_eq!(
                c_re(&rho.rotate(&perm).unwrap(), &comp(3)).unwrap().value,
                c,
                epsilon = 1e-9
            );

            let phases = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(3, |k, _| {
                num_complex::Complex64::from_polar(1.0, 0.7 * (k as f64 + seed as f64))
            }));
            assert_abs_diff_eq!(
                c_re(&rho.rotate(&phases).unwrap(), &comp(3)).unwrap().value,
                c,
                epsilon = 1e-9
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn coherence_is_convex(seed in 0u64..1_000_000, k in 2usize..5) {
            let mut rng = sampler::rng(seed);
            let weights: Vec<f64> = (0..k).map(|_| rand::Rng::random_range(&mut rng, 0.01..1.0)).collect();
            let total: f64 = weights.iter().sum();
            let states: Vec<DensityOperator> =
                (0..k).map(|_| sampler::ginibre_density_with(3, 2, &mut rng).unwrap()).collect();
            let mut mix = CMatrix::zeros(3, 3);
            let mut average = 0.0;
            for (w, rho) in weights.iter().zip(&states) {
                mix += rho.matrix().scale(w / total);
                average += w / total * c_re(rho, &comp(3)).unwrap().value;
            }
            let mixed = DensityOperator::new(mix).unwrap();
            prop_assert!(average >= c_re(&mixed, &comp(3)).unwrap().value - 1e-9);
        }

        #[test]
        fn c_re_and_l1_vanish_together(seed in 0u64..1_000_000, incoherent in proptest::bool::ANY) {
            let mut rho = sampler::ginibre_density(3, 3, seed).unwrap();
            if incoherent {
                rho = rho.dephase(&comp(3)).unwrap();
            }
            let cre = c_re(&rho, &comp(3)).unwrap().value;
            let cl1 = c_l1(&rho, &comp(3)).unwrap().value;
            if cre <= 1e-9 { prop_assert!(cl1 <= 1e-8); }
            if cl1 <= 1e-9 { prop_assert!(cre <= 1e-8); }
            prop_assert_eq!(cre <= 1e-9, incoherent);
        }
    }
}
