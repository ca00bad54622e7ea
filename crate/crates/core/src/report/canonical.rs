//! Named example states.

use super::{ReportError, StateFile};
use crate::coherence::maximally_coherent;
use crate::qstate::{DensityOperator, PureState};
use crate::sampler;

/// `(|00> + |01> − |10> + |11>)/2`: maximally coherent and maximally entangled.
pub fn psi1() -> PureState {
    PureState::from_real_unnormalized(&[1.0, 1.0, -1.0, 1.0]).expect("nonzero")
}

/// `(|00> + |11>)/√2`.
pub fn psi2() -> PureState {
    PureState::from_real_unnormalized(&[1.0, 0.0, 0.0, 1.0]).expect("nonzero")
}

/// `(|00> + |01> + |10> + |11>)/2 = |+>|+>`.
pub fn psi3() -> PureState {
    maximally_coherent(4)
}

pub const USAGE: &str =
    "mcs <d> | psi1 | psi2 | psi3 | mixed <d> | haar <d> <seed> | ginibre <d> <rank> <seed>";

fn int<T: std::str::FromStr>(args: &[String], i: usize, name: &str) -> Result<T, ReportError> {
    args.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| ReportError::UnknownState(format!("{name}: expected {USAGE}")))
}

fn positive(d: usize, name: &str) -> Result<usize, ReportError> {
    if d == 0 {
        return Err(ReportError::UnknownState(format!(
            "{name}: dimension must be positive"
        )));
    }
    Ok(d)
}

/// Builds the state named by `name` and its arguments.
pub fn named_state(name: &str, args: &[String]) -> Result<StateFile, ReportError> {
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(ReportError::UnknownState(format!(
                "{name} takes {n} argument(s); expected {USAGE}"
            )))
        }
    };
    let label = Some(
        std::iter::once(name.to_string())
            .chain(args.iter().cloned())
            .collect::<Vec<_>>()
            .join(" "),
    );
    let pure = |psi: PureState, dims: Vec<usize>| {
        StateFile::from_operator(&psi.to_density(), dims, label.clone())
    };
    match name {
        "psi1" => arity(0).map(|_| pure(psi1(), vec![2, 2])),
        "psi2" => arity(0).map(|_| pure(psi2(), vec![2, 2])),
        "psi3" => arity(0).map(|_| pure(psi3(), vec![2, 2])),
        "mcs" => {
            arity(1)?;
            let d = positive(int(args, 0, name)?, name)?;
            Ok(pure(maximally_coherent(d), vec![d]))
        }
        "mixed" => {
            arity(1)?;
            let d = positive(int(args, 0, name)?, name)?;
            Ok(StateFile::from_operator(
                &DensityOperator::maximally_mixed(d),
                vec![d],
                label.clone(),
            ))
        }
        "haar" => {
            arity(2)?;
            let d = positive(int(args, 0, name)?, name)?;
            Ok(pure(sampler::haar_pure(d, int(args, 1, name)?), vec![d]))
        }
        "ginibre" => {
            arity(3)?;
            let d = positive(int(args, 0, name)?, name)?;
            let rank: usize = int(args, 1, name)?;
            let rho = sampler::ginibre_density(d, rank, int(args, 2, name)?)
                .map_err(|e| ReportError::UnknownState(format!("{name}: {e}")))?;
            Ok(StateFile::from_operator(&rho, vec![d], label.clone()))
        }
        other => Err(ReportError::UnknownState(format!(
            "unknown state '{other}'; expected {USAGE}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn psi2_is_the_corner_matrix() {
        let file = named_state("psi2", &[]).unwrap();
        assert_eq!(file.dims, vec![2, 2]);
        for (i, row) in file.matrix.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                let corner = (i == 0 || i == 3) && (j == 0 || j == 3);
                assert!((z[0] - if corner { 0.5 } else { 0.0 }).abs() < 1e-15);
                assert_eq!(z[1], 0.0);
            }
        }
    }

    #[test]
    fn mcs_and_mixed() {
        let plus = named_state("mcs", &args(&["2"])).unwrap();
        for row in &plus.matrix {
            for z in row {
                assert!((z[0] - 0.5).abs() < 1e-15);
            }
        }
        let mixed = named_state("mixed", &args(&["4"])).unwrap();
        for (i, row) in mixed.matrix.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                assert_eq!(z[0], if i == j { 0.25 } else { 0.0 });
            }
        }
    }

    #[test]
    fn random_states_are_reproducible() {
        assert_eq!(
            named_state("haar", &args(&["3", "5"])).unwrap(),
            named_state("haar", &args(&["3", "5"])).unwrap()
        );
        let g = named_state("ginibre", &args(&["4", "2", "9"])).unwrap();
        assert_eq!(g.label.as_deref(), Some("ginibre 4 2 9"));
        g.to_state().unwrap();
    }

    #[test]
    fn unknown_names_and_bad_arguments() {
        for (name, a) in [
            ("psi4", vec![]),
            ("mcs", vec![]),
            ("mcs", vec!["x"]),
            ("mixed", vec!["0"]),
            ("ginibre", vec!["2", "3", "1"]),
            ("psi1", vec!["1"]),
        ] {
            assert!(
                matches!(
                    named_state(name, &args(&a)),
                    Err(ReportError::UnknownState(_))
                ),
                "{name}"
            );
        }
    }
}
