use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ReportError;
use crate::measopt::MeasurementBasis;
use crate::qstate::{BipartiteState, CMatrix, DensityOperator};

/// On-disk state: `dims` is `[d]` or `[d_A, d_B]`, `matrix` holds `[re, im]`
/// pairs row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// A parsed and validated state file.
#[derive(Debug, Clone)]
pub enum LoadedState {
    Single(DensityOperator),
    Bipartite(BipartiteState),
}

impl LoadedState {
    pub fn op(&self) -> &DensityOperator {
        match self {
            LoadedState::Single(op) => op,
            LoadedState::Bipartite(s) => s.op(),
        }
    }
}

fn encode(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| {
            (0..m.ncols())
                .map(|c| [m[(r, c)].re, m[(r, c)].im])
                .collect()
        })
        .collect()
}

fn decode(rows: &[Vec<[f64; 2]>], expected: usize, what: &str) -> Result<CMatrix, ReportError> {
    if rows.len() != expected || rows.iter().any(|r| r.len() != expected) {
        return Err(ReportError::Shape(format!(
            "{what} must be {expected}x{expected}"
        )));
    }
    Ok(CMatrix::from_fn(expected, expected, |r, c| {
        let [re, im] = rows[r][c];
        Complex64::new(re, im)
    }))
}

impl StateFile {
    pub fn from_operator(op: &DensityOperator, dims: Vec<usize>, label: Option<String>) -> Self {
        StateFile {
            dims,
            matrix: encode(op.matrix()),
            label,
        }
    }

    pub fn from_bipartite(s: &BipartiteState, label: Option<String>) -> Self {
        let (da, db) = s.dims();
        Self::from_operator(s.op(), vec![da, db], label)
    }

    pub fn parse(text: &str) -> Result<Self, ReportError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ReportError> {
        let text = fs::read_to_string(path).map_err(|source| ReportError::Io {
            path: path.into(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state files always serialize")
    }

    pub fn save(&self, path: &Path) -> Result<(), ReportError> {
        fs::write(path, self.to_json() + "\n").map_err(|source| ReportError::Io {
            path: path.into(),
            source,
        })
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Checks the shape and validates the matrix as a density operator.
    pub fn to_state(&self) -> Result<LoadedState, ReportError> {
        let d = match self.dims.as_slice() {
            [d] if *d > 0 => *d,
            [da, db] if *da > 0 && *db > 0 => da * db,
            _ => {
                return Err(ReportError::Shape(
                    "dims must hold one or two positive integers".into(),
                ))
            }
        };
        let op = DensityOperator::new(decode(&self.matrix, d, "matrix")?)?;
        match self.dims.as_slice() {
            [da, db] => Ok(LoadedState::Bipartite(BipartiteState::new(op, (*da, *db))?)),
            _ => Ok(LoadedState::Single(op)),
        }
    }
}

/// On-disk measurement basis: `vectors[k]` is basis vector `k` as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisFile {
    pub vectors: Vec<Vec<[f64; 2]>>,
}

impl BasisFile {
    pub fn from_basis(basis: &MeasurementBasis) -> Self {
        let v = basis.vectors();
        BasisFile {
            vectors: (0..v.ncols())
                .map(|k| {
                    (0..v.nrows())
                        .map(|r| [v[(r, k)].re, v[(r, k)].im])
                        .collect()
                })
                .collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, ReportError> {
        let text = fs::read_to_string(path).map_err(|source| ReportError::Io {
            path: path.into(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_basis(&self) -> Result<MeasurementBasis, ReportError> {
        let d = self.vectors.len();
        // stored column-wise, so decode the transpose
        let transposed = decode(&self.vectors, d, "basis")?;
        Ok(MeasurementBasis::new(transposed.transpose())?)
    }
}
