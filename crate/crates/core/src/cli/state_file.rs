//! JSON state documents:
//!
//! ```json
//! { "name": "bell", "dims": [2, 2], "vector": [[0.7071, 0], [0, 0], [0, 0], [0.7071, 0]] }
//! ```
//!
//! `matrix` (row-major rows of `[re, im]` pairs) may replace `vector`.
//! Vectors are normalized and projected to `|ψ⟩⟨ψ|`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::error::MatrixError;
use crate::matrix::{BipartiteDims, BipartiteState, CMatrix, CVector, HermitianMatrix};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dims: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<[f64; 2]>>,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn invalid(e: MatrixError) -> CliError {
    CliError::InvalidState(e.to_string())
}

impl StateFile {
    pub fn from_state(name: impl Into<String>, state: &BipartiteState) -> Self {
        let m = state.rho().as_matrix();
        let dims = state.dims();
        Self {
            name: Some(name.into()),
            dims: [dims.d_a, dims.d_b],
            matrix: Some(
                m.row_iter()
                    .map(|row| row.iter().map(|&z| pair(z)).collect())
                    .collect(),
            ),
            vector: None,
        }
    }

    pub fn from_vector(name: impl Into<String>, psi: &CVector, dims: BipartiteDims) -> Self {
        Self {
            name: Some(name.into()),
            dims: [dims.d_a, dims.d_b],
            matrix: None,
            vector: Some(psi.iter().map(|&z| pair(z)).collect()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state files always serialize")
    }

    /// Parses a document; syntax and shape errors carry line and column.
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        serde_json::from_str(text)
            .map_err(|e| CliError::Parse(format!("{origin}:{}:{}: {e}", e.line(), e.column())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or("state")
    }

    pub fn to_state(&self) -> Result<BipartiteState, CliError> {
        let [d_a, d_b] = self.dims;
        let dims = BipartiteDims::new(d_a, d_b)
            .map_err(|e| CliError::Parse(format!("field `dims`: {e}")))?;
        let n = dims.total();
        match (&self.matrix, &self.vector) {
            (Some(_), Some(_)) | (None, None) => Err(CliError::Parse(
                "exactly one of `matrix` or `vector` must be present".into(),
            )),
            (Some(rows), None) => {
                if rows.len() != n {
                    return Err(CliError::Parse(format!(
                        "field `matrix`: expected {n} rows for dims {dims}, found {}",
                        rows.len()
                    )));
                }
                if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
                    return Err(CliError::Parse(format!(
                        "field `matrix` row {i}: expected {n} entries, found {}",
                        row.len()
                    )));
                }
                let m = CMatrix::from_fn(n, n, |i, j| {
                    let [re, im] = rows[i][j];
                    Complex64::new(re, im)
                });
                let h = HermitianMatrix::new(m).map_err(invalid)?;
                BipartiteState::new(h, dims).map_err(invalid)
            }
            (None, Some(entries)) => {
                if entries.len() != n {
                    return Err(CliError::Parse(format!(
                        "field `vector`: expected {n} entries for dims {dims}, found {}",
                        entries.len()
                    )));
                }
                let psi = CVector::from_iterator(
                    n,
                    entries.iter().map(|&[re, im]| Complex64::new(re, im)),
                );
                if !(psi.norm() > 0.0) {
                    return Err(invalid(MatrixError::InvalidState {
                        invariant: "vector norm > 0",
                        residual: psi.norm(),
                    }));
                }
                BipartiteState::pure(&psi, dims).map_err(invalid)
            }
        }
    }
}
