use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::json::{matrix_from_json, matrix_to_json, JsonMatrix};
use crate::krein::{KreinOperator, KreinSpace};
use crate::numerics::CMatrix;
use crate::tolerance::ToleranceConfig;

/// An operator and its Gram matrix as exchanged on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorDocument {
    pub dim: usize,
    pub gram: JsonMatrix,
    pub matrix: JsonMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceConfig>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

fn square(field: &str, rows: &JsonMatrix, dim: usize) -> Result<CMatrix, HarnessError> {
    if rows.len() != dim {
        return Err(HarnessError::Input(format!(
            "{field}: expected {dim} rows, found {}",
            rows.len()
        )));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
        return Err(HarnessError::Input(format!(
            "{field}[{i}]: expected {dim} entries, found {}",
            r.len()
        )));
    }
    if let Some((i, j)) = (0..dim)
        .flat_map(|i| (0..dim).map(move |j| (i, j)))
        .find(|&(i, j)| !(rows[i][j].0.re.is_finite() && rows[i][j].0.im.is_finite()))
    {
        return Err(HarnessError::Input(format!(
            "{field}[{i}][{j}]: entry is not finite"
        )));
    }
    Ok(matrix_from_json(rows).expect("shape checked"))
}

impl OperatorDocument {
    pub fn new(gram: &CMatrix, matrix: &CMatrix) -> Self {
        OperatorDocument {
            dim: matrix.nrows(),
            gram: matrix_to_json(gram),
            matrix: matrix_to_json(matrix),
            tolerances: None,
            metadata: BTreeMap::new(),
        }
    }

    pub fn from_operator(op: &KreinOperator) -> Self {
        Self::new(op.space().gram(), op.matrix())
    }

    /// Parses a document; syntax errors carry line and column.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| {
            HarnessError::Input(format!("line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn read(path: &std::path::Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Pretty-printed JSON with a trailing newline; parsing and re-emitting
    /// reproduces it byte for byte.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents always serialize");
        s.push('\n');
        s
    }

    pub fn tolerances(&self) -> ToleranceConfig {
        self.tolerances.unwrap_or_default()
    }

    pub fn gram_matrix(&self) -> Result<CMatrix, HarnessError> {
        square("gram", &self.gram, self.dim)
    }

    pub fn operator_matrix(&self) -> Result<CMatrix, HarnessError> {
        square("matrix", &self.matrix, self.dim)
    }

    /// Validates shapes, builds the space and certifies the operator as
    /// J-normal under the document tolerances.
    pub fn build(&self) -> Result<(KreinOperator, ToleranceConfig), HarnessError> {
        if self.dim == 0 {
            return Err(HarnessError::Input("dim: must be positive".into()));
        }
        let cfg = self.tolerances();
        cfg.validate()
            .map_err(|e| HarnessError::Input(format!("tolerances: {e}")))?;
        let gram = self.gram_matrix()?;
        let matrix = self.operator_matrix()?;
        let space = KreinSpace::with_tolerances(gram, &cfg)
            .map_err(|e| HarnessError::Input(format!("gram: {e}")))?;
        let op = KreinOperator::new(matrix, Arc::new(space), &cfg)?;
        Ok((op, cfg))
    }
}
