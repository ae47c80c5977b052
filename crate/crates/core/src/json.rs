//! JSON encodings: complex numbers as `[re, im]`, matrices as row-major
//! arrays of such pairs.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::numerics::{c64, CMatrix, Complex64};

/// A complex number that serializes as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JsonComplex(pub Complex64);

impl Serialize for JsonComplex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(s)
    }
}

impl<'de> Deserialize<'de> for JsonComplex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(JsonComplex(c64(re, im)))
    }
}

impl From<Complex64> for JsonComplex {
    fn from(z: Complex64) -> Self {
        JsonComplex(z)
    }
}

impl From<JsonComplex> for Complex64 {
    fn from(z: JsonComplex) -> Self {
        z.0
    }
}

pub type JsonMatrix = Vec<Vec<JsonComplex>>;

pub fn matrix_to_json(m: &CMatrix) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| JsonComplex(m[(i, j)])).collect())
        .collect()
}

/// Converts row-major JSON rows into a matrix; `None` on ragged input.
pub fn matrix_from_json(rows: &JsonMatrix) -> Option<CMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return None;
    }
    Some(CMatrix::from_fn(n, m, |i, j| rows[i][j].0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_is_a_pair() {
        let s = serde_json::to_string(&JsonComplex(c64(1.5, -2.0))).unwrap();
        assert_eq!(s, "[1.5,-2.0]");
        let z: JsonComplex = serde_json::from_str("[0, 3]").unwrap();
        assert_eq!(z.0, c64(0.0, 3.0));
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let rows = vec![
            vec![JsonComplex::default(); 2],
            vec![JsonComplex::default(); 1],
        ];
        assert!(matrix_from_json(&rows).is_none());
    }
}
