//! JSON matrix dumps with explicit shape metadata. Entries serialize as
//! exact `"p/q"` strings, so output is deterministic byte-for-byte.

use serde::{Deserialize, Serialize};

use crate::poly::OperatorPolynomial;
use crate::tensor::TensorOperator;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixDump {
    pub shape: Vec<usize>,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<String>>,
}

impl From<&TensorOperator> for MatrixDump {
    fn from(op: &TensorOperator) -> Self {
        let n = op.dim();
        let entries = (0..n)
            .map(|r| (0..n).map(|c| op.get(r, c).to_string()).collect())
            .collect();
        MatrixDump {
            shape: op.shape().local_dims().to_vec(),
            rows: n,
            cols: n,
            entries,
        }
    }
}

/// A polynomial as the list of its coefficient dumps, lowest power first.
pub fn poly_dump(p: &OperatorPolynomial) -> Vec<MatrixDump> {
    p.coeffs().iter().map(MatrixDump::from).collect()
}
