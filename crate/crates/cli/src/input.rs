//! Reading JSON arguments given inline or as file paths.

use std::io::Read;

use htheta::json::{cmatrix_from_json, complex_from_json};
use htheta::theta::CMatrix;
use htheta::{Error, Result};
use serde_json::Value;

/// Reads stdin for `-`, the file if `arg` names one, else parses `arg` itself.
pub fn load(arg: &str) -> Result<Value> {
    let text = if arg == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Parse(format!("stdin: {e}")))?;
        s
    } else if std::path::Path::new(arg).is_file() {
        std::fs::read_to_string(arg).map_err(|e| Error::Parse(format!("{arg}: {e}")))?
    } else {
        arg.to_string()
    };
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{arg:?} is neither a file nor valid JSON: {e}")))
}

/// A matrix (array of rows) of complex entries, or a single complex number for `g = 1`.
pub fn w_from_json(v: &Value) -> Result<CMatrix> {
    match v {
        Value::Array(rows) if rows.first().is_some_and(Value::is_array) => cmatrix_from_json(v),
        _ => CMatrix::from_rows(vec![vec![complex_from_json(v)?]]),
    }
}

pub fn get_u64(doc: &Value, key: &str) -> Result<Option<u64>> {
    match doc.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(x) => {
            x.as_u64().map(Some).ok_or_else(|| Error::Parse(format!("\"{key}\" must be a non-negative integer")))
        }
    }
}
