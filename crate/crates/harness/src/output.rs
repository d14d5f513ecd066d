//! CSV emission and parsing. Absent values are written as empty fields and
//! floats use the shortest representation that parses back to the same bits.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{HarnessError, Result};

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    if rows.is_empty() {
        return Err(HarnessError::Empty);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().map_err(|e| HarnessError::Csv(e.into_error().into()))
}

pub fn from_csv<T: DeserializeOwned>(bytes: &[u8]) -> Result<Vec<T>> {
    csv::Reader::from_reader(bytes)
        .deserialize()
        .collect::<Result<Vec<T>, csv::Error>>()
        .map_err(HarnessError::from)
}

pub fn emit_csv<T: Serialize>(rows: &[T], path: &Path) -> Result<()> {
    let bytes = to_csv(rows)?;
    std::fs::write(path, bytes).map_err(|source| HarnessError::Write {
        path: path.to_path_buf(),
        source,
    })
}
