//! JSON operator and state files, digests and atomic output.

use std::fs;
use std::io::Write;
use std::path::Path;

use quasiherm_core::{c64, ComplexMatrix, ComplexVector};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// `{"dim": n, "matrix": [[[re, im], ...], ...], "label": "..."}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub dim: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// `{"dim": n, "vector": [[re, im], ...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dim: usize,
    pub vector: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl OperatorFile {
    pub fn from_matrix(m: &ComplexMatrix, label: Option<String>) -> Self {
        let n = m.dim();
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| [m.get(i, j).re, m.get(i, j).im]).collect())
            .collect();
        Self { dim: n, matrix, label }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, String> {
        if self.dim == 0 {
            return Err("dim must be positive".into());
        }
        if self.matrix.len() != self.dim {
            return Err(format!("matrix has {} rows, dim is {}", self.matrix.len(), self.dim));
        }
        let mut entries = Vec::with_capacity(self.dim * self.dim);
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != self.dim {
                return Err(format!("row {i} has {} entries, dim is {}", row.len(), self.dim));
            }
            entries.extend(row.iter().map(|[re, im]| c64(*re, *im)));
        }
        ComplexMatrix::new(self.dim, entries).map_err(|e| e.to_string())
    }
}

impl StateFile {
    pub fn from_vector(v: &ComplexVector) -> Self {
        Self {
            dim: v.len(),
            vector: v.iter().map(|z| [z.re, z.im]).collect(),
            label: None,
        }
    }

    pub fn to_vector(&self) -> Result<ComplexVector, String> {
        if self.dim == 0 || self.vector.len() != self.dim {
            return Err(format!("vector has {} entries, dim is {}", self.vector.len(), self.dim));
        }
        if self.vector.iter().flatten().any(|x| !x.is_finite()) {
            return Err("non-finite entry".into());
        }
        Ok(ComplexVector::from_iterator(
            self.dim,
            self.vector.iter().map(|[re, im]| c64(*re, *im)),
        ))
    }
}

/// A parsed input together with its provenance.
#[derive(Debug, Clone)]
pub struct Loaded<T> {
    pub value: T,
    pub path: String,
    pub sha256: String,
    pub label: Option<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Byte offset of a 1-based (line, column) position reported by the JSON
/// parser.
fn byte_offset(text: &[u8], line: usize, column: usize) -> usize {
    let mut offset = 0;
    for (k, l) in text.split(|&b| b == b'\n').enumerate() {
        if k + 1 == line {
            return (offset + column.saturating_sub(1)).min(text.len());
        }
        offset += l.len() + 1;
    }
    text.len()
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path, bytes: &[u8]) -> Result<T, CliError> {
    serde_json::from_slice(bytes).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        offset: byte_offset(bytes, e.line(), e.column()),
        message: e.to_string(),
    })
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn read_operator(path: &Path) -> Result<Loaded<ComplexMatrix>, CliError> {
    let bytes = read_bytes(path)?;
    let file: OperatorFile = parse_json(path, &bytes)?;
    let value = file.to_matrix().map_err(|message| CliError::InvalidInput {
        path: path.display().to_string(),
        message,
    })?;
    Ok(Loaded {
        value,
        path: path.display().to_string(),
        sha256: sha256_hex(&bytes),
        label: file.label,
    })
}

pub fn read_state(path: &Path) -> Result<Loaded<ComplexVector>, CliError> {
    let bytes = read_bytes(path)?;
    let file: StateFile = parse_json(path, &bytes)?;
    let value = file.to_vector().map_err(|message| CliError::InvalidInput {
        path: path.display().to_string(),
        message,
    })?;
    Ok(Loaded {
        value,
        path: path.display().to_string(),
        sha256: sha256_hex(&bytes),
        label: file.label,
    })
}

pub fn operator_to_json(file: &OperatorFile) -> String {
    serde_json::to_string_pretty(file).expect("operator files always serialize")
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io_err = |e: std::io::Error| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.flush().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_round_trip_is_bit_exact() {
        let m = ComplexMatrix::new(
            2,
            vec![
                c64(0.1, 1.0 / 3.0),
                c64(f64::MIN_POSITIVE, -2.0e-300),
                c64(1e300, std::f64::consts::PI),
                c64(-0.0, 5e-324),
            ],
        )
        .unwrap();
        let text = operator_to_json(&OperatorFile::from_matrix(&m, Some("x".into())));
        let back: OperatorFile = serde_json::from_str(&text).unwrap();
        let m2 = back.to_matrix().unwrap();
        for (a, b) in m.to_row_major().iter().zip(m2.to_row_major()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn offsets() {
        let text = b"{\n  \"dim\": 2,\n  oops\n}";
        let err = parse_json::<OperatorFile>(Path::new("x"), text).unwrap_err();
        match err {
            CliError::Parse { offset, .. } => assert_eq!(&text[offset..offset + 4], b"oops"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shape_checked() {
        let f = OperatorFile {
            dim: 2,
            matrix: vec![vec![[1.0, 0.0]]],
            label: None,
        };
        assert!(f.to_matrix().is_err());
    }

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
