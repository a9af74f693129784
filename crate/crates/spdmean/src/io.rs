//! JSON measure and matrix files.
//!
//! A measure file looks like
//!
//! ```json
//! {"dim": 2, "atoms": [{"weight": 0.5, "matrix": [[[2.0,0.0],[1.0,0.5]],
//!                                                 [[1.0,-0.5],[3.0,0.0]]]}]}
//! ```
//!
//! Matrix entries are `[re, im]` pairs; real symmetric input may write bare
//! numbers instead. Weights that sum to 1 within 1e-6 are normalized on
//! load, anything further off is rejected. Serialization always emits the
//! `[re, im]` form, with numbers in shortest round-trip decimal form, so a
//! save/load cycle is bit-exact.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{HermitianMatrix, SpdMatrix};
use crate::measure::DiscreteMeasure;

/// Weight sums farther than this from 1 are rejected outright.
const LOAD_WEIGHT_TOL: f64 = 1e-6;

/// Weight sums closer than this to 1 are taken as exact (no renormalization,
/// which keeps load(save(μ)) bit-identical).
const EXACT_WEIGHT_TOL: f64 = 1e-12;

#[derive(Serialize, Deserialize)]
struct MeasureFile {
    dim: usize,
    atoms: Vec<AtomRecord>,
}

#[derive(Serialize, Deserialize)]
struct AtomRecord {
    weight: f64,
    matrix: Vec<Vec<EntryRepr>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EntryRepr {
    Real(f64),
    Complex([f64; 2]),
}

impl EntryRepr {
    fn to_complex(&self) -> Complex64 {
        match *self {
            EntryRepr::Real(re) => Complex64::new(re, 0.0),
            EntryRepr::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

fn matrix_records(h: &HermitianMatrix) -> Vec<Vec<EntryRepr>> {
    let m = h.dim();
    (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let z = h.entry(i, j);
                    EntryRepr::Complex([z.re, z.im])
                })
                .collect()
        })
        .collect()
}

fn matrix_from_records(dim: usize, rows: &[Vec<EntryRepr>]) -> Result<HermitianMatrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Schema(format!(
            "matrix must be {dim}x{dim} rows of entries"
        )));
    }
    let entries: Vec<Complex64> = rows
        .iter()
        .flat_map(|row| row.iter().map(EntryRepr::to_complex))
        .collect();
    if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Schema("matrix entries must be finite".into()));
    }
    HermitianMatrix::new(dim, entries).map_err(|e| Error::Schema(e.to_string()))
}

fn measure_file(mu: &DiscreteMeasure) -> MeasureFile {
    MeasureFile {
        dim: mu.dim(),
        atoms: mu
            .atoms()
            .iter()
            .zip(mu.weights())
            .map(|(atom, &weight)| AtomRecord {
                weight,
                matrix: matrix_records(atom.hermitian()),
            })
            .collect(),
    }
}

/// Serializes a measure to the JSON file format.
pub fn measure_to_string(mu: &DiscreteMeasure) -> String {
    let mut s =
        serde_json::to_string_pretty(&measure_file(mu)).expect("measure serialization");
    s.push('\n');
    s
}

/// The measure as an in-memory JSON value (for report payloads).
pub fn measure_to_value(mu: &DiscreteMeasure) -> serde_json::Value {
    serde_json::to_value(measure_file(mu)).expect("measure serialization")
}

/// Parses a measure file, normalizing near-1 weight sums and validating
/// every atom as positive definite.
pub fn measure_from_str(text: &str) -> Result<DiscreteMeasure> {
    let file: MeasureFile =
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    if file.dim == 0 {
        return Err(Error::Schema("dim must be positive".into()));
    }
    if file.atoms.is_empty() {
        return Err(Error::Schema("measure needs at least one atom".into()));
    }
    let mut atoms = Vec::with_capacity(file.atoms.len());
    let mut weights = Vec::with_capacity(file.atoms.len());
    for (i, record) in file.atoms.iter().enumerate() {
        if !record.weight.is_finite() || record.weight < 0.0 {
            return Err(Error::Schema(format!(
                "atom {i} has invalid weight {}",
                record.weight
            )));
        }
        let h = matrix_from_records(file.dim, &record.matrix)
            .map_err(|e| Error::Schema(format!("atom {i}: {e}")))?;
        let atom = SpdMatrix::new(h)
            .map_err(|e| Error::Schema(format!("atom {i} is not positive definite: {e}")))?;
        atoms.push(atom);
        weights.push(record.weight);
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > LOAD_WEIGHT_TOL {
        return Err(Error::Schema(format!(
            "weights sum to {sum}, outside the accepted 1 ± {LOAD_WEIGHT_TOL}"
        )));
    }
    let measure = if (sum - 1.0).abs() <= EXACT_WEIGHT_TOL {
        DiscreteMeasure::new(atoms, weights)
    } else {
        DiscreteMeasure::normalized(atoms, weights)
    };
    measure.map_err(|e| Error::Schema(e.to_string()))
}

pub fn save_measure(path: &Path, mu: &DiscreteMeasure) -> Result<()> {
    std::fs::write(path, measure_to_string(mu))?;
    Ok(())
}

pub fn load_measure(path: &Path) -> Result<DiscreteMeasure> {
    let text = std::fs::read_to_string(path)?;
    measure_from_str(&text)
}

/// A Hermitian matrix as the JSON value `[[re,im],...]` rows.
pub fn matrix_to_value(h: &HermitianMatrix) -> serde_json::Value {
    serde_json::to_value(matrix_records(h)).expect("matrix serialization")
}

pub fn matrix_from_value(value: &serde_json::Value) -> Result<HermitianMatrix> {
    let rows: Vec<Vec<EntryRepr>> =
        serde_json::from_value(value.clone()).map_err(|e| Error::Schema(e.to_string()))?;
    let dim = rows.len();
    matrix_from_records(dim, &rows)
}

pub fn spd_from_value(value: &serde_json::Value) -> Result<SpdMatrix> {
    SpdMatrix::new(matrix_from_value(value)?).map_err(|e| Error::Schema(e.to_string()))
}

/// SHA-256 of the compact JSON form; used to tag report inputs.
pub fn matrix_hash(h: &HermitianMatrix) -> String {
    let compact = serde_json::to_string(&matrix_records(h)).expect("matrix serialization");
    let digest = Sha256::digest(compact.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
