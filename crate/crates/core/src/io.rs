//! File formats: JSON schemas for inputs, JSON/CSV writers for reports.
//!
//! Input schemas (all JSON objects):
//!
//! - system: `{"n": 3, "map": [1, 2, 0], "mass": [1.0, 0.5, 2.0]}`
//! - vector (potentials, test functions): `{"values": [0.3, -1.0, 0.0]}`
//! - measure: `{"values": [0.25, 0.25, 0.5]}` — entries must sum to one
//!   within [`MEASURE_LOAD_TOL`]; they are renormalized exactly after the
//!   check so downstream code sees a unit sum.
//! - partition: `{"blocks": [[0, 2], [1]]}` — an index partition by blocks.
//!
//! Output serialization goes through [`to_json_string`], which prints
//! every float with 17 significant digits in scientific notation. That
//! many digits round-trip `f64` exactly, so reports can be compared
//! byte-for-byte across runs and re-parsed without drift; the fixed format
//! (rather than shortest-representation printing) keeps diffs stable.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::dynsys::FiniteDynSystem;
use crate::ess::ESSSweepReport;
use crate::measures::DensityMeasure;
use crate::partitions::PartitionOfUnity;
use crate::{Error, Result};

/// Loaded measures must sum to one within this tolerance (then they are
/// renormalized exactly).
pub const MEASURE_LOAD_TOL: f64 = 1e-9;

#[derive(Debug, Serialize, Deserialize)]
struct SystemSchema {
    n: usize,
    map: Vec<usize>,
    mass: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct VectorSchema {
    values: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct BlocksSchema {
    blocks: Vec<Vec<usize>>,
}

fn read_schema<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Loads a system from its JSON schema.
pub fn load_system(path: &Path) -> Result<FiniteDynSystem> {
    let schema: SystemSchema = read_schema(path)?;
    if schema.map.len() != schema.n || schema.mass.len() != schema.n {
        return Err(Error::Schema {
            reason: format!(
                "declared n = {} but map has {} entries and mass has {}",
                schema.n,
                schema.map.len(),
                schema.mass.len()
            ),
        });
    }
    FiniteDynSystem::new(schema.map, schema.mass)
}

/// Loads a plain vector of reals (potential, test function).
pub fn load_vector(path: &Path) -> Result<Vec<f64>> {
    let schema: VectorSchema = read_schema(path)?;
    Ok(schema.values)
}

/// Loads a measure: entries must be nonnegative and sum to one within
/// [`MEASURE_LOAD_TOL`]; the result is renormalized exactly.
pub fn load_measure(path: &Path, n: usize) -> Result<DensityMeasure> {
    let schema: VectorSchema = read_schema(path)?;
    if schema.values.len() != n {
        return Err(Error::LengthMismatch {
            what: "measure vs system",
            expected: n,
            got: schema.values.len(),
        });
    }
    let sum: f64 = schema.values.iter().sum();
    if !sum.is_finite() || (sum - 1.0).abs() > MEASURE_LOAD_TOL {
        return Err(Error::MeasureNotNormalized {
            sum,
            tol: MEASURE_LOAD_TOL,
        });
    }
    DensityMeasure::normalized(schema.values)
}

/// Loads an index partition given by blocks.
pub fn load_partition(path: &Path, n: usize) -> Result<PartitionOfUnity> {
    let schema: BlocksSchema = read_schema(path)?;
    PartitionOfUnity::from_blocks(n, &schema.blocks)
}

/// Saves a system in its JSON schema.
pub fn save_system(path: &Path, sys: &FiniteDynSystem) -> Result<()> {
    let schema = SystemSchema {
        n: sys.n(),
        map: sys.map().to_vec(),
        mass: sys.mass().to_vec(),
    };
    write_json(path, &schema)
}

/// Saves a vector in the `{"values": …}` schema.
pub fn save_vector(path: &Path, values: &[f64]) -> Result<()> {
    let schema = VectorSchema {
        values: values.to_vec(),
    };
    write_json(path, &schema)
}

/// Renders a system in its JSON schema without touching the filesystem.
pub fn system_json(sys: &FiniteDynSystem) -> Result<String> {
    to_json_string(&SystemSchema {
        n: sys.n(),
        map: sys.map().to_vec(),
        mass: sys.mass().to_vec(),
    })
}

/// JSON formatter printing every float with 17 significant digits, enough
/// to round-trip `f64` exactly.
struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes any report to JSON with full-precision floats and a trailing
/// newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

/// Writes a report as full-precision JSON to a file.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json_string(value)?)?;
    Ok(())
}

/// Formats one float for CSV, matching the JSON precision.
fn csv_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Renders a deviation-set sweep as CSV with columns
/// `eps,n,measure,rate,min_C,bound_holds` (one row per radius × horizon;
/// the per-radius rate repeats down its rows).
pub fn ess_sweep_csv(report: &ESSSweepReport) -> String {
    let mut out = String::from("eps,n,measure,rate,min_C,bound_holds\n");
    for eps_report in &report.eps_reports {
        for row in &eps_report.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                csv_float(eps_report.eps),
                row.n,
                csv_float(row.set_mass),
                csv_float(eps_report.fitted_rate),
                csv_float(row.min_c_unit),
                row.bound_holds
            ));
        }
    }
    out
}

/// Renders a per-step norm sequence (e.g. `ln ‖A^k‖ / k`) as CSV with
/// columns `k,value`, starting at `k = 1`.
pub fn sequence_csv(values: &[f64]) -> String {
    let mut out = String::from("k,value\n");
    for (idx, &v) in values.iter().enumerate() {
        out.push_str(&format!("{},{}\n", idx + 1, csv_float(v)));
    }
    out
}
