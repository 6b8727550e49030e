use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::eigensolve::{NEWTON_STEPS, SIMPLE_TOL};
use crate::error::Result;
use crate::psm::REGULARITY_PROBES;

/// Formats a float so that it parses back to the same value.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 || x.is_nan() || x.is_infinite() {
        return format!("{x}");
    }
    let a = x.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// A CSV table held in memory until it is written.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_f64(&mut self, row: &[f64]) {
        self.push(row.iter().map(|x| fmt_f64(*x)).collect());
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(&self.header)?;
        for r in &self.rows {
            wr.write_record(r)?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// `out.csv` -> `out.meta.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.meta.json"))
}

/// Tolerances and defaults recorded in every sidecar.
pub fn tolerances() -> Value {
    json!({
        "simple_tol_relative": SIMPLE_TOL,
        "minimality_tol": "(n+p) * eps_machine * max(||[-A;C]||_2, ||[A B]||_2)",
        "pole_tol": "(n+p) * eps_machine * ||A(z)||_2",
        "regularity_probes": REGULARITY_PROBES,
        "newton_steps": NEWTON_STEPS,
        "infinite_eigenvalue_cutoff": "max(1,||M0||_F) * max(1,||M1||_F) / sqrt(eps_machine)",
        "derivative_check_step": "1e-6 * max(1, |lambda0|)",
    })
}

/// Writes the table to `out` plus a metadata sidecar, or the table alone to
/// stdout when no path is given.
pub fn emit(table: &Table, out: Option<&Path>, mut meta: Value) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            table.write_to(std::fs::File::create(path)?)?;
            if let Value::Object(m) = &mut meta {
                m.insert("csv".into(), json!(path.file_name().map(|s| s.to_string_lossy().into_owned())));
                m.insert("columns".into(), json!(table.header));
                m.insert("rows".into(), json!(table.rows.len()));
                m.insert("tolerances".into(), tolerances());
                m.insert("defaults_version".into(), json!(concat!("rzcond ", env!("CARGO_PKG_VERSION"))));
            }
            std::fs::write(sidecar_path(path), serde_json::to_string_pretty(&meta)?)?;
        }
        None => table.write_to(std::io::stdout().lock())?,
    }
    Ok(())
}
