//! CSV/JSON serialization of run records and reading series back.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::OutputFormat;
use super::run::RunRecord;
use crate::error::{Error, Result};
use crate::observables::{stationary_purities, stationary_purity_std, PuritySeries};

/// 17 significant digits; parses back to the same `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn is_integer_column(name: &str) -> bool {
    name == "t" || name == "rank"
}

pub fn to_csv(record: &RunRecord) -> String {
    let mut out = record.columns.join(",");
    out.push('\n');
    for row in &record.rows {
        let cells: Vec<String> = record
            .columns
            .iter()
            .zip(row)
            .map(|(c, &v)| if is_integer_column(c) { format!("{}", v as u64) } else { format_float(v) })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn to_json(record: &RunRecord) -> Result<String> {
    let mut s = serde_json::to_string_pretty(record).map_err(|e| Error::Numerical(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct Meta<'a> {
    version: &'a str,
    config_hash: &'a str,
    wall_clock_secs: f64,
    threads: usize,
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Path of the run-metadata sidecar next to a primary output file.
pub fn meta_path(path: &Path) -> std::path::PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    path.with_file_name(name)
}

/// Writes the deterministic payload to `path` and timing details to the
/// `.meta.json` sidecar.
pub fn write_record(record: &RunRecord, path: &Path, format: OutputFormat) -> Result<()> {
    let body = match format {
        OutputFormat::Csv => to_csv(record),
        OutputFormat::Json => to_json(record)?,
    };
    write_atomic(path, body.as_bytes())?;
    let meta = Meta {
        version: &record.version,
        config_hash: &record.config_hash,
        wall_clock_secs: record.wall_clock_secs,
        threads: rayon::current_num_threads(),
    };
    let meta = serde_json::to_vec_pretty(&meta).map_err(|e| Error::Numerical(e.to_string()))?;
    write_atomic(&meta_path(path), &meta)
}

/// Columns and rows of a results CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SeriesTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn times(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r[0] as usize).collect()
    }

    /// Purity columns as a series for an `n`-qubit run of `num_states` states.
    pub fn purity_series(&self, n: usize, num_states: usize) -> Result<PuritySeries> {
        if n < 2 || n % 2 != 0 || n > 62 {
            return Err(Error::invalid(format!("n must be even and in 2..=62, got {n}")));
        }
        let stationary = stationary_purities(1u64 << (n / 2))?;
        let mut orders = Vec::new();
        let mut values = Vec::new();
        let mut limits = Vec::new();
        for p in 2..=4u32 {
            if let Some(col) = self.column(&format!("I{p}")) {
                orders.push(p);
                values.push(col);
                limits.push(stationary.order(p).expect("orders 2..=4"));
            }
        }
        if orders.is_empty() {
            return Err(Error::invalid("table has no purity column"));
        }
        Ok(PuritySeries {
            times: self.times(),
            orders,
            values,
            std: self.column("I2_std"),
            num_states: num_states.max(1),
            stationary: limits,
            stationary_std: Some(stationary_purity_std(1u64 << (n / 2))?),
        })
    }
}

impl From<&RunRecord> for SeriesTable {
    fn from(r: &RunRecord) -> Self {
        Self {
            columns: r.columns.clone(),
            rows: r.rows.clone(),
        }
    }
}

/// Parses a results CSV: a header starting with `t`, then rows of numbers
/// with strictly increasing integer `t`.
pub fn parse_series_csv(text: &str) -> Result<SeriesTable> {
    let bad = |msg: String| Error::invalid(format!("series csv: {msg}"));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let columns: Vec<String> = reader
        .headers()
        .map_err(|e| bad(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if columns.first().map(String::as_str) != Some("t") {
        return Err(bad("first column must be t".into()));
    }
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = columns.iter().find(|c| !seen.insert(c.as_str())) {
        return Err(bad(format!("duplicate column {dup:?}")));
    }
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let row = record
            .iter()
            .map(|cell| {
                cell.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| bad(format!("row {}: {cell:?} is not a finite number", line + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        let t = row[0];
        if t < 0.0 || t.fract() != 0.0 || t > u32::MAX as f64 {
            return Err(bad(format!("row {}: t = {t} is not a time step", line + 1)));
        }
        if rows.last().is_some_and(|prev| prev[0] >= t) {
            return Err(bad(format!("row {}: t is not increasing", line + 1)));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(bad("no data rows".into()));
    }
    Ok(SeriesTable { columns, rows })
}
