//! CSV tables with a `# schema=` first line, JSON reports and run manifests.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::flow::{FlowHistory, Grid, Scheme};
use crate::speed::SpeedSpec;

/// Writes `header` and `rows` as CSV after a `# schema=<schema>` line.
pub fn write_csv<P: AsRef<Path>>(path: P, schema: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    writeln!(f, "# schema={schema}")?;
    let mut w = csv::Writer::from_writer(f);
    w.write_record(header)?;
    for r in rows {
        if r.len() != header.len() {
            return Err(FlowError::InvalidParameter(format!("row of {} values for {} columns", r.len(), header.len())));
        }
        w.write_record(r.iter().map(|v| format!("{v:e}")))?;
    }
    w.flush()?;
    Ok(())
}

/// A table read back by [`read_csv`].
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub schema: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

pub fn read_csv<P: AsRef<Path>>(path: P) -> Result<Table> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let schema = first
        .trim()
        .strip_prefix("# schema=")
        .ok_or_else(|| FlowError::InvalidParameter("missing '# schema=' line".into()))?
        .to_string();
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(
            rec.iter()
                .map(|s| s.trim().parse::<f64>().map_err(|e| FlowError::InvalidParameter(format!("'{s}': {e}"))))
                .collect::<Result<Vec<f64>>>()?,
        );
    }
    Ok(Table { schema, header, rows })
}

pub fn write_json<P: AsRef<Path>, T: Serialize>(path: P, value: &T) -> Result<()> {
    let f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(f, value)?;
    Ok(())
}

pub fn read_json<P: AsRef<Path>, T: for<'de> Deserialize<'de>>(path: P) -> Result<T> {
    let f = BufReader::new(File::open(path)?);
    Ok(serde_json::from_reader(f)?)
}

/// Everything needed to repeat a flow run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub speed: SpeedSpec,
    pub grid: Grid,
    pub scheme: Scheme,
    pub tolerances: Vec<(String, f64)>,
    pub boundary: String,
    pub seed: Option<u64>,
    pub snapshot_stride: usize,
    pub version: String,
}

/// Snapshots in long form: one `(t, x, u)` row per node.
pub fn write_history<P: AsRef<Path>>(path: P, history: &FlowHistory) -> Result<()> {
    let nodes = history.grid.nodes();
    let rows: Vec<Vec<f64>> = history
        .times
        .iter()
        .zip(&history.snapshots)
        .flat_map(|(t, s)| nodes.iter().zip(s).map(move |(x, u)| vec![*t, *x, *u]))
        .collect();
    write_csv(path, "flow_history", &["t", "x", "u"], &rows)
}
