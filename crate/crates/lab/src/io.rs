//! Plain-text series files: `# key=value` metadata lines, a header row, then
//! comma-separated numbers.
//!
//! ```text
//! # echolab_version=0.1.0
//! # N=1024
//! t,M,stderr
//! 0,1,0
//! 1,0.9731,0.0004
//! ```
//!
//! Numbers are written in the shortest form that parses back to the same
//! `f64`, so a write/read cycle is lossless and reruns are byte-identical.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use echolab_core::EchoSeries;

use crate::error::{LabError, LabResult};

pub const SERIES_COLUMNS: [&str; 3] = ["t", "M", "stderr"];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn write_table(path: &Path, table: &Table) -> LabResult<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for (k, v) in &table.meta {
        writeln!(out, "# {k}={v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|x| format_float(*x)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_table(path: &Path) -> LabResult<Table> {
    if !path.exists() {
        return Err(LabError::MissingInput(path.to_path_buf()));
    }
    let bad = |reason: String| LabError::Format {
        path: path.to_path_buf(),
        reason,
    };
    let mut meta = Vec::new();
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        let Some(rest) = line.strip_prefix('#') else { break };
        if let Some((k, v)) = rest.trim_start().split_once('=') {
            meta.push((k.to_string(), v.to_string()));
        }
    }
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    let columns: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| bad(format!("row {}: {e}", i + 1)))?;
        if row.len() != columns.len() {
            return Err(bad(format!("row {} has {} fields, expected {}", i + 1, row.len(), columns.len())));
        }
        rows.push(row);
    }
    Ok(Table { meta, columns, rows })
}

/// Series as a table; `header` lines come first, then the series metadata.
pub fn series_table(series: &EchoSeries, header: &[(String, String)]) -> Table {
    let mut t = Table::new(&SERIES_COLUMNS);
    t.meta.extend(header.iter().cloned());
    t.meta.push(("ensemble_size".into(), series.ensemble_size.to_string()));
    t.meta.extend(series.metadata.iter().map(|(k, v)| (k.clone(), v.clone())));
    t.rows = (0..series.len())
        .map(|i| vec![series.times[i], series.m[i], series.stderr[i]])
        .collect();
    t
}

pub fn write_series(path: &Path, series: &EchoSeries, header: &[(String, String)]) -> LabResult<()> {
    write_table(path, &series_table(series, header))
}

/// Reads a series file; every metadata line lands in `metadata` except
/// `ensemble_size`, which is parsed.
pub fn read_series(path: &Path) -> LabResult<EchoSeries> {
    let t = read_table(path)?;
    let bad = |reason: &str| LabError::Format {
        path: path.to_path_buf(),
        reason: reason.into(),
    };
    let (Some(times), Some(m)) = (t.column("t"), t.column("M")) else {
        return Err(bad("series needs `t` and `M` columns"));
    };
    let stderr = t.column("stderr").unwrap_or_else(|| vec![0.0; m.len()]);
    let ensemble_size = match t.meta("ensemble_size") {
        Some(v) => v.parse().map_err(|_| bad("ensemble_size is not an integer"))?,
        None => 1,
    };
    let mut s = EchoSeries::new(times, m, stderr, ensemble_size)?;
    for (k, v) in t.meta {
        if k != "ensemble_size" {
            s.metadata.insert(k, v);
        }
    }
    Ok(s)
}
