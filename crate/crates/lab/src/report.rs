//! Summary tables and two-column plot data from a manifest.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use log::warn;
use serde_json::Value;

use crate::error::{LabError, LabResult};
use crate::io::{format_float, read_table};
use crate::manifest::Manifest;

pub const REPORT_TEXT: &str = "report.txt";
pub const REPORT_JSON: &str = "report.json";
pub const PLOT_DIR: &str = "plot";

#[derive(Debug, Clone)]
pub struct ReportOutput {
    pub text: String,
    pub rows: usize,
    pub files: Vec<PathBuf>,
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => "-".into(),
        Some(Value::Number(n)) => match n.as_f64() {
            Some(x) if n.is_f64() && x != 0.0 && !(1e-3..1e6).contains(&x.abs()) => format!("{x:.4e}"),
            Some(x) if n.is_f64() => format!("{:.6}", x).trim_end_matches('0').trim_end_matches('.').to_string(),
            _ => n.to_string(),
        },
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

fn render(header: &[String], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|i| rows.iter().map(|r| r[i].chars().count()).chain([header[i].chars().count()]).max().unwrap_or(0))
        .collect();
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(header);
    out.push('\n');
    out.push_str(&line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>()));
    out.push('\n');
    for r in rows {
        out.push_str(&line(r));
        out.push('\n');
    }
    out
}

/// Writes `report.txt`, `report.json` and `plot/*.dat` into `out_dir`.
pub fn report(manifest_path: &Path, out_dir: &Path) -> LabResult<ReportOutput> {
    let manifest = Manifest::read(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    for run in &manifest.runs {
        for file in run.files.values() {
            let p = base.join(file);
            if !p.exists() {
                return Err(LabError::MissingInput(p));
            }
        }
    }
    std::fs::create_dir_all(out_dir.join(PLOT_DIR))?;

    let mut text = String::new();
    writeln!(text, "experiment {} ({}), seed {}", manifest.experiment, manifest.kind.name(), manifest.seed).ok();
    writeln!(text, "{}", manifest.code_version).ok();
    if manifest.runs.is_empty() {
        warn!("manifest {} lists no runs", manifest_path.display());
        writeln!(text, "\n(no runs)").ok();
    }

    let params: BTreeSet<&String> = manifest.runs.iter().flat_map(|r| r.params.keys()).collect();
    let results: BTreeSet<&String> = manifest
        .runs
        .iter()
        .flat_map(|r| r.results.iter().filter(|(_, v)| !v.is_string()).map(|(k, _)| k))
        .collect();
    if !manifest.runs.is_empty() {
        let header: Vec<String> = ["id".to_string()]
            .into_iter()
            .chain(params.iter().map(|s| s.to_string()))
            .chain(results.iter().map(|s| s.to_string()))
            .collect();
        let rows: Vec<Vec<String>> = manifest
            .runs
            .iter()
            .map(|r| {
                [r.id.clone()]
                    .into_iter()
                    .chain(params.iter().map(|k| cell(r.params.get(*k))))
                    .chain(results.iter().map(|k| cell(r.results.get(*k))))
                    .collect()
            })
            .collect();
        text.push('\n');
        text.push_str(&render(&header, &rows));
        let notes: Vec<String> = manifest
            .runs
            .iter()
            .flat_map(|r| {
                r.results
                    .iter()
                    .filter_map(move |(k, v)| v.as_str().map(|s| format!("{}: {k}: {s}", r.id)))
            })
            .collect();
        if !notes.is_empty() {
            text.push_str("\nnotes:\n");
            for n in notes {
                writeln!(text, "  {n}").ok();
            }
        }
    }

    let mut files = Vec::new();
    for run in &manifest.runs {
        for file in run.files.values() {
            let table = read_table(&base.join(file))?;
            if table.columns.len() < 2 {
                continue;
            }
            let (x, y) = match (table.column("t"), table.column("M")) {
                (Some(t), Some(m)) => (t, m),
                _ => (
                    table.rows.iter().map(|r| r[0]).collect(),
                    table.rows.iter().map(|r| r[1]).collect(),
                ),
            };
            let stem = Path::new(file).file_stem().map_or_else(|| file.clone(), |s| s.to_string_lossy().into_owned());
            let path = out_dir.join(PLOT_DIR).join(format!("{stem}.dat"));
            let mut body = format!("# {} {}\n", table.columns[0], if table.column("M").is_some() { "M" } else { &table.columns[1] });
            for (a, b) in x.iter().zip(&y) {
                writeln!(body, "{} {}", format_float(*a), format_float(*b)).ok();
            }
            std::fs::write(&path, body)?;
            files.push(path);
        }
    }

    let records: Vec<Value> = manifest
        .runs
        .iter()
        .map(|r| serde_json::json!({ "id": r.id, "params": r.params, "results": r.results }))
        .collect();
    let json_path = out_dir.join(REPORT_JSON);
    std::fs::write(&json_path, serde_json::to_string_pretty(&records)? + "\n")?;
    let text_path = out_dir.join(REPORT_TEXT);
    std::fs::write(&text_path, &text)?;
    files.push(json_path);
    files.push(text_path);
    files.sort();
    Ok(ReportOutput {
        text,
        rows: manifest.runs.len(),
        files,
    })
}
