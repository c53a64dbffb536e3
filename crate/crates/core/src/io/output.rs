//! CSV, summary and VTK writers for run results, and a strict CSV reader.
//!
//! Numbers are written with `{:e}`, the shortest representation that reads
//! back to the same `f64`, so identical runs give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::scenarios::{ConvergenceRow, HistoryRow, RunResult, Snapshot};

use super::config::parse_number;

pub const HISTORY_HEADER: [&str; 12] = [
    "step",
    "time",
    "load",
    "response",
    "gauge",
    "kinetic",
    "elastic",
    "interface",
    "dissipated",
    "external_work",
    "initiated",
    "failed",
];

pub const SNAPSHOT_HEADER: [&str; 12] =
    ["s", "x", "y", "z", "t_x", "t_y", "t_z", "strain", "curvature", "axial_force", "moment", "time"];

pub const CONVERGENCE_HEADER: [&str; 4] = ["h", "beta", "error", "observed_order"];

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("writing to memory cannot fail");
    String::from_utf8(bytes).expect("only ASCII is written")
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Csv { line, message: e.to_string() }
}

/// `history.csv` contents. Rows must have strictly increasing steps.
pub fn history_csv(rows: &[HistoryRow]) -> Result<String> {
    if let Some(w) = rows.windows(2).find(|w| w[1].step <= w[0].step) {
        return Err(Error::Domain(format!("history steps not increasing: {} then {}", w[0].step, w[1].step)));
    }
    let mut w = writer();
    w.write_record(HISTORY_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.step.to_string(),
            num(r.time),
            num(r.load),
            num(r.response),
            num(r.gauge),
            num(r.kinetic),
            num(r.elastic),
            num(r.interface),
            num(r.dissipated),
            num(r.external_work),
            r.initiated.to_string(),
            r.failed.to_string(),
        ])
        .map_err(csv_err)?;
    }
    Ok(finish(w))
}

/// One row per element end, in element order.
pub fn snapshot_csv(snap: &Snapshot) -> Result<String> {
    let mut w = writer();
    w.write_record(SNAPSHOT_HEADER).map_err(csv_err)?;
    for n in &snap.nodes {
        w.write_record([
            num(n.s),
            num(n.position.x),
            num(n.position.y),
            num(n.position.z),
            num(n.tangent.x),
            num(n.tangent.y),
            num(n.tangent.z),
            num(n.strain),
            num(n.curvature),
            num(n.axial_force),
            num(n.moment),
            num(snap.time),
        ])
        .map_err(csv_err)?;
    }
    Ok(finish(w))
}

/// `convergence.csv` contents; the order column is empty where undefined.
pub fn convergence_csv(rows: &[ConvergenceRow]) -> Result<String> {
    let mut w = writer();
    w.write_record(CONVERGENCE_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([num(r.h), num(r.beta), num(r.error), r.observed_order.map(num).unwrap_or_default()])
            .map_err(csv_err)?;
    }
    Ok(finish(w))
}

/// Legacy ASCII VTK polyline of the nodes of a snapshot.
pub fn snapshot_vtk(snap: &Snapshot) -> String {
    let n = snap.nodes.len();
    let mut out = String::new();
    let _ = writeln!(out, "# vtk DataFile Version 3.0");
    let _ = writeln!(out, "beam step {} time {:e}", snap.step, snap.time);
    let _ = writeln!(out, "ASCII\nDATASET POLYDATA\nPOINTS {n} double");
    for p in &snap.nodes {
        let _ = writeln!(out, "{:e} {:e} {:e}", p.position.x, p.position.y, p.position.z);
    }
    let _ = write!(out, "LINES 1 {}\n{n}", n + 1);
    for i in 0..n {
        let _ = write!(out, " {i}");
    }
    let _ = writeln!(out, "\nPOINT_DATA {n}");
    for (name, f) in [
        ("curvature", (|p| p.curvature) as fn(&crate::scenarios::NodeSample) -> f64),
        ("axial_force", |p| p.axial_force),
        ("moment", |p| p.moment),
    ] {
        let _ = writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for p in &snap.nodes {
            let _ = writeln!(out, "{:e}", f(p));
        }
    }
    out
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf> {
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Files written by [`write_run`].
#[derive(Clone, Debug, Default)]
pub struct WrittenFiles {
    pub history: PathBuf,
    pub summary: PathBuf,
    pub snapshots: Vec<PathBuf>,
}

/// Writes `history.csv`, `summary.txt`, one `snapshot_<step>.csv` per
/// snapshot and, with `vtk`, a matching `snapshot_<step>.vtk`.
pub fn write_run(result: &RunResult, dir: &Path, vtk: bool) -> Result<WrittenFiles> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = WrittenFiles {
        history: write(dir.join("history.csv"), &history_csv(&result.history)?)?,
        summary: write(dir.join("summary.txt"), &result.summary.render())?,
        snapshots: vec![],
    };
    for snap in &result.snapshots {
        files.snapshots.push(write(dir.join(format!("snapshot_{}.csv", snap.step)), &snapshot_csv(snap)?)?);
        if vtk {
            write(dir.join(format!("snapshot_{}.vtk", snap.step)), &snapshot_vtk(snap))?;
        }
    }
    Ok(files)
}

pub fn write_convergence(rows: &[ConvergenceRow], dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write(dir.join("convergence.csv"), &convergence_csv(rows)?)
}

/// Numeric table read by [`read_csv`]; empty fields are `None`.
pub type Table = Vec<Vec<Option<f64>>>;

/// Reads a comma-separated table whose header must equal `header`.
///
/// Rejects carriage returns, quoting, ragged rows and anything but plain
/// decimal or scientific numbers.
pub fn read_csv(text: &str, header: &[&str]) -> Result<Table> {
    if let Some(i) = text.find('\r') {
        let line = text[..i].matches('\n').count() + 1;
        return Err(Error::Csv { line, message: "carriage return in line ending".into() });
    }
    if text.contains('"') {
        let line = text[..text.find('"').unwrap_or(0)].matches('\n').count() + 1;
        return Err(Error::Csv { line, message: "quoted fields are not allowed".into() });
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .quoting(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_reader(text.as_bytes());
    let got = reader.headers().map_err(csv_err)?.clone();
    if got.iter().ne(header.iter().copied()) {
        return Err(Error::Csv {
            line: 1,
            message: format!(
                "header `{}` differs from `{}`",
                got.iter().collect::<Vec<_>>().join(","),
                header.join(",")
            ),
        });
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let row = rec
            .iter()
            .map(|f| match f {
                "" => Ok(None),
                f => parse_number(f)
                    .map(Some)
                    .ok_or_else(|| Error::Csv { line, message: format!("not a number: `{f}`") }),
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

fn required(v: Option<f64>, line: usize, column: &str) -> Result<f64> {
    v.ok_or_else(|| Error::Csv { line, message: format!("empty `{column}`") })
}

fn count(v: f64, line: usize, column: &str) -> Result<usize> {
    if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(Error::Csv { line, message: format!("`{column}` must be a non-negative integer, got {v}") })
    }
}

/// Parses `history.csv` back into rows, checking that steps increase.
pub fn parse_history(text: &str) -> Result<Vec<HistoryRow>> {
    let table = read_csv(text, &HISTORY_HEADER)?;
    let mut rows: Vec<HistoryRow> = Vec::with_capacity(table.len());
    for (i, t) in table.iter().enumerate() {
        let line = i + 2;
        let v = |k: usize| required(t[k], line, HISTORY_HEADER[k]);
        let row = HistoryRow {
            step: count(v(0)?, line, "step")?,
            time: v(1)?,
            load: v(2)?,
            response: v(3)?,
            gauge: v(4)?,
            kinetic: v(5)?,
            elastic: v(6)?,
            interface: v(7)?,
            dissipated: v(8)?,
            external_work: v(9)?,
            initiated: count(v(10)?, line, "initiated")?,
            failed: count(v(11)?, line, "failed")?,
        };
        if rows.last().is_some_and(|p| p.step >= row.step) {
            return Err(Error::Csv { line, message: "steps must increase".into() });
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn parse_convergence(text: &str) -> Result<Vec<ConvergenceRow>> {
    read_csv(text, &CONVERGENCE_HEADER)?
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let line = i + 2;
            Ok(ConvergenceRow {
                h: required(t[0], line, "h")?,
                beta: required(t[1], line, "beta")?,
                error: required(t[2], line, "error")?,
                observed_order: t[3],
            })
        })
        .collect()
}
