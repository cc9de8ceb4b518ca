//! CSV and plain-text output.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use crate::convergence::{Order, Study};
use crate::run::{ReportRow, RunOutcome};
use crate::CliError;

pub const CSV_HEADER: &str = "scenario,route,refinement,mu_raw,mu_rounded,residual,int_curvature,int_boundary,alpha_L,wall_ms";

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io { path: "<csv>".into(), message: e.to_string() }
}

/// Writes the header and one record per row, in order.
pub fn write_csv<W: Write>(rows: &[ReportRow], w: W) -> Result<(), CliError> {
    if rows.is_empty() {
        return Err(CliError::Validation { field: "rows".into(), message: "nothing to write".into() });
    }
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r).map_err(csv_err)?;
    }
    wr.flush().map_err(|e| CliError::Io { path: "<csv>".into(), message: e.to_string() })
}

pub fn emit_csv(rows: &[ReportRow], path: &Path) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io { path: path.display().to_string(), message: e.to_string() };
    let file = std::fs::File::create(path).map_err(io)?;
    write_csv(rows, std::io::BufWriter::new(file))
}

pub fn csv_string(rows: &[ReportRow]) -> Result<String, CliError> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv is utf-8"))
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<ReportRow>, CliError> {
    let mut rd = csv::Reader::from_reader(r);
    let header = rd.headers().map_err(csv_err)?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        return Err(CliError::Validation { field: "csv header".into(), message: header });
    }
    rd.deserialize().map(|r| r.map_err(csv_err)).collect()
}

/// CSV text with the `wall_ms` column blanked, for comparing runs.
pub fn without_wall_time(csv_text: &str) -> String {
    csv_text
        .lines()
        .map(|l| match l.rfind(',') {
            Some(i) => &l[..i],
            None => l,
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into())
}

/// Human-readable table plus check lines and verdict.
pub fn render(outcome: &RunOutcome) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<28} {:>5} {:>3} {:>16} {:>4} {:>10} {:>13} {:>13} {:>10} {:>9}", "scenario", "route", "lvl", "mu_raw", "mu", "residual", "int_curv", "int_bdry", "alpha_L", "ms");
    for r in &outcome.rows {
        let flag = if r.residual < outcome.tolerance { "" } else { "  !" };
        let _ = writeln!(
            s,
            "{:<28} {:>5} {:>3} {:>16.10} {:>4} {:>10.2e} {:>13} {:>13} {:>10} {:>9.1}{flag}",
            r.scenario,
            r.route,
            r.refinement,
            r.mu_raw,
            r.mu_rounded,
            r.residual,
            opt(r.int_curvature),
            opt(r.int_boundary),
            opt(r.alpha_l),
            r.wall_ms
        );
    }
    for c in &outcome.checks {
        let _ = writeln!(s, "check {:<28} L{} {:<20} {:>12.3e} (tol {:.0e}) {}", c.scenario, c.refinement, c.name, c.value, c.tolerance, if c.holds() { "ok" } else { "FAIL" });
    }
    for id in outcome.inconsistent() {
        let _ = writeln!(s, "inconsistent rounding in {id}");
    }
    s
}

pub fn render_study(study: &Study) -> String {
    let mut s = String::new();
    for (route, order) in &study.orders {
        let text = match order {
            Order::Fitted(p) => format!("{p:.2}"),
            Order::Exact => "exact (residual at roundoff on every level)".into(),
            Order::Undetermined => "undetermined (too few levels above roundoff)".into(),
        };
        let _ = writeln!(s, "order {route}: {text}");
    }
    s
}
