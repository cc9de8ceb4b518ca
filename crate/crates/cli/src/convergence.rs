//! Observed order of convergence across refinement levels.

use std::collections::BTreeMap;

use crate::run::{run, Overrides, ReportRow};
use crate::scenario::Scenario;
use crate::CliError;

/// Residuals at or below this are treated as exact.
pub const ROUNDOFF_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    /// Slope of `log residual` against `log h`.
    Fitted(f64),
    /// Every residual is at the roundoff floor (integer-valued routes,
    /// flat trivial pairs).
    Exact,
    /// Fewer than three levels above the floor.
    Undetermined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Study {
    pub rows: Vec<ReportRow>,
    /// Keyed by `scenario/route`.
    pub orders: BTreeMap<String, Order>,
}

/// Least-squares slope of `ln e` against `ln h`, `h = 2^-level`.
pub fn fitted_order(levels: &[usize], residuals: &[f64]) -> Order {
    let pts: Vec<(f64, f64)> = levels.iter().zip(residuals).filter(|(_, &e)| e > ROUNDOFF_FLOOR).map(|(&l, &e)| (-(l as f64) * std::f64::consts::LN_2, e.ln())).collect();
    if pts.is_empty() {
        return Order::Exact;
    }
    if pts.len() < 3 {
        return Order::Undetermined;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Order::Fitted(sxy / sxx)
}

/// Orders per scenario instance and route from rows that span several
/// levels.
pub fn orders_of(rows: &[ReportRow]) -> BTreeMap<String, Order> {
    let mut series: BTreeMap<String, Vec<(usize, f64)>> = BTreeMap::new();
    for r in rows {
        series.entry(format!("{}/{}", r.scenario, r.route)).or_default().push((r.refinement, r.residual));
    }
    series
        .into_iter()
        .filter(|(_, v)| v.len() >= 3)
        .map(|(k, mut v)| {
            v.sort_by_key(|p| p.0);
            let (l, e): (Vec<usize>, Vec<f64>) = v.into_iter().unzip();
            (k, fitted_order(&l, &e))
        })
        .collect()
}

/// Runs `s` at every level in `levels` (ascending, at least three).
pub fn convergence_study(s: &Scenario, levels: &[usize], o: &Overrides) -> Result<Study, CliError> {
    if levels.len() < 3 {
        return Err(CliError::Validation { field: "levels".into(), message: "a convergence study needs at least three levels".into() });
    }
    let o = Overrides { levels: Some(levels.to_vec()), ..o.clone() };
    let rows = run(s, &o)?.rows;
    let orders = orders_of(&rows);
    Ok(Study { rows, orders })
}
