//! Per-route index values collected into one report.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::maslov::{maslov_chern_weil, maslov_topological};
use super::pair::BundlePair;
use crate::domain::QuadratureRule;
use crate::error::{MaslovError, Result};
use crate::scalar::Real;

/// Way of computing the index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Route {
    /// Curvature integral plus boundary connection form.
    ChernWeil,
    /// Winding of the squared boundary determinant.
    Topological,
    /// Ricci form plus Maslov 1-form of an immersed surface.
    Geometric,
}

impl Route {
    pub const ALL: [Route; 3] = [Route::ChernWeil, Route::Topological, Route::Geometric];

    pub fn label(self) -> &'static str {
        match self {
            Route::ChernWeil => "cw",
            Route::Topological => "top",
            Route::Geometric => "geom",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Route {
    type Err = MaslovError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "cw" => Ok(Route::ChernWeil),
            "top" => Ok(Route::Topological),
            "geom" => Ok(Route::Geometric),
            other => Err(MaslovError::UnsupportedInput(format!("unknown route '{other}'"))),
        }
    }
}

/// Index values by route, the common rounded value and named component
/// integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct MaslovReport<T> {
    pub mu_by_route: BTreeMap<Route, T>,
    pub mu_rounded: i64,
    /// Largest `|mu - mu_rounded|` over routes.
    pub residual: T,
    pub components: BTreeMap<String, T>,
    pub tolerance: T,
    /// False when the routes round differently or spread beyond twice the
    /// tolerance.
    pub consistent: bool,
}

impl<T: Real> MaslovReport<T> {
    /// Assembles a report. The rounded value follows the topological route
    /// when present.
    pub fn assemble(mu_by_route: BTreeMap<Route, T>, components: BTreeMap<String, T>, tolerance: T) -> Self {
        let anchor = mu_by_route.get(&Route::Topological).or_else(|| mu_by_route.values().next()).copied().unwrap_or_else(T::zero);
        let mu_rounded = anchor.round().to_i64().unwrap_or(0);
        let target = T::from_i64(mu_rounded).unwrap();
        let residual = mu_by_route.values().fold(T::zero(), |m, v| m.max((*v - target).abs()));
        let lo = mu_by_route.values().fold(T::infinity(), |m, v| m.min(*v));
        let hi = mu_by_route.values().fold(T::neg_infinity(), |m, v| m.max(*v));
        let spread = if mu_by_route.is_empty() { T::zero() } else { hi - lo };
        let same_rounding = mu_by_route.values().all(|v| v.round().to_i64() == Some(mu_rounded));
        let consistent = same_rounding && spread < T::lit(2.0) * tolerance;
        Self { mu_by_route, mu_rounded, residual, components, tolerance, consistent }
    }

    pub fn mu(&self, route: Route) -> Option<T> {
        self.mu_by_route.get(&route).copied()
    }

    pub fn component(&self, name: &str) -> Option<T> {
        self.components.get(name).copied()
    }

    /// Largest difference between two routes.
    pub fn spread(&self) -> T {
        let lo = self.mu_by_route.values().fold(T::infinity(), |m, v| m.min(*v));
        let hi = self.mu_by_route.values().fold(T::neg_infinity(), |m, v| m.max(*v));
        if self.mu_by_route.is_empty() {
            T::zero()
        } else {
            hi - lo
        }
    }
}

/// Runs the Chern-Weil and topological routes on `pair`.
///
/// Components: `int_curvature` (imaginary part of `∫ tr R`), `int_theta`
/// (imaginary part of `∮ θ`), `winding_loop_<i>`, `clutching_winding`.
pub fn maslov_report<T: Real>(pair: &BundlePair<T>, rule: &QuadratureRule<T>, tolerance: T) -> Result<MaslovReport<T>> {
    let cw = maslov_chern_weil(pair, rule)?;
    let top = maslov_topological(pair)?;
    let mut routes = BTreeMap::new();
    routes.insert(Route::ChernWeil, cw.mu);
    routes.insert(Route::Topological, T::from_i64(top.mu).unwrap());
    let mut components = BTreeMap::new();
    components.insert("int_curvature".to_string(), cw.int_curvature.im);
    components.insert("int_theta".to_string(), cw.total_theta().im);
    for (i, w) in top.loop_windings.iter().enumerate() {
        components.insert(format!("winding_loop_{i}"), T::from_i64(*w).unwrap());
    }
    if let Some(w) = top.clutching_winding {
        components.insert("clutching_winding".to_string(), T::from_i64(w).unwrap());
    }
    Ok(MaslovReport::assemble(routes, components, tolerance))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn route_labels_round_trip() {
        for r in Route::ALL {
            assert_eq!(r.label().parse::<Route>().unwrap(), r);
        }
        assert!("nope".parse::<Route>().is_err());
    }

    #[test]
    fn assemble_flags_disagreement() {
        let mut m = BTreeMap::new();
        m.insert(Route::ChernWeil, 2.0004f64);
        m.insert(Route::Topological, 2.0);
        let r = MaslovReport::assemble(m.clone(), BTreeMap::new(), 1e-3);
        assert!(r.consistent);
        assert_eq!(r.mu_rounded, 2);
        assert!((r.residual - 4e-4f64).abs() < 1e-12);
        m.insert(Route::Geometric, 2.6);
        let r = MaslovReport::assemble(m, BTreeMap::new(), 1e-3);
        assert!(!r.consistent);
    }
}
