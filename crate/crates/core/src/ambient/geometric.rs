//! Pullback pairs, the Maslov 1-form and the Ricci-form route.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex;

use super::immersion::{ImmersedSurface, TotallyRealConstraint};
use super::model::{chern_connection, connection_along, ricci_form, KahlerModel};
use crate::bundlepair::{boundary_theta, maslov_chern_weil, maslov_topological, BundlePair, ConnectionField, ConnectionPatch, MaslovReport, MetricField, Route, TotallyRealBoundaryData};
use crate::domain::{try_integrate_2form, LoopNode, QuadratureRule};
use crate::error::{MaslovError, Result};
use crate::numerics::diff::derivative_unchecked;
use crate::numerics::{CMatrix, HermitianForm};
use crate::scalar::{CVec, Point, Real};

fn axes<T: Real>() -> [Point<T>; 3] {
    let (o, l) = (T::zero(), T::one());
    [[l, o, o], [o, l, o], [o, o, l]]
}

fn nan_matrix<T: Real>(n: usize) -> CMatrix<T> {
    CMatrix::from_fn(n, n, |_, _| Complex::new(T::nan(), T::nan()))
}

/// `E = ι*TM` with the pulled back Chern connection and metric, and
/// `F = TL` along the boundary. Closed surfaces take `constraint = None`
/// and inherit the immersion's clutching.
pub fn pullback_pair<T: Real>(model: &KahlerModel<T>, immersed: &ImmersedSurface<T>, constraint: Option<&TotallyRealConstraint<T>>) -> Result<BundlePair<T>> {
    let n = model.dim();
    if immersed.dim() != n {
        return Err(MaslovError::DimensionMismatch { expected: n, found: immersed.dim() });
    }
    immersed.validate()?;
    let surface = immersed.surface_arc();
    for p in surface.probe_points(16) {
        model.metric_at(&immersed.map(&p))?;
    }

    let patches = immersed
        .patches()
        .iter()
        .map(|patch| {
            let (patch, region, model) = (patch.clone(), patch.clone(), model.clone());
            ConnectionPatch::new(
                move |p| region.contains(p),
                move |p| {
                    let z = patch.map(p);
                    match chern_connection(&model, &z) {
                        Ok(gamma) => axes::<T>().map(|e| connection_along(&gamma, &patch.push(p, &e))),
                        // surfaces as non-finite values in quadrature
                        Err(_) => [nan_matrix(n), nan_matrix(n), nan_matrix(n)],
                    }
                },
            )
        })
        .collect();
    let connection = ConnectionField::patched(n, patches, true);
    let (im, md) = (immersed.clone(), model.clone());
    let metric = MetricField::patched(move |anchor, p| {
        let z = im.patches()[im.patch_index(anchor)].map(p);
        HermitianForm::new(md.metric_matrix(&z)).unwrap_or_else(|_| HermitianForm::identity(md.dim()))
    });

    let mut boundary = TotallyRealBoundaryData::new();
    if surface.has_boundary() {
        let constraint = constraint.ok_or_else(|| MaslovError::UnsupportedInput("surface with boundary needs a totally real constraint".into()))?;
        if constraint.dim() != n {
            return Err(MaslovError::DimensionMismatch { expected: n, found: constraint.dim() });
        }
        for (i, lp) in surface.boundary_loops().iter().enumerate() {
            for t in lp.sample_parameters() {
                let z = immersed.boundary_point(i, t).0;
                let d = constraint.distance(&z);
                if !(d < T::tol(1e-8)) {
                    return Err(MaslovError::BoundaryOffConstraint { distance: d.as_f64() });
                }
            }
            let (im, c) = (immersed.clone(), constraint.clone());
            boundary = boundary.with_loop(move |t| c.tangent_frame(&im.boundary_point(i, t).0));
        }
    }
    let pair = BundlePair::new(surface, connection, metric, boundary)?;
    match immersed.clutching() {
        Some(c) => pair.with_clutching(c.clone()),
        None => Ok(pair),
    }
}

/// One sample of the Maslov 1-form along a boundary loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiSample<T> {
    pub node: LoopNode<T>,
    /// `ξ_J(γ'(t))`.
    pub value: T,
}

/// `ξ_J` on boundary loop `loop_index`, from `i ξ_J = -θ` of the pullback
/// pair.
pub fn xi_j<T: Real>(pair: &BundlePair<T>, loop_index: usize, rule: &QuadratureRule<T>) -> Result<Vec<XiSample<T>>> {
    Ok(boundary_theta(pair, loop_index, rule)?.into_iter().map(|s| XiSample { node: s.node, value: -s.value.im }).collect())
}

/// `∮ ξ_J` over one boundary loop.
pub fn integrate_xi<T: Real>(pair: &BundlePair<T>, loop_index: usize, rule: &QuadratureRule<T>) -> Result<T> {
    Ok(xi_j(pair, loop_index, rule)?.iter().fold(T::zero(), |s, x| s + x.value * x.node.weight))
}

/// `∫_Σ ι*ρ`.
pub fn integrate_ricci<T: Real>(model: &KahlerModel<T>, immersed: &ImmersedSurface<T>, rule: &QuadratureRule<T>) -> Result<T> {
    try_integrate_2form(
        immersed.surface(),
        |p, u, v| {
            let z = immersed.map(p);
            ricci_form(model, &z, &immersed.push(p, u), &immersed.push(p, v))
        },
        rule,
    )
}

/// `α_L = ∫_Σ ι*ω`.
pub fn symplectic_area<T: Real>(model: &KahlerModel<T>, immersed: &ImmersedSurface<T>, rule: &QuadratureRule<T>) -> Result<T> {
    try_integrate_2form(
        immersed.surface(),
        |p, u, v| {
            let z = immersed.map(p);
            Ok(model.kahler_form(&z, &immersed.push(p, u), &immersed.push(p, v)))
        },
        rule,
    )
}

/// `∮ ω(H, ·)` along boundary loop `loop_index`, from the analytic mean
/// curvature of a Lagrangian constraint.
pub fn lagrangian_boundary_term<T: Real>(
    model: &KahlerModel<T>,
    immersed: &ImmersedSurface<T>,
    constraint: &TotallyRealConstraint<T>,
    loop_index: usize,
    rule: &QuadratureRule<T>,
) -> Result<T> {
    if !constraint.is_lagrangian() {
        return Err(MaslovError::UnsupportedInput(format!("{} is not Lagrangian", constraint.name())));
    }
    if !constraint.has_mean_curvature() {
        return Err(MaslovError::MissingAnalyticH);
    }
    let lp = &immersed.surface().boundary_loops()[loop_index];
    let mut total = T::zero();
    for node in rule.loop_nodes(lp) {
        let z = immersed.map(&node.point);
        let h = constraint.mean_curvature(&z).ok_or(MaslovError::MissingAnalyticH)?;
        total += model.kahler_form(&z, &h, &immersed.push(&node.point, &node.velocity)) * node.weight;
    }
    Ok(total)
}

/// `∮ k ds` along boundary loop `loop_index` of a surface in a complex
/// curve, with `k` the geodesic curvature towards the interior.
pub fn geodesic_curvature_term<T: Real>(model: &KahlerModel<T>, immersed: &ImmersedSurface<T>, loop_index: usize, rule: &QuadratureRule<T>) -> Result<T> {
    if model.dim() != 1 {
        return Err(MaslovError::UnsupportedInput("geodesic curvature needs a complex curve".into()));
    }
    let lp = &immersed.surface().boundary_loops()[loop_index];
    let dt = T::one() / T::from_usize(lp.segments()).unwrap();
    let mut total = T::zero();
    for node in rule.loop_nodes(lp) {
        let z = immersed.map(&node.point);
        let vel = immersed.push(&node.point, &node.velocity);
        let acc: CVec<T> = derivative_unchecked(
            |s: T| {
                let (p, v) = lp.eval(s);
                immersed.push(&p, &v)
            },
            node.t,
            dt,
        );
        let gamma = chern_connection(model, &z)?;
        let cov = &connection_along(&gamma, &vel).mul_vec(&vel);
        let nabla: CVec<T> = acc.iter().zip(cov).map(|(a, b)| a + b).collect();
        let g = model.metric_at(&z)?;
        let jv: CVec<T> = vel.iter().map(|v| v * Complex::new(T::zero(), T::one())).collect();
        // k ds = <∇_γ' γ', J γ'> / |γ'|^2 dt
        let value = g.eval(&nabla, &jv).re / g.norm_sq(&vel);
        total += value * node.weight;
    }
    Ok(total)
}

/// All routes and component integrals for an immersed surface.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricMaslovReport<T> {
    /// `(1/π) ∫ ρ - (1/π) ∮ ξ_J`.
    pub mu_geometric: T,
    /// Curvature-plus-boundary value of the pullback pair.
    pub mu_pullback_cw: T,
    pub mu_topological: i64,
    /// `(1/2π) ∫ P = (1/π) ∫ ρ`.
    pub rho_over_pi: T,
    /// `(1/π) ∮ ξ_J`, all loops.
    pub xi_over_pi: T,
    /// Symplectic area `α_L = ∫ ω`.
    pub alpha_l: T,
    /// `∫ ρ`.
    pub rho_area: T,
    /// Imaginary part of `∫ tr R` of the pullback pair.
    pub int_curvature: T,
    /// `∮ ω(H, ·)`, all loops, when `H` is available.
    pub boundary_h_term: Option<T>,
    /// `π μ - c α_L + ∮ ω(H, ·)` for Einstein models with analytic `H`.
    pub monotonicity_line: Option<T>,
    pub report: MaslovReport<T>,
}

/// Index of an immersed surface by the Ricci-form route, cross-checked
/// against the pullback pair's Chern-Weil and topological values.
pub fn maslov_geometric<T: Real>(
    model: &KahlerModel<T>,
    immersed: &ImmersedSurface<T>,
    constraint: Option<&TotallyRealConstraint<T>>,
    rule: &QuadratureRule<T>,
    tolerance: T,
) -> Result<GeometricMaslovReport<T>> {
    let pair = pullback_pair(model, immersed, constraint)?;
    let pi = T::lit(PI);
    let rho_area = integrate_ricci(model, immersed, rule)?;
    let loops = immersed.surface().boundary_loops().len();
    let mut xi = T::zero();
    for i in 0..loops {
        xi += integrate_xi(&pair, i, rule)?;
    }
    let alpha_l = symplectic_area(model, immersed, rule)?;
    let mu_geometric = rho_area / pi - xi / pi;
    let cw = maslov_chern_weil(&pair, rule)?;
    let top = maslov_topological(&pair)?;

    let boundary_h_term = match constraint {
        Some(c) if c.is_lagrangian() && c.has_mean_curvature() => {
            let mut s = T::zero();
            for i in 0..loops {
                s += lagrangian_boundary_term(model, immersed, c, i, rule)?;
            }
            Some(s)
        }
        None if loops == 0 => Some(T::zero()),
        _ => None,
    };
    let monotonicity_line = match (model.einstein_constant(), boundary_h_term) {
        (Some(c), Some(h)) => Some(pi * mu_geometric - c * alpha_l + h),
        _ => None,
    };

    let mut routes = BTreeMap::new();
    routes.insert(Route::Geometric, mu_geometric);
    routes.insert(Route::ChernWeil, cw.mu);
    routes.insert(Route::Topological, T::from_i64(top.mu).unwrap());
    let mut components = BTreeMap::new();
    components.insert("int_curvature".to_string(), cw.int_curvature.im);
    components.insert("int_theta".to_string(), cw.total_theta().im);
    components.insert("rho_over_pi".to_string(), rho_area / pi);
    components.insert("xi_over_pi".to_string(), xi / pi);
    components.insert("alpha_l".to_string(), alpha_l);
    if let Some(h) = boundary_h_term {
        components.insert("boundary_h".to_string(), h);
    }
    let report = MaslovReport::assemble(routes, components, tolerance);
    let limit = T::lit(2.0) * tolerance;
    if !report.consistent {
        return Err(MaslovError::RouteDisagreement { spread: report.spread().as_f64(), limit: limit.as_f64() });
    }
    Ok(GeometricMaslovReport {
        mu_geometric,
        mu_pullback_cw: cw.mu,
        mu_topological: top.mu,
        rho_over_pi: rho_area / pi,
        xi_over_pi: xi / pi,
        alpha_l,
        rho_area,
        int_curvature: cw.int_curvature.im,
        boundary_h_term,
        monotonicity_line,
        report,
    })
}

/// One residual that should vanish, with its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualLine<T> {
    pub name: String,
    pub value: T,
    pub tolerance: T,
}

impl<T: Real> ResidualLine<T> {
    pub fn holds(&self) -> bool {
        self.value.abs() < self.tolerance
    }
}

/// Monotonicity quantities of an immersed surface.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport<T> {
    pub mu: T,
    pub alpha_l: T,
    /// `∫ ρ` and `μ / ∫ ρ`, reported for ρ-Lagrangian constraints.
    pub rho_area: Option<T>,
    pub rho_ratio: Option<T>,
    pub boundary_h_term: Option<T>,
    /// `kahler_einstein`: `π μ - c α_L + ∮ ω(H, ·)`; `soliton`:
    /// `μ + (2 c_sol / π) α_L`. A line appears only when its constant is
    /// known.
    pub lines: Vec<ResidualLine<T>>,
}

/// Evaluates the monotonicity relations that apply to the given model and
/// constraint.
pub fn monotonicity_report<T: Real>(
    model: &KahlerModel<T>,
    immersed: &ImmersedSurface<T>,
    constraint: &TotallyRealConstraint<T>,
    rule: &QuadratureRule<T>,
    tolerance: T,
) -> Result<MonotonicityReport<T>> {
    let g = maslov_geometric(model, immersed, Some(constraint), rule, tolerance)?;
    Ok(monotonicity_from(&g, constraint, tolerance))
}

/// [`monotonicity_report`] from an already computed geometric report.
pub fn monotonicity_from<T: Real>(g: &GeometricMaslovReport<T>, constraint: &TotallyRealConstraint<T>, tolerance: T) -> MonotonicityReport<T> {
    let mut lines = Vec::new();
    if let Some(v) = g.monotonicity_line {
        lines.push(ResidualLine { name: "kahler_einstein".into(), value: v, tolerance });
    }
    if let Some(c) = constraint.soliton_constant() {
        let v = g.mu_geometric + T::lit(2.0) * c / T::lit(PI) * g.alpha_l;
        lines.push(ResidualLine { name: "soliton".into(), value: v, tolerance });
    }
    let (rho_area, rho_ratio) = if constraint.is_rho_lagrangian() {
        let ratio = if g.rho_area.abs() > tolerance { Some(g.mu_geometric / g.rho_area) } else { None };
        (Some(g.rho_area), ratio)
    } else {
        (None, None)
    };
    MonotonicityReport { mu: g.mu_geometric, alpha_l: g.alpha_l, rho_area, rho_ratio, boundary_h_term: g.boundary_h_term, lines }
}
