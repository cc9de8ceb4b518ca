//! Running scenarios: one row per route and refinement level.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use maslov_core::ambient::scenarios::{cp1_closed, flat_disk, hemisphere, perturbed_cap, perturbed_torus_disk, real_plane_disk, sphere_cap, torus_disk_twisted};
use maslov_core::ambient::{geodesic_curvature_term, integrate_ricci, integrate_xi, lagrangian_boundary_term, monotonicity_report, symplectic_area, GeometricScenario, ModelKind};
use maslov_core::bundlepair::builtins::{constant_pair, disk_example_sampled, monopole, winding_pair};
use maslov_core::bundlepair::random::{random_pair, RandomPairOptions};
use maslov_core::bundlepair::{maslov_chern_weil, maslov_topological, BundlePair};
use maslov_core::domain::{default_boundary_samples, euler_characteristic, QuadratureRule, SurfaceKind};
use maslov_core::MaslovError;
use serde::{Deserialize, Serialize};

use crate::scenario::{validate_levels, validate_routes, GeometrySpec, PairSpec, Scenario, ScenarioKind, SurfaceName, DEFAULT_SEED};
use crate::CliError;

/// Tolerance of `∮ ω(H, ·) = ∮ ξ_J`; independent of the index tolerance.
pub const LAGRANGIAN_CHECK_TOL: f64 = 1e-4;

/// One CSV line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub scenario: String,
    pub route: String,
    pub refinement: usize,
    pub mu_raw: f64,
    pub mu_rounded: i64,
    pub residual: f64,
    /// cw: `Im ∫ tr R`; geom: `∫ ρ`.
    pub int_curvature: Option<f64>,
    /// cw: `Im ∮ θ`; geom: `∮ ξ_J`; top: winding of the squared determinant.
    pub int_boundary: Option<f64>,
    #[serde(rename = "alpha_L")]
    pub alpha_l: Option<f64>,
    pub wall_ms: f64,
}

impl ReportRow {
    fn new(scenario: &str, route: &str, refinement: usize, mu_raw: f64, wall_ms: f64) -> Self {
        let mu_rounded = mu_raw.round() as i64;
        Self {
            scenario: scenario.to_string(),
            route: route.to_string(),
            refinement,
            mu_raw,
            mu_rounded,
            residual: (mu_raw - mu_rounded as f64).abs(),
            int_curvature: None,
            int_boundary: None,
            alpha_l: None,
            wall_ms,
        }
    }
}

/// Scenario-specific identity evaluated next to the index.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub scenario: String,
    pub refinement: usize,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
}

impl CheckLine {
    pub fn holds(&self) -> bool {
        self.value.abs() < self.tolerance
    }
}

/// Command-line overrides of scenario fields.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub routes: Option<Vec<String>>,
    pub levels: Option<Vec<usize>>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub rows: Vec<ReportRow>,
    pub checks: Vec<CheckLine>,
    pub tolerance: f64,
}

impl RunOutcome {
    /// Scenario ids whose rows do not share one rounded value.
    pub fn inconsistent(&self) -> Vec<String> {
        let mut seen: BTreeMap<&str, i64> = BTreeMap::new();
        let mut bad = Vec::new();
        for r in &self.rows {
            match seen.get(r.scenario.as_str()) {
                Some(&m) if m != r.mu_rounded => {
                    if !bad.contains(&r.scenario) {
                        bad.push(r.scenario.clone());
                    }
                }
                Some(_) => {}
                None => {
                    seen.insert(&r.scenario, r.mu_rounded);
                }
            }
        }
        bad
    }

    pub fn failing_rows(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(move |r| !(r.residual < self.tolerance))
    }

    pub fn failing_checks(&self) -> impl Iterator<Item = &CheckLine> {
        self.checks.iter().filter(|c| !c.holds())
    }

    /// All residuals below tolerance, roundings agree and every check holds.
    pub fn ok(&self) -> bool {
        self.inconsistent().is_empty() && self.failing_rows().next().is_none() && self.failing_checks().next().is_none()
    }

    pub fn extend(&mut self, other: RunOutcome) {
        self.rows.extend(other.rows);
        self.checks.extend(other.checks);
        self.tolerance = self.tolerance.min(other.tolerance);
    }
}

/// Effective settings after overrides.
#[derive(Debug, Clone, PartialEq)]
struct Plan {
    routes: Vec<String>,
    levels: Vec<usize>,
    tolerance: f64,
    seed: u64,
}

fn plan(s: &Scenario, o: &Overrides) -> Result<Plan, CliError> {
    let routes = match &o.routes {
        // flag routes are narrowed to what the scenario supports
        Some(r) => {
            let r: Vec<String> = r.iter().filter(|x| s.available_routes().contains(&x.as_str())).cloned().collect();
            validate_routes(&r, s.available_routes())?;
            r
        }
        None => s.routes(),
    };
    let levels = o.levels.clone().unwrap_or_else(|| s.levels());
    validate_levels(&levels)?;
    let tolerance = o.tolerance.unwrap_or_else(|| s.tolerance());
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(CliError::Validation { field: "tolerance".into(), message: format!("{tolerance} outside (0, 1)") });
    }
    let seed = o.seed.or_else(|| scenario_seed(s)).unwrap_or(DEFAULT_SEED);
    Ok(Plan { routes, levels, tolerance, seed })
}

fn scenario_seed(s: &Scenario) -> Option<u64> {
    match (&s.pair, &s.geometry) {
        (Some(PairSpec::Random { seed, .. }), _) => *seed,
        (_, Some(GeometrySpec::PerturbedTorusDisk { seed, .. } | GeometrySpec::PerturbedCap { seed, .. })) => *seed,
        _ => None,
    }
}

fn surface_kind(s: SurfaceName) -> SurfaceKind<f64> {
    match s {
        SurfaceName::Disk => SurfaceKind::Disk,
        SurfaceName::Annulus => SurfaceKind::annulus(),
    }
}

fn samples(s: &Scenario, level: usize) -> usize {
    s.boundary_samples.unwrap_or_else(|| default_boundary_samples(level))
}

fn build_pair(s: &Scenario, spec: &PairSpec, level: usize, seed: u64) -> Result<BundlePair<f64>, MaslovError> {
    let n = samples(s, level);
    let pair = match *spec {
        PairSpec::DiskExample => disk_example_sampled(level, n)?,
        PairSpec::Winding { surface, rank, winding } => winding_pair(surface_kind(surface), level, rank, winding)?,
        PairSpec::Constant { surface, rank } => constant_pair(surface_kind(surface), level, rank)?,
        PairSpec::Monopole { degree } => monopole(level, degree)?,
        PairSpec::Random { max_rank, max_winding, .. } => {
            let opts = RandomPairOptions { max_rank, max_winding, level, boundary_samples: n, ..RandomPairOptions::default() };
            return Ok(random_pair(seed, opts)?.pair);
        }
    };
    Ok(if s.boundary_samples.is_some() { pair.with_boundary_samples(n) } else { pair })
}

fn build_geometry(s: &Scenario, spec: &GeometrySpec, level: usize, seed: u64) -> Result<GeometricScenario<f64>, MaslovError> {
    let g = match *spec {
        GeometrySpec::FlatDisk { radius } => flat_disk(radius, level)?,
        GeometrySpec::TorusDisk { r1, r2, twist } => torus_disk_twisted(r1, r2, twist, level)?,
        GeometrySpec::PerturbedTorusDisk { r1, r2, amplitude, .. } => perturbed_torus_disk(r1, r2, seed, amplitude, level)?,
        GeometrySpec::RealPlaneDisk => real_plane_disk(level)?,
        GeometrySpec::SphereCap { colatitude } => sphere_cap(colatitude, level)?,
        GeometrySpec::Hemisphere => hemisphere(level)?,
        GeometrySpec::PerturbedCap { colatitude, amplitude, .. } => perturbed_cap(colatitude, seed, amplitude, level)?,
        GeometrySpec::Cp1Closed => cp1_closed(level)?,
    };
    Ok(match s.boundary_samples {
        Some(n) => g.with_boundary_samples(n),
        None => g,
    })
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn wants(plan: &Plan, route: &str) -> bool {
    plan.routes.iter().any(|r| r == route)
}

fn pair_rows(id: &str, level: usize, pair: &BundlePair<f64>, plan: &Plan, rule: &QuadratureRule<f64>, rows: &mut Vec<ReportRow>) -> Result<(), MaslovError> {
    for route in &plan.routes {
        let t = Instant::now();
        match route.as_str() {
            "cw" => {
                let cw = maslov_chern_weil(pair, rule)?;
                let mut row = ReportRow::new(id, "cw", level, cw.mu, ms(t));
                row.int_curvature = Some(cw.int_curvature.im);
                row.int_boundary = Some(cw.total_theta().im);
                rows.push(row);
            }
            "top" => {
                let top = maslov_topological(pair)?;
                let mut row = ReportRow::new(id, "top", level, top.mu as f64, ms(t));
                // winding of det^2: loops already count it, the gluing map counts det
                row.int_boundary = Some((top.loop_windings.iter().sum::<i64>() + 2 * top.clutching_winding.unwrap_or(0)) as f64);
                rows.push(row);
            }
            _ => {}
        }
    }
    Ok(())
}

/// Rows and checks of one scenario instance at one level.
fn run_level(s: &Scenario, id: &str, level: usize, plan: &Plan, seed: u64) -> Result<RunOutcome, MaslovError> {
    let rule = QuadratureRule::default();
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let check = |name: &str, value: f64, tolerance: f64| CheckLine { scenario: id.to_string(), refinement: level, name: name.to_string(), value, tolerance };
    if let Some(spec) = &s.pair {
        let pair = build_pair(s, spec, level, seed)?;
        pair_rows(id, level, &pair, plan, &rule, &mut rows)?;
        return Ok(RunOutcome { rows, checks, tolerance: plan.tolerance });
    }
    let g = build_geometry(s, s.geometry.as_ref().expect("validated"), level, seed)?;
    let pair = g.pair()?;
    pair_rows(id, level, &pair, plan, &rule, &mut rows)?;

    let t = Instant::now();
    let alpha = symplectic_area(&g.model, &g.immersed, &rule)?;
    let rho = integrate_ricci(&g.model, &g.immersed, &rule)?;
    let loops = g.immersed.surface().boundary_loops().len();
    let mut xi = 0.0;
    for i in 0..loops {
        xi += integrate_xi(&pair, i, &rule)?;
    }
    let mu_geom = (rho - xi) / PI;
    if wants(plan, "geom") {
        let mut row = ReportRow::new(id, "geom", level, mu_geom, ms(t));
        row.int_curvature = Some(rho);
        row.int_boundary = Some(xi);
        row.alpha_l = Some(alpha);
        rows.push(row);
    }
    for r in rows.iter_mut() {
        r.alpha_l = Some(alpha);
    }

    let tol = plan.tolerance;
    if let Some(c) = &g.constraint {
        if c.is_lagrangian() && c.has_mean_curvature() {
            let mut h = 0.0;
            for i in 0..loops {
                h += lagrangian_boundary_term(&g.model, &g.immersed, c, i, &rule)?;
            }
            checks.push(check("lagrangian_boundary", h - xi, LAGRANGIAN_CHECK_TOL));
        }
        if g.model.kind() == ModelKind::FlatCn {
            checks.push(check("xi_quantized", xi / PI - (xi / PI).round(), tol));
        }
    }
    match s.kind {
        ScenarioKind::GaussBonnet => {
            // on a complex curve ρ restricts to K dA
            let mut k = 0.0;
            for i in 0..loops {
                k += geodesic_curvature_term(&g.model, &g.immersed, i, &rule)?;
            }
            checks.push(check("gauss_bonnet", (rho + k) / PI - mu_geom, tol));
            let chi = euler_characteristic(g.immersed.surface());
            checks.push(check("twice_euler", mu_geom.round() - 2.0 * chi as f64, 0.5));
        }
        ScenarioKind::Monotonicity => {
            let c = g.constraint.as_ref().expect("validated");
            let m = monotonicity_report(&g.model, &g.immersed, c, &rule, tol)?;
            for l in m.lines {
                checks.push(check(&l.name, l.value, l.tolerance));
            }
        }
        ScenarioKind::Closed => {
            checks.push(check("ricci_integral", rho / PI - mu_geom.round(), tol));
        }
        _ => {}
    }
    Ok(RunOutcome { rows, checks, tolerance: plan.tolerance })
}

/// Runs every seeded instance and level of `s`. Levels run on separate
/// threads; rows come back in (instance, level, route) order.
pub fn run(s: &Scenario, o: &Overrides) -> Result<RunOutcome, CliError> {
    let plan = plan(s, o)?;
    let mut out = RunOutcome { rows: Vec::new(), checks: Vec::new(), tolerance: plan.tolerance };
    for k in 0..s.count() {
        let seed = plan.seed.wrapping_add(k as u64);
        let id = if s.count() > 1 { format!("{}#{k}", s.id) } else { s.id.clone() };
        let results: Vec<Result<RunOutcome, MaslovError>> = std::thread::scope(|scope| {
            let handles: Vec<_> = plan.levels.iter().map(|&l| scope.spawn({
                let (plan, id) = (&plan, &id);
                move || run_level(s, id, l, plan, seed)
            })).collect();
            handles.into_iter().map(|h| h.join().expect("level worker panicked")).collect()
        });
        for (r, &level) in results.into_iter().zip(&plan.levels) {
            out.extend(r.map_err(|source| CliError::Numerical { scenario: format!("{id} (level {level})"), source })?);
        }
    }
    Ok(out)
}

/// Loads and runs a scenario file or `bundled:NAME`.
pub fn run_scenario(path: &Path, o: &Overrides) -> Result<RunOutcome, CliError> {
    let s = crate::scenario::resolve(&path.to_string_lossy())?;
    run(&s, o)
}
