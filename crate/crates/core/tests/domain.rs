use approx::assert_abs_diff_eq;
use maslov_core::domain::{build_surface, euler_characteristic, integrate_1form, integrate_2form, QuadratureRule, RefSurface, SurfaceKind};
use maslov_core::{MaslovError, Point};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_3, PI, TAU};

fn area(_: &Point<f64>, u: &Point<f64>, v: &Point<f64>) -> f64 {
    u[0] * v[1] - u[1] * v[0]
}

/// Least-squares slope of `log err` against `log h`, `h = 2^-level`.
fn fitted_order(levels: &[usize], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = levels.iter().map(|&l| -(l as f64) * 2f64.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Random trigonometric 1-form `Σ_j c_j sin(k_j · p + φ_j) dx_j` on R^3;
/// its exterior derivative is written out by hand.
struct TrigForm {
    c: [f64; 3],
    k: [[f64; 3]; 3],
    phi: [f64; 3],
}

impl TrigForm {
    fn random(seed: u64) -> Self {
        let mut g = ChaCha8Rng::seed_from_u64(seed);
        let mut f = Self { c: [0.0; 3], k: [[0.0; 3]; 3], phi: [0.0; 3] };
        for j in 0..3 {
            f.c[j] = g.gen_range(-1.0..1.0);
            f.phi[j] = g.gen_range(0.0..TAU);
            for i in 0..3 {
                f.k[j][i] = g.gen_range(-2.0..2.0);
            }
        }
        f
    }

    fn arg(&self, j: usize, p: &Point<f64>) -> f64 {
        self.k[j][0] * p[0] + self.k[j][1] * p[1] + self.k[j][2] * p[2] + self.phi[j]
    }

    fn eval(&self, p: &Point<f64>, v: &Point<f64>) -> f64 {
        (0..3).map(|j| self.c[j] * self.arg(j, p).sin() * v[j]).sum()
    }

    fn d(&self, p: &Point<f64>, u: &Point<f64>, v: &Point<f64>) -> f64 {
        let mut s = 0.0;
        for j in 0..3 {
            let g = self.c[j] * self.arg(j, p).cos();
            for i in 0..3 {
                s += g * self.k[j][i] * (u[i] * v[j] - u[j] * v[i]);
            }
        }
        s
    }
}

fn stokes_residual(surface: &RefSurface<f64>, form: &TrigForm) -> f64 {
    let rule = QuadratureRule::default();
    let interior = integrate_2form(surface, |p, u, v| form.d(p, u, v), &rule).unwrap();
    let boundary: f64 = surface.boundary_loops().iter().map(|lp| integrate_1form(lp, |p, v| form.eval(p, v), &rule).unwrap()).sum();
    (interior - boundary).abs()
}

#[test]
fn build_examples() {
    let d = build_surface::<f64>(SurfaceKind::Disk, 0).unwrap();
    assert_eq!((euler_characteristic(&d), d.boundary_loops().len()), (1, 1));
    let a = build_surface::<f64>(SurfaceKind::annulus(), 2).unwrap();
    assert_eq!((euler_characteristic(&a), a.boundary_loops().len()), (0, 2));
    let s = build_surface::<f64>(SurfaceKind::ClosedSphere, 3).unwrap();
    assert_eq!((euler_characteristic(&s), s.boundary_loops().len()), (2, 0));
    let c = build_surface::<f64>(SurfaceKind::SphericalCap { colatitude: FRAC_PI_3 }, 2).unwrap();
    assert_eq!(euler_characteristic(&c), 1);
    for s in [&d, &a, &s, &c] {
        s.validate().unwrap();
    }
}

#[test]
fn annulus_loops_are_opposite() {
    let a = build_surface::<f64>(SurfaceKind::annulus(), 2).unwrap();
    let rule = QuadratureRule::default();
    let dpsi = |p: &Point<f64>, v: &Point<f64>| (p[0] * v[1] - p[1] * v[0]) / (p[0] * p[0] + p[1] * p[1]);
    let w: Vec<f64> = a.boundary_loops().iter().map(|lp| integrate_1form(lp, dpsi, &rule).unwrap()).collect();
    assert_abs_diff_eq!(w[0] + w[1], 0.0, epsilon = 1e-9);
    assert_abs_diff_eq!(w[0].abs(), TAU, epsilon = 1e-9);
}

#[test]
fn refinement_range() {
    assert!(matches!(build_surface::<f64>(SurfaceKind::Disk, 9), Err(MaslovError::InvalidRefinement { level: 9, .. })));
    assert!(matches!(build_surface::<f64>(SurfaceKind::Custom, 2), Err(MaslovError::UnsupportedKind(_))));
}

#[test]
fn vertex_count_grows_about_fourfold() {
    let v: Vec<usize> = (2..5).map(|l| build_surface::<f64>(SurfaceKind::ClosedSphere, l).unwrap().vertices().len()).collect();
    for w in v.windows(2) {
        let r = w[1] as f64 / w[0] as f64;
        assert!((3.5..4.5).contains(&r), "{r}");
    }
}

#[test]
fn disk_area_and_zero_field() {
    let rule = QuadratureRule::default();
    let d = build_surface::<f64>(SurfaceKind::Disk, 4).unwrap();
    assert!((integrate_2form(&d, area, &rule).unwrap() - PI).abs() < 1e-3);
    assert_eq!(integrate_2form(&d, |_, _, _| 0.0, &rule).unwrap(), 0.0);
    assert_eq!(integrate_1form(&d.boundary_loops()[0], |_, _| 0.0, &rule).unwrap(), 0.0);
}

#[test]
fn trace_of_linear_connection() {
    // A = x dy Id_k: d(tr A) = k dx^dy, ∮ tr A = k ∮ x dy = k π
    let rule = QuadratureRule::default();
    let d = build_surface::<f64>(SurfaceKind::Disk, 4).unwrap();
    for k in 1..=3 {
        let kf = k as f64;
        let interior = integrate_2form(&d, |p, u, v| kf * area(p, u, v), &rule).unwrap();
        let boundary = integrate_1form(&d.boundary_loops()[0], |p, v| kf * p[0] * v[1], &rule).unwrap();
        assert!((interior - kf * PI).abs() < 1e-3);
        assert!((boundary - kf * PI).abs() < 1e-3);
        assert!((interior - boundary).abs() < 1e-3);
    }
}

#[test]
fn angle_form_on_64_segments() {
    let d = build_surface::<f64>(SurfaceKind::Disk, 3).unwrap().with_boundary_samples(64);
    let v = integrate_1form(&d.boundary_loops()[0], |p, v| (p[0] * v[1] - p[1] * v[0]) / (p[0] * p[0] + p[1] * p[1]), &QuadratureRule::default()).unwrap();
    assert!((v - TAU).abs() < 1e-6);
}

#[test]
fn exact_geometry_gives_exact_areas() {
    let rule = QuadratureRule::default();
    let d = build_surface::<f64>(SurfaceKind::Disk, 2).unwrap();
    assert_abs_diff_eq!(integrate_2form(&d, area, &rule).unwrap(), PI, epsilon = 1e-12);
}

#[test]
fn smooth_fields_converge_at_second_order() {
    // Richardson: successive differences of a non-polynomial integrand
    let rule = QuadratureRule::default();
    let levels = [2, 3, 4, 5];
    let field = |p: &Point<f64>, u: &Point<f64>, v: &Point<f64>| (2.0 * p[0]).exp() * (3.0 * p[1]).cos() * area(p, u, v);
    for kind in [SurfaceKind::Disk, SurfaceKind::annulus()] {
        let vals: Vec<f64> = (2..=6).map(|l| integrate_2form(&build_surface::<f64>(kind, l).unwrap(), field, &rule).unwrap()).collect();
        let diffs: Vec<f64> = vals.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        let order = fitted_order(&levels, &diffs);
        assert!(order >= 1.9, "{kind:?}: order {order}, {diffs:?}");
    }
}

#[test]
fn reversal_negates() {
    let rule = QuadratureRule::default();
    let d = build_surface::<f64>(SurfaceKind::Disk, 3).unwrap();
    let r = d.reversed();
    r.validate().unwrap();
    let (a, b) = (integrate_2form(&d, area, &rule).unwrap(), integrate_2form(&r, area, &rule).unwrap());
    assert_abs_diff_eq!(a, -b, epsilon = 1e-12);
    let f = |p: &Point<f64>, v: &Point<f64>| p[0] * v[1] - p[1] * v[0];
    let (x, y) = (integrate_1form(&d.boundary_loops()[0], f, &rule).unwrap(), integrate_1form(&r.boundary_loops()[0], f, &rule).unwrap());
    assert_abs_diff_eq!(x, -y, epsilon = 1e-12);
}

#[test]
fn stokes_on_every_kind_with_boundary() {
    let kinds = [SurfaceKind::Disk, SurfaceKind::annulus(), SurfaceKind::SphericalCap { colatitude: FRAC_PI_3 }];
    let levels = [2, 3, 4, 5];
    for kind in kinds {
        for seed in 0..5 {
            let form = TrigForm::random(seed);
            let errs: Vec<f64> = levels.iter().map(|&l| stokes_residual(&build_surface(kind, l).unwrap(), &form)).collect();
            assert!(errs[2] < 1e-3, "{kind:?} seed {seed}: {errs:?}");
            let order = fitted_order(&levels, &errs);
            assert!(order >= 1.9, "{kind:?} seed {seed}: order {order}, {errs:?}");
        }
    }
}

#[test]
fn antisymmetry_is_enforced() {
    let d = build_surface::<f64>(SurfaceKind::Disk, 2).unwrap();
    let r = integrate_2form(&d, |_, u, v| u[0] * v[0], &QuadratureRule::default());
    assert!(matches!(r, Err(MaslovError::NotAntisymmetric { .. })));
    let r = integrate_2form(&d, |_, _, _| f64::NAN, &QuadratureRule::default());
    assert!(r.is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn euler_characteristic_is_stable_under_refinement(level in 0usize..5) {
        for (kind, chi) in [(SurfaceKind::Disk, 1), (SurfaceKind::annulus(), 0), (SurfaceKind::ClosedSphere, 2)] {
            let s = build_surface::<f64>(kind, level).unwrap();
            prop_assert_eq!(euler_characteristic(&s), chi);
        }
    }

    #[test]
    fn constant_forms_integrate_to_area_multiples(c in -3.0f64..3.0) {
        let rule = QuadratureRule::default();
        let d = build_surface::<f64>(SurfaceKind::Disk, 2).unwrap();
        let one = integrate_2form(&d, area, &rule).unwrap();
        let scaled = integrate_2form(&d, |p, u, v| c * area(p, u, v), &rule).unwrap();
        prop_assert!((scaled - c * one).abs() < 1e-12);
    }
}
