use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use approx::assert_abs_diff_eq;
use maslov_core::bundlepair::builtins::{constant_pair, disk_example, disk_example_sampled, linear_trace_pair, monopole, winding_pair};
use maslov_core::bundlepair::random::{connection_perturbed, metric_perturbed, random_frame_change, random_pair, rng, PolynomialConnection, RandomPairOptions};
use maslov_core::bundlepair::{
    boundary_theta, curvature_trace, maslov_chern_weil, maslov_report, maslov_topological, trace_wedge_residual, BundlePair, ConnectionField, MetricField, Route,
    TotallyRealBoundaryData,
};
use maslov_core::domain::{build_surface, QuadratureRule, SurfaceKind};
use maslov_core::numerics::{CMatrix, Frame};
use maslov_core::{BundlePair64, MaslovError};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn rule() -> QuadratureRule<f64> {
    QuadratureRule::default()
}

fn cw(pair: &BundlePair64) -> f64 {
    maslov_chern_weil(pair, &rule()).unwrap().mu
}

fn top(pair: &BundlePair64) -> i64 {
    maslov_topological(pair).unwrap().mu
}

fn small_opts(level: usize) -> RandomPairOptions {
    RandomPairOptions { level, boundary_samples: 192, ..Default::default() }
}

#[test]
fn disk_example_theta_is_i_per_unit_angle() {
    let pair = disk_example_sampled::<f64>(3, 256).unwrap();
    for s in boundary_theta(&pair, 0, &rule()).unwrap() {
        let speed = (s.node.velocity[0].powi(2) + s.node.velocity[1].powi(2)).sqrt();
        assert_eq!(s.value.re, 0.0);
        assert_abs_diff_eq!(s.value.im / speed, 1.0, epsilon = 1e-7);
    }
}

#[test]
fn disk_example_is_two_on_both_routes() {
    let pair = disk_example_sampled::<f64>(4, 256).unwrap();
    let r = maslov_chern_weil(&pair, &rule()).unwrap();
    assert!((r.mu - 2.0).abs() < 1e-6, "{}", r.mu);
    assert!(r.imaginary_part.abs() < 1e-12);
    assert_eq!(top(&pair), 2);
    let rep = maslov_report(&pair, &rule(), 1e-6).unwrap();
    assert_eq!(rep.mu_rounded, 2);
    assert!(rep.consistent);
    assert_abs_diff_eq!(rep.component("int_theta").unwrap(), TAU, epsilon = 1e-6);
    assert_eq!(rep.mu(Route::Topological), Some(2.0));
}

#[test]
fn conjugate_and_determinant_of_disk_example() {
    let pair = disk_example::<f64>(3).unwrap();
    let c = pair.conjugate_pair();
    assert_eq!(top(&c), -2);
    assert!((cw(&c) + 2.0).abs() < 1e-5);
    let d = pair.det_pair();
    assert_eq!(top(&d), 2);
    assert!((cw(&d) - cw(&pair)).abs() < 1e-12);
}

#[test]
fn constant_frames_give_zero() {
    for kind in [SurfaceKind::Disk, SurfaceKind::annulus()] {
        for rank in 1..=3 {
            let p = constant_pair::<f64>(kind, 3, rank).unwrap();
            assert_eq!(top(&p), 0);
            assert_eq!(cw(&p), 0.0);
            for s in boundary_theta(&p, 0, &rule()).unwrap() {
                assert_eq!(s.value, C64::new(0.0, 0.0));
            }
        }
    }
}

#[test]
fn rank_one_windings() {
    for m in -2..=3i64 {
        let p = winding_pair::<f64>(SurfaceKind::Disk, 3, 1, m).unwrap().with_boundary_samples(512);
        assert_eq!(top(&p), 2 * m);
        assert!((cw(&p) - 2.0 * m as f64).abs() < 1e-5, "m={m}: {}", cw(&p));
        // θ = i m dψ
        for s in boundary_theta(&p, 0, &rule()).unwrap() {
            assert_abs_diff_eq!(s.value.im / TAU, m as f64, epsilon = 1e-6);
        }
    }
}

#[test]
fn rank_k_windings() {
    for k in 1..=3usize {
        for m in [-1i64, 2] {
            let p = winding_pair::<f64>(SurfaceKind::Disk, 2, k, m).unwrap();
            assert_eq!(top(&p), 2 * m * k as i64);
        }
    }
    // on the annulus both boundary circles carry e^{i m t}; they have
    // opposite orientations, so the contributions cancel
    let p = winding_pair::<f64>(SurfaceKind::annulus(), 2, 1, 2).unwrap();
    let t = maslov_topological(&p).unwrap();
    assert_eq!(t.loop_windings.len(), 2);
    assert_eq!(t.mu, t.loop_windings.iter().sum::<i64>());
}

#[test]
fn curvature_trace_examples() {
    let origin = [0.1, -0.2, 0.0];
    assert_eq!(curvature_trace(&constant_pair::<f64>(SurfaceKind::Disk, 2, 2).unwrap(), &origin).unwrap(), C64::new(0.0, 0.0));
    for k in 1..=3 {
        let p = linear_trace_pair::<f64>(2, k).unwrap();
        let v = curvature_trace(&p, &origin).unwrap();
        assert_abs_diff_eq!(v.re, k as f64, epsilon = 1e-9);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
    }
}

#[test]
fn curvature_trace_matches_symbolic_oracle() {
    for seed in 0..10 {
        let mut g = rng(seed);
        let conn = PolynomialConnection::<f64>::random_unitary(&mut g, 1 + (seed as usize % 3), 3, 0.8);
        let surface = Arc::new(build_surface::<f64>(SurfaceKind::Disk, 2).unwrap());
        let k = conn.rank;
        let pair = BundlePair::new(surface, conn.field(true), MetricField::identity(k), TotallyRealBoundaryData::new().with_loop(move |_| Frame::from_columns(&CMatrix::identity(k)).unwrap())).unwrap();
        for p in pair.surface().probe_points(12) {
            let got = curvature_trace(&pair, &p).unwrap();
            let want = conn.exact_curvature_trace(&p);
            assert!((got - want).norm() <= 1e-6 * want.norm().max(1e-3), "seed {seed} at {p:?}: {got} vs {want}");
            assert!(trace_wedge_residual(&pair, &p) < 1e-10);
        }
    }
}

#[test]
fn non_unitary_connection_has_no_theta() {
    let p = linear_trace_pair::<f64>(2, 1).unwrap();
    assert!(matches!(boundary_theta(&p, 0, &rule()), Err(MaslovError::NotUnitary { .. })));
    assert!(matches!(maslov_chern_weil(&p, &rule()), Err(MaslovError::NotUnitary { .. })));
    // the winding route does not care
    assert_eq!(top(&p), 0);
}

#[test]
fn mislabelled_unitary_connection_is_caught() {
    let surface = Arc::new(build_surface::<f64>(SurfaceKind::Disk, 2).unwrap());
    let conn = ConnectionField::unitary(1, |p| [CMatrix::zeros(1, 1), CMatrix::identity(1).scale_real(p[0]), CMatrix::zeros(1, 1)]);
    let r = BundlePair::new(surface, conn, MetricField::identity(1), TotallyRealBoundaryData::new().with_loop(|_| Frame::from_columns(&CMatrix::identity(1)).unwrap()));
    assert!(matches!(r, Err(MaslovError::NotUnitary { .. })));
}

#[test]
fn construction_errors() {
    let surface = Arc::new(build_surface::<f64>(SurfaceKind::Disk, 2).unwrap());
    let wrong_dim = TotallyRealBoundaryData::new().with_loop(|_| Frame::from_columns(&CMatrix::identity(2)).unwrap());
    assert!(matches!(BundlePair::new(surface.clone(), ConnectionField::flat(1), MetricField::identity(1), wrong_dim), Err(MaslovError::DimensionMismatch { .. })));
    let missing = TotallyRealBoundaryData::new();
    assert!(BundlePair::new(surface.clone(), ConnectionField::flat(1), MetricField::identity(1), missing).is_err());
    // a line that ends a quarter turn away from where it started
    let open = TotallyRealBoundaryData::new().with_loop(|t: f64| Frame::new(vec![vec![C64::from_polar(1.0, 0.5 * PI * t)]]).unwrap());
    assert!(matches!(BundlePair::new(surface.clone(), ConnectionField::flat(1), MetricField::identity(1), open), Err(MaslovError::UnsupportedInput(_))));
    // a real line that turns half way, closing up with reversed orientation
    let mobius = TotallyRealBoundaryData::new().with_loop(|t: f64| Frame::new(vec![vec![C64::from_polar(1.0, PI * t), C64::new(0.0, 0.0)], vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]]).unwrap());
    assert!(BundlePair::new(surface, ConnectionField::flat(2), MetricField::identity(2), mobius).is_err());
}

#[test]
fn coarse_sampling_needs_refinement() {
    let p = winding_pair::<f64>(SurfaceKind::Disk, 1, 1, 5).unwrap().with_boundary_samples(8);
    assert!(matches!(maslov_topological(&p), Err(MaslovError::NeedRefinement { .. })));
}

#[test]
fn monopoles_give_twice_the_degree() {
    for d in [-1i64, 1, 2] {
        let p = monopole::<f64>(3, d).unwrap();
        let r = maslov_chern_weil(&p, &rule()).unwrap();
        assert_eq!(top(&p), 2 * d);
        assert!((r.mu - 2.0 * d as f64).abs() < 1e-3, "d={d}: {}", r.mu);
        assert_abs_diff_eq!(r.int_curvature.im, -TAU * d as f64, epsilon = 1e-2);
    }
}

#[test]
fn determinant_pair_keeps_the_index() {
    let mut seen = 0;
    let mut seed = 0;
    while seen < 10 {
        seed += 1;
        let opts = RandomPairOptions { max_rank: 2, boundary_samples: 512, ..small_opts(2) };
        let r = random_pair::<f64>(seed, opts).unwrap();
        if r.pair.rank() != 2 {
            continue;
        }
        seen += 1;
        let d = r.pair.det_pair();
        assert_eq!(top(&d), top(&r.pair), "seed {seed}");
        let (a, b) = (cw(&d), cw(&r.pair));
        assert!((a - b).abs() < 1e-4, "seed {seed}: {a} vs {b}");
    }
}

#[test]
fn random_pairs_are_reproducible() {
    let a = random_pair::<f64>(7, small_opts(2)).unwrap();
    let b = random_pair::<f64>(7, small_opts(2)).unwrap();
    assert_eq!(a.loops, b.loops);
    assert_eq!(cw(&a.pair), cw(&b.pair));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_pairs_agree_with_the_oracle(seed in 0u64..10_000) {
        let r = random_pair::<f64>(seed, small_opts(3)).unwrap();
        let t = top(&r.pair);
        prop_assert_eq!(t, r.expected_mu());
        let mu = cw(&r.pair);
        prop_assert!((mu - t as f64).abs() < 1e-3, "seed {}: {} vs {}", seed, mu, t);
    }

    #[test]
    fn index_is_independent_of_connection_metric_and_frame_orientation(seed in 0u64..10_000) {
        let r = random_pair::<f64>(seed, small_opts(3)).unwrap();
        let base = cw(&r.pair);
        let mut g = rng(seed ^ 0x5eed);
        let moved = connection_perturbed(&r.pair, &mut g, 2, 0.5).unwrap();
        prop_assert!((cw(&moved) - base).abs() < 1e-3);
        let p_of = random_frame_change::<f64>(&mut g, r.pair.rank(), 0.3);
        let remetric = metric_perturbed(&r.pair, p_of).unwrap();
        prop_assert!((cw(&remetric) - base).abs() < 1e-3);
        let flipped = r.pair.frame_orientation_flipped();
        prop_assert!((cw(&flipped) - base).abs() < 1e-3);
        prop_assert_eq!(top(&flipped), top(&r.pair));
    }

    #[test]
    fn reversal_and_conjugation_negate(seed in 0u64..10_000) {
        let r = random_pair::<f64>(seed, small_opts(2)).unwrap();
        let t = top(&r.pair);
        for other in [r.pair.reversed(), r.pair.conjugate_pair()] {
            prop_assert_eq!(top(&other), -t);
            prop_assert_eq!(cw(&other).round() as i64, -t);
        }
    }
}
