use approx::assert_abs_diff_eq;
use maslov_core::numerics::{gram_matrix, theta_of_velocity, wedge_norm_sq, wedge_pair_derivative, winding_number, CMatrix, Frame, HermitianForm, PhaseTrack};
use maslov_core::MaslovError;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use std::f64::consts::TAU;

fn cplx() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b))
}

fn cvec(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(cplx(), n)
}

/// Frame of k vectors in C^n, diagonally loaded so it stays independent.
fn frame(n: usize, k: usize) -> impl Strategy<Value = Frame<f64>> {
    prop::collection::vec(cvec(n), k).prop_map(move |mut vs| {
        for (i, v) in vs.iter_mut().enumerate() {
            v[i] += C64::new(2.5, 0.0);
        }
        Frame::new(vs).unwrap()
    })
}

/// `B^H B + I`.
fn metric(n: usize) -> impl Strategy<Value = HermitianForm<f64>> {
    prop::collection::vec(cplx(), n * n).prop_map(move |b| {
        let b = CMatrix::from_fn(n, n, |i, j| b[i * n + j]);
        let m = CMatrix::from_fn(n, n, |i, j| (0..n).map(|r| b[(r, i)].conj() * b[(r, j)]).sum::<C64>() + if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        HermitianForm::new(m).unwrap()
    })
}

fn brute_h(h: &HermitianForm<f64>, u: &[C64], v: &[C64]) -> C64 {
    let m = h.matrix();
    let mut s = C64::new(0.0, 0.0);
    for a in 0..u.len() {
        for b in 0..v.len() {
            s += u[a] * m[(a, b)] * v[b].conj();
        }
    }
    s
}

/// Plücker coordinates of `u ^ v`.
fn plucker(u: &[C64], v: &[C64]) -> Vec<((usize, usize), C64)> {
    let n = u.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            out.push(((a, b), u[a] * v[b] - u[b] * v[a]));
        }
    }
    out
}

/// Induced inner product on `Λ^2` in Plücker coordinates.
fn lambda2(h: &HermitianForm<f64>, p: &[((usize, usize), C64)], q: &[((usize, usize), C64)]) -> C64 {
    let m = h.matrix();
    let mut s = C64::new(0.0, 0.0);
    for &((a, b), x) in p {
        for &((c, d), y) in q {
            s += x * y.conj() * (m[(a, c)] * m[(b, d)] - m[(a, d)] * m[(b, c)]);
        }
    }
    s
}

#[test]
fn gram_of_standard_and_scaled_frames() {
    let id = HermitianForm::<f64>::identity(3);
    let e = |i: usize| (0..3).map(|j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect::<Vec<_>>();
    let g = gram_matrix(&Frame::new(vec![e(0), e(1)]).unwrap(), &id).unwrap();
    assert_eq!(g.max_abs_diff(&CMatrix::identity(2)), 0.0);
    let g = gram_matrix(&Frame::new(vec![e(0).iter().map(|z| z * 2.0).collect()]).unwrap(), &id).unwrap();
    assert_abs_diff_eq!(g[(0, 0)].re, 4.0);
    assert_abs_diff_eq!(wedge_norm_sq(&Frame::new(vec![e(0), e(1), e(2)]).unwrap(), &id).unwrap(), 1.0);
}

#[test]
fn repeated_vector_is_degenerate() {
    let v = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let err = wedge_norm_sq(&Frame::new(vec![v.clone(), v]).unwrap(), &HermitianForm::identity(2)).unwrap_err();
    assert!(matches!(err, MaslovError::DegenerateFrame { .. }));
}

#[test]
fn dimension_mismatch() {
    let f = Frame::new(vec![vec![C64::new(1.0, 0.0); 3]]).unwrap();
    assert!(matches!(gram_matrix(&f, &HermitianForm::identity(2)), Err(MaslovError::DimensionMismatch { .. })));
}

#[test]
fn unit_circle_pairing_is_i() {
    let id = HermitianForm::<f64>::identity(1);
    for k in 0..16 {
        let psi = TAU * k as f64 / 16.0;
        let s = C64::from_polar(1.0, psi);
        let f = Frame::new(vec![vec![s]]).unwrap();
        let d = vec![vec![C64::i() * s]];
        let w = wedge_pair_derivative(&f, &d, &id).unwrap();
        assert_abs_diff_eq!(w.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.im, 1.0, epsilon = 1e-15);
        let th = theta_of_velocity(&f, &d, &id).unwrap();
        assert_eq!(th.re, 0.0);
        assert_abs_diff_eq!(th.im, 1.0, epsilon = 1e-15);
        assert_eq!(theta_of_velocity(&f, &[vec![C64::new(0.0, 0.0)]], &id).unwrap(), C64::new(0.0, 0.0));
    }
}

#[test]
fn theta_ignores_positive_rescaling() {
    // s = f(t) e^{it}, f = 2 + sin t: ds/dt = f' e^{it} + i f e^{it}
    let id = HermitianForm::<f64>::identity(1);
    let t = 0.7f64;
    let f = 2.0 + t.sin();
    let e = C64::from_polar(1.0, t);
    let fr = Frame::new(vec![vec![e * f]]).unwrap();
    let d = vec![vec![e * t.cos() + C64::i() * e * f]];
    assert_abs_diff_eq!(theta_of_velocity(&fr, &d, &id).unwrap().im, 1.0, epsilon = 1e-14);
}

#[test]
fn winding_examples() {
    let n = 64;
    let psi = |j: usize| TAU * j as f64 / n as f64;
    let w = |s: Vec<C64>| winding_number(&PhaseTrack::new(s).unwrap());
    assert_eq!(w(vec![C64::new(0.3, 0.2); n]), 0);
    assert_eq!(w((0..n).map(|j| C64::from_polar(1.0, psi(j))).collect()), 1);
    assert_eq!(w((0..n).map(|j| C64::from_polar(1.0 + 0.2 * psi(j).cos(), 3.0 * psi(j))).collect()), 3);
}

#[test]
fn phase_track_errors() {
    let coarse: Vec<C64> = (0..4).map(|j| C64::from_polar(1.0, 2.0 * TAU * j as f64 / 4.0)).collect();
    assert!(matches!(PhaseTrack::new(coarse), Err(MaslovError::NeedRefinement { .. })));
    let mut s: Vec<C64> = (0..32).map(|j| C64::from_polar(1.0, TAU * j as f64 / 32.0)).collect();
    s[5] = C64::new(0.0, 0.0);
    assert!(matches!(PhaseTrack::new(s), Err(MaslovError::ZeroSample { index: 5 })));
}

#[test]
fn single_precision_frames() {
    let f = Frame::<f32>::new(vec![vec![num_complex::Complex32::new(2.0, 0.0)]]).unwrap();
    assert_eq!(wedge_norm_sq(&f, &HermitianForm::identity(1)).unwrap(), 4.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gram_matches_double_loop(f in frame(3, 3), h in metric(3)) {
        let g = gram_matrix(&f, &h).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let b = brute_h(&h, &f.vectors()[i], &f.vectors()[j]);
                prop_assert!((g[(i, j)] - b).norm() < 1e-14 * (1.0 + b.norm()));
            }
        }
        prop_assert!(g.hermitian_residual() < 1e-12);
        let det = g.det().re;
        prop_assert!((wedge_norm_sq(&f, &h).unwrap() - det).abs() < 1e-12 * det.abs());
    }

    #[test]
    fn wedge_derivative_matches_plucker(f in frame(3, 2), d in prop::collection::vec(cvec(3), 2), h in metric(3)) {
        let v = f.vectors();
        let w = plucker(&v[0], &v[1]);
        let mut dw = plucker(&d[0], &v[1]);
        for (x, y) in dw.iter_mut().zip(plucker(&v[0], &d[1])) {
            x.1 += y.1;
        }
        let oracle = lambda2(&h, &dw, &w);
        let got = wedge_pair_derivative(&f, &d, &h).unwrap();
        prop_assert!((got - oracle).norm() < 1e-10 * (1.0 + oracle.norm()), "{got} vs {oracle}");
        let norm = lambda2(&h, &w, &w).re;
        prop_assert!((wedge_norm_sq(&f, &h).unwrap() - norm).abs() < 1e-10 * norm);
    }

    #[test]
    fn wedge_norm_invariant_under_unimodular_real_change(f in frame(2, 2), h in metric(2), a in -2.0f64..2.0, b in -2.0f64..2.0, flip in any::<bool>()) {
        // M = [[1, a], [b, 1 + a b]] has det 1; a row swap makes it -1
        let m = [[1.0, a], [b, 1.0 + a * b]];
        let v = f.vectors();
        let mut new: Vec<Vec<C64>> = (0..2).map(|j| (0..2).map(|r| v[0][r] * m[0][j] + v[1][r] * m[1][j]).collect()).collect();
        if flip {
            new.swap(0, 1);
        }
        let g = Frame::new(new).unwrap();
        let (x, y) = (wedge_norm_sq(&f, &h).unwrap(), wedge_norm_sq(&g, &h).unwrap());
        prop_assert!((x - y).abs() < 1e-10 * x);
    }

    #[test]
    fn theta_is_imaginary_and_orientation_free(f in frame(2, 2), d in prop::collection::vec(cvec(2), 2), h in metric(2)) {
        let t = theta_of_velocity(&f, &d, &h).unwrap();
        prop_assert_eq!(t.re, 0.0);
        let t2 = theta_of_velocity(&f.flipped(), &d, &h).unwrap();
        prop_assert!((t - t2).norm() < 1e-14);
    }

    #[test]
    fn winding_is_additive_odd_and_scale_free(m in -4i64..=4, k in -4i64..=4, amp in 0.0f64..0.9) {
        let n = 96;
        let s = |w: i64| (0..n).map(|j| C64::from_polar(1.0, w as f64 * TAU * j as f64 / n as f64)).collect::<Vec<_>>();
        let wn = |v: Vec<C64>| winding_number(&PhaseTrack::new(v).unwrap());
        let (a, b) = (s(m), s(k));
        prop_assert_eq!(wn(a.iter().zip(&b).map(|(x, y)| x * y).collect()), m + k);
        prop_assert_eq!(wn(a.iter().map(|x| x.conj()).collect()), -m);
        let g: Vec<C64> = a.iter().enumerate().map(|(j, x)| x * (1.0 + amp * (TAU * j as f64 / n as f64).sin())).collect();
        prop_assert_eq!(wn(g), m);
    }
}
