//! Seeded random pairs, connections and metric perturbations.

use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::connection::{ConnectionField, MetricField};
use super::pair::{BundlePair, TotallyRealBoundaryData};
use crate::domain::{build_surface, SurfaceKind};
use crate::error::Result;
use crate::numerics::{CMatrix, Frame};
use crate::scalar::{Point, Real};

/// Seeded generator used for every randomized construction.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn lit<T: Real>(x: f64) -> T {
    T::lit(x)
}

fn random_complex<T: Real>(rng: &mut impl Rng, k: usize, scale: f64) -> CMatrix<T> {
    CMatrix::from_fn(k, k, |_, _| Complex::new(lit(rng.gen_range(-scale..scale)), lit(rng.gen_range(-scale..scale))))
}

/// Random matrix with `S^H = -S`.
pub fn random_skew_hermitian<T: Real>(rng: &mut impl Rng, k: usize, scale: f64) -> CMatrix<T> {
    let m = random_complex::<T>(rng, k, scale);
    CMatrix::from_fn(k, k, |i, j| (m[(i, j)] - m[(j, i)].conj()) * lit::<T>(0.5))
}

/// Random unitary matrix (Gram-Schmidt on a random complex matrix).
pub fn random_unitary<T: Real>(rng: &mut impl Rng, k: usize) -> CMatrix<T> {
    loop {
        let m = random_complex::<T>(rng, k, 1.0);
        let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(k);
        let mut ok = true;
        for j in 0..k {
            let mut v = m.column(j);
            for q in &cols {
                let dot = q.iter().zip(&v).fold(Complex::new(T::zero(), T::zero()), |a, (x, y)| a + x.conj() * y);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= dot * qi;
                }
            }
            let n = v.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt();
            if n < lit(1e-3) {
                ok = false;
                break;
            }
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
        if ok {
            return CMatrix::from_columns(&cols);
        }
    }
}

/// Polynomial 1-form `A = A_x dx + A_y dy` with matrix coefficients
/// `sum c x^i y^j`. Its trace curvature is available in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialConnection<T> {
    pub rank: usize,
    /// `(i, j, [C_x, C_y])` for the monomial `x^i y^j`.
    pub terms: Vec<(u32, u32, [CMatrix<T>; 2])>,
}

fn monomial<T: Real>(x: T, y: T, i: u32, j: u32) -> T {
    x.powi(i as i32) * y.powi(j as i32)
}

impl<T: Real> PolynomialConnection<T> {
    /// Every monomial of total degree at most `degree` with random
    /// skew-Hermitian coefficients of size `scale`.
    pub fn random_unitary(rng: &mut impl Rng, rank: usize, degree: u32, scale: f64) -> Self {
        let mut terms = Vec::new();
        for d in 0..=degree {
            for i in 0..=d {
                let s = scale / f64::from(d + 1);
                terms.push((i, d - i, [random_skew_hermitian(rng, rank, s), random_skew_hermitian(rng, rank, s)]));
            }
        }
        Self { rank, terms }
    }

    pub fn eval(&self, p: &Point<T>) -> [CMatrix<T>; 3] {
        let k = self.rank;
        let mut ax = CMatrix::zeros(k, k);
        let mut ay = CMatrix::zeros(k, k);
        for (i, j, [cx, cy]) in &self.terms {
            let m = monomial(p[0], p[1], *i, *j);
            ax = &ax + &cx.scale_real(m);
            ay = &ay + &cy.scale_real(m);
        }
        [ax, ay, CMatrix::zeros(k, k)]
    }

    /// `d_x tr A_y - d_y tr A_x`, differentiated term by term.
    pub fn exact_curvature_trace(&self, p: &Point<T>) -> Complex<T> {
        let mut out = Complex::new(T::zero(), T::zero());
        for (i, j, [cx, cy]) in &self.terms {
            if *i > 0 {
                out += cy.trace() * (T::from_u32(*i).unwrap() * monomial(p[0], p[1], i - 1, *j));
            }
            if *j > 0 {
                out -= cx.trace() * (T::from_u32(*j).unwrap() * monomial(p[0], p[1], *i, j - 1));
            }
        }
        out
    }

    pub fn field(&self, unitary: bool) -> ConnectionField<T> {
        let me = self.clone();
        if unitary {
            ConnectionField::unitary(self.rank, move |p| me.eval(p))
        } else {
            ConnectionField::general(self.rank, move |p| me.eval(p))
        }
    }
}

/// Boundary frame loop `F(t) = C V diag(e^{2 pi i m_j t}) V^H B(t)` with `C`
/// constant invertible, `V` unitary and `B(t)` real with positive
/// determinant. The squared determinant winds `2 sum m_j` times.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomFrameLoop<T> {
    pub windings: Vec<i64>,
    c: CMatrix<T>,
    v: CMatrix<T>,
    b: Vec<Vec<T>>,
    phase: T,
}

impl<T: Real> RandomFrameLoop<T> {
    pub fn random(rng: &mut impl Rng, rank: usize, max_winding: i64) -> Self {
        let windings = (0..rank).map(|_| rng.gen_range(-max_winding..=max_winding)).collect();
        let c = loop {
            let m = &CMatrix::identity(rank) + &random_complex::<T>(rng, rank, 0.3);
            if m.det().norm() > lit(0.2) {
                break m;
            }
        };
        let v = random_unitary(rng, rank);
        // entries small enough that I + s B stays positive for |s| <= 1
        let bound = 0.25 / rank as f64;
        let b = (0..rank).map(|_| (0..rank).map(|_| lit(rng.gen_range(-bound..bound))).collect()).collect();
        let phase = lit(rng.gen_range(0.0..std::f64::consts::TAU));
        Self { windings, c, v, b, phase }
    }

    pub fn total_winding(&self) -> i64 {
        self.windings.iter().sum()
    }

    pub fn frame(&self, t: T) -> Frame<T> {
        let k = self.windings.len();
        let tau = T::TAU();
        let d = CMatrix::from_fn(k, k, |i, j| {
            if i == j {
                Complex::from_polar(T::one(), tau * T::from_i64(self.windings[i]).unwrap() * t)
            } else {
                Complex::new(T::zero(), T::zero())
            }
        });
        let s = (tau * t + self.phase).sin();
        let b = CMatrix::from_fn(k, k, |i, j| Complex::new(if i == j { T::one() } else { T::zero() } + s * self.b[i][j], T::zero()));
        let u = &(&self.v * &d) * &self.v.adjoint();
        let m = &(&self.c * &u) * &b;
        Frame::from_columns(&m).expect("random frame has full rank")
    }
}

/// Random rank-`k` pair over a disk or annulus with identity metric, a random
/// polynomial unitary connection and random boundary frame loops.
#[derive(Debug, Clone)]
pub struct RandomPair<T> {
    pub pair: BundlePair<T>,
    pub connection: PolynomialConnection<T>,
    pub loops: Vec<RandomFrameLoop<T>>,
}

impl<T: Real> RandomPair<T> {
    /// `2 sum m` over every loop.
    pub fn expected_mu(&self) -> i64 {
        2 * self.loops.iter().map(RandomFrameLoop::total_winding).sum::<i64>()
    }
}

/// Options for [`random_pair`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomPairOptions {
    pub max_rank: usize,
    pub max_winding: i64,
    pub degree: u32,
    pub level: usize,
    pub boundary_samples: usize,
    /// Use an annulus for roughly a third of the seeds.
    pub allow_annulus: bool,
}

impl Default for RandomPairOptions {
    fn default() -> Self {
        Self { max_rank: 3, max_winding: 3, degree: 3, level: 4, boundary_samples: 256, allow_annulus: true }
    }
}

pub fn random_pair<T: Real>(seed: u64, opts: RandomPairOptions) -> Result<RandomPair<T>> {
    let mut rng = rng(seed);
    let rank = rng.gen_range(1..=opts.max_rank);
    let kind = if opts.allow_annulus && rng.gen_range(0..3) == 0 { SurfaceKind::annulus() } else { SurfaceKind::Disk };
    let surface = Arc::new(build_surface::<T>(kind, opts.level)?.with_boundary_samples(opts.boundary_samples));
    let connection = PolynomialConnection::random_unitary(&mut rng, rank, opts.degree, 0.8);
    let loops: Vec<RandomFrameLoop<T>> = (0..surface.boundary_loops().len()).map(|_| RandomFrameLoop::random(&mut rng, rank, opts.max_winding)).collect();
    let mut data = TotallyRealBoundaryData::new();
    for l in &loops {
        let l = l.clone();
        data = data.with_loop(move |t| l.frame(t));
    }
    let pair = BundlePair::new(surface, connection.field(true), MetricField::identity(rank), data)?;
    Ok(RandomPair { pair, connection, loops })
}

/// Smooth change of frame `P(p) = e^{f(p)} (I + N(p))` with `f` real and `N`
/// complex, both low-degree polynomials of size `amplitude`.
pub fn random_frame_change<T: Real>(rng: &mut impl Rng, rank: usize, amplitude: f64) -> impl Fn(&Point<T>) -> CMatrix<T> + Clone + Send + Sync + 'static {
    let f: [T; 4] = [0; 4].map(|_| lit(rng.gen_range(-amplitude..amplitude)));
    let n: Vec<CMatrix<T>> = (0..3).map(|_| random_complex::<T>(rng, rank, amplitude / rank as f64)).collect();
    move |p: &Point<T>| {
        let (x, y) = (p[0], p[1]);
        let e = (f[0] + f[1] * x + f[2] * y + f[3] * x * y).exp();
        let m = &(&n[0] + &n[1].scale_real(x)) + &n[2].scale_real(y * y);
        (&CMatrix::identity(rank) + &m).scale_real(e)
    }
}

/// The same pair seen through the metric `h'(u, v) = h(P u, P v)` and the
/// connection `P^{-1} (d + A) P`, which is unitary for `h'`.
pub fn metric_perturbed<T: Real>(pair: &BundlePair<T>, p_of: impl Fn(&Point<T>) -> CMatrix<T> + Clone + Send + Sync + 'static) -> Result<BundlePair<T>> {
    let connection = pair.connection().gauge_transformed(p_of.clone(), lit(1e-3), pair.connection().is_unitary());
    let metric = pair.metric().congruent(p_of);
    pair.with_connection_and_metric(connection, metric)
}

/// `A + B` with `B` a random polynomial skew-Hermitian field; unitary for
/// the identity metric.
pub fn connection_perturbed<T: Real>(pair: &BundlePair<T>, rng: &mut impl Rng, degree: u32, scale: f64) -> Result<BundlePair<T>> {
    let b = PolynomialConnection::<T>::random_unitary(rng, pair.rank(), degree, scale);
    let field = pair.connection().plus(move |p| b.eval(p), pair.connection().is_unitary());
    pair.with_connection(field)
}
