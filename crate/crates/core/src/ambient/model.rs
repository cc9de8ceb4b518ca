//! Kähler geometry in a single holomorphic chart.
//!
//! Conventions: a chart vector `X in C^n` stands for the real tangent vector
//! with complex coordinates `X`; `J` is multiplication by `i`. The metric
//! matrix `g` gives the Riemannian metric `Re(X^T g conj Y)` and the Kähler
//! form `ω(X, Y) = -Im(X^T g conj Y)`. Models given by a potential `K` use
//! `g = 2 ∂∂̄K`, so that `ω = i ∂∂̄K`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{MaslovError, Result};
use crate::numerics::diff::{check_step, derivative_unchecked};
use crate::numerics::{CMatrix, HermitianForm};
use crate::scalar::{CVec, Real};

type MetricFn<T> = dyn Fn(&[Complex<T>]) -> CMatrix<T> + Send + Sync;
type PotentialFn<T> = dyn Fn(&[Complex<T>]) -> T + Send + Sync;

/// Which family a model belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind<T> {
    FlatCn,
    FubiniStudy,
    RoundSphere { radius: T },
    CustomPotential,
}

/// Kähler manifold seen through one holomorphic chart.
#[derive(Clone)]
pub struct KahlerModel<T> {
    kind: ModelKind<T>,
    n: usize,
    metric: Arc<MetricFn<T>>,
    potential: Option<Arc<PotentialFn<T>>>,
    einstein_constant: Option<T>,
}

impl<T: fmt::Debug> fmt::Debug for KahlerModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KahlerModel")
            .field("kind", &self.kind)
            .field("n", &self.n)
            .field("potential", &self.potential.is_some())
            .field("einstein_constant", &self.einstein_constant)
            .finish()
    }
}

/// Second step used for nested derivatives (`∂∂̄` of scalars).
pub const HESSIAN_STEP: f64 = 1e-2;
/// First-derivative step relative to the local chart scale.
pub const CHART_STEP: f64 = 1e-4;

fn norm_sq<T: Real>(z: &[Complex<T>]) -> T {
    z.iter().fold(T::zero(), |a, w| a + w.norm_sqr())
}

fn chart_scale<T: Real>(z: &[Complex<T>]) -> T {
    T::one().max(norm_sq(z).sqrt())
}

impl<T: Real> KahlerModel<T> {
    /// `C^n` with the Euclidean metric. Ricci-flat; no Einstein constant is
    /// attached.
    pub fn flat(n: usize) -> Self {
        Self {
            kind: ModelKind::FlatCn,
            n,
            metric: Arc::new(move |_| CMatrix::identity(n)),
            potential: Some(Arc::new(|z: &[Complex<T>]| norm_sq(z) * T::lit(0.5))),
            einstein_constant: None,
        }
    }

    /// `CP^n` in the affine chart `[1 : z]`, `ω = i ∂∂̄ log(1 + |z|^2)`.
    /// Einstein with `ρ = (n + 1) ω`.
    pub fn fubini_study(n: usize) -> Self {
        Self {
            kind: ModelKind::FubiniStudy,
            n,
            metric: Arc::new(move |z: &[Complex<T>]| {
                let s = T::one() + norm_sq(z);
                let two = T::lit(2.0);
                CMatrix::from_fn(n, n, |a, b| {
                    let delta = if a == b { Complex::new(s, T::zero()) } else { Complex::new(T::zero(), T::zero()) };
                    (delta - z[a].conj() * z[b]) * (two / (s * s))
                })
            }),
            potential: Some(Arc::new(|z: &[Complex<T>]| (T::one() + norm_sq(z)).ln())),
            einstein_constant: Some(T::from_usize(n + 1).unwrap()),
        }
    }

    /// Round 2-sphere of radius `r` in the stereographic chart,
    /// `g = 4 r^2 / (1 + |z|^2)^2`. Gauss curvature and Einstein constant
    /// `1 / r^2`.
    pub fn round_sphere(radius: T) -> Self {
        let r2 = radius * radius;
        Self {
            kind: ModelKind::RoundSphere { radius },
            n: 1,
            metric: Arc::new(move |z: &[Complex<T>]| {
                let s = T::one() + z[0].norm_sqr();
                CMatrix::from_real_diagonal(&[T::lit(4.0) * r2 / (s * s)])
            }),
            potential: Some(Arc::new(move |z: &[Complex<T>]| T::lit(2.0) * r2 * (T::one() + z[0].norm_sqr()).ln())),
            einstein_constant: Some(T::one() / r2),
        }
    }

    /// Model given by a Kähler potential; the metric is `2 ∂∂̄K` by nested
    /// finite differences.
    pub fn from_potential(n: usize, potential: impl Fn(&[Complex<T>]) -> T + Send + Sync + 'static, einstein_constant: Option<T>) -> Self {
        let k: Arc<PotentialFn<T>> = Arc::new(potential);
        let kk = k.clone();
        Self {
            kind: ModelKind::CustomPotential,
            n,
            metric: Arc::new(move |z: &[Complex<T>]| complex_hessian(|w| kk(w), z, T::lit(HESSIAN_STEP)).scale_real(T::lit(2.0))),
            potential: Some(k),
            einstein_constant,
        }
    }

    /// Attaches (or replaces) the Einstein constant claimed for the model.
    pub fn with_einstein_constant(mut self, c: Option<T>) -> Self {
        self.einstein_constant = c;
        self
    }

    pub fn kind(&self) -> ModelKind<T> {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ModelKind::FlatCn => "flat_Cn",
            ModelKind::FubiniStudy => "fubini_study_CPn",
            ModelKind::RoundSphere { .. } => "round_sphere",
            ModelKind::CustomPotential => "custom_potential",
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn einstein_constant(&self) -> Option<T> {
        self.einstein_constant
    }

    pub fn has_potential(&self) -> bool {
        self.potential.is_some()
    }

    pub fn potential(&self, z: &[Complex<T>]) -> Option<T> {
        self.potential.as_ref().map(|k| k(z))
    }

    pub fn metric_matrix(&self, z: &[Complex<T>]) -> CMatrix<T> {
        (self.metric)(z)
    }

    pub fn metric_at(&self, z: &[Complex<T>]) -> Result<HermitianForm<T>> {
        if z.len() != self.n {
            return Err(MaslovError::DimensionMismatch { expected: self.n, found: z.len() });
        }
        HermitianForm::new(self.metric_matrix(z)).map_err(|_| MaslovError::SingularMetric)
    }

    /// `ω(X, Y) = -Im(X^T g conj Y)`.
    pub fn kahler_form(&self, z: &[Complex<T>], x: &[Complex<T>], y: &[Complex<T>]) -> T {
        -bilinear(&self.metric_matrix(z), x, y).im
    }

    /// Checks positivity, the potential and the Einstein constant on a
    /// probe grid inside the unit polydisk.
    pub fn validate(&self) -> Result<()> {
        let tol = T::tol(1e-6);
        for z in self.probe_points() {
            let g = self.metric_at(&z)?;
            if let Some(k) = &self.potential {
                let h = complex_hessian(|w| k(w), &z, T::lit(HESSIAN_STEP)).scale_real(T::lit(2.0));
                let scale = T::one().max(g.matrix().max_abs());
                let r = h.max_abs_diff(g.matrix()) / scale;
                if r > tol {
                    return Err(MaslovError::InvalidModel(format!("potential does not reproduce the metric (residual {:e})", r.as_f64())));
                }
            }
            if let Some(c) = self.einstein_constant {
                let rho = ricci_matrix(self, &z)?;
                // ρ = c ω  <=>  M = -(c/2) g
                let target = g.matrix().scale_real(-c * T::lit(0.5));
                let scale = T::one().max(target.max_abs());
                let r = rho.max_abs_diff(&target) / scale;
                if r > tol {
                    return Err(MaslovError::InvalidModel(format!("Ricci form is not {c} times the Kähler form (residual {:e})", r.as_f64())));
                }
            }
        }
        Ok(())
    }

    /// Fixed probe grid inside the unit polydisk.
    pub fn probe_points(&self) -> Vec<CVec<T>> {
        let vals = [-0.6, -0.1, 0.35, 0.7];
        let mut out = Vec::new();
        for (i, &a) in vals.iter().enumerate() {
            for &b in &vals {
                let z: CVec<T> = (0..self.n).map(|j| Complex::new(T::lit(a * (1.0 - 0.3 * j as f64)), T::lit(b + 0.1 * (i + j) as f64))).collect();
                out.push(z);
            }
        }
        out
    }
}

/// `X^T g conj Y`.
pub(crate) fn bilinear<T: Real>(g: &CMatrix<T>, x: &[Complex<T>], y: &[Complex<T>]) -> Complex<T> {
    let mut s = Complex::new(T::zero(), T::zero());
    for a in 0..g.rows() {
        for b in 0..g.cols() {
            s += x[a] * g[(a, b)] * y[b].conj();
        }
    }
    s
}

fn shifted<T: Real>(z: &[Complex<T>], coord: usize, s: T) -> CVec<T> {
    let mut w = z.to_vec();
    if coord % 2 == 0 {
        w[coord / 2].re += s;
    } else {
        w[coord / 2].im += s;
    }
    w
}

/// Real Hessian of `f` in the coordinates `(x_1, y_1, ..., x_n, y_n)`.
fn real_hessian<T: Real>(f: &impl Fn(&[Complex<T>]) -> T, z: &[Complex<T>], h: T) -> Vec<Vec<T>> {
    let m = 2 * z.len();
    let mut out = vec![vec![T::zero(); m]; m];
    let two = T::lit(2.0);
    for a in 0..m {
        let v = -f(&shifted(z, a, two * h)) + T::lit(16.0) * f(&shifted(z, a, h)) - T::lit(30.0) * f(z) + T::lit(16.0) * f(&shifted(z, a, -h)) - f(&shifted(z, a, -two * h));
        out[a][a] = v / (T::lit(12.0) * h * h);
        for b in (a + 1)..m {
            let d = derivative_unchecked(|s: T| derivative_unchecked(|t: T| f(&shifted(&shifted(z, a, s), b, t)), T::zero(), h), T::zero(), h);
            out[a][b] = d;
            out[b][a] = d;
        }
    }
    out
}

/// `M_jk = ∂_j ∂̄_k f` by nested central differences.
pub fn complex_hessian<T: Real>(f: impl Fn(&[Complex<T>]) -> T, z: &[Complex<T>], h: T) -> CMatrix<T> {
    let r = real_hessian(&f, z, h);
    let q = T::lit(0.25);
    CMatrix::from_fn(z.len(), z.len(), |j, k| {
        let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
        Complex::new((r[xj][xk] + r[yj][yk]) * q, (r[xj][yk] - r[yj][xk]) * q)
    })
}

/// `∂_j g` for every holomorphic coordinate.
fn holomorphic_derivatives<T: Real>(model: &KahlerModel<T>, z: &[Complex<T>], h: T) -> Vec<CMatrix<T>> {
    (0..model.n)
        .map(|j| {
            let dx = derivative_unchecked(|s: T| model.metric_matrix(&shifted(z, 2 * j, s)), T::zero(), h);
            let dy = derivative_unchecked(|s: T| model.metric_matrix(&shifted(z, 2 * j + 1, s)), T::zero(), h);
            CMatrix::from_fn(model.n, model.n, |a, b| (dx[(a, b)] - Complex::new(T::zero(), T::one()) * dy[(a, b)]) * T::lit(0.5))
        })
        .collect()
}

/// Chern connection coefficients `Γ_j = (g^T)^{-1} ∂_j g^T`, so that the
/// covariant derivative of a chart vector field `Y` along `X` is
/// `dY(X) + (sum_j X_j Γ_j) Y`.
pub fn chern_connection<T: Real>(model: &KahlerModel<T>, z: &[Complex<T>]) -> Result<Vec<CMatrix<T>>> {
    let g = model.metric_at(z)?;
    let h = T::lit(CHART_STEP) * chart_scale(z);
    check_step(h)?;
    let inv_t = g.matrix().transpose().inverse().ok_or(MaslovError::SingularMetric)?;
    Ok(holomorphic_derivatives(model, z, h).into_iter().map(|d| &inv_t * &d.transpose()).collect())
}

/// `Γ(X) = sum_j X_j Γ_j`.
pub fn connection_along<T: Real>(gamma: &[CMatrix<T>], x: &[Complex<T>]) -> CMatrix<T> {
    let n = gamma.len();
    let mut out = CMatrix::zeros(n, n);
    for (g, xj) in gamma.iter().zip(x) {
        out = &out + &g.scale(*xj);
    }
    out
}

/// `M = ∂∂̄ log det g`; the Ricci form is `ρ(X, Y) = 2 Im(X^T M conj Y)`.
pub fn ricci_matrix<T: Real>(model: &KahlerModel<T>, z: &[Complex<T>]) -> Result<CMatrix<T>> {
    model.metric_at(z)?;
    let h = T::lit(HESSIAN_STEP) * chart_scale(z);
    check_step(h)?;
    Ok(complex_hessian(|w| model.metric_matrix(w).det().re.ln(), z, h))
}

/// `ρ(X, Y) = -i ∂∂̄ log det g (X, Y)`.
pub fn ricci_form<T: Real>(model: &KahlerModel<T>, z: &[Complex<T>], x: &[Complex<T>], y: &[Complex<T>]) -> Result<T> {
    let m = ricci_matrix(model, z)?;
    Ok(T::lit(2.0) * bilinear(&m, x, y).im)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn flat_has_zero_connection_and_curvature() {
        let m = KahlerModel::<f64>::flat(2);
        let z = [c(0.3, -0.2), c(0.1, 0.4)];
        for g in chern_connection(&m, &z).unwrap() {
            assert!(g.max_abs() < 1e-12);
        }
        assert!(ricci_matrix(&m, &z).unwrap().max_abs() < 1e-8);
        m.validate().unwrap();
    }

    #[test]
    fn kahler_form_of_flat_plane() {
        let m = KahlerModel::<f64>::flat(1);
        assert!((m.kahler_form(&[c(0.0, 0.0)], &[c(1.0, 0.0)], &[c(0.0, 1.0)]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn round_sphere_is_einstein() {
        for r in [0.5, 1.0, 2.0] {
            let m = KahlerModel::<f64>::round_sphere(r);
            m.validate().unwrap();
            let z = [c(0.4, 0.3)];
            let (x, y) = ([c(1.0, 0.0)], [c(0.0, 1.0)]);
            let rho = ricci_form(&m, &z, &x, &y).unwrap();
            let om = m.kahler_form(&z, &x, &y);
            assert!((rho - om / (r * r)).abs() < 1e-6 * om.abs(), "{rho} {om}");
        }
    }

    #[test]
    fn fubini_study_validates() {
        KahlerModel::<f64>::fubini_study(1).validate().unwrap();
        KahlerModel::<f64>::fubini_study(2).validate().unwrap();
    }

    #[test]
    fn wrong_einstein_constant_is_rejected() {
        assert!(KahlerModel::<f64>::round_sphere(1.0).with_einstein_constant(Some(2.0)).validate().is_err());
    }

    #[test]
    fn chern_connection_is_metric_compatible() {
        let m = KahlerModel::<f64>::fubini_study(2);
        let z = [c(0.3, -0.5), c(-0.2, 0.1)];
        let gam = chern_connection(&m, &z).unwrap();
        let g = m.metric_matrix(&z);
        let dg = holomorphic_derivatives(&m, &z, 1e-4);
        for (gj, dj) in gam.iter().zip(&dg) {
            let lhs = &gj.transpose() * &g;
            assert!(lhs.max_abs_diff(dj) < 1e-8);
        }
    }
}
