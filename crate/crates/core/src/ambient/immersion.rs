//! Immersed reference surfaces and totally real boundary constraints.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use super::model::KahlerModel;
use crate::bundlepair::Clutching;
use crate::domain::{QuadratureRule, RefSurface};
use crate::error::{MaslovError, Result};
use crate::numerics::diff::derivative_unchecked;
use crate::numerics::{wedge_norm_sq, CMatrix, Frame};
use crate::scalar::{norm3, CVec, Point, Real};

type MapFn<T> = dyn Fn(&Point<T>) -> CVec<T> + Send + Sync;
type JacobianFn<T> = dyn Fn(&Point<T>) -> [CVec<T>; 3] + Send + Sync;
type RegionFn<T> = dyn Fn(&Point<T>) -> bool + Send + Sync;

/// Chart map on the part of the reference surface where `region` holds.
#[derive(Clone)]
pub struct ImmersionPatch<T> {
    region: Arc<RegionFn<T>>,
    map: Arc<MapFn<T>>,
    jacobian: Option<Arc<JacobianFn<T>>>,
}

impl<T: Real> ImmersionPatch<T> {
    pub fn new(region: impl Fn(&Point<T>) -> bool + Send + Sync + 'static, map: impl Fn(&Point<T>) -> CVec<T> + Send + Sync + 'static) -> Self {
        Self { region: Arc::new(region), map: Arc::new(map), jacobian: None }
    }

    /// Supplies the analytic differential: images of `e_x, e_y, e_z`.
    pub fn with_jacobian(mut self, jacobian: impl Fn(&Point<T>) -> [CVec<T>; 3] + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Arc::new(jacobian));
        self
    }

    pub fn contains(&self, p: &Point<T>) -> bool {
        (self.region)(p)
    }

    pub fn map(&self, p: &Point<T>) -> CVec<T> {
        (self.map)(p)
    }

    /// `dι_p(v)`.
    pub fn push(&self, p: &Point<T>, v: &Point<T>) -> CVec<T> {
        if let Some(j) = &self.jacobian {
            let cols = j(p);
            return (0..cols[0].len()).map(|i| cols[0][i] * v[0] + cols[1][i] * v[1] + cols[2][i] * v[2]).collect();
        }
        let nv = norm3(v);
        if nv == T::zero() {
            return vec![Complex::new(T::zero(), T::zero()); self.map(p).len()];
        }
        let dir = [v[0] / nv, v[1] / nv, v[2] / nv];
        let h = T::lit(super::model::CHART_STEP) * T::one().max(norm3(p));
        let d: CVec<T> = derivative_unchecked(|s: T| self.map(&[p[0] + s * dir[0], p[1] + s * dir[1], p[2] + s * dir[2]]), T::zero(), h);
        d.into_iter().map(|z| z * nv).collect()
    }
}

/// Reference surface mapped into a chart of `C^n`, possibly through several
/// chart patches (closed surfaces) glued by a clutching function.
#[derive(Clone)]
pub struct ImmersedSurface<T> {
    surface: Arc<RefSurface<T>>,
    n: usize,
    patches: Vec<ImmersionPatch<T>>,
    clutching: Option<Clutching<T>>,
}

impl<T> fmt::Debug for ImmersedSurface<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ImmersedSurface").field("n", &self.n).field("patches", &self.patches.len()).finish_non_exhaustive()
    }
}

impl<T: Real> ImmersedSurface<T> {
    /// Single-chart immersion with finite-difference differential.
    pub fn new(surface: Arc<RefSurface<T>>, n: usize, map: impl Fn(&Point<T>) -> CVec<T> + Send + Sync + 'static) -> Self {
        Self { surface, n, patches: vec![ImmersionPatch::new(|_| true, map)], clutching: None }
    }

    pub fn from_patch(surface: Arc<RefSurface<T>>, n: usize, patch: ImmersionPatch<T>) -> Self {
        Self { surface, n, patches: vec![patch], clutching: None }
    }

    /// Immersion through several chart patches; the first patch whose
    /// region contains a point is used there. `clutching` is the determinant
    /// of the change of chart frame from the first to the second patch along
    /// the gluing loop.
    pub fn patched(surface: Arc<RefSurface<T>>, n: usize, patches: Vec<ImmersionPatch<T>>, clutching: Option<Clutching<T>>) -> Self {
        assert!(!patches.is_empty(), "at least one patch");
        Self { surface, n, patches, clutching }
    }

    pub fn surface(&self) -> &RefSurface<T> {
        &self.surface
    }

    pub fn surface_arc(&self) -> Arc<RefSurface<T>> {
        self.surface.clone()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn clutching(&self) -> Option<&Clutching<T>> {
        self.clutching.as_ref()
    }

    pub fn patches(&self) -> &[ImmersionPatch<T>] {
        &self.patches
    }

    pub fn patch_index(&self, p: &Point<T>) -> usize {
        self.patches.iter().position(|q| q.contains(p)).unwrap_or(self.patches.len() - 1)
    }

    pub fn map(&self, p: &Point<T>) -> CVec<T> {
        self.patches[self.patch_index(p)].map(p)
    }

    pub fn push(&self, p: &Point<T>, v: &Point<T>) -> CVec<T> {
        self.patches[self.patch_index(p)].push(p, v)
    }

    /// Same immersion over another mesh of the same reference surface.
    pub fn with_surface(&self, surface: Arc<RefSurface<T>>) -> Self {
        Self { surface, ..self.clone() }
    }

    /// Chart point and chart velocity of boundary loop `i` at parameter `t`.
    pub fn boundary_point(&self, loop_index: usize, t: T) -> (CVec<T>, CVec<T>) {
        let (p, v) = self.surface.boundary_loops()[loop_index].eval(t);
        (self.map(&p), self.push(&p, &v))
    }

    /// Checks that `dι` has real rank 2 at probe quadrature nodes.
    pub fn validate(&self) -> Result<()> {
        let nodes = QuadratureRule::default().surface_nodes(&self.surface);
        let stride = (nodes.len() / 64).max(1);
        for node in nodes.iter().step_by(stride) {
            let a = self.push(&node.point, &node.u);
            let b = self.push(&node.point, &node.v);
            let dot = |x: &CVec<T>, y: &CVec<T>| x.iter().zip(y).fold(T::zero(), |s, (p, q)| s + p.re * q.re + p.im * q.im);
            let (aa, bb, ab) = (dot(&a, &a), dot(&b, &b), dot(&a, &b));
            let gram = aa * bb - ab * ab;
            if !(gram > T::lit(1e-10) * aa * bb) || !gram.is_finite() {
                let p = node.point;
                return Err(MaslovError::NotImmersed { x: p[0].as_f64(), y: p[1].as_f64(), z: p[2].as_f64() });
            }
        }
        Ok(())
    }
}

type ParamFn<T> = dyn Fn(&[T]) -> CVec<T> + Send + Sync;
type DistanceFn<T> = dyn Fn(&[Complex<T>]) -> T + Send + Sync;
type TangentFn<T> = dyn Fn(&[Complex<T>]) -> Frame<T> + Send + Sync;
type VectorFn<T> = dyn Fn(&[Complex<T>]) -> CVec<T> + Send + Sync;

/// Totally real submanifold `L` of a chart, described by a parametrization
/// of the unit cube, a distance function and a tangent frame.
#[derive(Clone)]
pub struct TotallyRealConstraint<T> {
    name: String,
    n: usize,
    parametrization: Arc<ParamFn<T>>,
    distance: Arc<DistanceFn<T>>,
    tangent_frame: Arc<TangentFn<T>>,
    is_lagrangian: bool,
    is_rho_lagrangian: bool,
    mean_curvature: Option<Arc<VectorFn<T>>>,
    soliton_constant: Option<T>,
}

impl<T: fmt::Debug> fmt::Debug for TotallyRealConstraint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TotallyRealConstraint")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("is_lagrangian", &self.is_lagrangian)
            .field("mean_curvature", &self.mean_curvature.is_some())
            .field("soliton_constant", &self.soliton_constant)
            .finish()
    }
}

/// Liouville form `λ = ½ sum (x dy - y dx)` of `C^n`.
pub fn liouville<T: Real>(z: &[Complex<T>], v: &[Complex<T>]) -> T {
    z.iter().zip(v).fold(T::zero(), |s, (a, b)| s + (a.conj() * b).im) * T::lit(0.5)
}

impl<T: Real> TotallyRealConstraint<T> {
    pub fn new(
        name: impl Into<String>,
        n: usize,
        parametrization: impl Fn(&[T]) -> CVec<T> + Send + Sync + 'static,
        distance: impl Fn(&[Complex<T>]) -> T + Send + Sync + 'static,
        tangent_frame: impl Fn(&[Complex<T>]) -> Frame<T> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            n,
            parametrization: Arc::new(parametrization),
            distance: Arc::new(distance),
            tangent_frame: Arc::new(tangent_frame),
            is_lagrangian: false,
            is_rho_lagrangian: false,
            mean_curvature: None,
            soliton_constant: None,
        }
    }

    pub fn lagrangian(mut self, flag: bool) -> Self {
        self.is_lagrangian = flag;
        self
    }

    /// Declares `ρ|_L = 0`.
    pub fn rho_lagrangian(mut self, flag: bool) -> Self {
        self.is_rho_lagrangian = flag;
        self
    }

    pub fn with_mean_curvature(mut self, h: impl Fn(&[Complex<T>]) -> CVec<T> + Send + Sync + 'static) -> Self {
        self.mean_curvature = Some(Arc::new(h));
        self
    }

    /// Declares `H = c ι^⊥`, i.e. `L` is a self-similar soliton.
    pub fn with_soliton_constant(mut self, c: T) -> Self {
        self.soliton_constant = Some(c);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_lagrangian(&self) -> bool {
        self.is_lagrangian
    }

    pub fn is_rho_lagrangian(&self) -> bool {
        self.is_rho_lagrangian
    }

    pub fn soliton_constant(&self) -> Option<T> {
        self.soliton_constant
    }

    /// Mean curvature flow moves a soliton by dilation, `L_t = s(t) L` with
    /// `s s' = c`, so `s(t) = sqrt(1 + 2 c t)`. `None` without a soliton
    /// constant or once the flow has collapsed `L`.
    pub fn scale_factor(&self, t: T) -> Option<T> {
        let s2 = T::one() + T::lit(2.0) * self.soliton_constant? * t;
        (s2 > T::zero()).then(|| s2.sqrt())
    }

    pub fn has_mean_curvature(&self) -> bool {
        self.mean_curvature.is_some()
    }

    pub fn distance(&self, z: &[Complex<T>]) -> T {
        (self.distance)(z)
    }

    pub fn tangent_frame(&self, z: &[Complex<T>]) -> Frame<T> {
        (self.tangent_frame)(z)
    }

    pub fn mean_curvature(&self, z: &[Complex<T>]) -> Option<CVec<T>> {
        self.mean_curvature.as_ref().map(|h| h(z))
    }

    pub fn point(&self, params: &[T]) -> CVec<T> {
        (self.parametrization)(params)
    }

    /// Points of `L` on a grid of the parameter cube.
    pub fn probe_points(&self, per_axis: usize) -> Vec<CVec<T>> {
        let mut out = Vec::new();
        let total = per_axis.pow(self.n as u32);
        for idx in 0..total {
            let mut rem = idx;
            let params: Vec<T> = (0..self.n)
                .map(|_| {
                    let j = rem % per_axis;
                    rem /= per_axis;
                    T::lit((j as f64 + 0.37) / per_axis as f64)
                })
                .collect();
            out.push(self.point(&params));
        }
        out
    }

    /// Checks the declared properties on probe points of `L`.
    pub fn validate(&self, model: &KahlerModel<T>) -> Result<()> {
        if model.dim() != self.n {
            return Err(MaslovError::DimensionMismatch { expected: model.dim(), found: self.n });
        }
        for z in self.probe_points(6) {
            let d = self.distance(&z);
            if !(d < T::tol(1e-8)) {
                return Err(MaslovError::InvalidConstraint(format!("parametrization leaves {} (distance {:e})", self.name, d.as_f64())));
            }
            let g = model.metric_at(&z)?;
            let frame = self.tangent_frame(&z);
            wedge_norm_sq(&frame, &g)?;
            let vs = frame.vectors();
            if self.is_lagrangian {
                for i in 0..vs.len() {
                    for j in (i + 1)..vs.len() {
                        let w = model.kahler_form(&z, &vs[i], &vs[j]);
                        let scale = (g.norm_sq(&vs[i]) * g.norm_sq(&vs[j])).sqrt();
                        if !(w.abs() < T::tol(1e-9) * scale) {
                            return Err(MaslovError::InvalidConstraint(format!("{} is not Lagrangian (ω = {:e})", self.name, w.as_f64())));
                        }
                    }
                }
            }
            if let (Some(c), Some(h)) = (self.soliton_constant, self.mean_curvature(&z)) {
                for v in vs {
                    let lhs = model.kahler_form(&z, &h, v);
                    let rhs = T::lit(2.0) * c * liouville(&z, v);
                    if !((lhs - rhs).abs() < T::tol(1e-6) * T::one().max(rhs.abs())) {
                        return Err(MaslovError::InvalidConstraint(format!("soliton identity fails on {} ({:e} vs {:e})", self.name, lhs.as_f64(), rhs.as_f64())));
                    }
                }
            }
        }
        Ok(())
    }
}

fn cx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// Circle `|z| = r` in `C`, tangent `i z`, mean curvature `-z / r^2`.
/// A self-shrinker with `c = -1/r^2`.
pub fn circle<T: Real>(radius: T) -> TotallyRealConstraint<T> {
    TotallyRealConstraint::new(
        format!("circle(r={radius})"),
        1,
        move |s: &[T]| vec![Complex::from_polar(radius, T::TAU() * s[0])],
        move |z: &[Complex<T>]| (z[0].norm() - radius).abs(),
        |z: &[Complex<T>]| Frame::new(vec![vec![cx(T::zero(), T::one()) * z[0]]]).expect("nonzero tangent"),
    )
    .lagrangian(true)
    .rho_lagrangian(true)
    .with_mean_curvature(move |z: &[Complex<T>]| vec![-z[0] / (radius * radius)])
    .with_soliton_constant(-T::one() / (radius * radius))
}

/// Product torus `|z_j| = r_j` in `C^n`, frame `i z_j e_j`, mean curvature
/// `-sum z_j / r_j^2 e_j`.
pub fn product_torus<T: Real>(radii: Vec<T>) -> TotallyRealConstraint<T> {
    let n = radii.len();
    let (r1, r2, r3) = (radii.clone(), radii.clone(), radii.clone());
    TotallyRealConstraint::new(
        format!("torus{:?}", radii.iter().map(|r| r.as_f64()).collect::<Vec<_>>()),
        n,
        move |s: &[T]| r1.iter().zip(s).map(|(r, t)| Complex::from_polar(*r, T::TAU() * *t)).collect(),
        move |z: &[Complex<T>]| z.iter().zip(&r2).fold(T::zero(), |m, (w, r)| m.max((w.norm() - *r).abs())),
        move |z: &[Complex<T>]| {
            let m = CMatrix::from_fn(n, n, |i, j| if i == j { cx(T::zero(), T::one()) * z[j] } else { cx(T::zero(), T::zero()) });
            Frame::from_columns(&m).expect("torus frame")
        },
    )
    .lagrangian(true)
    .with_mean_curvature(move |z: &[Complex<T>]| z.iter().zip(&r3).map(|(w, r)| -*w / (*r * *r)).collect())
}

/// `R^n` inside `C^n`, standard real frame, `H = 0`.
pub fn real_plane<T: Real>(n: usize) -> TotallyRealConstraint<T> {
    TotallyRealConstraint::new(
        format!("real_plane(n={n})"),
        n,
        |s: &[T]| s.iter().map(|t| cx(T::lit(2.0) * *t - T::one(), T::zero())).collect(),
        |z: &[Complex<T>]| z.iter().fold(T::zero(), |m, w| m.max(w.im.abs())),
        move |_: &[Complex<T>]| Frame::from_columns(&CMatrix::identity(n)).expect("identity"),
    )
    .lagrangian(true)
    .with_mean_curvature(move |_: &[Complex<T>]| vec![cx(T::zero(), T::zero()); n])
}

/// Circle of colatitude `θ0` on the round sphere of radius `r`, seen in the
/// stereographic chart as `|z| = tan(θ0/2)`. Its mean curvature is
/// `cot(θ0)/r` times the unit normal pointing to the north pole.
pub fn latitude_circle<T: Real>(colatitude: T, sphere_radius: T) -> TotallyRealConstraint<T> {
    let rho0 = (colatitude * T::lit(0.5)).tan();
    let k = colatitude.cos() / colatitude.sin() / sphere_radius;
    TotallyRealConstraint::new(
        format!("latitude(theta0={colatitude})"),
        1,
        move |s: &[T]| vec![Complex::from_polar(rho0, T::TAU() * s[0])],
        move |z: &[Complex<T>]| (z[0].norm() - rho0).abs(),
        |z: &[Complex<T>]| Frame::new(vec![vec![cx(T::zero(), T::one()) * z[0]]]).expect("nonzero tangent"),
    )
    .lagrangian(true)
    .rho_lagrangian(true)
    .with_mean_curvature(move |z: &[Complex<T>]| {
        let r = z[0].norm();
        // chart length of a unit normal is (1 + |z|^2) / (2 R)
        let scale = (T::one() + r * r) / (T::lit(2.0) * sphere_radius);
        vec![-z[0] / r * (k * scale)]
    })
}
