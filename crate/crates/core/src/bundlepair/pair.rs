//! Bundle pairs `(E, F)` presented in a fixed trivialization of `E`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use super::connection::{check_unitary_at, ConnectionField, MetricField};
use crate::domain::RefSurface;
use crate::error::{MaslovError, Result};
use crate::numerics::{CMatrix, Frame};
use crate::scalar::Real;

type FrameFn<T> = dyn Fn(T) -> Frame<T> + Send + Sync;

/// Totally real boundary condition: for every boundary loop, a frame of
/// `F` as a function of the loop parameter `t` (1-periodic, defined for
/// every real `t`).
#[derive(Clone)]
pub struct TotallyRealBoundaryData<T> {
    loops: Vec<Arc<FrameFn<T>>>,
}

impl<T> fmt::Debug for TotallyRealBoundaryData<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TotallyRealBoundaryData").field("loops", &self.loops.len()).finish()
    }
}

impl<T: Real> TotallyRealBoundaryData<T> {
    pub fn new() -> Self {
        Self { loops: Vec::new() }
    }

    pub fn with_loop(mut self, frame_of: impl Fn(T) -> Frame<T> + Send + Sync + 'static) -> Self {
        self.loops.push(Arc::new(frame_of));
        self
    }

    pub fn len(&self) -> usize {
        self.loops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loops.is_empty()
    }

    pub fn frame(&self, loop_index: usize, t: T) -> Frame<T> {
        (self.loops[loop_index])(t)
    }

    fn map(&self, f: impl Fn(Frame<T>) -> Frame<T> + Send + Sync + Clone + 'static) -> Self {
        Self {
            loops: self
                .loops
                .iter()
                .map(|l| {
                    let l = l.clone();
                    let g = f.clone();
                    Arc::new(move |t: T| g(l(t))) as Arc<FrameFn<T>>
                })
                .collect(),
        }
    }

    fn reparametrized(&self, f: impl Fn(T) -> T + Send + Sync + Clone + 'static) -> Self {
        Self {
            loops: self
                .loops
                .iter()
                .map(|l| {
                    let l = l.clone();
                    let g = f.clone();
                    Arc::new(move |t: T| l(g(t))) as Arc<FrameFn<T>>
                })
                .collect(),
        }
    }
}

impl<T: Real> Default for TotallyRealBoundaryData<T> {
    fn default() -> Self {
        Self::new()
    }
}

type ClutchFn<T> = dyn Fn(T) -> Complex<T> + Send + Sync;

/// Gluing data of a closed surface covered by two gauge patches: the
/// determinant of the transition `s_second = c s_first` along the gluing
/// loop, oriented as the boundary of the first patch.
#[derive(Clone)]
pub struct Clutching<T> {
    transition: Arc<ClutchFn<T>>,
    samples: usize,
}

impl<T: Real> Clutching<T> {
    pub fn new(samples: usize, transition: impl Fn(T) -> Complex<T> + Send + Sync + 'static) -> Self {
        Self { transition: Arc::new(transition), samples }
    }

    pub fn eval(&self, t: T) -> Complex<T> {
        (self.transition)(t)
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    fn map(&self, f: impl Fn(Complex<T>) -> Complex<T> + Send + Sync + 'static) -> Self {
        let inner = self.transition.clone();
        Self { transition: Arc::new(move |t| f(inner(t))), samples: self.samples }
    }
}

impl<T> fmt::Debug for Clutching<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Clutching").field("samples", &self.samples).finish_non_exhaustive()
    }
}

/// Complex rank-`k` bundle over a reference surface with a totally real
/// subbundle over the boundary.
#[derive(Clone, Debug)]
pub struct BundlePair<T> {
    pub(crate) surface: Arc<RefSurface<T>>,
    pub(crate) rank: usize,
    pub(crate) connection: ConnectionField<T>,
    pub(crate) metric: MetricField<T>,
    pub(crate) boundary: TotallyRealBoundaryData<T>,
    pub(crate) clutching: Option<Clutching<T>>,
    pub(crate) fd_step: T,
}

/// Gram-projector distance below which two frame spans count as equal.
const PERIODICITY_TOL: f64 = 1e-9;

impl<T: Real> BundlePair<T> {
    pub fn new(
        surface: Arc<RefSurface<T>>,
        connection: ConnectionField<T>,
        metric: MetricField<T>,
        boundary: TotallyRealBoundaryData<T>,
    ) -> Result<Self> {
        let pair = Self {
            rank: connection.rank(),
            surface,
            connection,
            metric,
            boundary,
            clutching: None,
            fd_step: T::lit(1e-4),
        };
        pair.validate()?;
        Ok(pair)
    }

    /// Attaches clutching data; only meaningful on closed surfaces.
    pub fn with_clutching(mut self, clutching: Clutching<T>) -> Result<Self> {
        if self.surface.has_boundary() {
            return Err(MaslovError::UnsupportedInput("clutching data on a surface with boundary".into()));
        }
        self.clutching = Some(clutching);
        Ok(self)
    }

    pub fn surface(&self) -> &RefSurface<T> {
        &self.surface
    }

    pub fn surface_arc(&self) -> Arc<RefSurface<T>> {
        self.surface.clone()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn connection(&self) -> &ConnectionField<T> {
        &self.connection
    }

    pub fn metric(&self) -> &MetricField<T> {
        &self.metric
    }

    pub fn boundary(&self) -> &TotallyRealBoundaryData<T> {
        &self.boundary
    }

    pub fn clutching(&self) -> Option<&Clutching<T>> {
        self.clutching.as_ref()
    }

    pub fn fd_step(&self) -> T {
        self.fd_step
    }

    /// Overrides the finite-difference step used for curvature.
    pub fn with_fd_step(mut self, step: T) -> Self {
        self.fd_step = step;
        self
    }

    /// Same pair over the same mesh with every boundary loop resampled.
    pub fn with_boundary_samples(&self, n: usize) -> Self {
        let mut p = self.clone();
        p.surface = Arc::new(self.surface.with_boundary_samples(n));
        p
    }

    fn validate(&self) -> Result<()> {
        let loops = self.surface.boundary_loops();
        if loops.len() != self.boundary.len() {
            return Err(MaslovError::DimensionMismatch { expected: loops.len(), found: self.boundary.len() });
        }
        if self.surface.has_boundary() && self.connection.patch_count() > 1 {
            return Err(MaslovError::UnsupportedInput("patched connections are only supported on closed surfaces".into()));
        }
        let probe = self.surface.probe_points(8);
        for p in &probe {
            let h = self.metric.at(p);
            if h.dim() != self.rank {
                return Err(MaslovError::DimensionMismatch { expected: self.rank, found: h.dim() });
            }
        }
        for (i, lp) in loops.iter().enumerate() {
            let f0 = self.boundary.frame(i, T::zero());
            if f0.rank() != self.rank || f0.dim() != self.rank {
                return Err(MaslovError::DimensionMismatch { expected: self.rank, found: f0.rank() });
            }
            check_periodic_orientable(&f0, &self.boundary.frame(i, T::one()))?;
            // totally real along the loop
            for t in lp.sample_parameters() {
                let (p, _) = lp.eval(t);
                crate::numerics::wedge_norm_sq(&self.boundary.frame(i, t), &self.metric.at(&p))?;
            }
        }
        self.check_unitary()?;
        Ok(())
    }

    /// Verifies `h`-unitarity on interior and boundary probes when the
    /// connection is flagged unitary.
    pub fn check_unitary(&self) -> Result<()> {
        if !self.connection.is_unitary() {
            return Ok(());
        }
        let mut probes = self.surface.probe_points(12);
        for lp in self.surface.boundary_loops() {
            probes.extend(lp.sample_parameters().iter().step_by((lp.segments() / 8).max(1)).map(|&t| lp.eval(t).0));
        }
        for p in &probes {
            check_unitary_at(&self.connection.coefficients(p), &self.metric, p, self.fd_step, 3)?;
        }
        Ok(())
    }

    /// Pair on the conjugate bundle: conjugated connection, metric and frames.
    pub fn conjugate_pair(&self) -> Self {
        Self {
            surface: self.surface.clone(),
            rank: self.rank,
            connection: self.connection.conj(),
            metric: self.metric.conj(),
            boundary: self.boundary.map(|f| f.conj()),
            clutching: self.clutching.as_ref().map(|c| c.map(|z| z.conj())),
            fd_step: self.fd_step,
        }
    }

    /// Top exterior power pair: `tr A`, `det H` and the wedge of the frame
    /// represented by its determinant.
    pub fn det_pair(&self) -> Self {
        Self {
            surface: self.surface.clone(),
            rank: 1,
            connection: self.connection.trace(),
            metric: self.metric.determinant(),
            boundary: self.boundary.map(|f| {
                let d = f.as_matrix().det();
                Frame::with_orientation(vec![vec![d]], f.orientation()).expect("rank-one frame")
            }),
            clutching: self.clutching.clone(),
            fd_step: self.fd_step,
        }
    }

    /// Same pair over the surface with reversed orientation.
    pub fn reversed(&self) -> Self {
        let mut p = self.clone();
        p.surface = Arc::new(self.surface.reversed());
        p.boundary = self.boundary.reparametrized(|t: T| -t);
        p.clutching = self.clutching.as_ref().map(|c| {
            let inner = c.clone();
            // gluing loop now runs backwards and the patches swap roles
            Clutching::new(c.samples(), move |t: T| inner.eval(-t).inv())
        });
        p
    }

    /// Same pair with the orientation of every frame of `F` flipped.
    pub fn frame_orientation_flipped(&self) -> Self {
        let mut p = self.clone();
        p.boundary = self.boundary.map(|f| f.flipped());
        p
    }

    /// Replaces the connection, keeping everything else.
    pub fn with_connection(&self, connection: ConnectionField<T>) -> Result<Self> {
        Self::new(self.surface.clone(), connection, self.metric.clone(), self.boundary.clone())
            .map(|p| Self { clutching: self.clutching.clone(), fd_step: self.fd_step, ..p })
    }

    /// Replaces connection and metric together.
    pub fn with_connection_and_metric(&self, connection: ConnectionField<T>, metric: MetricField<T>) -> Result<Self> {
        Self::new(self.surface.clone(), connection, metric, self.boundary.clone())
            .map(|p| Self { clutching: self.clutching.clone(), fd_step: self.fd_step, ..p })
    }
}

/// Checks that the frames at `t = 0` and `t = 1` span the same real
/// subspace and induce the same orientation.
fn check_periodic_orientable<T: Real>(f0: &Frame<T>, f1: &Frame<T>) -> Result<()> {
    // real coordinates of f1 in the basis f0: solve the normal equations
    let a = f0.as_matrix();
    let b = f1.as_matrix();
    let ah = a.adjoint();
    let gram = &ah * &a;
    let inv = gram.inverse().ok_or(MaslovError::DegenerateFrame { value: 0.0, threshold: 0.0 })?;
    let m = &(&inv * &ah) * &b;
    let recon = &a * &m;
    let scale = T::one().max(b.max_abs());
    let imag = m.max_abs_diff(&CMatrix::from_fn(m.rows(), m.cols(), |i, j| Complex::new(m[(i, j)].re, T::zero())));
    let dist = recon.max_abs_diff(&b) / scale + imag / T::one().max(m.max_abs());
    if dist > T::tol(PERIODICITY_TOL) {
        return Err(MaslovError::UnsupportedInput(format!("boundary frame is not periodic (span distance {:e})", dist.as_f64())));
    }
    let sign = m.det().re * f0.orientation().sign::<T>() * f1.orientation().sign::<T>();
    if sign < T::zero() {
        return Err(MaslovError::UnsupportedInput("non-orientable totally real subbundle".into()));
    }
    Ok(())
}
