//! Connection coefficient fields and Hermitian metric fields over a
//! reference surface, expressed in a fixed trivialization.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{MaslovError, Result};
use crate::numerics::diff::derivative_unchecked;
use crate::numerics::{CMatrix, HermitianForm};
use crate::scalar::{Point, Real};

/// Coefficients `(A_x, A_y, A_z)` of a `gl(k, C)`-valued 1-form in reference
/// coordinates. Planar surfaces ignore `A_z`.
pub type Coefficients<T> = [CMatrix<T>; 3];

type CoeffFn<T> = dyn Fn(&Point<T>) -> Coefficients<T> + Send + Sync;
type RegionFn<T> = dyn Fn(&Point<T>) -> bool + Send + Sync;

/// One gauge patch: the coefficients are valid wherever `region` holds.
#[derive(Clone)]
pub struct ConnectionPatch<T> {
    region: Arc<RegionFn<T>>,
    coeffs: Arc<CoeffFn<T>>,
}

impl<T: Real> ConnectionPatch<T> {
    pub fn new(
        region: impl Fn(&Point<T>) -> bool + Send + Sync + 'static,
        coeffs: impl Fn(&Point<T>) -> Coefficients<T> + Send + Sync + 'static,
    ) -> Self {
        Self { region: Arc::new(region), coeffs: Arc::new(coeffs) }
    }

    pub fn contains(&self, p: &Point<T>) -> bool {
        (self.region)(p)
    }

    pub fn eval(&self, p: &Point<T>) -> Coefficients<T> {
        (self.coeffs)(p)
    }
}

/// Connection `d + A` on the trivial rank-`k` bundle, possibly glued from
/// several gauge patches (closed surfaces).
#[derive(Clone)]
pub struct ConnectionField<T> {
    rank: usize,
    patches: Vec<ConnectionPatch<T>>,
    unitary: bool,
}

impl<T> fmt::Debug for ConnectionField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConnectionField")
            .field("rank", &self.rank)
            .field("patches", &self.patches.len())
            .field("unitary", &self.unitary)
            .finish()
    }
}

fn zero3<T: Real>(k: usize) -> Coefficients<T> {
    [CMatrix::zeros(k, k), CMatrix::zeros(k, k), CMatrix::zeros(k, k)]
}

impl<T: Real> ConnectionField<T> {
    /// Global connection flagged as unitary for the pair's metric.
    pub fn unitary(rank: usize, coeffs: impl Fn(&Point<T>) -> Coefficients<T> + Send + Sync + 'static) -> Self {
        Self { rank, patches: vec![ConnectionPatch::new(|_| true, coeffs)], unitary: true }
    }

    /// Global connection without unitarity claim.
    pub fn general(rank: usize, coeffs: impl Fn(&Point<T>) -> Coefficients<T> + Send + Sync + 'static) -> Self {
        Self { rank, patches: vec![ConnectionPatch::new(|_| true, coeffs)], unitary: false }
    }

    /// The trivial connection `d`.
    pub fn flat(rank: usize) -> Self {
        Self::unitary(rank, move |_| zero3(rank))
    }

    /// Connection glued from gauge patches; the first patch whose region
    /// contains a point is used there.
    pub fn patched(rank: usize, patches: Vec<ConnectionPatch<T>>, unitary: bool) -> Self {
        assert!(!patches.is_empty(), "at least one patch");
        Self { rank, patches, unitary }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn patch_count(&self) -> usize {
        self.patches.len()
    }

    pub fn patch_index(&self, p: &Point<T>) -> usize {
        self.patches.iter().position(|patch| patch.contains(p)).unwrap_or(self.patches.len() - 1)
    }

    pub fn patch(&self, i: usize) -> &ConnectionPatch<T> {
        &self.patches[i]
    }

    /// Coefficients at `p` in the gauge of the patch containing `p`.
    pub fn coefficients(&self, p: &Point<T>) -> Coefficients<T> {
        self.patches[self.patch_index(p)].eval(p)
    }

    /// `A(v) = sum_a A_a v_a`.
    pub fn along(&self, p: &Point<T>, v: &Point<T>) -> CMatrix<T> {
        contract(&self.coefficients(p), v)
    }

    fn map_patches(&self, rank: usize, unitary: bool, f: impl Fn(Coefficients<T>, &Point<T>) -> Coefficients<T> + Send + Sync + Clone + 'static) -> Self {
        let patches = self
            .patches
            .iter()
            .map(|patch| {
                let inner = patch.coeffs.clone();
                let g = f.clone();
                ConnectionPatch { region: patch.region.clone(), coeffs: Arc::new(move |p: &Point<T>| g(inner(p), p)) }
            })
            .collect();
        Self { rank, patches, unitary }
    }

    /// `A + B`, with `B` a global field. Unitarity is kept only when the
    /// caller vouches for it.
    pub fn plus(&self, other: impl Fn(&Point<T>) -> Coefficients<T> + Send + Sync + 'static, unitary: bool) -> Self {
        let other = Arc::new(other);
        self.map_patches(self.rank, unitary, move |a, p| {
            let b = other(p);
            [&a[0] + &b[0], &a[1] + &b[1], &a[2] + &b[2]]
        })
    }

    /// Connection on the conjugate bundle.
    pub fn conj(&self) -> Self {
        self.map_patches(self.rank, self.unitary, |a, _| [a[0].conj(), a[1].conj(), a[2].conj()])
    }

    /// Induced connection on the top exterior power: `tr A`.
    pub fn trace(&self) -> Self {
        self.map_patches(1, self.unitary, |a, _| {
            [
                CMatrix::from_fn(1, 1, |_, _| a[0].trace()),
                CMatrix::from_fn(1, 1, |_, _| a[1].trace()),
                CMatrix::from_fn(1, 1, |_, _| a[2].trace()),
            ]
        })
    }

    /// Connection `P^{-1} (d + A) P` for a pointwise invertible change of
    /// frame `P`; `dP` is taken by central differences with step `step`.
    pub fn gauge_transformed(&self, p_of: impl Fn(&Point<T>) -> CMatrix<T> + Send + Sync + 'static, step: T, unitary: bool) -> Self {
        let p_of = Arc::new(p_of);
        self.map_patches(self.rank, unitary, move |a, x| {
            let pm = p_of(x);
            let inv = pm.inverse().expect("gauge transformation must be invertible");
            let mut out = zero3::<T>(pm.rows());
            for axis in 0..3 {
                let dp = derivative_unchecked(
                    |s: T| {
                        let mut y = *x;
                        y[axis] += s;
                        p_of(&y)
                    },
                    T::zero(),
                    step,
                );
                let conj = &(&inv * &a[axis]) * &pm;
                out[axis] = &conj + &(&inv * &dp);
            }
            out
        })
    }
}

/// `sum_a A_a v_a`.
pub fn contract<T: Real>(a: &Coefficients<T>, v: &Point<T>) -> CMatrix<T> {
    let k = a[0].rows();
    CMatrix::from_fn(k, k, |i, j| a[0][(i, j)] * v[0] + a[1][(i, j)] * v[1] + a[2][(i, j)] * v[2])
}

type MetricFn<T> = dyn Fn(&Point<T>, &Point<T>) -> HermitianForm<T> + Send + Sync;

/// Hermitian metric `h(p)` on the trivial bundle. On patched bundles the
/// metric is expressed in the gauge of the patch containing an anchor
/// point, so that difference stencils never switch gauge.
#[derive(Clone)]
pub struct MetricField<T> {
    f: Arc<MetricFn<T>>,
    constant: bool,
}

impl<T> fmt::Debug for MetricField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricField").field("constant", &self.constant).finish_non_exhaustive()
    }
}

impl<T: Real> MetricField<T> {
    pub fn identity(k: usize) -> Self {
        Self::constant(HermitianForm::identity(k))
    }

    pub fn constant(h: HermitianForm<T>) -> Self {
        Self { f: Arc::new(move |_, _| h.clone()), constant: true }
    }

    pub fn varying(f: impl Fn(&Point<T>) -> HermitianForm<T> + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(move |_, p| f(p)), constant: false }
    }

    /// Metric given in the gauge selected by an anchor point:
    /// `f(anchor, p)`.
    pub fn patched(f: impl Fn(&Point<T>, &Point<T>) -> HermitianForm<T> + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f), constant: false }
    }

    pub fn at(&self, p: &Point<T>) -> HermitianForm<T> {
        (self.f)(p, p)
    }

    /// Value at `p` in the gauge used at `anchor`.
    pub fn at_anchored(&self, anchor: &Point<T>, p: &Point<T>) -> HermitianForm<T> {
        (self.f)(anchor, p)
    }

    pub fn is_constant(&self) -> bool {
        self.constant
    }

    pub fn conj(&self) -> Self {
        let f = self.f.clone();
        Self { f: Arc::new(move |a, p| f(a, p).conj()), constant: self.constant }
    }

    /// Induced metric on the top exterior power: `det H`.
    pub fn determinant(&self) -> Self {
        let f = self.f.clone();
        Self {
            f: Arc::new(move |a, p| {
                let d = f(a, p).matrix().det().re;
                HermitianForm::new(CMatrix::from_real_diagonal(&[d])).expect("determinant of a positive form")
            }),
            constant: self.constant,
        }
    }

    /// Metric `h'(u, v) = h(P u, P v)`, i.e. `H' = P^T H conj(P)`.
    pub fn congruent(&self, p_of: impl Fn(&Point<T>) -> CMatrix<T> + Send + Sync + 'static) -> Self {
        let f = self.f.clone();
        Self {
            f: Arc::new(move |a, x| {
                let pm = p_of(x);
                let h = f(a, x);
                let m = &(&pm.transpose() * h.matrix()) * &pm.conj();
                // symmetrize away roundoff
                let sym = CMatrix::from_fn(m.rows(), m.cols(), |i, j| (m[(i, j)] + m[(j, i)].conj()) * T::lit(0.5));
                HermitianForm::new(sym).expect("congruent form stays positive")
            }),
            constant: false,
        }
    }
}

/// Largest relative defect of `d h(X) = h(A(X) ., .) + h(., A(X) .)` over
/// the coordinate directions at `p`. `step` drives the metric derivative.
pub fn unitarity_residual<T: Real>(a: &Coefficients<T>, metric: &MetricField<T>, p: &Point<T>, step: T, axes: usize) -> T {
    let h = metric.at(p);
    let scale = T::one().max(h.matrix().max_abs());
    let mut worst = T::zero();
    for axis in 0..axes {
        let dh = if metric.is_constant() {
            CMatrix::zeros(h.dim(), h.dim())
        } else {
            derivative_unchecked(
                |s: T| {
                    let mut y = *p;
                    y[axis] += s;
                    metric.at_anchored(p, &y).matrix().clone()
                },
                T::zero(),
                step,
            )
        };
        let lhs = &(&a[axis].transpose() * h.matrix()) + &(h.matrix() * &a[axis].conj());
        worst = worst.max(dh.max_abs_diff(&lhs) / scale);
    }
    worst
}

pub(crate) fn not_unitary<T: Real>(residual: T) -> MaslovError {
    MaslovError::NotUnitary { residual: residual.as_f64() }
}

pub(crate) fn i_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

pub(crate) fn check_unitary_at<T: Real>(a: &Coefficients<T>, metric: &MetricField<T>, p: &Point<T>, step: T, axes: usize) -> Result<()> {
    let r = unitarity_residual(a, metric, p, step, axes);
    let limit = if metric.is_constant() { T::tol(1e-10) } else { T::tol(1e-8) };
    if !(r < limit) {
        return Err(not_unitary(r));
    }
    Ok(())
}
