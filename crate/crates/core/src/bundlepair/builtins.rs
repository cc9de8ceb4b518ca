//! Ready-made pairs with known index.

use std::sync::Arc;

use num_complex::Complex;

use super::connection::{ConnectionField, ConnectionPatch, MetricField};
use super::pair::{BundlePair, Clutching, TotallyRealBoundaryData};
use crate::domain::{build_surface, default_boundary_samples, SurfaceKind};
use crate::error::Result;
use crate::numerics::{CMatrix, Frame};
use crate::scalar::Real;

fn scalar_matrix<T: Real>(z: Complex<T>) -> CMatrix<T> {
    CMatrix::from_fn(1, 1, |_, _| z)
}

/// Trivial line bundle over the unit disk, flat connection, boundary
/// condition spanned by the unit tangent `i e^{i psi}` of the circle.
/// Index 2.
pub fn disk_example<T: Real>(level: usize) -> Result<BundlePair<T>> {
    disk_example_sampled(level, default_boundary_samples(level))
}

/// [`disk_example`] with an explicit number of boundary samples.
pub fn disk_example_sampled<T: Real>(level: usize, samples: usize) -> Result<BundlePair<T>> {
    let surface = Arc::new(build_surface::<T>(SurfaceKind::Disk, level)?.with_boundary_samples(samples));
    let boundary = TotallyRealBoundaryData::new().with_loop(|t: T| {
        let z = Complex::from_polar(T::one(), T::TAU() * t);
        Frame::new(vec![vec![Complex::new(T::zero(), T::one()) * z]]).expect("unit vector")
    });
    BundlePair::new(surface, ConnectionField::flat(1), MetricField::identity(1), boundary)
}

/// Rank-`k` trivial bundle with flat connection and boundary frame
/// `e^{i m psi} (e_1, ..., e_k)` on every loop. Index `2 m k` per loop.
pub fn winding_pair<T: Real>(kind: SurfaceKind<T>, level: usize, rank: usize, m: i64) -> Result<BundlePair<T>> {
    let surface = Arc::new(build_surface::<T>(kind, level)?);
    let mut boundary = TotallyRealBoundaryData::new();
    for _ in surface.boundary_loops() {
        boundary = boundary.with_loop(move |t: T| {
            let z = Complex::from_polar(T::one(), T::TAU() * T::from_i64(m).unwrap() * t);
            Frame::from_columns(&CMatrix::identity(rank).scale(z)).expect("scaled identity")
        });
    }
    BundlePair::new(surface, ConnectionField::flat(rank), MetricField::identity(rank), boundary)
}

/// Constant standard frame on every loop. Index 0.
pub fn constant_pair<T: Real>(kind: SurfaceKind<T>, level: usize, rank: usize) -> Result<BundlePair<T>> {
    winding_pair(kind, level, rank, 0)
}

/// Rank-1 pair over the disk with the non-unitary connection `x dy Id`.
/// `tr R = 1` everywhere; used for trace identities only.
pub fn linear_trace_pair<T: Real>(level: usize, rank: usize) -> Result<BundlePair<T>> {
    let surface = Arc::new(build_surface::<T>(SurfaceKind::Disk, level)?);
    let connection = ConnectionField::general(rank, move |p| {
        [CMatrix::zeros(rank, rank), CMatrix::identity(rank).scale_real(p[0]), CMatrix::zeros(rank, rank)]
    });
    let boundary = TotallyRealBoundaryData::new().with_loop(move |_| Frame::from_columns(&CMatrix::identity(rank)).expect("identity"));
    BundlePair::new(surface, connection, MetricField::identity(rank), boundary)
}

/// Degree-`d` line bundle over the unit sphere, glued from the northern and
/// southern hemispheres with transition `e^{i d phi}` along the equator.
/// `∫ tr R = -2 pi i d`, index `2 d`.
pub fn monopole<T: Real>(level: usize, degree: i64) -> Result<BundlePair<T>> {
    let surface = Arc::new(build_surface::<T>(SurfaceKind::ClosedSphere, level)?);
    let d = T::from_i64(degree).unwrap();
    let half = T::lit(0.5);
    // A_N = -(i d / 2)(x dy - y dx)/(1 + z), A_S = (i d / 2)(x dy - y dx)/(1 - z)
    let north = ConnectionPatch::new(
        |p| p[2] >= T::zero(),
        move |p| {
            let s = -half * d / (T::one() + p[2]);
            [scalar_matrix(Complex::new(T::zero(), -s * p[1])), scalar_matrix(Complex::new(T::zero(), s * p[0])), scalar_matrix(Complex::new(T::zero(), T::zero()))]
        },
    );
    let south = ConnectionPatch::new(
        |_| true,
        move |p| {
            let s = half * d / (T::one() - p[2]);
            [scalar_matrix(Complex::new(T::zero(), -s * p[1])), scalar_matrix(Complex::new(T::zero(), s * p[0])), scalar_matrix(Complex::new(T::zero(), T::zero()))]
        },
    );
    let connection = ConnectionField::patched(1, vec![north, south], true);
    let samples = default_boundary_samples(level);
    BundlePair::new(surface, connection, MetricField::identity(1), TotallyRealBoundaryData::new())?
        .with_clutching(Clutching::new(samples, move |t: T| Complex::from_polar(T::one(), d * T::TAU() * t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundlepair::maslov::{maslov_chern_weil, maslov_topological};
    use crate::domain::QuadratureRule;

    #[test]
    fn disk_example_is_two() {
        let p = disk_example::<f64>(3).unwrap();
        assert_eq!(maslov_topological(&p).unwrap().mu, 2);
        let cw = maslov_chern_weil(&p, &QuadratureRule::default()).unwrap();
        assert!((cw.mu - 2.0).abs() < 1e-6, "{}", cw.mu);
    }

    #[test]
    fn monopole_degree_one() {
        let p = monopole::<f64>(3, 1).unwrap();
        assert_eq!(maslov_topological(&p).unwrap().mu, 2);
        let cw = maslov_chern_weil(&p, &QuadratureRule::default()).unwrap();
        assert!((cw.mu - 2.0).abs() < 1e-2, "{}", cw.mu);
    }
}
