//! Built-in immersed surfaces with known index.

use std::sync::Arc;

use num_complex::Complex;
use rand::Rng;

use super::geometric::{maslov_geometric, pullback_pair, GeometricMaslovReport};
use super::immersion::{circle, latitude_circle, product_torus, real_plane, ImmersedSurface, ImmersionPatch, TotallyRealConstraint};
use super::model::KahlerModel;
use crate::bundlepair::random::rng;
use crate::bundlepair::{BundlePair, Clutching};
use crate::domain::{build_surface, default_boundary_samples, QuadratureRule, SurfaceKind};
use crate::error::Result;
use crate::scalar::{c, Point, Real};

/// Model, immersion and (for surfaces with boundary) constraint.
#[derive(Debug, Clone)]
pub struct GeometricScenario<T> {
    pub name: String,
    pub model: KahlerModel<T>,
    pub immersed: ImmersedSurface<T>,
    pub constraint: Option<TotallyRealConstraint<T>>,
}

impl<T: Real> GeometricScenario<T> {
    pub fn pair(&self) -> Result<BundlePair<T>> {
        pullback_pair(&self.model, &self.immersed, self.constraint.as_ref())
    }

    pub fn report(&self, rule: &QuadratureRule<T>, tolerance: T) -> Result<GeometricMaslovReport<T>> {
        maslov_geometric(&self.model, &self.immersed, self.constraint.as_ref(), rule, tolerance)
    }

    /// Same scenario with every boundary loop resampled.
    pub fn with_boundary_samples(&self, n: usize) -> Self {
        let surface = Arc::new(self.immersed.surface().with_boundary_samples(n));
        Self { immersed: self.immersed.with_surface(surface), ..self.clone() }
    }
}

fn w<T: Real>(p: &Point<T>) -> Complex<T> {
    c(p[0], p[1])
}

/// Stereographic chart from the south pole: `(x + i y) / (1 + z)`.
fn stereo_north<T: Real>(p: &Point<T>) -> Complex<T> {
    w(p) / (T::one() + p[2])
}

/// Stereographic chart from the north pole: `(x - i y) / (1 - z)`.
fn stereo_south<T: Real>(p: &Point<T>) -> Complex<T> {
    w(p).conj() / (T::one() - p[2])
}

fn disk<T: Real>(level: usize) -> Result<Arc<crate::domain::RefSurface<T>>> {
    Ok(Arc::new(build_surface::<T>(SurfaceKind::Disk, level)?))
}

/// Disk of radius `r` in `C` bounded by the circle `|z| = r`. Index 2.
pub fn flat_disk<T: Real>(radius: T, level: usize) -> Result<GeometricScenario<T>> {
    let immersed = ImmersedSurface::from_patch(
        disk(level)?,
        1,
        ImmersionPatch::new(|_| true, move |p: &Point<T>| vec![w(p) * radius])
            .with_jacobian(move |_| [vec![c(radius, T::zero())], vec![c(T::zero(), radius)], vec![c(T::zero(), T::zero())]]),
    );
    Ok(GeometricScenario { name: format!("flat_disk(r={radius})"), model: KahlerModel::flat(1), immersed, constraint: Some(circle(radius)) })
}

/// Disk `z ↦ (r1 z, r2 e^{i a y})` in `C^2` bounded by the torus
/// `|z_1| = r1, |z_2| = r2`. The twist `a` moves the boundary loop inside
/// the torus. Index 2.
pub fn torus_disk_twisted<T: Real>(r1: T, r2: T, twist: T, level: usize) -> Result<GeometricScenario<T>> {
    let immersed = ImmersedSurface::new(disk(level)?, 2, move |p: &Point<T>| vec![w(p) * r1, Complex::from_polar(r2, twist * p[1])]);
    Ok(GeometricScenario {
        name: format!("torus_disk(r1={r1},r2={r2},twist={twist})"),
        model: KahlerModel::flat(2),
        immersed,
        constraint: Some(product_torus(vec![r1, r2])),
    })
}

/// [`torus_disk_twisted`] without twist.
pub fn torus_disk<T: Real>(r1: T, r2: T, level: usize) -> Result<GeometricScenario<T>> {
    torus_disk_twisted(r1, r2, T::zero(), level)
}

/// Torus disk with the interior pushed by `amplitude (1 - |z|^2)^2 q(z) a`,
/// `q` a random affine function and `a` a random unit vector of `C^2`. The
/// boundary is untouched.
pub fn perturbed_torus_disk<T: Real>(r1: T, r2: T, seed: u64, amplitude: T, level: usize) -> Result<GeometricScenario<T>> {
    let mut g = rng(seed);
    let q: [T; 3] = [0; 3].map(|_| T::lit(g.gen_range(-1.0..1.0)));
    let a: [Complex<T>; 2] = [0; 2].map(|_| Complex::from_polar(T::one(), T::lit(g.gen_range(0.0..std::f64::consts::TAU))));
    let scale = amplitude / T::lit(2.0f64.sqrt());
    let immersed = ImmersedSurface::new(disk(level)?, 2, move |p: &Point<T>| {
        let s = T::one() - p[0] * p[0] - p[1] * p[1];
        let b = scale * s * s * (q[0] + q[1] * p[0] + q[2] * p[1]) / T::lit(3.0);
        vec![w(p) * r1 + a[0] * b, c(r2, T::zero()) + a[1] * b]
    });
    Ok(GeometricScenario {
        name: format!("perturbed_torus_disk(seed={seed})"),
        model: KahlerModel::flat(2),
        immersed,
        constraint: Some(product_torus(vec![r1, r2])),
    })
}

/// Real unit disk inside `R^2 ⊂ C^2`. Index 0, `ξ_J = 0`.
pub fn real_plane_disk<T: Real>(level: usize) -> Result<GeometricScenario<T>> {
    let immersed = ImmersedSurface::new(disk(level)?, 2, |p: &Point<T>| vec![c(p[0], T::zero()), c(p[1], T::zero())]);
    Ok(GeometricScenario { name: "real_plane_disk".into(), model: KahlerModel::flat(2), immersed, constraint: Some(real_plane(2)) })
}

fn cap_immersion<T: Real>(colatitude: T, level: usize, bump: Option<(T, [T; 3], T)>) -> Result<ImmersedSurface<T>> {
    let surface = Arc::new(build_surface::<T>(SurfaceKind::SphericalCap { colatitude }, level)?);
    let c0 = colatitude.cos();
    Ok(ImmersedSurface::new(surface, 1, move |p: &Point<T>| {
        let mut z = stereo_north(p);
        if let Some((amp, q, phase)) = bump {
            let s = p[2] - c0;
            z = z + Complex::from_polar(amp * s * s * (q[0] + q[1] * p[0] + q[2] * p[1]) / T::lit(3.0), phase);
        }
        vec![z]
    }))
}

/// Polar cap of the unit sphere up to colatitude `θ0`, bounded by a
/// latitude circle. Index 2.
pub fn sphere_cap<T: Real>(colatitude: T, level: usize) -> Result<GeometricScenario<T>> {
    Ok(GeometricScenario {
        name: format!("sphere_cap(theta0={colatitude})"),
        model: KahlerModel::round_sphere(T::one()),
        immersed: cap_immersion(colatitude, level, None)?,
        constraint: Some(latitude_circle(colatitude, T::one())),
    })
}

/// Northern hemisphere bounded by the equator (a minimal Lagrangian).
pub fn hemisphere<T: Real>(level: usize) -> Result<GeometricScenario<T>> {
    let mut s = sphere_cap(T::FRAC_PI_2(), level)?;
    s.name = "hemisphere".into();
    Ok(s)
}

/// Spherical cap with a seeded interior bump of size `amplitude` in the
/// chart; the boundary circle is untouched.
pub fn perturbed_cap<T: Real>(colatitude: T, seed: u64, amplitude: T, level: usize) -> Result<GeometricScenario<T>> {
    let mut g = rng(seed);
    let q: [T; 3] = [0; 3].map(|_| T::lit(g.gen_range(-1.0..1.0)));
    let phase = T::lit(g.gen_range(0.0..std::f64::consts::TAU));
    Ok(GeometricScenario {
        name: format!("perturbed_cap(seed={seed})"),
        model: KahlerModel::round_sphere(T::one()),
        immersed: cap_immersion(colatitude, level, Some((amplitude, q, phase)))?,
        constraint: Some(latitude_circle(colatitude, T::one())),
    })
}

/// The whole of `CP^1` covered by the charts `z` (northern hemisphere) and
/// `w = 1/z` (southern hemisphere). The chart frames are related by
/// `∂_w = -z^2 ∂_z`. Index 4.
pub fn cp1_closed<T: Real>(level: usize) -> Result<GeometricScenario<T>> {
    let surface = Arc::new(build_surface::<T>(SurfaceKind::ClosedSphere, level)?);
    let north = ImmersionPatch::new(|p: &Point<T>| p[2] >= T::zero(), |p: &Point<T>| vec![stereo_north(p)]);
    let south = ImmersionPatch::new(|_| true, |p: &Point<T>| vec![stereo_south(p)]);
    let clutching = Clutching::new(default_boundary_samples(level), |t: T| -Complex::from_polar(T::one(), T::lit(2.0) * T::TAU() * t));
    let immersed = ImmersedSurface::patched(surface, 1, vec![north, south], Some(clutching));
    Ok(GeometricScenario { name: "cp1_closed".into(), model: KahlerModel::fubini_study(1), immersed, constraint: None })
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 7] = ["flat_disk", "torus_disk", "real_plane_disk", "sphere_cap", "hemisphere", "cp1_closed", "perturbed_torus_disk"];

/// Built-in scenario with default parameters: unit radii, cap at
/// colatitude `π/3`, perturbation seed 0 with amplitude 0.1.
pub fn builtin<T: Real>(name: &str, level: usize) -> Result<GeometricScenario<T>> {
    match name {
        "flat_disk" => flat_disk(T::one(), level),
        "torus_disk" => torus_disk(T::one(), T::one(), level),
        "real_plane_disk" => real_plane_disk(level),
        "sphere_cap" => sphere_cap(T::PI() / T::lit(3.0), level),
        "hemisphere" => hemisphere(level),
        "cp1_closed" => cp1_closed(level),
        "perturbed_torus_disk" => perturbed_torus_disk(T::one(), T::one(), 0, T::lit(0.1), level),
        other => Err(crate::error::MaslovError::UnsupportedInput(format!("unknown scenario '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn flat_disk_routes_agree() {
        let s = flat_disk::<f64>(1.0, 3).unwrap();
        let r = s.report(&QuadratureRule::default(), 1e-3).unwrap();
        assert_eq!(r.report.mu_rounded, 2);
        assert!((r.mu_geometric - 2.0).abs() < 1e-6);
        assert!((r.alpha_l - PI).abs() < 1e-3);
    }

    #[test]
    fn hemisphere_is_two() {
        let s = hemisphere::<f64>(3).unwrap();
        let r = s.report(&QuadratureRule::default(), 1e-2).unwrap();
        assert_eq!(r.report.mu_rounded, 2);
        assert!(r.monotonicity_line.unwrap().abs() < 1e-2);
    }
}
