//! Maslov index of bundle pairs over compact oriented surfaces.
//!
//! Three independent routes are provided: the winding of the squared
//! boundary frame determinant, the curvature-plus-boundary integral of a
//! connection, and, for surfaces immersed in a Kähler chart with totally
//! real boundary constraint, the Ricci form plus Maslov 1-form integral.
//!
//! All numerics are generic over the scalar type ([`Real`]: `f32` or `f64`);
//! the `*64` aliases below are what applications normally use.

pub mod ambient;
pub mod bundlepair;
pub mod domain;
pub mod error;
pub mod numerics;
pub mod scalar;

pub use error::{MaslovError, Result};
pub use scalar::{CVec, Point, Real, C};

pub type Frame64 = numerics::Frame<f64>;
pub type HermitianForm64 = numerics::HermitianForm<f64>;
pub type PhaseTrack64 = numerics::PhaseTrack<f64>;
pub type RefSurface64 = domain::RefSurface<f64>;
pub type QuadratureRule64 = domain::QuadratureRule<f64>;
pub type BundlePair64 = bundlepair::BundlePair<f64>;
pub type MaslovReport64 = bundlepair::MaslovReport<f64>;
pub type KahlerModel64 = ambient::KahlerModel<f64>;
pub type ImmersedSurface64 = ambient::ImmersedSurface<f64>;
pub type TotallyRealConstraint64 = ambient::TotallyRealConstraint<f64>;
pub type GeometricMaslovReport64 = ambient::GeometricMaslovReport<f64>;
pub type GeometricScenario64 = ambient::GeometricScenario<f64>;

pub type Frame32 = numerics::Frame<f32>;
pub type RefSurface32 = domain::RefSurface<f32>;
