//! Reference surfaces, boundary loops and quadrature of differential forms.

pub mod quadrature;
pub mod surface;

pub use quadrature::{integrate_1form, integrate_2form, try_integrate_2form, LoopNode, QuadratureRule, SurfaceNode};
pub use surface::{build_surface, default_boundary_samples, euler_characteristic, BoundaryLoop, RefSurface, SurfaceKind, MAX_REFINEMENT};
