//! Surfaces immersed in a Kähler chart with totally real boundary.

pub mod geometric;
pub mod immersion;
pub mod model;
pub mod scenarios;

pub use geometric::{
    geodesic_curvature_term, integrate_ricci, integrate_xi, lagrangian_boundary_term, maslov_geometric, monotonicity_from, monotonicity_report,
    pullback_pair, symplectic_area, xi_j, GeometricMaslovReport, MonotonicityReport, ResidualLine, XiSample,
};
pub use immersion::{circle, latitude_circle, liouville, product_torus, real_plane, ImmersedSurface, ImmersionPatch, TotallyRealConstraint};
pub use model::{chern_connection, complex_hessian, connection_along, ricci_form, ricci_matrix, KahlerModel, ModelKind};
pub use scenarios::{builtin, GeometricScenario, BUILTIN_NAMES};
