//! Abstract bundle pairs in a fixed trivialization and their Maslov index by
//! the Chern-Weil formula and by boundary winding.

pub mod builtins;
pub mod connection;
pub mod maslov;
pub mod pair;
pub mod random;
pub mod report;

pub use connection::{contract, unitarity_residual, Coefficients, ConnectionField, ConnectionPatch, MetricField};
pub use maslov::{
    boundary_theta, curvature_trace, curvature_trace_on, determinant_samples, frame_loop_winding, integrate_curvature_trace, integrate_theta,
    maslov_chern_weil, maslov_topological, trace_wedge_residual, ChernWeil, ThetaSample, Topological,
};
pub use pair::{BundlePair, Clutching, TotallyRealBoundaryData};
pub use report::{maslov_report, MaslovReport, Route};
