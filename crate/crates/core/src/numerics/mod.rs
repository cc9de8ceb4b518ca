//! Complex linear algebra for frames and wedge products, phase tracking and
//! finite differences.

pub mod diff;
pub mod frame;
pub mod linalg;
pub mod phase;

pub use diff::{derivative, second_derivative, Lin};
pub use frame::{gram_matrix, theta_of_velocity, wedge_norm_sq, wedge_pair_derivative, Frame, HermitianForm, Orientation};
pub use linalg::CMatrix;
pub use phase::{winding_number, PhaseTrack};
