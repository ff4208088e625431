//! Rigid multiview geometry: cameras, Cramer triangulation, distance
//! constraints on image pairs, and exact polynomial-space checks.

pub mod camera;
pub mod chow;
pub mod constraints;
pub mod error;
pub mod forms;
pub mod harness;
pub mod linalg;
pub mod polyspace;
pub mod scalar;
pub mod tolerance;
pub mod triangulate;

pub use camera::{Camera, CameraRig, ImageTuple, ProjectivePoint, RigidMotion};
pub use error::{Error, Result};
pub use linalg::{Mat, RankReport};
pub use scalar::{Rational, Scalar};
pub use tolerance::Tolerances;
