//! Model-free shape servoing of an elastic rod bent into a spatial arc.
//!
//! The crate covers the whole loop:
//!
//! * [`fitting`] identifies the arc feature `y = [r, p_C, n]` from an
//!   unorganized point cloud (PCA plane + algebraic circle fit).
//! * [`topology`] resolves which way the rod sweeps from its fixed tip and
//!   freezes the rod length.
//! * [`jacobian`] builds the 6x7 pose-shape Jacobian from the implicit
//!   orientation and position constraints, plus a finite-difference oracle.
//! * [`controller`] and [`servo`] close the loop against the deterministic
//!   rod plant in [`simulator`].
//!
//! Everything here is pure computation on values; file formats and the
//! command line live in the `shapeservo` companion crate.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod controller;
pub mod error;
pub mod fitting;
pub mod geometry;
pub mod jacobian;
mod math;
pub mod servo;
pub mod simulator;
pub mod topology;
pub mod validation;

pub use nalgebra;

pub use controller::{ControlOutput, ErrorReport, GainMatrix, ServoTarget, VelocityLimits};
pub use error::{Error, Result};
pub use fitting::{FitResult, PointCloud, ResidualStats};
pub use geometry::{FeatureVector, PoseVector, RobotPose, RotationMatrix, ShapeFeature, UnitVec3, Vec3};
pub use jacobian::{GraspCalibration, JacobianBundle, JacobianOptions};
pub use simulator::{CloudNoiseModel, PlantMode, RodPlant, Winding};
pub use topology::{ArcTopology, TopologyCase};
