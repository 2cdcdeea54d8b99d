//! Statics and kinematic control of a planar compliant manipulator built
//! from dual-triangle tensegrity segments.
//!
//! Each segment is a pair of rigid triangles joined by a passive revolute
//! joint and preloaded by two linear springs whose free (non-stress) lengths
//! are the control inputs. Shifting the two free lengths symmetrically by a
//! single offset steers the segment to a prescribed joint angle; three such
//! segments in series form a planar arm with one degree of kinematic
//! redundancy over its two task coordinates.
//!
//! The crate is organised bottom-up:
//!
//! - [`segment`] — spring lengths, joint torque, torque slope, equilibrium
//!   roots and their stability for a single segment.
//! - [`control_law`] — the symmetric control offset achieving a desired
//!   angle, with and without an external joint torque.
//! - [`chain`] — forward kinematics, branch-resolved two-link inverse
//!   kinematics and the task Jacobian of the three-segment arm.
//! - [`redundancy`] — redundancy resolution under three objectives,
//!   including the Lagrange / pseudo-inverse least-squares step.
//! - [`load_compensation`] — end-to-end planning: target point and external
//!   tip load in, per-segment control inputs and stability report out.
//!
//! All operations are pure functions of their inputs and are safe to call
//! concurrently.

pub use nalgebra;

pub mod chain;
pub mod control_law;
pub mod load_compensation;
pub mod redundancy;
pub mod segment;

pub use chain::{
    forward_kinematics, inverse_kinematics_branch, jacobian, Branch, ChainConfiguration,
    ChainError, ChainJacobian, PlanarPoint,
};
pub use control_law::{
    loaded_control, symmetric_torque, unloaded_control, ControlError, ControlOffset,
    SymmetricSegmentParams,
};
pub use load_compensation::{
    joint_torques_from_force, plan_loaded, plan_unloaded, verify_plan, ControlInputs, JointTorques,
    LoadedPlan, PlanError, PlanSettings, PlanarLoad, StabilityReport, UnloadedPlan,
};
pub use redundancy::{
    least_squares_step, resolve, resolve_least_squares, resolve_min_max, resolve_min_sum,
    solve_lagrange_system, Objective, RedundancyError, ResolutionRequest, ResolutionResult,
};
pub use segment::{
    joint_torque, monotonicity_margin, rotational_stiffness, solve_equilibria, spring_length,
    torque_slope, EquilibriumOptions, EquilibriumPoint, SegmentError, SegmentGeometry,
    SpringConfig, SpringSide,
};
