//! Symmetric control of one segment.
//!
//! For a symmetric segment (both triangles `(a, b)`, both stiffnesses `k`)
//! the two free lengths are driven from a single offset `delta`:
//! `l0 - delta` on the first side and `l0 + delta` on the second. The net
//! joint torque then has the closed form implemented by
//! [`symmetric_torque`], and solving it for `delta` gives the control laws
//! [`unloaded_control`] and [`loaded_control`].
//!
//! # Torque sign convention
//!
//! `loaded_control(p, q, m_ext)` returns the offset for which the springs
//! *exert* the torque `m_ext` at `q`; the segment therefore holds `q`
//! against an applied external torque of `-m_ext`. Round-trips through
//! [`crate::segment::solve_equilibria`] must pass the negated torque.

use thiserror::Error;

use crate::segment::{SegmentError, SegmentGeometry, SpringConfig};

/// Threshold on `cos(q/2)` below which the control laws are singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e-9;

/// Errors from the symmetric control laws.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ControlError {
    #[error("control parameter `{name}` must be positive and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    /// `cos(q/2)` vanishes at the requested angle, so no finite offset exists.
    #[error("control law singular at target angle {q_target} (cos(q/2) below threshold)")]
    ControlSingularity { q_target: f64 },
    /// The required offset would drive a free length negative.
    #[error("control offset {delta} exceeds the nominal free length {l0}")]
    OffsetOutOfRange { delta: f64, l0: f64 },
}

/// Parameters of a symmetric segment: triangle sides `(a, b)`, spring
/// stiffness `k` and nominal free length `l0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricSegmentParams {
    pub a: f64,
    pub b: f64,
    pub k: f64,
    pub l0: f64,
}

impl SymmetricSegmentParams {
    pub fn new(a: f64, b: f64, k: f64, l0: f64) -> Result<Self, ControlError> {
        for (name, value) in [("a", a), ("b", b), ("k", k)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ControlError::InvalidParameter { name, value });
            }
        }
        if !(l0.is_finite() && l0 >= 0.0) {
            return Err(ControlError::InvalidParameter {
                name: "l0",
                value: l0,
            });
        }
        Ok(Self { a, b, k, l0 })
    }

    /// The equivalent general segment geometry.
    pub fn geometry(&self) -> SegmentGeometry {
        SegmentGeometry::symmetric(self.a, self.b).expect("validated at construction")
    }

    /// Spring pair with free lengths `l0 - delta` and `l0 + delta`.
    pub fn springs(&self, delta: f64) -> Result<SpringConfig, SegmentError> {
        SpringConfig::symmetric(self.k, self.l0, delta)
    }

    /// Margin of the single-equilibrium condition for these parameters.
    pub fn monotonicity_margin(&self) -> f64 {
        crate::segment::monotonicity_margin(self.a, self.b, self.l0)
    }
}

/// Control offset for one segment.
///
/// `stability_advisory` is set when the segment parameters violate the
/// monotonicity condition, in which case the commanded equilibrium is not
/// guaranteed to be the only one (or to be stable).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOffset {
    pub delta: f64,
    pub stability_advisory: bool,
}

/// Closed-form net joint torque of a symmetric segment:
/// `2k [ (b^2 - a^2) sin q - l0 b sin(q/2) + delta a cos(q/2) ]`.
///
/// Agrees with [`crate::segment::joint_torque`] on the symmetric geometry for
/// every joint angle inside the interference-free range, i.e. while both
/// inscribed spring angles stay within a half turn.
pub fn symmetric_torque(p: &SymmetricSegmentParams, delta: f64, q: f64) -> f64 {
    2.0 * p.k
        * ((p.b * p.b - p.a * p.a) * q.sin() - p.l0 * p.b * (0.5 * q).sin()
            + delta * p.a * (0.5 * q).cos())
}

fn control_offset(
    p: &SymmetricSegmentParams,
    q_target: f64,
    m_ext: f64,
) -> Result<ControlOffset, ControlError> {
    let half_cos = (0.5 * q_target).cos();
    if half_cos.abs() < SINGULARITY_THRESHOLD {
        return Err(ControlError::ControlSingularity { q_target });
    }
    let delta = (m_ext / (2.0 * p.k) + p.l0 * p.b * (0.5 * q_target).sin()
        - (p.b * p.b - p.a * p.a) * q_target.sin())
        / (p.a * half_cos);
    if delta.abs() > p.l0 {
        return Err(ControlError::OffsetOutOfRange { delta, l0: p.l0 });
    }
    Ok(ControlOffset {
        delta,
        stability_advisory: p.monotonicity_margin() <= 0.0,
    })
}

/// Offset that makes `q_target` an equilibrium of the unloaded segment.
pub fn unloaded_control(
    p: &SymmetricSegmentParams,
    q_target: f64,
) -> Result<ControlOffset, ControlError> {
    control_offset(p, q_target, 0.0)
}

/// Offset that makes the springs exert the torque `m_ext` at `q_target`,
/// holding the angle against an applied external torque of `-m_ext`
/// (see the module-level sign convention).
pub fn loaded_control(
    p: &SymmetricSegmentParams,
    q_target: f64,
    m_ext: f64,
) -> Result<ControlOffset, ControlError> {
    control_offset(p, q_target, m_ext)
}
