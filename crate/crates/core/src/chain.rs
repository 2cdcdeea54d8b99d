//! Planar geometry of the three-segment arm.
//!
//! Seen from the task space the arm is a chain of links of lengths
//! `2b`, `2b`, `b` behind a fixed `b` offset along the base axis: each joint
//! sits between the distal half of one segment and the proximal half of the
//! next. Forward kinematics, the two-branch inverse kinematics of the distal
//! pair, and the task Jacobian are all closed-form.

use nalgebra::{Matrix2x3, Vector2, Vector3};
use thiserror::Error;

/// Tolerance for clamping a distal-joint cosine that exceeds 1 in magnitude
/// by floating-point noise; anything beyond is a genuinely unreachable target.
pub const COS_CLAMP_TOL: f64 = 1e-12;

/// Errors from chain kinematics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChainError {
    /// The target lies outside the annulus reachable by the distal two links.
    #[error("target unreachable for the given base angle (distal cosine {cos_q3})")]
    Unreachable { cos_q3: f64 },
}

/// The three joint angles of the arm, radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfiguration {
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
}

impl ChainConfiguration {
    pub fn new(q1: f64, q2: f64, q3: f64) -> Self {
        Self { q1, q2, q3 }
    }

    pub fn from_array(q: [f64; 3]) -> Self {
        Self::new(q[0], q[1], q[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.q1, self.q2, self.q3]
    }

    /// Largest joint magnitude, for joint-limit checks.
    pub fn max_abs(&self) -> f64 {
        self.q1.abs().max(self.q2.abs()).max(self.q3.abs())
    }

    /// End-effector orientation `q1 + q2 + q3`. Reported for convenience;
    /// the task space constrains position only.
    pub fn end_orientation(&self) -> f64 {
        self.q1 + self.q2 + self.q3
    }
}

/// A point (or displacement) in the task plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarPoint {
    pub x: f64,
    pub y: f64,
}

impl PlanarPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &PlanarPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn to_vector(self) -> Vector2<f64> {
        Vector2::new(self.x, self.y)
    }
}

/// Sign choice for the distal joint in the two-link inverse kinematics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Solutions with `q3 >= 0`.
    Positive,
    /// Solutions with `q3 <= 0`.
    Negative,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Positive => 1.0,
            Branch::Negative => -1.0,
        }
    }

    /// The branch a configuration's distal angle belongs to.
    pub fn of(q3: f64) -> Self {
        if q3 >= 0.0 {
            Branch::Positive
        } else {
            Branch::Negative
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Branch::Positive => "+",
            Branch::Negative => "-",
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Task Jacobian `d(x, y) / d(q1, q2, q3)` of the arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainJacobian {
    matrix: Matrix2x3<f64>,
}

impl ChainJacobian {
    pub fn matrix(&self) -> &Matrix2x3<f64> {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.matrix[(row, col)]
    }

    /// Generalized joint torques of a tip force: `J^T f`.
    pub fn transpose_times(&self, force: Vector2<f64>) -> Vector3<f64> {
        self.matrix.transpose() * force
    }
}

/// End-effector position for the given joint angles.
pub fn forward_kinematics(b: f64, q: &ChainConfiguration) -> PlanarPoint {
    let (s1, c1) = q.q1.sin_cos();
    let (s12, c12) = (q.q1 + q.q2).sin_cos();
    let (s123, c123) = (q.q1 + q.q2 + q.q3).sin_cos();
    PlanarPoint::new(
        b + 2.0 * b * c1 + 2.0 * b * c12 + b * c123,
        2.0 * b * s1 + 2.0 * b * s12 + b * s123,
    )
}

/// Solves the distal two joints for a target point, treating the base angle
/// `q1` as known: the classic two-link solution with link lengths `2b`
/// and `b`, with the branch choosing the sign of `q3`.
pub fn inverse_kinematics_branch(
    b: f64,
    target: &PlanarPoint,
    q1: f64,
    branch: Branch,
) -> Result<(f64, f64), ChainError> {
    let wx = target.x - b - 2.0 * b * q1.cos();
    let wy = target.y - 2.0 * b * q1.sin();
    let mut cos_q3 = (wx * wx + wy * wy - 5.0 * b * b) / (4.0 * b * b);
    if cos_q3.abs() > 1.0 + COS_CLAMP_TOL {
        return Err(ChainError::Unreachable { cos_q3 });
    }
    cos_q3 = cos_q3.clamp(-1.0, 1.0);
    let sin_q3 = branch.sign() * (1.0 - cos_q3 * cos_q3).sqrt();
    let q3 = sin_q3.atan2(cos_q3);
    let mut q2 = wy.atan2(wx) - (b * sin_q3).atan2(2.0 * b + b * cos_q3) - q1;
    // wrap into (-pi, pi]
    while q2 > std::f64::consts::PI {
        q2 -= 2.0 * std::f64::consts::PI;
    }
    while q2 <= -std::f64::consts::PI {
        q2 += 2.0 * std::f64::consts::PI;
    }
    Ok((q2, q3))
}

/// Closed-form task Jacobian at the given configuration.
pub fn jacobian(b: f64, q: &ChainConfiguration) -> ChainJacobian {
    let (s1, c1) = q.q1.sin_cos();
    let (s12, c12) = (q.q1 + q.q2).sin_cos();
    let (s123, c123) = (q.q1 + q.q2 + q.q3).sin_cos();
    ChainJacobian {
        matrix: Matrix2x3::new(
            -2.0 * b * s1 - 2.0 * b * s12 - b * s123,
            -2.0 * b * s12 - b * s123,
            -b * s123,
            2.0 * b * c1 + 2.0 * b * c12 + b * c123,
            2.0 * b * c12 + b * c123,
            b * c123,
        ),
    }
}
