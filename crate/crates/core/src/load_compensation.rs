//! End-to-end control pipelines for the three-segment arm.
//!
//! [`plan_unloaded`] resolves a target point to a configuration and converts
//! each joint angle to its control offset. [`plan_loaded`] reuses the same
//! configuration (the load does not change the commanded shape), maps the
//! tip load to joint torques through the transposed Jacobian, and
//! compensates each segment with the loaded control law.
//!
//! Torque bookkeeping follows the convention set in [`crate::control_law`]:
//! the planned joint torques are what the springs must *exert*, so a
//! round-trip through [`crate::segment::solve_equilibria`] applies their
//! negatives as the external torques.

use thiserror::Error;

use crate::chain::{jacobian, ChainConfiguration, PlanarPoint};
use crate::control_law::{loaded_control, unloaded_control, ControlError, SymmetricSegmentParams};
use crate::redundancy::{resolve, Objective, RedundancyError, ResolutionRequest, ResolutionResult};
use crate::segment::{torque_slope, SegmentError, DEFAULT_Q_MAX};

use nalgebra::Vector2;

/// Errors from the planning pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error(transparent)]
    Resolution(#[from] RedundancyError),
    #[error(transparent)]
    Control(#[from] ControlError),
    #[error(transparent)]
    Segment(#[from] SegmentError),
    /// A segment cannot hold its planned angle under the planned torque.
    #[error("segment {segment} is unstable under load (torque slope {slope})")]
    UnstableUnderLoad { segment: usize, slope: f64 },
}

/// External load at the end-effector: a planar force plus an optional tip
/// torque (zero by default).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanarLoad {
    pub fx: f64,
    pub fy: f64,
    pub m_ext_end: f64,
}

impl PlanarLoad {
    pub const ZERO: PlanarLoad = PlanarLoad {
        fx: 0.0,
        fy: 0.0,
        m_ext_end: 0.0,
    };

    pub fn force(fx: f64, fy: f64) -> Self {
        Self {
            fx,
            fy,
            m_ext_end: 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.fx == 0.0 && self.fy == 0.0 && self.m_ext_end == 0.0
    }
}

/// The three symmetric offsets and the six physical free lengths they induce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlInputs {
    pub deltas: [f64; 3],
    /// `free_lengths[i] = [l0 - deltas[i], l0 + deltas[i]]`.
    pub free_lengths: [[f64; 2]; 3],
}

impl ControlInputs {
    /// Builds the six free lengths from the nominal length and offsets.
    /// Offsets must already be range-checked (`|delta| <= l0`).
    fn from_deltas(l0: f64, deltas: [f64; 3]) -> Self {
        Self {
            deltas,
            free_lengths: [
                [l0 - deltas[0], l0 + deltas[0]],
                [l0 - deltas[1], l0 + deltas[1]],
                [l0 - deltas[2], l0 + deltas[2]],
            ],
        }
    }
}

/// Joint torques the three segments must exert.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JointTorques(pub [f64; 3]);

/// Per-segment static check of a plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentCheck {
    pub angle: f64,
    /// `|spring torque - required torque|` at the planned angle.
    pub residual: f64,
    pub torque_slope: f64,
    pub stable: bool,
}

/// Aggregate of the three segment checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub segments: [SegmentCheck; 3],
    pub all_stable: bool,
}

impl StabilityReport {
    pub fn max_residual(&self) -> f64 {
        self.segments.iter().map(|s| s.residual).fold(0.0, f64::max)
    }
}

/// Shared knobs of the planning pipelines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanSettings {
    pub q_max: f64,
    /// Task-space accuracy required of the resolved configuration.
    pub tolerance: f64,
    /// Base-angle scan density for the scanning objectives.
    pub scan_samples: usize,
    /// Iteration cap for the least-squares objective.
    pub max_iterations: usize,
}

impl Default for PlanSettings {
    fn default() -> Self {
        Self {
            q_max: DEFAULT_Q_MAX,
            tolerance: 1e-10,
            scan_samples: 2001,
            max_iterations: 100,
        }
    }
}

impl PlanSettings {
    fn request(
        &self,
        b: f64,
        initial: ChainConfiguration,
        target: PlanarPoint,
        objective: Objective,
    ) -> ResolutionRequest {
        let mut req = ResolutionRequest::new(b, initial, target, objective);
        req.q_max = self.q_max;
        req.tolerance = self.tolerance;
        req.scan_samples = self.scan_samples;
        req.max_iterations = self.max_iterations;
        req
    }
}

/// An unloaded plan: resolved configuration plus the control inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnloadedPlan {
    pub resolution: ResolutionResult,
    pub inputs: ControlInputs,
    /// Set when the segment parameters violate the monotonicity condition.
    pub stability_advisory: bool,
}

impl UnloadedPlan {
    pub fn configuration(&self) -> ChainConfiguration {
        self.resolution.configuration
    }
}

/// A loaded plan: as [`UnloadedPlan`] plus the joint torques compensated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadedPlan {
    pub resolution: ResolutionResult,
    pub inputs: ControlInputs,
    pub torques: JointTorques,
    pub stability_advisory: bool,
}

impl LoadedPlan {
    pub fn configuration(&self) -> ChainConfiguration {
        self.resolution.configuration
    }
}

/// Joint torques required to hold a tip load, via the transposed Jacobian.
/// A tip torque enters every joint identically because the end orientation
/// is the plain sum of the joint angles.
pub fn joint_torques_from_force(
    j: &crate::chain::ChainJacobian,
    load: &PlanarLoad,
) -> JointTorques {
    let generalized = j.transpose_times(Vector2::new(load.fx, load.fy));
    JointTorques([
        generalized.x + load.m_ext_end,
        generalized.y + load.m_ext_end,
        generalized.z + load.m_ext_end,
    ])
}

/// Resolves the target and computes per-segment offsets for the unloaded arm.
pub fn plan_unloaded(
    params: &SymmetricSegmentParams,
    initial: ChainConfiguration,
    target: PlanarPoint,
    objective: Objective,
    settings: &PlanSettings,
) -> Result<UnloadedPlan, PlanError> {
    let resolution = resolve(&settings.request(params.b, initial, target, objective))?;
    let q = resolution.configuration.to_array();
    let mut deltas = [0.0; 3];
    let mut advisory = false;
    for i in 0..3 {
        let offset = unloaded_control(params, q[i])?;
        deltas[i] = offset.delta;
        advisory |= offset.stability_advisory;
    }
    Ok(UnloadedPlan {
        resolution,
        inputs: ControlInputs::from_deltas(params.l0, deltas),
        stability_advisory: advisory,
    })
}

/// Resolves the target exactly as in the unloaded case, then compensates the
/// tip load segment by segment. Fails with [`PlanError::UnstableUnderLoad`]
/// when any compensated segment cannot hold its angle.
pub fn plan_loaded(
    params: &SymmetricSegmentParams,
    initial: ChainConfiguration,
    target: PlanarPoint,
    load: &PlanarLoad,
    objective: Objective,
    settings: &PlanSettings,
) -> Result<LoadedPlan, PlanError> {
    let resolution = resolve(&settings.request(params.b, initial, target, objective))?;
    let q = resolution.configuration.to_array();
    let torques = joint_torques_from_force(&jacobian(params.b, &resolution.configuration), load);

    let geometry = params.geometry();
    let mut deltas = [0.0; 3];
    let mut advisory = false;
    for i in 0..3 {
        let offset = loaded_control(params, q[i], torques.0[i])?;
        deltas[i] = offset.delta;
        advisory |= offset.stability_advisory;
        let slope = torque_slope(&geometry, &params.springs(offset.delta)?, q[i])?;
        if slope >= 0.0 {
            return Err(PlanError::UnstableUnderLoad { segment: i, slope });
        }
    }
    Ok(LoadedPlan {
        resolution,
        inputs: ControlInputs::from_deltas(params.l0, deltas),
        torques,
        stability_advisory: advisory,
    })
}

/// Static check of a plan: per-segment torque residual and stability at the
/// planned angles. Reports, never fails; pass `None` for an unloaded plan.
pub fn verify_plan(
    params: &SymmetricSegmentParams,
    configuration: &ChainConfiguration,
    inputs: &ControlInputs,
    torques: Option<&JointTorques>,
) -> StabilityReport {
    let geometry = params.geometry();
    let q = configuration.to_array();
    let required = torques.map_or([0.0; 3], |t| t.0);
    let mut segments = [SegmentCheck {
        angle: 0.0,
        residual: f64::INFINITY,
        torque_slope: f64::INFINITY,
        stable: false,
    }; 3];
    for i in 0..3 {
        let springs = crate::segment::SpringConfig {
            k1: params.k,
            k2: params.k,
            free_length_1: inputs.free_lengths[i][0],
            free_length_2: inputs.free_lengths[i][1],
        };
        let (residual, slope) = match (
            crate::segment::joint_torque(&geometry, &springs, q[i]),
            torque_slope(&geometry, &springs, q[i]),
        ) {
            (Ok(m), Ok(s)) => ((m - required[i]).abs(), s),
            _ => (f64::INFINITY, f64::INFINITY),
        };
        segments[i] = SegmentCheck {
            angle: q[i],
            residual,
            torque_slope: slope,
            stable: slope < 0.0,
        };
    }
    StabilityReport {
        all_stable: segments.iter().all(|s| s.stable),
        segments,
    }
}
