//! Named experiments over the mechanism toolkit, each emitting a
//! [`ResultTable`]. Map scenarios never abort on an infeasible cell: the row
//! is kept with an explanatory status and empty numeric cells.

use thiserror::Error;

use dualtri::chain::{forward_kinematics, ChainConfiguration, PlanarPoint};
use dualtri::control_law::{
    loaded_control, unloaded_control, ControlError, SymmetricSegmentParams,
};
use dualtri::load_compensation::{
    plan_loaded, plan_unloaded, verify_plan, LoadedPlan, PlanError, PlanSettings, PlanarLoad,
    UnloadedPlan,
};
use dualtri::redundancy::RedundancyError;
use dualtri::segment::{solve_equilibria, EquilibriumOptions, SegmentError, SpringConfig};

use crate::config::{linspace, ScenarioConfig};
use crate::table::{format_float, ResultTable, Value};

/// `(name, one-line description)` of every scenario the runner knows.
pub const SCENARIOS: &[(&str, &str)] = &[
    (
        "torque_sweep",
        "torque-angle curves with slopes and flagged equilibria for each (l0, delta) case",
    ),
    (
        "control_map",
        "control offset versus target angle, optionally compensated for a joint torque",
    ),
    (
        "reach",
        "redundancy-resolved configurations and control inputs over a target list or grid",
    ),
    (
        "loaded_reach",
        "reach under a tip load: joint torques, compensated offsets, stability round-trip",
    ),
];

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("unknown scenario `{0}`; see `list-scenarios`")]
    Unknown(String),
    #[error("scenario `{0}` is not configured in this file")]
    MissingSection(&'static str),
    #[error("internal numerical failure: {0}")]
    Numerical(String),
}

/// Dispatches a named scenario.
pub fn run_scenario(name: &str, cfg: &ScenarioConfig) -> Result<ResultTable, ScenarioError> {
    match name {
        "torque_sweep" => run_torque_sweep(cfg),
        "control_map" => run_control_map(cfg),
        "reach" => run_reach(cfg),
        "loaded_reach" => run_loaded_reach(cfg),
        other => Err(ScenarioError::Unknown(other.to_string())),
    }
}

fn params(cfg: &ScenarioConfig) -> Result<SymmetricSegmentParams, ScenarioError> {
    SymmetricSegmentParams::new(
        cfg.mechanism.a,
        cfg.mechanism.b(),
        cfg.mechanism.k(),
        cfg.mechanism.l0,
    )
    .map_err(|e| ScenarioError::Numerical(e.to_string()))
}

fn mechanism_metadata(table: &mut ResultTable, cfg: &ScenarioConfig) {
    table.meta("tool", format!("dualtri-cli {}", env!("CARGO_PKG_VERSION")));
    table.meta(
        "units",
        if cfg.mechanism.dimensionless() {
            "dimensionless (lengths in b, torques in k*b^2)"
        } else {
            "absolute"
        },
    );
    table.meta_float("a", cfg.mechanism.a);
    table.meta_float("b", cfg.mechanism.b());
    table.meta_float("k", cfg.mechanism.k());
    table.meta_float("l0", cfg.mechanism.l0);
    table.meta_float("q_max", cfg.mechanism.q_max());
}

fn plan_status(err: &PlanError) -> &'static str {
    match err {
        PlanError::Resolution(RedundancyError::Unreachable) => "unreachable",
        PlanError::Resolution(RedundancyError::SingularConfiguration { .. }) => "singular",
        PlanError::Resolution(RedundancyError::MaxIterationsExceeded { .. }) => "max_iterations",
        PlanError::Resolution(RedundancyError::JointLimitExceeded { .. }) => "joint_limit",
        PlanError::Resolution(RedundancyError::InvalidParameter { .. }) => "invalid",
        PlanError::Control(ControlError::ControlSingularity { .. }) => "control_singularity",
        PlanError::Control(ControlError::OffsetOutOfRange { .. }) => "offset_out_of_range",
        PlanError::Control(ControlError::InvalidParameter { .. }) => "invalid",
        PlanError::Segment(SegmentError::DegenerateSpring { .. }) => "degenerate",
        PlanError::Segment(SegmentError::NoEquilibrium { .. }) => "no_equilibrium",
        PlanError::Segment(SegmentError::InvalidParameter { .. }) => "invalid",
        PlanError::UnstableUnderLoad { .. } => "unstable_under_load",
    }
}

/// Torque-angle curves for each `(l0, delta)` case, with the analytic slope
/// and the rows nearest each equilibrium flagged.
pub fn run_torque_sweep(cfg: &ScenarioConfig) -> Result<ResultTable, ScenarioError> {
    let sweep = cfg
        .torque_sweep
        .as_ref()
        .ok_or(ScenarioError::MissingSection("torque_sweep"))?;
    let p = params(cfg)?;
    let geometry = p.geometry();

    let mut table = ResultTable::new(
        "torque_sweep",
        &[
            "case",
            "l0",
            "delta",
            "q",
            "torque",
            "slope",
            "near_equilibrium",
            "status",
        ],
    );
    mechanism_metadata(&mut table, cfg);
    table.meta_float("q_start", sweep.q_start);
    table.meta_float("q_end", sweep.q_end);
    table.meta("samples", sweep.samples.to_string());

    let nodes = linspace(sweep.q_start, sweep.q_end, sweep.samples);
    let step = (sweep.q_end - sweep.q_start) / (sweep.samples - 1) as f64;

    for (index, case) in sweep.cases.iter().enumerate() {
        let l0 = case.l0.unwrap_or(cfg.mechanism.l0);
        let springs = SpringConfig::symmetric(p.k, l0, case.delta)
            .map_err(|e| ScenarioError::Numerical(e.to_string()))?;

        let options = EquilibriumOptions {
            q_max: sweep.q_start.abs().max(sweep.q_end.abs()),
            ..EquilibriumOptions::default()
        };
        let roots = match solve_equilibria(&geometry, &springs, 0.0, &options) {
            Ok(roots) => roots
                .into_iter()
                .filter(|r| r.q >= sweep.q_start - 0.5 * step && r.q <= sweep.q_end + 0.5 * step)
                .collect(),
            Err(SegmentError::NoEquilibrium { .. }) => Vec::new(),
            Err(e) => return Err(ScenarioError::Numerical(e.to_string())),
        };
        let described: Vec<String> = roots
            .iter()
            .map(|r| {
                format!(
                    "q={} ({})",
                    format_float(r.q),
                    if r.stable { "stable" } else { "unstable" }
                )
            })
            .collect();
        table.meta(
            format!("case{index}.equilibria"),
            if described.is_empty() {
                "none".to_string()
            } else {
                described.join("; ")
            },
        );

        for &q in &nodes {
            let near = roots.iter().any(|r| (r.q - q).abs() <= 0.5 * step) as i64;
            match (
                dualtri::segment::joint_torque(&geometry, &springs, q),
                dualtri::segment::torque_slope(&geometry, &springs, q),
            ) {
                (Ok(torque), Ok(slope)) => table.push_row(vec![
                    Value::Int(index as i64),
                    Value::Float(l0),
                    Value::Float(case.delta),
                    Value::Float(q),
                    Value::Float(torque),
                    Value::Float(slope),
                    Value::Int(near),
                    Value::text("ok"),
                ]),
                _ => table.push_row(vec![
                    Value::Int(index as i64),
                    Value::Float(l0),
                    Value::Float(case.delta),
                    Value::Float(q),
                    Value::Empty,
                    Value::Empty,
                    Value::Int(0),
                    Value::text("degenerate"),
                ]),
            }
        }
    }
    Ok(table)
}

/// Control offset versus target angle; a compensated column is added when
/// the config requests an external joint torque.
pub fn run_control_map(cfg: &ScenarioConfig) -> Result<ResultTable, ScenarioError> {
    let map = cfg
        .control_map
        .as_ref()
        .ok_or(ScenarioError::MissingSection("control_map"))?;
    let p = params(cfg)?;

    let mut columns = vec!["q", "delta"];
    if map.m_ext.is_some() {
        columns.push("delta_loaded");
    }
    columns.push("status");
    let mut table = ResultTable::new("control_map", &columns);
    mechanism_metadata(&mut table, cfg);
    table.meta_float("q_start", map.q_start);
    table.meta_float("q_end", map.q_end);
    table.meta("samples", map.samples.to_string());
    if let Some(m) = map.m_ext {
        table.meta_float("m_ext", m);
    }

    for q in linspace(map.q_start, map.q_end, map.samples) {
        let mut row = vec![Value::Float(q)];
        let mut status = "ok";
        match unloaded_control(&p, q) {
            Ok(offset) => row.push(Value::Float(offset.delta)),
            Err(e) => {
                status = control_status(&e);
                row.push(Value::Empty);
            }
        }
        if let Some(m_ext) = map.m_ext {
            match loaded_control(&p, q, m_ext) {
                Ok(offset) => row.push(Value::Float(offset.delta)),
                Err(e) => {
                    if status == "ok" {
                        status = control_status(&e);
                    }
                    row.push(Value::Empty);
                }
            }
        }
        row.push(Value::text(status));
        table.push_row(row);
    }
    Ok(table)
}

fn control_status(err: &ControlError) -> &'static str {
    match err {
        ControlError::ControlSingularity { .. } => "control_singularity",
        ControlError::OffsetOutOfRange { .. } => "offset_out_of_range",
        ControlError::InvalidParameter { .. } => "invalid",
    }
}

const REACH_COLUMNS: &[&str] = &[
    "x",
    "y",
    "status",
    "q1",
    "q2",
    "q3",
    "objective_value",
    "branch",
    "iterations",
    "delta1",
    "delta2",
    "delta3",
    "l11",
    "l12",
    "l21",
    "l22",
    "l31",
    "l32",
    "stable",
    "advisory",
    "max_residual",
];

fn empty_reach_row(target: [f64; 2], status: &'static str, extra: usize) -> Vec<Value> {
    let mut row = vec![
        Value::Float(target[0]),
        Value::Float(target[1]),
        Value::text(status),
    ];
    row.extend(std::iter::repeat_with(|| Value::Empty).take(REACH_COLUMNS.len() - 3 + extra));
    row
}

fn reach_targets(
    q0: [f64; 3],
    b: f64,
    targets: &Option<Vec<[f64; 2]>>,
    grid: &Option<crate::config::GridConfig>,
) -> Vec<[f64; 2]> {
    if let Some(t) = targets {
        return t.clone();
    }
    let grid = grid.as_ref().expect("validated: targets or grid");
    let center = grid.center.unwrap_or_else(|| {
        let p = forward_kinematics(b, &ChainConfiguration::from_array(q0));
        [p.x, p.y]
    });
    grid.nodes(center)
}

fn push_unloaded_fields(row: &mut Vec<Value>, p: &SymmetricSegmentParams, plan: &UnloadedPlan) {
    let q = plan.configuration();
    let report = verify_plan(p, &q, &plan.inputs, None);
    push_common_fields(
        row,
        plan.resolution,
        plan.inputs.deltas,
        plan.inputs.free_lengths,
    );
    row.push(Value::Int(report.all_stable as i64));
    row.push(Value::Int(plan.stability_advisory as i64));
    row.push(Value::Float(report.max_residual()));
}

fn push_common_fields(
    row: &mut Vec<Value>,
    resolution: dualtri::redundancy::ResolutionResult,
    deltas: [f64; 3],
    free_lengths: [[f64; 2]; 3],
) {
    let q = resolution.configuration;
    row.extend([
        Value::Float(q.q1),
        Value::Float(q.q2),
        Value::Float(q.q3),
        Value::Float(resolution.objective_value),
        Value::text(resolution.branch_used.symbol()),
        Value::Int(resolution.iterations as i64),
    ]);
    row.extend(deltas.map(Value::Float));
    for pair in free_lengths {
        row.extend(pair.map(Value::Float));
    }
}

/// Redundancy-resolved reach over a target list or grid, unloaded.
pub fn run_reach(cfg: &ScenarioConfig) -> Result<ResultTable, ScenarioError> {
    let reach = cfg
        .reach
        .as_ref()
        .ok_or(ScenarioError::MissingSection("reach"))?;
    let p = params(cfg)?;
    let settings = PlanSettings {
        q_max: cfg.mechanism.q_max(),
        tolerance: reach.tolerance.unwrap_or(1e-10),
        ..PlanSettings::default()
    };
    let q0 = ChainConfiguration::from_array(reach.q0);

    let mut table = ResultTable::new("reach", REACH_COLUMNS);
    mechanism_metadata(&mut table, cfg);
    table.meta("objective", objective_label(reach.objective));
    table.meta(
        "q0",
        format!(
            "[{}, {}, {}]",
            format_float(reach.q0[0]),
            format_float(reach.q0[1]),
            format_float(reach.q0[2])
        ),
    );
    table.meta_float("tolerance", settings.tolerance);

    for target in reach_targets(reach.q0, p.b, &reach.targets, &reach.grid) {
        let point = PlanarPoint::new(target[0], target[1]);
        match plan_unloaded(&p, q0, point, reach.objective.to_objective(), &settings) {
            Ok(plan) => {
                let mut row = vec![
                    Value::Float(target[0]),
                    Value::Float(target[1]),
                    Value::text("ok"),
                ];
                push_unloaded_fields(&mut row, &p, &plan);
                table.push_row(row);
            }
            Err(err) => table.push_row(empty_reach_row(target, plan_status(&err), 0)),
        }
    }
    Ok(table)
}

/// Reach under a tip load: adds the joint torques and a per-row equilibrium
/// round-trip residual to the unloaded columns.
pub fn run_loaded_reach(cfg: &ScenarioConfig) -> Result<ResultTable, ScenarioError> {
    let reach = cfg
        .loaded_reach
        .as_ref()
        .ok_or(ScenarioError::MissingSection("loaded_reach"))?;
    let p = params(cfg)?;
    let settings = PlanSettings {
        q_max: cfg.mechanism.q_max(),
        tolerance: reach.tolerance.unwrap_or(1e-10),
        ..PlanSettings::default()
    };
    let q0 = ChainConfiguration::from_array(reach.q0);
    let load = PlanarLoad {
        fx: reach.force[0],
        fy: reach.force[1],
        m_ext_end: reach.m_ext_end.unwrap_or(0.0),
    };

    let columns: Vec<&str> = REACH_COLUMNS
        .iter()
        .copied()
        .chain(["mq1", "mq2", "mq3", "roundtrip_residual"])
        .collect();
    let mut table = ResultTable::new("loaded_reach", &columns);
    mechanism_metadata(&mut table, cfg);
    table.meta("objective", objective_label(reach.objective));
    table.meta(
        "q0",
        format!(
            "[{}, {}, {}]",
            format_float(reach.q0[0]),
            format_float(reach.q0[1]),
            format_float(reach.q0[2])
        ),
    );
    table.meta_float("tolerance", settings.tolerance);
    table.meta(
        "force",
        format!("[{}, {}]", format_float(load.fx), format_float(load.fy)),
    );
    table.meta_float("m_ext_end", load.m_ext_end);

    for target in reach_targets(reach.q0, p.b, &reach.targets, &reach.grid) {
        let point = PlanarPoint::new(target[0], target[1]);
        match plan_loaded(
            &p,
            q0,
            point,
            &load,
            reach.objective.to_objective(),
            &settings,
        ) {
            Ok(plan) => {
                let mut row = vec![
                    Value::Float(target[0]),
                    Value::Float(target[1]),
                    Value::text("ok"),
                ];
                push_loaded_fields(&mut row, &p, &plan);
                table.push_row(row);
            }
            Err(err) => table.push_row(empty_reach_row(target, plan_status(&err), 4)),
        }
    }
    Ok(table)
}

fn push_loaded_fields(row: &mut Vec<Value>, p: &SymmetricSegmentParams, plan: &LoadedPlan) {
    let q = plan.configuration();
    let report = verify_plan(p, &q, &plan.inputs, Some(&plan.torques));
    push_common_fields(
        row,
        plan.resolution,
        plan.inputs.deltas,
        plan.inputs.free_lengths,
    );
    row.push(Value::Int(report.all_stable as i64));
    row.push(Value::Int(plan.stability_advisory as i64));
    row.push(Value::Float(report.max_residual()));
    row.extend(plan.torques.0.map(Value::Float));

    // Round-trip: feed the free lengths back through the equilibrium solver
    // under the negated exerted torque and measure the recovered angle.
    let geometry = p.geometry();
    let options = EquilibriumOptions::default();
    let mut worst = 0.0f64;
    let mut failed = false;
    for i in 0..3 {
        let springs = SpringConfig {
            k1: p.k,
            k2: p.k,
            free_length_1: plan.inputs.free_lengths[i][0],
            free_length_2: plan.inputs.free_lengths[i][1],
        };
        let planned = q.to_array()[i];
        match solve_equilibria(&geometry, &springs, -plan.torques.0[i], &options) {
            Ok(roots) => {
                let nearest = roots
                    .iter()
                    .map(|r| (r.q - planned).abs())
                    .fold(f64::INFINITY, f64::min);
                worst = worst.max(nearest);
            }
            Err(_) => failed = true,
        }
    }
    if failed {
        row.push(Value::Empty);
    } else {
        row.push(Value::Float(worst));
    }
}

fn objective_label(name: crate::config::ObjectiveName) -> &'static str {
    name.to_objective().name()
}
