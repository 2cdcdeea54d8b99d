//! End-to-end consistency of the planning pipelines: plan, free lengths,
//! equilibrium recovery, stability.

use dualtri::chain::{forward_kinematics, jacobian, ChainConfiguration, PlanarPoint};
use dualtri::control_law::SymmetricSegmentParams;
use dualtri::load_compensation::{
    joint_torques_from_force, plan_loaded, plan_unloaded, verify_plan, PlanSettings, PlanarLoad,
};
use dualtri::redundancy::Objective;
use dualtri::segment::{solve_equilibria, EquilibriumOptions};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params() -> SymmetricSegmentParams {
    SymmetricSegmentParams::new(1.1, 1.0, 1.0, 0.7).unwrap()
}

fn home() -> ChainConfiguration {
    ChainConfiguration::new(-0.1, 0.1, 0.1)
}

fn random_target(rng: &mut ChaCha8Rng, radius: f64) -> PlanarPoint {
    let p0 = forward_kinematics(1.0, &home());
    let angle: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let r: f64 = rng.random_range(0.0..radius);
    PlanarPoint::new(p0.x + r * angle.cos(), p0.y + r * angle.sin())
}

#[test]
fn planned_angles_are_recovered_by_the_equilibrium_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(1212);
    let settings = PlanSettings::default();
    let options = EquilibriumOptions::default();
    let mut done = 0;
    while done < 40 {
        let target = random_target(&mut rng, 0.25);
        let force_angle: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let force_mag: f64 = rng.random_range(0.0..0.05);
        let load = PlanarLoad::force(force_mag * force_angle.cos(), force_mag * force_angle.sin());
        let objective = if done % 2 == 0 {
            Objective::MinSum
        } else {
            Objective::MinMax
        };
        let Ok(unloaded) = plan_unloaded(&params(), home(), target, objective, &settings) else {
            continue;
        };
        let Ok(loaded) = plan_loaded(&params(), home(), target, &load, objective, &settings) else {
            continue;
        };
        let geometry = params().geometry();
        for i in 0..3 {
            // Unloaded recovery.
            let planned = unloaded.configuration().to_array()[i];
            let springs = params().springs(unloaded.inputs.deltas[i]).unwrap();
            let roots = solve_equilibria(&geometry, &springs, 0.0, &options).unwrap();
            let hit = roots.iter().find(|r| (r.q - planned).abs() <= 1e-8);
            assert!(hit.is_some_and(|r| r.stable), "unloaded segment {i}");

            // Loaded recovery: the springs exert the planned torque, so the
            // applied external torque is its negative.
            let planned = loaded.configuration().to_array()[i];
            let springs = params().springs(loaded.inputs.deltas[i]).unwrap();
            let roots =
                solve_equilibria(&geometry, &springs, -loaded.torques.0[i], &options).unwrap();
            let hit = roots.iter().find(|r| (r.q - planned).abs() <= 1e-8);
            assert!(hit.is_some_and(|r| r.stable), "loaded segment {i}");
        }
        done += 1;
    }
}

#[test]
fn zero_load_plan_is_field_identical_to_the_unloaded_plan() {
    let mut rng = ChaCha8Rng::seed_from_u64(1313);
    let settings = PlanSettings::default();
    for _ in 0..20 {
        let target = random_target(&mut rng, 0.3);
        let Ok(unloaded) = plan_unloaded(&params(), home(), target, Objective::MinSum, &settings)
        else {
            continue;
        };
        let loaded = plan_loaded(
            &params(),
            home(),
            target,
            &PlanarLoad::ZERO,
            Objective::MinSum,
            &settings,
        )
        .unwrap();
        assert_eq!(loaded.resolution, unloaded.resolution);
        assert_eq!(loaded.inputs, unloaded.inputs);
        assert_eq!(loaded.torques.0, [0.0; 3]);
        assert_eq!(loaded.stability_advisory, unloaded.stability_advisory);
    }
}

#[test]
fn free_length_pairs_always_sum_to_twice_the_nominal() {
    let mut rng = ChaCha8Rng::seed_from_u64(1414);
    let settings = PlanSettings::default();
    for _ in 0..20 {
        let target = random_target(&mut rng, 0.35);
        let Ok(plan) = plan_unloaded(&params(), home(), target, Objective::MinMax, &settings)
        else {
            continue;
        };
        for side in plan.inputs.free_lengths {
            assert_eq!(side[0] + side[1], 2.0 * params().l0);
        }
    }
}

#[test]
fn virtual_work_identity_holds_for_random_loads() {
    let mut rng = ChaCha8Rng::seed_from_u64(1515);
    for _ in 0..50 {
        let q = ChainConfiguration::new(
            rng.random_range(-1.5..1.5),
            rng.random_range(-1.5..1.5),
            rng.random_range(-1.5..1.5),
        );
        let j = jacobian(1.0, &q);
        let load = PlanarLoad::force(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let torques = joint_torques_from_force(&j, &load);
        let dq = nalgebra::Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let joint_work = torques.0[0] * dq.x + torques.0[1] * dq.y + torques.0[2] * dq.z;
        let tip = j.matrix() * dq;
        let force_work = load.fx * tip.x + load.fy * tip.y;
        assert!(
            (joint_work - force_work).abs() <= 1e-12 * joint_work.abs().max(1.0),
            "virtual work mismatch: {joint_work} vs {force_work}"
        );
    }
}

#[test]
fn verify_plan_matches_the_pipeline_outputs() {
    let settings = PlanSettings::default();
    let target = PlanarPoint::new(5.9, 0.2);
    let load = PlanarLoad::force(0.02, -0.04);

    let unloaded = plan_unloaded(&params(), home(), target, Objective::MinSum, &settings).unwrap();
    let report = verify_plan(&params(), &unloaded.configuration(), &unloaded.inputs, None);
    assert!(report.all_stable);
    assert!(report.max_residual() <= 1e-10);

    let loaded = plan_loaded(
        &params(),
        home(),
        target,
        &load,
        Objective::MinSum,
        &settings,
    )
    .unwrap();
    let report = verify_plan(
        &params(),
        &loaded.configuration(),
        &loaded.inputs,
        Some(&loaded.torques),
    );
    assert!(report.all_stable);
    assert!(report.max_residual() <= 1e-10);
}
