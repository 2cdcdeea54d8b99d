//! Redundancy resolution for the three-joint arm.
//!
//! A planar target pins two of the three joint angles, leaving a
//! one-parameter family of solutions indexed by the base angle and the
//! inverse-kinematics branch. Three objectives pick one member:
//!
//! - [`resolve_min_sum`] minimises the total of the joint increments,
//! - [`resolve_min_max`] minimises the largest joint increment,
//! - [`resolve_least_squares`] minimises the sum of squared increments by
//!   iterating the minimum-norm step of the linearised task constraint.
//!
//! The first two scan the base angle densely over both branches and refine
//! the best cell by golden-section search, which tolerates the kinks the
//! absolute-value objectives introduce. The third iterates
//! [`least_squares_step`]; the single linearised step is exact only in the
//! small-displacement limit, so the iterated result is a fixed point of the
//! relinearisation, not a certified global optimum at finite displacements.

use nalgebra::{Matrix2, Matrix5, Vector2, Vector3, Vector5};
use thiserror::Error;

use crate::chain::{
    forward_kinematics, inverse_kinematics_branch, jacobian, Branch, ChainConfiguration,
    ChainJacobian, PlanarPoint,
};
use crate::segment::DEFAULT_Q_MAX;

/// Condition-number ceiling on the 2x2 normal matrix `J J^T` beyond which a
/// configuration is treated as singular. The straight arm is exactly
/// singular (its Jacobian loses a row) and must be rejected, not amplified.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Errors from redundancy resolution.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RedundancyError {
    /// No scanned base angle and branch admits an in-limit solution.
    #[error("target unreachable within joint limits for every scanned base angle")]
    Unreachable,
    /// `J J^T` is too ill-conditioned to invert.
    #[error("singular configuration: normal-matrix condition number {condition:e}")]
    SingularConfiguration { condition: f64 },
    #[error("no convergence within {limit} iterations")]
    MaxIterationsExceeded { limit: usize },
    /// The iteration converged outside the joint limits.
    #[error("converged configuration violates the joint limit {q_max}")]
    JointLimitExceeded { q_max: f64 },
    #[error("request parameter `{name}` must be positive and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
}

/// Which scalar the resolver minimises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Total of the absolute joint increments.
    MinSum,
    /// Largest absolute joint increment.
    MinMax,
    /// Sum of squared joint increments (iterated minimum-norm steps).
    LeastSquares,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::MinSum => "min_sum",
            Objective::MinMax => "min_max",
            Objective::LeastSquares => "least_squares",
        }
    }
}

/// A reach task: move the arm from `initial` so its tip lands on `target`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionRequest {
    /// Triangle base parameter setting the arm's scale.
    pub b: f64,
    pub initial: ChainConfiguration,
    pub target: PlanarPoint,
    pub objective: Objective,
    /// Required task-space accuracy of the returned configuration.
    pub tolerance: f64,
    /// Joint limit applied to all three angles.
    pub q_max: f64,
    /// Base-angle scan density for the scanning objectives.
    pub scan_samples: usize,
    /// Iteration cap for the least-squares objective.
    pub max_iterations: usize,
}

impl ResolutionRequest {
    pub fn new(
        b: f64,
        initial: ChainConfiguration,
        target: PlanarPoint,
        objective: Objective,
    ) -> Self {
        Self {
            b,
            initial,
            target,
            objective,
            tolerance: 1e-10,
            q_max: DEFAULT_Q_MAX,
            scan_samples: 2001,
            max_iterations: 100,
        }
    }

    fn validate(&self) -> Result<(), RedundancyError> {
        for (name, value) in [
            ("b", self.b),
            ("tolerance", self.tolerance),
            ("q_max", self.q_max),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(RedundancyError::InvalidParameter { name, value });
            }
        }
        if self.scan_samples < 2 {
            return Err(RedundancyError::InvalidParameter {
                name: "scan_samples",
                value: self.scan_samples as f64,
            });
        }
        Ok(())
    }
}

/// A resolved configuration plus how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionResult {
    pub configuration: ChainConfiguration,
    /// Value of the chosen objective (radians, or radians squared for the
    /// least-squares objective).
    pub objective_value: f64,
    pub branch_used: Branch,
    /// Golden-section iterations for the scanning objectives; relinearisation
    /// steps for the least-squares objective.
    pub iterations: usize,
}

/// Eigenvalue bounds of the symmetric 2x2 normal matrix, largest first.
fn normal_matrix_eigenvalues(m: &Matrix2<f64>) -> (f64, f64) {
    let half_trace = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let disc = (0.25 * (m[(0, 0)] - m[(1, 1)]).powi(2) + m[(0, 1)] * m[(0, 1)]).sqrt();
    (half_trace + disc, half_trace - disc)
}

fn check_conditioning(j: &ChainJacobian) -> Result<Matrix2<f64>, RedundancyError> {
    let m = j.matrix();
    let normal = m * m.transpose();
    let (hi, lo) = normal_matrix_eigenvalues(&normal);
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !condition.is_finite() || condition > CONDITION_LIMIT {
        return Err(RedundancyError::SingularConfiguration { condition });
    }
    Ok(normal)
}

/// Minimum-norm joint increment solving the linearised task constraint:
/// `dq = J^T (J J^T)^{-1} dp`.
pub fn least_squares_step(
    j: &ChainJacobian,
    dp: Vector2<f64>,
) -> Result<Vector3<f64>, RedundancyError> {
    let normal = check_conditioning(j)?;
    let det = normal[(0, 0)] * normal[(1, 1)] - normal[(0, 1)] * normal[(1, 0)];
    let z = Vector2::new(
        (normal[(1, 1)] * dp.x - normal[(0, 1)] * dp.y) / det,
        (normal[(0, 0)] * dp.y - normal[(1, 0)] * dp.x) / det,
    );
    Ok(j.matrix().transpose() * z)
}

/// Stationary point of the constrained quadratic program, solved as the
/// dense 5x5 block system `[[I, -J^T], [J, 0]] [dq; lambda] = [0; dp]`.
///
/// Returns the joint increment and the two multipliers. The increment equals
/// [`least_squares_step`]'s output; the two routes act as mutual oracles.
pub fn solve_lagrange_system(
    j: &ChainJacobian,
    dp: Vector2<f64>,
) -> Result<(Vector3<f64>, Vector2<f64>), RedundancyError> {
    check_conditioning(j)?;
    let m = j.matrix();
    #[rustfmt::skip]
    let block = Matrix5::new(
        1.0, 0.0, 0.0, -m[(0, 0)], -m[(1, 0)],
        0.0, 1.0, 0.0, -m[(0, 1)], -m[(1, 1)],
        0.0, 0.0, 1.0, -m[(0, 2)], -m[(1, 2)],
        m[(0, 0)], m[(0, 1)], m[(0, 2)], 0.0, 0.0,
        m[(1, 0)], m[(1, 1)], m[(1, 2)], 0.0, 0.0,
    );
    let rhs = Vector5::new(0.0, 0.0, 0.0, dp.x, dp.y);
    let solution = block
        .lu()
        .solve(&rhs)
        .ok_or(RedundancyError::SingularConfiguration {
            condition: f64::INFINITY,
        })?;
    Ok((
        Vector3::new(solution[0], solution[1], solution[2]),
        Vector2::new(solution[3], solution[4]),
    ))
}

/// Dispatches to the resolver matching `req.objective`.
pub fn resolve(req: &ResolutionRequest) -> Result<ResolutionResult, RedundancyError> {
    match req.objective {
        Objective::MinSum => resolve_min_sum(req),
        Objective::MinMax => resolve_min_max(req),
        Objective::LeastSquares => resolve_least_squares(req),
    }
}

/// Minimises the total of the joint increments over both branches.
pub fn resolve_min_sum(req: &ResolutionRequest) -> Result<ResolutionResult, RedundancyError> {
    resolve_by_scan(req, ScanObjective::Sum)
}

/// Minimises the largest joint increment over both branches.
pub fn resolve_min_max(req: &ResolutionRequest) -> Result<ResolutionResult, RedundancyError> {
    resolve_by_scan(req, ScanObjective::Max)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ScanObjective {
    Sum,
    Max,
}

impl ScanObjective {
    fn value(self, dq: [f64; 3]) -> f64 {
        match self {
            ScanObjective::Sum => dq[0].abs() + dq[1].abs() + dq[2].abs(),
            ScanObjective::Max => dq[0].abs().max(dq[1].abs()).max(dq[2].abs()),
        }
    }

    /// Continuous functions of the joint increments whose zero crossings are
    /// the objective's kinks along the base angle. Minima of the scan
    /// objective like to sit exactly on these, between grid nodes.
    fn kink_functions(self) -> &'static [fn([f64; 3]) -> f64] {
        const COMMON: [fn([f64; 3]) -> f64; 3] = [|dq| dq[0], |dq| dq[1], |dq| dq[2]];
        const MAX_EXTRA: [fn([f64; 3]) -> f64; 6] = [
            |dq| dq[0],
            |dq| dq[1],
            |dq| dq[2],
            |dq| dq[0].abs() - dq[1].abs(),
            |dq| dq[0].abs() - dq[2].abs(),
            |dq| dq[1].abs() - dq[2].abs(),
        ];
        match self {
            ScanObjective::Sum => &COMMON,
            ScanObjective::Max => &MAX_EXTRA,
        }
    }
}

#[derive(Clone, Copy)]
struct Candidate {
    value: f64,
    q1: f64,
    branch: Branch,
    configuration: ChainConfiguration,
}

/// Deterministic preference between near-equal candidates: lower value,
/// then smaller base-angle move, then the positive branch.
fn prefer(new: &Candidate, cur: &Candidate, q1_home: f64) -> bool {
    if new.value < cur.value - 1e-12 {
        return true;
    }
    if new.value > cur.value + 1e-12 {
        return false;
    }
    let d_new = (new.q1 - q1_home).abs();
    let d_cur = (cur.q1 - q1_home).abs();
    if d_new < d_cur - 1e-15 {
        return true;
    }
    if d_new > d_cur + 1e-15 {
        return false;
    }
    new.branch == Branch::Positive && cur.branch == Branch::Negative
}

fn resolve_by_scan(
    req: &ResolutionRequest,
    objective: ScanObjective,
) -> Result<ResolutionResult, RedundancyError> {
    req.validate()?;
    let home = req.initial;

    let solved = |q1: f64, branch: Branch| -> Option<(ChainConfiguration, [f64; 3])> {
        if q1.abs() > req.q_max {
            return None;
        }
        let (q2, q3) = inverse_kinematics_branch(req.b, &req.target, q1, branch).ok()?;
        if q2.abs() > req.q_max || q3.abs() > req.q_max {
            return None;
        }
        Some((
            ChainConfiguration::new(q1, q2, q3),
            [q1 - home.q1, q2 - home.q2, q3 - home.q3],
        ))
    };
    let increments = |q1: f64, branch: Branch| solved(q1, branch).map(|(_, dq)| dq);
    let evaluate = |q1: f64, branch: Branch| -> Option<Candidate> {
        let (configuration, dq) = solved(q1, branch)?;
        Some(Candidate {
            value: objective.value(dq),
            q1,
            branch,
            configuration,
        })
    };

    let n = req.scan_samples;
    let step = 2.0 * req.q_max / (n - 1) as f64;
    let node = |i: usize| {
        if i == n - 1 {
            req.q_max
        } else {
            -req.q_max + i as f64 * step
        }
    };

    let mut best: Option<Candidate> = None;
    let mut iterations = 0usize;
    for branch in [Branch::Positive, Branch::Negative] {
        let samples: Vec<Option<[f64; 3]>> = (0..n).map(|i| increments(node(i), branch)).collect();
        let values: Vec<f64> = samples
            .iter()
            .map(|dq| dq.map_or(f64::INFINITY, |dq| objective.value(dq)))
            .collect();

        // Seed refinements from every sampled local minimum (infeasible
        // nodes count as infinite) ...
        let mut seeds: Vec<f64> = Vec::new();
        for i in 0..n {
            if !values[i].is_finite() {
                continue;
            }
            let left_ok = i == 0 || values[i] <= values[i - 1];
            let right_ok = i == n - 1 || values[i] <= values[i + 1];
            if left_ok && right_ok {
                seeds.push(node(i));
            }
        }

        // ... and from every kink: the objective's minima like to sit on the
        // kinks of the absolute values, which fall between grid nodes. Each
        // kink is a zero crossing of a continuous function of the
        // increments, recoverable by bisection.
        for kink in objective.kink_functions() {
            for i in 0..n - 1 {
                let (Some(a), Some(b)) = (samples[i], samples[i + 1]) else {
                    continue;
                };
                let (fa, fb) = (kink(a), kink(b));
                if fa == 0.0 {
                    seeds.push(node(i));
                } else if fb != 0.0 && fa.signum() != fb.signum() {
                    let g = |q1: f64| increments(q1, branch).map(kink);
                    if let Some(root) = bisect_continuous(g, node(i), fa, node(i + 1), 1e-12) {
                        seeds.push(root);
                    }
                }
            }
        }

        // The zero-move base angle anchors the identity task and the
        // tie-breaking rule.
        seeds.push(home.q1.clamp(-req.q_max, req.q_max));

        let scalar = |q1: f64| evaluate(q1, branch).map_or(f64::INFINITY, |c| c.value);
        let mut consider = |candidate: Option<Candidate>| {
            if let Some(c) = candidate {
                match &best {
                    Some(cur) if !prefer(&c, cur, home.q1) => {}
                    _ => best = Some(c),
                }
            }
        };
        for seed in seeds {
            consider(evaluate(seed, branch));
            let lo = (seed - step).max(-req.q_max);
            let hi = (seed + step).min(req.q_max);
            let (q1_refined, value_refined, rounds) = golden_section(scalar, lo, hi, 1e-10);
            iterations += rounds;
            if value_refined.is_finite() {
                consider(evaluate(q1_refined, branch));
            }
        }
    }
    let best = best.ok_or(RedundancyError::Unreachable)?;

    if forward_kinematics(req.b, &best.configuration).distance(&req.target) > req.tolerance {
        return Err(RedundancyError::Unreachable);
    }
    Ok(ResolutionResult {
        configuration: best.configuration,
        objective_value: best.value,
        branch_used: best.branch,
        iterations,
    })
}

/// Bisection for a zero of a continuous scalar over the base angle; returns
/// `None` if an evaluation leaves the feasible set mid-refinement.
fn bisect_continuous<G>(g: G, mut lo: f64, mut g_lo: f64, mut hi: f64, tol: f64) -> Option<f64>
where
    G: Fn(f64) -> Option<f64>,
{
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid)?;
        if g_mid == 0.0 {
            return Some(mid);
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Golden-section minimisation on `[lo, hi]` down to interval width `tol`.
/// Infeasible points evaluate to infinity; the function need only be
/// unimodal on the cell being refined.
fn golden_section<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64, usize)
where
    F: Fn(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 0usize;
    while hi - lo > tol && iterations < 200 {
        iterations += 1;
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    let fm = f(mid);
    let mut out = (mid, fm);
    if f1 < out.1 {
        out = (x1, f1);
    }
    if f2 < out.1 {
        out = (x2, f2);
    }
    (out.0, out.1, iterations)
}

/// Minimises the sum of squared increments by iterating the minimum-norm
/// step until the task residual drops below the request tolerance.
pub fn resolve_least_squares(req: &ResolutionRequest) -> Result<ResolutionResult, RedundancyError> {
    req.validate()?;
    // A singular start is rejected outright, even for the identity task.
    check_conditioning(&jacobian(req.b, &req.initial))?;

    let mut q = req.initial;
    let mut iterations = 0usize;
    loop {
        let tip = forward_kinematics(req.b, &q);
        let residual = Vector2::new(req.target.x - tip.x, req.target.y - tip.y);
        if residual.norm() <= req.tolerance {
            break;
        }
        if iterations >= req.max_iterations {
            return Err(RedundancyError::MaxIterationsExceeded {
                limit: req.max_iterations,
            });
        }
        let step = least_squares_step(&jacobian(req.b, &q), residual)?;
        q = ChainConfiguration::new(q.q1 + step.x, q.q2 + step.y, q.q3 + step.z);
        iterations += 1;
    }

    if q.max_abs() > req.q_max {
        return Err(RedundancyError::JointLimitExceeded { q_max: req.q_max });
    }
    let dq = [
        q.q1 - req.initial.q1,
        q.q2 - req.initial.q2,
        q.q3 - req.initial.q3,
    ];
    Ok(ResolutionResult {
        configuration: q,
        objective_value: dq.iter().map(|d| d * d).sum(),
        branch_used: Branch::of(q.q3),
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn home() -> ChainConfiguration {
        ChainConfiguration::new(-0.1, 0.1, 0.1)
    }

    fn request(target: PlanarPoint, objective: Objective) -> ResolutionRequest {
        ResolutionRequest::new(1.0, home(), target, objective)
    }

    #[test]
    fn identity_task_is_a_fixed_point_for_every_objective() {
        let target = forward_kinematics(1.0, &home());
        for objective in [
            Objective::MinSum,
            Objective::MinMax,
            Objective::LeastSquares,
        ] {
            let result = resolve(&request(target, objective)).unwrap();
            assert!(result.objective_value <= 1e-12, "{objective:?}");
            let q = result.configuration;
            assert!((q.q1 - home().q1).abs() <= 1e-9);
            assert!((q.q2 - home().q2).abs() <= 1e-9);
            assert!((q.q3 - home().q3).abs() <= 1e-9);
            if objective == Objective::LeastSquares {
                assert_eq!(result.iterations, 0);
            }
        }
    }

    #[test]
    fn zero_displacement_step_is_zero() {
        let j = jacobian(1.0, &home());
        let dq = least_squares_step(&j, Vector2::zeros()).unwrap();
        assert_eq!(dq, Vector3::zeros());
        let (dq, lambda) = solve_lagrange_system(&j, Vector2::zeros()).unwrap();
        assert_eq!(dq, Vector3::zeros());
        assert_eq!(lambda, Vector2::zeros());
    }

    #[test]
    fn straight_configuration_is_singular() {
        let j = jacobian(1.0, &ChainConfiguration::new(0.0, 0.0, 0.0));
        let err = least_squares_step(&j, Vector2::new(0.0, 0.1)).unwrap_err();
        assert!(matches!(err, RedundancyError::SingularConfiguration { .. }));
        let err = solve_lagrange_system(&j, Vector2::new(0.0, 0.1)).unwrap_err();
        assert!(matches!(err, RedundancyError::SingularConfiguration { .. }));
        // The identity task still reports the singular start.
        let target = forward_kinematics(1.0, &ChainConfiguration::new(0.0, 0.0, 0.0));
        let req = ResolutionRequest::new(
            1.0,
            ChainConfiguration::new(0.0, 0.0, 0.0),
            target,
            Objective::LeastSquares,
        );
        assert!(matches!(
            resolve_least_squares(&req),
            Err(RedundancyError::SingularConfiguration { .. })
        ));
    }

    #[test]
    fn both_routes_agree_and_satisfy_stationarity() {
        let q = ChainConfiguration::new(0.4, -0.6, 0.8);
        let j = jacobian(1.0, &q);
        let dp = Vector2::new(0.02, -0.015);
        let direct = least_squares_step(&j, dp).unwrap();
        let (block, lambda) = solve_lagrange_system(&j, dp).unwrap();
        for i in 0..3 {
            assert!((direct[i] - block[i]).abs() <= 1e-10);
            // Stationarity: each increment is the multiplier-weighted column.
            let reconstructed = lambda.x * j.entry(0, i) + lambda.y * j.entry(1, i);
            assert!((block[i] - reconstructed).abs() <= 1e-12);
        }
        // The linearised constraint itself.
        let reached = j.matrix() * direct;
        assert!((reached - dp).norm() <= 1e-12 * dp.norm().max(1.0));
    }

    #[test]
    fn minimum_norm_among_null_space_shifts() {
        let q = ChainConfiguration::new(0.3, 0.5, -0.7);
        let j = jacobian(1.0, &q);
        let dp = Vector2::new(-0.03, 0.01);
        let dq = least_squares_step(&j, dp).unwrap();
        let rows = j.matrix();
        let null = Vector3::new(rows[(0, 0)], rows[(0, 1)], rows[(0, 2)]).cross(&Vector3::new(
            rows[(1, 0)],
            rows[(1, 1)],
            rows[(1, 2)],
        ));
        assert!((rows * null).norm() <= 1e-12);
        for t in [-2.0, -0.5, -1e-3, 1e-3, 0.5, 2.0] {
            let shifted = dq + null * t;
            assert!(dq.norm() <= shifted.norm() + 1e-15);
        }
    }

    #[test]
    fn small_reach_converges_in_two_steps() {
        let target_at_home = forward_kinematics(1.0, &home());
        let target = PlanarPoint::new(target_at_home.x - 0.6e-4, target_at_home.y + 0.8e-4);
        let result = resolve_least_squares(&request(target, Objective::LeastSquares)).unwrap();
        assert!(result.iterations <= 2, "iterations {}", result.iterations);
        assert!(forward_kinematics(1.0, &result.configuration).distance(&target) <= 1e-10);
        // The converged move stays within a small multiple of the single
        // linearised step; the residual quantifies the linearisation error.
        let j = jacobian(1.0, &home());
        let step = least_squares_step(
            &j,
            Vector2::new(target.x - target_at_home.x, target.y - target_at_home.y),
        )
        .unwrap();
        let q = result.configuration;
        let total = Vector3::new(q.q1 - home().q1, q.q2 - home().q2, q.q3 - home().q3);
        assert!((total - step).norm() <= 1e-2 * step.norm());
    }

    #[test]
    fn unreachable_scan_reports_unreachable() {
        let err =
            resolve_min_sum(&request(PlanarPoint::new(12.0, 0.0), Objective::MinSum)).unwrap_err();
        assert_eq!(err, RedundancyError::Unreachable);
    }

    #[test]
    fn runaway_iteration_reports_the_limit() {
        let err = resolve_least_squares(&request(
            PlanarPoint::new(12.0, 0.0),
            Objective::LeastSquares,
        ))
        .unwrap_err();
        assert!(matches!(err, RedundancyError::MaxIterationsExceeded { .. }));
    }

    #[test]
    fn negative_branch_only_target_reports_the_branch() {
        // Frozen from a scratch search: reachable within joint limits only
        // with a negative distal angle.
        let target = PlanarPoint::new(-0.7370724033679748, -1.9620354380908842);
        let result = resolve_min_sum(&request(target, Objective::MinSum)).unwrap();
        assert_eq!(result.branch_used, Branch::Negative);
        assert!(result.configuration.q3 <= 0.0);
        assert!(result.configuration.max_abs() <= DEFAULT_Q_MAX);
    }

    #[test]
    fn scan_resolvers_beat_random_feasible_samples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let target = PlanarPoint::new(5.985012495834077 - 0.25, -0.09983341664682815 + 0.35);
        let sum = resolve_min_sum(&request(target, Objective::MinSum)).unwrap();
        let max = resolve_min_max(&request(target, Objective::MinMax)).unwrap();
        for _ in 0..10_000 {
            let q1 = rng.random_range(-DEFAULT_Q_MAX..DEFAULT_Q_MAX);
            let branch = if rng.random_bool(0.5) {
                Branch::Positive
            } else {
                Branch::Negative
            };
            let Ok((q2, q3)) = inverse_kinematics_branch(1.0, &target, q1, branch) else {
                continue;
            };
            if q2.abs() > DEFAULT_Q_MAX || q3.abs() > DEFAULT_Q_MAX {
                continue;
            }
            let dq = [
                (q1 - home().q1).abs(),
                (q2 - home().q2).abs(),
                (q3 - home().q3).abs(),
            ];
            assert!(sum.objective_value <= dq.iter().sum::<f64>() + 1e-6);
            assert!(max.objective_value <= dq.iter().cloned().fold(0.0, f64::max) + 1e-6);
        }
        // The two objectives legitimately disagree on the configuration.
        assert!(sum.objective_value <= max_increment_sum(&max) + 1e-12);
    }

    fn max_increment_sum(result: &ResolutionResult) -> f64 {
        let q = result.configuration;
        (q.q1 - home().q1).abs() + (q.q2 - home().q2).abs() + (q.q3 - home().q3).abs()
    }

    #[test]
    fn removing_a_branch_never_improves_the_scan() {
        let target = PlanarPoint::new(5.7, 0.3);
        let resolved = resolve_min_sum(&request(target, Objective::MinSum)).unwrap();
        for branch in [Branch::Positive, Branch::Negative] {
            let mut best = f64::INFINITY;
            for i in 0..2001 {
                let q1 = -DEFAULT_Q_MAX + i as f64 * (2.0 * DEFAULT_Q_MAX / 2000.0);
                if let Ok((q2, q3)) = inverse_kinematics_branch(1.0, &target, q1, branch) {
                    if q2.abs() <= DEFAULT_Q_MAX && q3.abs() <= DEFAULT_Q_MAX {
                        let v = (q1 - home().q1).abs()
                            + (q2 - home().q2).abs()
                            + (q3 - home().q3).abs();
                        best = best.min(v);
                    }
                }
            }
            assert!(resolved.objective_value <= best + 1e-9);
        }
    }

    #[test]
    fn moderate_reach_converges_near_the_feasible_optimum() {
        // At a displacement of 0.3 b the iterated relinearisation lands close
        // to, but measurably above, the constrained optimum; the envelope
        // below was measured with a dense-scan oracle.
        let target = PlanarPoint::new(
            5.985012495834077 - 0.3 * 0.9578,
            -0.09983341664682815 + 0.3 * 0.2873,
        );
        let result = resolve_least_squares(&request(target, Objective::LeastSquares)).unwrap();
        assert!(forward_kinematics(1.0, &result.configuration).distance(&target) <= 1e-10);

        let mut best = f64::INFINITY;
        for i in 0..=100_000 {
            let q1 = -DEFAULT_Q_MAX + i as f64 * (2.0 * DEFAULT_Q_MAX / 100_000.0);
            for branch in [Branch::Positive, Branch::Negative] {
                if let Ok((q2, q3)) = inverse_kinematics_branch(1.0, &target, q1, branch) {
                    if q2.abs() <= DEFAULT_Q_MAX && q3.abs() <= DEFAULT_Q_MAX {
                        let v = (q1 - home().q1).powi(2)
                            + (q2 - home().q2).powi(2)
                            + (q3 - home().q3).powi(2);
                        best = best.min(v);
                    }
                }
            }
        }
        assert!(result.objective_value >= best - 1e-9);
        assert!(
            result.objective_value <= best + 1e-3,
            "objective {} vs oracle best {best}",
            result.objective_value
        );
    }

    #[test]
    fn small_reach_dominates_random_feasible_samples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let target = PlanarPoint::new(5.985012495834077 - 0.006, -0.09983341664682815 + 0.004);
        let result = resolve_least_squares(&request(target, Objective::LeastSquares)).unwrap();
        for _ in 0..10_000 {
            let q1 = rng.random_range(-DEFAULT_Q_MAX..DEFAULT_Q_MAX);
            let branch = if rng.random_bool(0.5) {
                Branch::Positive
            } else {
                Branch::Negative
            };
            let Ok((q2, q3)) = inverse_kinematics_branch(1.0, &target, q1, branch) else {
                continue;
            };
            if q2.abs() > DEFAULT_Q_MAX || q3.abs() > DEFAULT_Q_MAX {
                continue;
            }
            let v = (q1 - home().q1).powi(2) + (q2 - home().q2).powi(2) + (q3 - home().q3).powi(2);
            assert!(result.objective_value <= v + 1e-6);
        }
    }

    #[test]
    fn resolved_configurations_respect_the_tolerance() {
        for objective in [
            Objective::MinSum,
            Objective::MinMax,
            Objective::LeastSquares,
        ] {
            let target = PlanarPoint::new(5.9, 0.2);
            let result = resolve(&request(target, objective)).unwrap();
            assert!(
                forward_kinematics(1.0, &result.configuration).distance(&target) <= 1e-10,
                "{objective:?}"
            );
            assert!(result.configuration.max_abs() <= DEFAULT_Q_MAX);
        }
    }

    #[test]
    fn golden_section_finds_a_kink_minimum() {
        let (x, v, _) = golden_section(|x: f64| (x - 0.3).abs() + 1.0, 0.0, 1.0, 1e-12);
        assert_relative_eq!(x, 0.3, epsilon = 1e-9);
        assert_relative_eq!(v, 1.0, epsilon = 1e-9);
    }
}
