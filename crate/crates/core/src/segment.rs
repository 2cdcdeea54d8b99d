//! Statics of a single dual-triangle segment.
//!
//! A segment is two rigid triangles, with side parameters `(a1, b1)` and
//! `(a2, b2)`, joined by a passive revolute joint. Two linear springs span
//! the open sides; their elongation produces a net torque about the joint.
//! The segment rests wherever that torque balances the external torque, and
//! an equilibrium is stable exactly when the torque slope there is negative.

use thiserror::Error;

/// Default joint limit. Keeps configurations away from the control
/// singularity at `cos(q/2) = 0` and from triangle interference.
pub const DEFAULT_Q_MAX: f64 = std::f64::consts::FRAC_PI_2;

/// Errors from single-segment statics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SegmentError {
    /// A constructor argument was nonpositive or non-finite.
    #[error("segment parameter `{name}` must be positive and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    /// A spring's endpoints coincide, so the torque expression divides by zero.
    #[error("spring {side:?} collapses to zero length at joint angle {angle}")]
    DegenerateSpring { side: SpringSide, angle: f64 },
    /// No torque-balance root was bracketed on the scanned interval.
    #[error("no equilibrium found on [-{q_max}, {q_max}] for external torque {m_ext}")]
    NoEquilibrium { q_max: f64, m_ext: f64 },
}

/// Which of the segment's two elastic edges is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpringSide {
    /// The spring whose inscribed angle grows with `q`.
    First,
    /// The spring whose inscribed angle shrinks with `q`.
    Second,
}

/// Triangle side parameters of one segment plus the derived constants used
/// by every statics formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentGeometry {
    a1: f64,
    b1: f64,
    a2: f64,
    b2: f64,
    c1: f64,
    c2: f64,
    beta12: f64,
}

impl SegmentGeometry {
    /// Builds a geometry from the four triangle side parameters.
    pub fn new(a1: f64, b1: f64, a2: f64, b2: f64) -> Result<Self, SegmentError> {
        for (name, value) in [("a1", a1), ("b1", b1), ("a2", a2), ("b2", b2)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(SegmentError::InvalidParameter { name, value });
            }
        }
        Ok(Self {
            a1,
            b1,
            a2,
            b2,
            c1: a1.hypot(b1),
            c2: a2.hypot(b2),
            beta12: (a1 / b1).atan() + (a2 / b2).atan(),
        })
    }

    /// Symmetric segment: both triangles share the parameters `(a, b)`.
    pub fn symmetric(a: f64, b: f64) -> Result<Self, SegmentError> {
        Self::new(a, b, a, b)
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn b1(&self) -> f64 {
        self.b1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    pub fn b2(&self) -> f64 {
        self.b2
    }

    /// Diagonal of the first triangle, `sqrt(a1^2 + b1^2)`.
    pub fn c1(&self) -> f64 {
        self.c1
    }

    /// Diagonal of the second triangle, `sqrt(a2^2 + b2^2)`.
    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// Apex angle sum `atan(a1/b1) + atan(a2/b2)`, in radians.
    pub fn beta12(&self) -> f64 {
        self.beta12
    }

    /// Inscribed spring angle for the given side at joint angle `q`.
    pub fn theta(&self, q: f64, side: SpringSide) -> f64 {
        match side {
            SpringSide::First => self.beta12 + q,
            SpringSide::Second => self.beta12 - q,
        }
    }
}

/// Stiffnesses and free (non-stress) lengths of the two springs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpringConfig {
    pub k1: f64,
    pub k2: f64,
    pub free_length_1: f64,
    pub free_length_2: f64,
}

impl SpringConfig {
    pub fn new(
        k1: f64,
        k2: f64,
        free_length_1: f64,
        free_length_2: f64,
    ) -> Result<Self, SegmentError> {
        for (name, value) in [("k1", k1), ("k2", k2)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(SegmentError::InvalidParameter { name, value });
            }
        }
        for (name, value) in [
            ("free_length_1", free_length_1),
            ("free_length_2", free_length_2),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(SegmentError::InvalidParameter { name, value });
            }
        }
        Ok(Self {
            k1,
            k2,
            free_length_1,
            free_length_2,
        })
    }

    /// Equal stiffness `k` on both sides, free lengths `l0 - delta` and
    /// `l0 + delta`.
    pub fn symmetric(k: f64, l0: f64, delta: f64) -> Result<Self, SegmentError> {
        Self::new(k, k, l0 - delta, l0 + delta)
    }
}

/// One root of the torque-balance equation, tagged with its stability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumPoint {
    /// Joint angle of the root, radians.
    pub q: f64,
    /// Whether perturbations are restored (`torque_slope < 0`).
    pub stable: bool,
    /// Torque derivative with respect to the joint angle at the root.
    pub torque_slope: f64,
}

/// Knobs for [`solve_equilibria`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumOptions {
    /// Joint limit; roots are sought on `[-q_max, q_max]`.
    pub q_max: f64,
    /// Number of scan nodes used to bracket sign changes.
    pub scan_samples: usize,
    /// Bisection stops once the bracket is narrower than this.
    pub refine_tol: f64,
}

impl Default for EquilibriumOptions {
    fn default() -> Self {
        Self {
            q_max: DEFAULT_Q_MAX,
            scan_samples: 2001,
            refine_tol: 1e-12,
        }
    }
}

/// Current length of one spring at joint angle `q`.
///
/// Evaluates `sqrt(c1^2 + c2^2 + 2 c1 c2 cos(theta))` through the
/// cancellation-free equivalent `sqrt((c1-c2)^2 + 4 c1 c2 cos^2(theta/2))`,
/// which stays accurate when the inscribed angle approaches a half turn.
pub fn spring_length(geom: &SegmentGeometry, q: f64, side: SpringSide) -> f64 {
    let half = 0.5 * geom.theta(q, side);
    let c = half.cos();
    let d = geom.c1 - geom.c2;
    (d * d + 4.0 * geom.c1 * geom.c2 * c * c).sqrt()
}

fn checked_length(geom: &SegmentGeometry, q: f64, side: SpringSide) -> Result<f64, SegmentError> {
    let len = spring_length(geom, q, side);
    if len <= 1e-12 * (geom.c1 + geom.c2) {
        return Err(SegmentError::DegenerateSpring { side, angle: q });
    }
    Ok(len)
}

/// Net passive torque of the two springs about the joint at angle `q`.
///
/// The two contributions carry opposite signs because the spring forces act
/// on opposite sides of the joint.
pub fn joint_torque(
    geom: &SegmentGeometry,
    springs: &SpringConfig,
    q: f64,
) -> Result<f64, SegmentError> {
    let l1 = checked_length(geom, q, SpringSide::First)?;
    let l2 = checked_length(geom, q, SpringSide::Second)?;
    let cc = geom.c1 * geom.c2;
    let m1 = springs.k1
        * (1.0 - springs.free_length_1 / l1)
        * cc
        * geom.theta(q, SpringSide::First).sin();
    let m2 = -springs.k2
        * (1.0 - springs.free_length_2 / l2)
        * cc
        * geom.theta(q, SpringSide::Second).sin();
    Ok(m1 + m2)
}

/// Analytic derivative of [`joint_torque`] with respect to `q`.
///
/// Differentiates each spring term through its length, using
/// `dL/dtheta = -c1 c2 sin(theta) / L`.
pub fn torque_slope(
    geom: &SegmentGeometry,
    springs: &SpringConfig,
    q: f64,
) -> Result<f64, SegmentError> {
    let l1 = checked_length(geom, q, SpringSide::First)?;
    let l2 = checked_length(geom, q, SpringSide::Second)?;
    let cc = geom.c1 * geom.c2;
    let th1 = geom.theta(q, SpringSide::First);
    let th2 = geom.theta(q, SpringSide::Second);
    let s1 = springs.k1
        * cc
        * ((1.0 - springs.free_length_1 / l1) * th1.cos()
            - springs.free_length_1 * cc * th1.sin() * th1.sin() / (l1 * l1 * l1));
    let s2 = springs.k2
        * cc
        * ((1.0 - springs.free_length_2 / l2) * th2.cos()
            - springs.free_length_2 * cc * th2.sin() * th2.sin() / (l2 * l2 * l2));
    Ok(s1 + s2)
}

/// Equivalent rotational stiffness of the unloaded segment at `q = 0`,
/// i.e. the negated torque slope there.
pub fn rotational_stiffness(
    geom: &SegmentGeometry,
    springs: &SpringConfig,
) -> Result<f64, SegmentError> {
    Ok(-torque_slope(geom, springs, 0.0)?)
}

/// Margin of the monotonicity condition for a symmetric segment with equal
/// free lengths: `l0 - 2 b (1 - (a/b)^2)`.
///
/// A positive margin guarantees a strictly decreasing torque-angle curve,
/// hence a single stable equilibrium; a negative margin admits multiple
/// equilibria (a bistable, "two-model" curve).
pub fn monotonicity_margin(a: f64, b: f64, l0: f64) -> f64 {
    l0 - 2.0 * b * (1.0 - (a / b) * (a / b))
}

/// Finds every root of `M(q) + m_ext = 0` on `[-q_max, q_max]`.
///
/// Sign changes are bracketed on a dense scan and refined by bisection;
/// each root is tagged stable when the torque slope there is negative.
/// Roots are returned sorted by angle.
///
/// When a spring's inscribed angle crosses a half turn inside the scanned
/// interval (possible for `a > b` geometries), the torque jumps there and a
/// sign change may bracket the jump instead of a root. Refined points are
/// therefore accepted only when the torque balance actually vanishes, and a
/// bracket that collapses onto the fold itself is discarded.
pub fn solve_equilibria(
    geom: &SegmentGeometry,
    springs: &SpringConfig,
    m_ext: f64,
    options: &EquilibriumOptions,
) -> Result<Vec<EquilibriumPoint>, SegmentError> {
    if options.scan_samples < 2 {
        return Err(SegmentError::InvalidParameter {
            name: "scan_samples",
            value: options.scan_samples as f64,
        });
    }
    if !(options.q_max.is_finite() && options.q_max > 0.0) {
        return Err(SegmentError::InvalidParameter {
            name: "q_max",
            value: options.q_max,
        });
    }

    let balance =
        |q: f64| -> Result<f64, SegmentError> { Ok(joint_torque(geom, springs, q)? + m_ext) };

    let n = options.scan_samples;
    let lo = -options.q_max;
    let step = 2.0 * options.q_max / (n - 1) as f64;
    let node = |i: usize| {
        if i == n - 1 {
            options.q_max
        } else {
            lo + i as f64 * step
        }
    };

    let accept_tol = 1e-9 * (springs.k1 + springs.k2) * geom.c1 * geom.c2;
    let mut roots: Vec<f64> = Vec::new();
    let mut prev_q = node(0);
    let mut prev_f = balance(prev_q)?;
    if prev_f == 0.0 {
        roots.push(prev_q);
    }
    for i in 1..n {
        let q = node(i);
        let f = balance(q)?;
        if f == 0.0 {
            roots.push(q);
        } else if prev_f != 0.0 && prev_f.signum() != f.signum() {
            match bisect(&balance, prev_q, prev_f, q, options.refine_tol)
                .and_then(|root| Ok((root, balance(root)?)))
            {
                Ok((root, residual)) if residual.abs() <= accept_tol => roots.push(root),
                Ok(_) => {} // bracketed a torque jump, not a root
                // The bracket closed onto a spring-collapse fold.
                Err(SegmentError::DegenerateSpring { .. }) => {}
                Err(other) => return Err(other),
            }
        }
        prev_q = q;
        prev_f = f;
    }

    roots.sort_by(|x, y| x.partial_cmp(y).expect("roots are finite"));
    roots.dedup_by(|x, y| (*x - *y).abs() <= 4.0 * options.refine_tol);

    if roots.is_empty() {
        return Err(SegmentError::NoEquilibrium {
            q_max: options.q_max,
            m_ext,
        });
    }

    roots
        .into_iter()
        .map(|q| {
            let slope = torque_slope(geom, springs, q)?;
            Ok(EquilibriumPoint {
                q,
                stable: slope < 0.0,
                torque_slope: slope,
            })
        })
        .collect()
}

fn bisect<F>(f: &F, mut lo: f64, mut f_lo: f64, mut hi: f64, tol: f64) -> Result<f64, SegmentError>
where
    F: Fn(f64) -> Result<f64, SegmentError>,
{
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket is at floating-point resolution
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
