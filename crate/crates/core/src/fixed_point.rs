//! Numerical analysis of the map `x -> exp(-C x)` that governs the local
//! uniformity statistics: its fixed point, the root of `x = exp(1/x)`, and the
//! perturbed interval iteration used to bound how fast per-vertex statistics
//! settle into an envelope around the fixed point.
//!
//! Everything here is bisection and monotone interval arithmetic in `f64`;
//! the verified inequalities carry slack far above 1e-10 away from degenerate
//! corners, which the sweep grids exclude.

use std::fmt;

/// Absolute tolerance for all bisections.
pub const BISECTION_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum FixedPointError {
    InvalidParameter(String),
    /// Containment not reached within 10x the predicted step count; signals
    /// violated preconditions or numerical trouble.
    NotContained { steps_tried: u64 },
}

impl fmt::Display for FixedPointError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixedPointError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            FixedPointError::NotContained { steps_tried } => {
                write!(f, "interval iteration not contained after {steps_tried} steps")
            }
        }
    }
}

impl std::error::Error for FixedPointError {}

/// Closed real interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Interval {
        assert!(lo <= hi, "interval endpoints out of order: [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub const UNIT: Interval = Interval { lo: 0.0, hi: 1.0 };

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// The interval map `I -> exp(-C * I) widened by theta` at both ends.
/// Deliberately unclamped: iterates may leave `[0, 1]`.
#[derive(Clone, Copy, Debug)]
pub struct PerturbedMap {
    pub c: f64,
    pub theta: f64,
}

impl PerturbedMap {
    pub fn new(c: f64, theta: f64) -> Result<PerturbedMap, FixedPointError> {
        if !(c > 0.0) {
            return Err(FixedPointError::InvalidParameter(format!("need C > 0, got {c}")));
        }
        if !(theta >= 0.0) {
            return Err(FixedPointError::InvalidParameter(format!("need theta >= 0, got {theta}")));
        }
        Ok(PerturbedMap { c, theta })
    }

    /// One application: `exp(-C x)` is decreasing, so the image of `[a, b]`
    /// is `[exp(-C b), exp(-C a)]`, then both ends widen by theta.
    pub fn apply(&self, iv: Interval) -> Interval {
        Interval::new(
            (-self.c * iv.hi).exp() - self.theta,
            (-self.c * iv.lo).exp() + self.theta,
        )
    }

    pub fn iterate(&self, mut iv: Interval, t: u64) -> Interval {
        for _ in 0..t {
            iv = self.apply(iv);
        }
        iv
    }
}

/// Unique fixed point of `x -> exp(-C x)` for `C > 0`, by bisection on
/// `[0, 1]`. The residual `|mu - exp(-C mu)|` stays below 1e-11.
pub fn solve_mu(c: f64) -> f64 {
    assert!(c > 0.0, "need C > 0, got {c}");
    // f(x) = x - exp(-Cx): f(0) = -1 < 0, f(1) = 1 - exp(-C) > 0.
    bisect(|x| x - (-c * x).exp(), 0.0, 1.0)
}

/// Root of `x = exp(1/x)` on `[1.5, 2]`; equals `1 / solve_mu(1)`.
pub fn solve_alpha() -> f64 {
    bisect(|x| x - (1.0 / x).exp(), 1.5, 2.0)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Margin between the fixed point at `C = (1 - zeta) e` and `(1 - zeta/2)/C`;
/// the strict inequality `mu < bound` is what the contraction argument leans on.
#[derive(Clone, Copy, Debug)]
pub struct MarginCheck {
    pub c: f64,
    pub mu: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn contraction_margin(zeta: f64) -> Result<MarginCheck, FixedPointError> {
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(FixedPointError::InvalidParameter(format!("need zeta in (0,1), got {zeta}")));
    }
    let c = (1.0 - zeta) * std::f64::consts::E;
    let mu = solve_mu(c);
    let bound = (1.0 - zeta / 2.0) / c;
    Ok(MarginCheck { c, mu, bound, holds: mu < bound })
}

/// Result of iterating the perturbed map from `[0, 1]` until the iterate is
/// inside `mu +- xi`.
#[derive(Clone, Debug)]
pub struct IterationRun {
    pub c: f64,
    pub zeta: f64,
    pub xi: f64,
    pub theta: f64,
    pub mu: f64,
    /// Predicted sufficient step count `ceil((4/zeta) ln(1 + 1/xi))`.
    pub t_bound: u64,
    /// First step at which containment held.
    pub t_actual: u64,
    /// Iterates `h^0([0,1]) .. h^{t_actual}([0,1])`.
    pub trajectory: Vec<Interval>,
}

/// Sufficient step count for the perturbed iteration to settle into
/// `mu +- xi`.
pub fn containment_step_bound(zeta: f64, xi: f64) -> u64 {
    ((4.0 / zeta) * (1.0 + 1.0 / xi).ln()).ceil() as u64
}

/// Iterates the perturbed map (with `theta = xi zeta / 8C`) from `[0, 1]`
/// and returns the first step at which the iterate lies in `mu +- xi`.
///
/// Requires `1 <= C <= (1 - zeta) e`. Fails if containment is not reached
/// within 10x the predicted step count.
pub fn iterate_until_contained(c: f64, zeta: f64, xi: f64) -> Result<IterationRun, FixedPointError> {
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(FixedPointError::InvalidParameter(format!("need zeta in (0,1), got {zeta}")));
    }
    if !(xi > 0.0) {
        return Err(FixedPointError::InvalidParameter(format!("need xi > 0, got {xi}")));
    }
    let c_max = (1.0 - zeta) * std::f64::consts::E;
    if !(1.0 <= c && c <= c_max) {
        return Err(FixedPointError::InvalidParameter(format!(
            "need 1 <= C <= (1-zeta)e = {c_max}, got C = {c}"
        )));
    }
    let theta = xi * zeta / (8.0 * c);
    let map = PerturbedMap { c, theta };
    let mu = solve_mu(c);
    let target = Interval::new(mu - xi, mu + xi);
    let t_bound = containment_step_bound(zeta, xi);
    let max_steps = 10 * t_bound.max(1);

    let mut trajectory = vec![Interval::UNIT];
    let mut iv = Interval::UNIT;
    for t in 0..=max_steps {
        if target.contains_interval(&iv) {
            return Ok(IterationRun { c, zeta, xi, theta, mu, t_bound, t_actual: t, trajectory });
        }
        iv = map.apply(iv);
        trajectory.push(iv);
    }
    Err(FixedPointError::NotContained { steps_tried: max_steps })
}

/// Checks that one application of the perturbed map moves the bracket
/// `I(x) = [mu - x/C, mu - ln(1-x)/C]` strictly inside `I(x (1 - zeta/4))`,
/// via the two endpoint inequalities
/// `mu x + theta <= x(1 - zeta/4)/C` and
/// `mu (e^x - 1) + theta <= -ln(1 - x(1 - zeta/4))/C`.
pub fn bracket_step_contracts(c: f64, zeta: f64, xi: f64, x: f64) -> bool {
    assert!(x > 0.0 && x <= 1.0, "bracket parameter x must be in (0, 1], got {x}");
    let theta = xi * zeta / (8.0 * c);
    let mu = solve_mu(c);
    let shrunk = x * (1.0 - zeta / 4.0);
    let lower_ok = mu * x + theta <= shrunk / c;
    let upper_ok = mu * (x.exp() - 1.0) + theta <= -(1.0 - shrunk).ln() / c;
    lower_ok && upper_ok
}

/// True iff every value lies in the `t`-fold image of `[0, 1]` under the
/// perturbed map. Values are per-vertex statistics normalized to `[0, 1]`.
pub fn envelope_check(values: &[f64], map: &PerturbedMap, t: u64) -> Result<bool, FixedPointError> {
    if t == 0 {
        return Err(FixedPointError::InvalidParameter("need t >= 1".into()));
    }
    if let Some(&bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(FixedPointError::InvalidParameter(format!("value {bad} outside [0, 1]")));
    }
    let envelope = map.iterate(Interval::UNIT, t);
    Ok(values.iter().all(|&v| envelope.contains(v)))
}

/// Plain (unperturbed) iteration of `x -> exp(-C x)`; for `C > e` the even and
/// odd subsequences converge to distinct limits. Diagnostic only.
pub fn iterate_map(c: f64, x0: f64, steps: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut x = x0;
    out.push(x);
    for _ in 0..steps {
        x = (-c * x).exp();
        out.push(x);
    }
    out
}

/// One cell of the containment sweep.
#[derive(Clone, Debug)]
pub struct SweepCell {
    pub c: f64,
    pub zeta: f64,
    pub xi: f64,
    /// Whether `1 <= C <= (1-zeta)e` is satisfiable for this cell.
    pub feasible: bool,
    pub t_bound: u64,
    pub t_actual: Option<u64>,
    pub contained: bool,
}

/// Runs [`iterate_until_contained`] over a `(zeta, xi)` grid, with `C` ranging
/// over `{1, midpoint, (1-zeta)e}` per row. Cells where the hypothesis
/// `1 <= C <= (1-zeta)e` cannot hold are marked infeasible and skipped.
pub fn containment_sweep(zetas: &[f64], xis: &[f64]) -> Vec<SweepCell> {
    let mut cells = Vec::new();
    for &zeta in zetas {
        let c_max = (1.0 - zeta) * std::f64::consts::E;
        let c_grid = [1.0, 0.5 * (1.0 + c_max), c_max];
        for &xi in xis {
            for &c in &c_grid {
                let feasible = 1.0 <= c && c <= c_max;
                let t_bound = containment_step_bound(zeta, xi);
                if !feasible {
                    cells.push(SweepCell { c, zeta, xi, feasible, t_bound, t_actual: None, contained: false });
                    continue;
                }
                match iterate_until_contained(c, zeta, xi) {
                    Ok(run) => cells.push(SweepCell {
                        c,
                        zeta,
                        xi,
                        feasible,
                        t_bound: run.t_bound,
                        t_actual: Some(run.t_actual),
                        contained: true,
                    }),
                    Err(_) => cells.push(SweepCell { c, zeta, xi, feasible, t_bound, t_actual: None, contained: false }),
                }
            }
        }
    }
    cells
}
