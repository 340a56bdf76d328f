//! Generic coupled-trajectory running and the mixing-time bound calculators
//! used to interpret coupled runs: contraction of every pair, contraction of
//! a high-probability set against everything, and contraction within a
//! high-probability set given a warm start.

use std::fmt;

use num_traits::Zero;

use crate::Ratio;

#[derive(Clone, Debug, PartialEq)]
pub enum CouplingError {
    InvalidParameter(String),
}

impl fmt::Display for CouplingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CouplingError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

impl std::error::Error for CouplingError {}

/// Distances of one coupled run, one entry per step `0..=t`.
#[derive(Clone, Debug)]
pub struct CoupledTrajectory {
    pub distances: Vec<u64>,
    /// First step at which the chains met, if they did.
    pub met_at: Option<usize>,
}

impl CoupledTrajectory {
    pub fn final_distance(&self) -> u64 {
        *self.distances.last().expect("trajectory has at least the start entry")
    }
}

/// Runs `steps` coupled steps from `(x0, y0)`, recording the distance after
/// every step. Couplings here are sticky: identical states evolve
/// identically, so once the distance hits zero the trailing entries are
/// zero-filled without further stepping.
pub fn run_coupled<S, R, D, F>(
    x0: &S,
    y0: &S,
    steps: usize,
    distance: D,
    mut coupled_step: F,
    rng: &mut R,
) -> CoupledTrajectory
where
    S: Clone + PartialEq,
    D: Fn(&S, &S) -> u64,
    F: FnMut(&mut S, &mut S, &mut R),
{
    let mut x = x0.clone();
    let mut y = y0.clone();
    let mut distances = Vec::with_capacity(steps + 1);
    let mut met_at = None;
    let d0 = distance(&x, &y);
    distances.push(d0);
    if d0 == 0 {
        met_at = Some(0);
    }
    for t in 1..=steps {
        if met_at.is_some() {
            distances.push(0);
            continue;
        }
        coupled_step(&mut x, &mut y, rng);
        let d = distance(&x, &y);
        distances.push(d);
        if d == 0 {
            met_at = Some(t);
        }
    }
    CoupledTrajectory { distances, met_at }
}

/// A bound value as the formula produces it, plus its clamp into `[0, 1]`
/// for reporting as a probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundValue {
    pub raw: f64,
    pub clamped: f64,
}

impl BoundValue {
    fn new(raw: f64) -> BoundValue {
        BoundValue { raw, clamped: raw.clamp(0.0, 1.0) }
    }
}

/// Meeting-failure bound for chains whose pairs contract at rate `eps`
/// except with probability at most `bad_prob` per step:
/// `((1 - eps)^steps + bad_prob / eps) * diam`.
pub fn coupling_failure_bound(
    eps: f64,
    bad_prob: f64,
    steps: u64,
    diam: u64,
) -> Result<BoundValue, CouplingError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(CouplingError::InvalidParameter(format!("need eps in (0,1], got {eps}")));
    }
    if !(bad_prob >= 0.0) {
        return Err(CouplingError::InvalidParameter(format!("need bad_prob >= 0, got {bad_prob}")));
    }
    if diam == 0 {
        return Err(CouplingError::InvalidParameter("need diam >= 1".into()));
    }
    let raw = ((1.0 - eps).powi(steps as i32) + bad_prob / eps) * diam as f64;
    Ok(BoundValue::new(raw))
}

/// Steps sufficient for mixing when every pair contracts at rate `eps`:
/// `ceil(ln(diam/delta)/eps)`.
pub fn mixing_time_all_pairs(diam: u64, delta: f64, eps: f64) -> Result<u64, CouplingError> {
    if diam == 0 {
        return Err(CouplingError::InvalidParameter("need diam >= 1".into()));
    }
    if !(delta > 0.0 && delta <= diam as f64) {
        return Err(CouplingError::InvalidParameter(format!(
            "need 0 < delta <= diam, got delta = {delta}"
        )));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(CouplingError::InvalidParameter(format!("need eps in (0,1], got {eps}")));
    }
    Ok(((diam as f64 / delta).ln() / eps).ceil() as u64)
}

/// Step count plus the stationary mass a set must carry for the bound to
/// apply.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SetMixing {
    pub steps: u64,
    pub stationary_mass_threshold: f64,
}

/// Mixing from an arbitrary start when a set `S` with
/// `pi(S) >= 1 - eps/(16 diam)` contracts against every state:
/// `T = ceil(ceil(ln(32 diam)) ceil(ln(1/delta)) / eps)`.
pub fn mixing_time_stationary_set(diam: u64, delta: f64, eps: f64) -> Result<SetMixing, CouplingError> {
    if diam == 0 {
        return Err(CouplingError::InvalidParameter("need diam >= 1".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(CouplingError::InvalidParameter(format!("need delta in (0,1), got {delta}")));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(CouplingError::InvalidParameter(format!("need eps in (0,1], got {eps}")));
    }
    let steps =
        ((32.0 * diam as f64).ln().ceil() * (1.0 / delta).ln().ceil() / eps).ceil() as u64;
    Ok(SetMixing { steps, stationary_mass_threshold: 1.0 - eps / (16.0 * diam as f64) })
}

/// Mixing from a warm start when pairs inside a set `S` with
/// `pi(S) > 1 - eps delta/(6 diam)` contract:
/// `T = ceil(ln(2 diam/delta)/eps)`.
pub fn mixing_time_warm_start(diam: u64, delta: f64, eps: f64) -> Result<SetMixing, CouplingError> {
    if diam == 0 {
        return Err(CouplingError::InvalidParameter("need diam >= 1".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(CouplingError::InvalidParameter(format!("need delta in (0,1), got {delta}")));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(CouplingError::InvalidParameter(format!("need eps in (0,1], got {eps}")));
    }
    let steps = ((2.0 * diam as f64 / delta).ln() / eps).ceil() as u64;
    Ok(SetMixing {
        steps,
        stationary_mass_threshold: 1.0 - eps * delta / (6.0 * diam as f64),
    })
}

/// Largest density of `dist` against `pi`, with the conventions `0/0 = 0`
/// and `x/0 = infinity` for `x > 0`.
pub fn warm_start_ratio(dist: &[f64], pi: &[f64]) -> f64 {
    assert_eq!(dist.len(), pi.len());
    let mut max = 0.0f64;
    for (&d, &p) in dist.iter().zip(pi) {
        if d == 0.0 {
            continue;
        }
        if p == 0.0 {
            return f64::INFINITY;
        }
        max = max.max(d / p);
    }
    max
}

/// A distribution is a warm start when its density against `pi` never
/// exceeds two (the boundary counts).
pub fn is_warm_start(dist: &[f64], pi: &[f64]) -> (f64, bool) {
    let ratio = warm_start_ratio(dist, pi);
    (ratio, ratio <= 2.0)
}

/// Exact variant; `None` means the ratio is unbounded.
pub fn warm_start_ratio_exact(dist: &[Ratio], pi: &[Ratio]) -> Option<Ratio> {
    assert_eq!(dist.len(), pi.len());
    let mut max = Ratio::zero();
    for (d, p) in dist.iter().zip(pi) {
        if d.is_zero() {
            continue;
        }
        if p.is_zero() {
            return None;
        }
        let r = d.clone() / p.clone();
        if r > max {
            max = r;
        }
    }
    Some(max)
}
