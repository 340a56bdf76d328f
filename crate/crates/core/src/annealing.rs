//! Fugacity-ladder annealing for the hard-core model: a geometric ladder
//! `0 = lambda_0 < lambda_1 < ... < lambda_k = lambda` with every consecutive
//! ratio at most `1 + 1/3n`, heat-bath runs at each level seeded from the
//! previous level's output, and exact verification (on enumerable instances)
//! that each level's Gibbs distribution warm-starts the next.
//!
//! The ladder is built so the ratio condition holds for every rung including
//! the last: intermediate rungs are `(1 + 1/3n)^{i-1}/3n` and the target is
//! appended as the final level, which costs at most one extra level over the
//! geometric count.

// Error values carry the exact rationals involved; these paths are cold.
#![allow(clippy::result_large_err)]

use std::fmt;

use num_traits::{One, Zero};

use crate::exact::{self, ExactChain, HardcoreGlauber, OracleError};
use crate::graph::Graph;
use crate::hardcore::{self, HardcoreError, IndependentSet};
use crate::rng::{self as seeding, streams};
use crate::{ratio, ratio_to_f64, Ratio};

#[derive(Clone, Debug, PartialEq)]
pub enum AnnealError {
    /// Below `1/3n` the ladder is pointless; run the plain dynamics instead.
    LambdaBelowThreshold { lambda: Ratio, threshold: Ratio },
    InvalidParameter(String),
    StepsMismatch { expected: usize, got: usize },
    Oracle(OracleError),
    Hardcore(HardcoreError),
}

impl fmt::Display for AnnealError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnnealError::LambdaBelowThreshold { lambda, threshold } => write!(
                f,
                "fugacity {lambda} below ladder threshold {threshold}; run the plain dynamics"
            ),
            AnnealError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            AnnealError::StepsMismatch { expected, got } => {
                write!(f, "per-level steps: expected {expected} entries, got {got}")
            }
            AnnealError::Oracle(e) => write!(f, "{e}"),
            AnnealError::Hardcore(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for AnnealError {}

impl From<OracleError> for AnnealError {
    fn from(e: OracleError) -> Self {
        AnnealError::Oracle(e)
    }
}

impl From<HardcoreError> for AnnealError {
    fn from(e: HardcoreError) -> Self {
        AnnealError::Hardcore(e)
    }
}

/// How per-level step counts are chosen.
#[derive(Clone, Debug)]
pub enum StepRule {
    /// On-paper step counts: the closed-form warm-start mixing formula with
    /// per-level accuracy budget `delta/k`. Extremely conservative; meant
    /// for bound reporting rather than desk-scale runs.
    Paper,
    /// A fixed per-level step count supplied by the caller.
    Uniform(u64),
    /// Explicit per-level step counts (e.g. oracle-calibrated).
    PerLevel(Vec<u64>),
}

/// The fugacity ladder plus per-level step counts. `levels[0] = 0` and
/// `steps_per_level[i]` drives the run at `levels[i + 1]`.
#[derive(Clone, Debug)]
pub struct AnnealingSchedule {
    pub n: usize,
    pub zeta: f64,
    pub delta: f64,
    pub levels: Vec<Ratio>,
    pub steps_per_level: Vec<u64>,
}

impl AnnealingSchedule {
    /// Number of levels past zero.
    pub fn level_count(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn target(&self) -> &Ratio {
        self.levels.last().expect("ladder has at least the zero level")
    }

    /// Consecutive-ratio invariant: `levels[i] <= (1 + 1/3n) levels[i-1]`
    /// for every `i >= 2`, checked exactly.
    pub fn ratios_ok(&self) -> bool {
        let r = Ratio::one() + ratio(1, 3 * self.n as i64);
        self.levels
            .windows(2)
            .skip(1)
            .all(|w| w[1] <= r.clone() * w[0].clone())
    }
}

/// Builds the ladder for target fugacity `lambda >= 1/3n` and attaches step
/// counts per `rule`.
pub fn build_schedule(
    n: usize,
    lambda: &Ratio,
    delta: f64,
    zeta: f64,
    rule: &StepRule,
) -> Result<AnnealingSchedule, AnnealError> {
    if n == 0 {
        return Err(AnnealError::InvalidParameter("need n >= 1".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(AnnealError::InvalidParameter(format!("need delta in (0,1), got {delta}")));
    }
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(AnnealError::InvalidParameter(format!("need zeta in (0,1), got {zeta}")));
    }
    let threshold = ratio(1, 3 * n as i64);
    if *lambda < threshold {
        return Err(AnnealError::LambdaBelowThreshold {
            lambda: lambda.clone(),
            threshold,
        });
    }

    let growth = Ratio::one() + ratio(1, 3 * n as i64);
    let mut levels = vec![Ratio::zero()];
    let mut rung = ratio(1, 3 * n as i64);
    while rung < *lambda {
        levels.push(rung.clone());
        rung *= growth.clone();
    }
    levels.push(lambda.clone());
    let k = levels.len() - 1;

    let steps_per_level = match rule {
        StepRule::Paper => {
            let per_level_delta = delta / k as f64;
            let params = hardcore::hardcore_mixing_parameters(n, zeta, per_level_delta)?;
            vec![params.steps; k]
        }
        StepRule::Uniform(t) => vec![*t; k],
        StepRule::PerLevel(v) => {
            if v.len() != k {
                return Err(AnnealError::StepsMismatch { expected: k, got: v.len() });
            }
            v.clone()
        }
    };

    let schedule = AnnealingSchedule { n, zeta, delta, levels, steps_per_level };
    debug_assert!(schedule.ratios_ok());
    Ok(schedule)
}

/// Per-level summary of one annealing run.
#[derive(Clone, Debug)]
pub struct LevelLog {
    pub level: usize,
    pub lambda: f64,
    pub steps: u64,
    pub set_size: usize,
}

/// One annealing run: start from the empty set, and at each level run the
/// heat-bath dynamics at that fugacity from the previous level's state.
/// Level `i` draws from the stream derived from `(run_seed, LEVEL, i)`.
pub fn annealed_sample(
    g: &Graph,
    schedule: &AnnealingSchedule,
    run_seed: u64,
) -> (IndependentSet, Vec<LevelLog>) {
    assert_eq!(g.vertex_count(), schedule.n);
    let mut state = IndependentSet::empty(schedule.n);
    let mut logs = Vec::with_capacity(schedule.level_count());
    for (idx, steps) in schedule.steps_per_level.iter().enumerate() {
        let level = idx + 1;
        let lambda = ratio_to_f64(&schedule.levels[level]);
        let mut rng = seeding::derive_rng(run_seed, streams::LEVEL, level as u64);
        for _ in 0..*steps {
            hardcore::glauber_step(g, &mut state, lambda, &mut rng);
        }
        logs.push(LevelLog { level, lambda, steps: *steps, set_size: state.size() });
    }
    (state, logs)
}

/// Exact per-level mixing steps: for each level, the exact mixing time of
/// the chain at that fugacity to accuracy `delta/k` from the worst start
/// (which dominates every warm start).
pub fn calibrate_level_steps(
    g: &Graph,
    levels: &[Ratio],
    delta: f64,
    kernel_cap: usize,
) -> Result<Vec<u64>, AnnealError> {
    let k = levels.len() - 1;
    let per_level_delta = delta / k as f64;
    let mut out = Vec::with_capacity(k);
    for lambda in &levels[1..] {
        let space = exact::enumerate_independent_sets(g, kernel_cap)?;
        let chain = ExactChain::build(space, HardcoreGlauber { graph: g, lambda: lambda.clone() }, kernel_cap)?;
        out.push(chain.exact_mixing_time(per_level_delta)? as u64);
    }
    Ok(out)
}

/// One rung of the exact partition-function ladder check.
#[derive(Clone, Debug)]
pub struct LadderLevel {
    pub level: usize,
    pub lambda: Ratio,
    pub z: Ratio,
    /// `Z_i / Z_{i-1}`; `None` at level zero.
    pub ratio_to_prev: Option<Ratio>,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct LadderReport {
    pub levels: Vec<LadderLevel>,
    pub all_ok: bool,
}

/// Exact partition function at every ladder level, with the warm-start
/// ratios: `Z_1 < 2 Z_0 = 2` and `Z_i < e^{1/3} Z_{i-1}` for `i >= 2`.
pub fn verify_partition_ladder(
    g: &Graph,
    schedule: &AnnealingSchedule,
    state_cap: usize,
) -> Result<LadderReport, AnnealError> {
    let e_third = (1.0f64 / 3.0).exp();
    let mut levels = Vec::with_capacity(schedule.levels.len());
    let mut prev_z: Option<Ratio> = None;
    let mut all_ok = true;
    for (i, lambda) in schedule.levels.iter().enumerate() {
        let z = exact::partition_function(g, lambda, state_cap)?;
        let ratio_to_prev = prev_z.as_ref().map(|p| z.clone() / p.clone());
        let ok = match (i, &ratio_to_prev) {
            (0, _) => z.is_one(),
            (1, Some(r)) => *r < ratio(2, 1),
            (_, Some(r)) => ratio_to_f64(r) < e_third,
            _ => unreachable!("levels past zero always have a predecessor"),
        };
        all_ok &= ok;
        levels.push(LadderLevel { level: i, lambda: lambda.clone(), z: z.clone(), ratio_to_prev, ok });
        prev_z = Some(z);
    }
    Ok(LadderReport { levels, all_ok })
}

#[derive(Clone, Debug)]
pub struct WarmStartCheck {
    /// Largest density of the previous Gibbs distribution against the next;
    /// `None` means unbounded.
    pub max_ratio: Option<Ratio>,
    pub within_factor_two: bool,
}

/// Exact check that the Gibbs distribution at `lambda_prev` is a warm start
/// for the Gibbs distribution at `lambda_next`.
pub fn verify_level_warm_start(
    g: &Graph,
    lambda_prev: &Ratio,
    lambda_next: &Ratio,
    state_cap: usize,
) -> Result<WarmStartCheck, AnnealError> {
    let space = exact::enumerate_independent_sets(g, state_cap)?;
    let gibbs = |lambda: &Ratio| -> Vec<Ratio> {
        let weights: Vec<Ratio> =
            space.states().iter().map(|x| hardcore::weight(x, lambda)).collect();
        let z: Ratio = weights.iter().cloned().sum();
        weights.into_iter().map(|w| w / z.clone()).collect()
    };
    let prev = gibbs(lambda_prev);
    let next = gibbs(lambda_next);
    let max_ratio = crate::coupling::warm_start_ratio_exact(&prev, &next);
    let within = max_ratio.as_ref().is_some_and(|r| *r <= ratio(2, 1));
    Ok(WarmStartCheck { max_ratio, within_factor_two: within })
}
