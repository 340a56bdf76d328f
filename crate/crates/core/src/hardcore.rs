//! Heat-bath dynamics on independent sets at fugacity lambda, the shared
//! (vertex, coin) coupling, unblocked-neighbor statistics, and the exact
//! contraction checks built on them.
//!
//! The coupling shares the update vertex and the add/remove coin between the
//! two chains and lets each apply its own blocking rule; no residual freedom
//! remains, so coupled expectations are unambiguous and computable exactly.

use std::fmt;

use num_traits::{One, Zero};
use rand::Rng;

use crate::exact::{self, OracleError};
use crate::fixed_point;
use crate::graph::Graph;
use crate::rng::{self as seeding, streams};
use crate::{ratio, Ratio};

#[derive(Clone, Debug, PartialEq)]
pub enum HardcoreError {
    VertexOutOfRange { vertex: usize, n: usize },
    NotIndependent { u: usize, v: usize },
    LengthMismatch { expected: usize, got: usize },
    HypothesisViolated(String),
    InvalidParameter(String),
    Parse(String),
    Oracle(OracleError),
}

impl fmt::Display for HardcoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HardcoreError::VertexOutOfRange { vertex, n } => {
                write!(f, "vertex {vertex} out of range for graph on {n} vertices")
            }
            HardcoreError::NotIndependent { u, v } => {
                write!(f, "vertices {u} and {v} are adjacent; set is not independent")
            }
            HardcoreError::LengthMismatch { expected, got } => {
                write!(f, "set is over {got} vertices, graph has {expected}")
            }
            HardcoreError::HypothesisViolated(msg) => write!(f, "hypothesis violated: {msg}"),
            HardcoreError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            HardcoreError::Parse(msg) => write!(f, "parse error: {msg}"),
            HardcoreError::Oracle(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for HardcoreError {}

impl From<OracleError> for HardcoreError {
    fn from(e: OracleError) -> Self {
        HardcoreError::Oracle(e)
    }
}

/// Subset of vertices; independence (no internal edge) is an invariant the
/// dynamics preserve and `checked` enforces at construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndependentSet {
    occupied: Vec<bool>,
    size: usize,
}

impl IndependentSet {
    pub fn empty(n: usize) -> IndependentSet {
        IndependentSet { occupied: vec![false; n], size: 0 }
    }

    pub fn from_vertices(n: usize, vertices: &[usize]) -> Result<IndependentSet, HardcoreError> {
        let mut set = IndependentSet::empty(n);
        for &v in vertices {
            if v >= n {
                return Err(HardcoreError::VertexOutOfRange { vertex: v, n });
            }
            if !set.occupied[v] {
                set.occupied[v] = true;
                set.size += 1;
            }
        }
        Ok(set)
    }

    /// Builds and verifies independence against the graph.
    pub fn checked(g: &Graph, vertices: &[usize]) -> Result<IndependentSet, HardcoreError> {
        let set = IndependentSet::from_vertices(g.vertex_count(), vertices)?;
        for (u, v) in g.edges() {
            if set.occupied[u] && set.occupied[v] {
                return Err(HardcoreError::NotIndependent { u, v });
            }
        }
        Ok(set)
    }

    pub fn contains(&self, v: usize) -> bool {
        self.occupied[v]
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn vertex_count(&self) -> usize {
        self.occupied.len()
    }

    pub fn insert(&mut self, v: usize) {
        if !self.occupied[v] {
            self.occupied[v] = true;
            self.size += 1;
        }
    }

    pub fn remove(&mut self, v: usize) {
        if self.occupied[v] {
            self.occupied[v] = false;
            self.size -= 1;
        }
    }

    pub fn vertices(&self) -> Vec<usize> {
        (0..self.occupied.len()).filter(|&v| self.occupied[v]).collect()
    }

    pub fn is_independent(&self, g: &Graph) -> bool {
        g.edges().iter().all(|&(u, v)| !(self.occupied[u] && self.occupied[v]))
    }

    /// Size of the symmetric difference.
    pub fn hamming(&self, other: &IndependentSet) -> usize {
        assert_eq!(self.occupied.len(), other.occupied.len());
        self.occupied.iter().zip(&other.occupied).filter(|(a, b)| a != b).count()
    }

    /// Sorted vertex indices on one line, `-` for the empty set.
    pub fn to_line(&self) -> String {
        if self.size == 0 {
            return "-".into();
        }
        let strs: Vec<String> = self.vertices().iter().map(usize::to_string).collect();
        strs.join(" ")
    }

    pub fn from_line(line: &str, n: usize) -> Result<IndependentSet, HardcoreError> {
        let line = line.trim();
        if line == "-" {
            return Ok(IndependentSet::empty(n));
        }
        let verts = line
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| HardcoreError::Parse(format!("bad vertex {t:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        IndependentSet::from_vertices(n, &verts)
    }
}

/// `lambda^{|X|}`, exactly.
pub fn weight(x: &IndependentSet, lambda: &Ratio) -> Ratio {
    num_traits::pow::pow(lambda.clone(), x.size())
}

/// True iff adding `v` keeps the set independent (no occupied neighbor).
pub fn addable(g: &Graph, x: &IndependentSet, v: usize) -> bool {
    g.neighbors(v).iter().all(|&w| !x.contains(w))
}

/// Applies the deterministic part of a heat-bath update: propose adding `v`
/// (if `add`) or removing it, rejecting an add that has an occupied neighbor.
pub fn apply_update(g: &Graph, x: &mut IndependentSet, v: usize, add: bool) {
    if add {
        if addable(g, x, v) {
            x.insert(v);
        }
    } else {
        x.remove(v);
    }
}

/// One heat-bath step: uniform vertex, then add with probability
/// `lambda/(1+lambda)` (rejected if blocked) or remove otherwise. Consumes
/// exactly two draws: one vertex index, one coin. Returns the vertex.
pub fn glauber_step<R: Rng + ?Sized>(
    g: &Graph,
    x: &mut IndependentSet,
    lambda: f64,
    rng: &mut R,
) -> usize {
    debug_assert!(lambda > 0.0);
    let v = rng.random_range(0..g.vertex_count());
    let add = rng.random::<f64>() < lambda / (1.0 + lambda);
    apply_update(g, x, v, add);
    debug_assert!(x.is_independent(g));
    v
}

/// Neighbors `w` of `v` whose other neighborhood `N(w) \ {v}` is unoccupied:
/// the vertices that could join the set once `v` itself is ignored.
pub fn unblocked(g: &Graph, x: &IndependentSet, v: usize) -> Vec<usize> {
    g.neighbors(v)
        .iter()
        .copied()
        .filter(|&w| g.neighbors(w).iter().all(|&z| z == v || !x.contains(z)))
        .collect()
}

/// Coupled heat-bath step: both chains share the vertex and the coin, each
/// applies its own blocking rule. Each marginal is an exact heat-bath step.
pub fn coupled_glauber_step<R: Rng + ?Sized>(
    g: &Graph,
    x: &mut IndependentSet,
    y: &mut IndependentSet,
    lambda: f64,
    rng: &mut R,
) -> Result<usize, HardcoreError> {
    check_pair(g, x, y)?;
    let v = rng.random_range(0..g.vertex_count());
    let add = rng.random::<f64>() < lambda / (1.0 + lambda);
    apply_update(g, x, v, add);
    apply_update(g, y, v, add);
    Ok(v)
}

fn check_pair(g: &Graph, x: &IndependentSet, y: &IndependentSet) -> Result<(), HardcoreError> {
    for s in [x, y] {
        if s.vertex_count() != g.vertex_count() {
            return Err(HardcoreError::LengthMismatch {
                expected: g.vertex_count(),
                got: s.vertex_count(),
            });
        }
    }
    Ok(())
}

/// Exact expected Hamming distance after one coupled step, by enumerating all
/// `2n` (vertex, coin) outcomes.
pub fn expected_coupled_distance(
    g: &Graph,
    x: &IndependentSet,
    y: &IndependentSet,
    lambda: &Ratio,
) -> Result<Ratio, HardcoreError> {
    check_pair(g, x, y)?;
    let n = g.vertex_count();
    let p_add = lambda.clone() / (Ratio::one() + lambda.clone());
    let p_remove = Ratio::one() - p_add.clone();
    let mut total = Ratio::zero();
    for v in 0..n {
        for (add, p) in [(true, &p_add), (false, &p_remove)] {
            let mut xv = x.clone();
            let mut yv = y.clone();
            apply_update(g, &mut xv, v, add);
            apply_update(g, &mut yv, v, add);
            total += p.clone() * ratio(xv.hamming(&yv) as i64, 1);
        }
    }
    Ok(total / ratio(n as i64, 1))
}

/// True iff the pair contracts strictly under the shared-coin coupling:
/// `E[rho'] < (1 - eps) rho`, in exact arithmetic.
pub fn is_distance_decreasing_pair(
    g: &Graph,
    x: &IndependentSet,
    y: &IndependentSet,
    lambda: &Ratio,
    eps: &Ratio,
) -> Result<bool, HardcoreError> {
    if x == y {
        return Err(HardcoreError::InvalidParameter("states are identical".into()));
    }
    let expected = expected_coupled_distance(g, x, y, lambda)?;
    Ok(expected < (Ratio::one() - eps.clone()) * ratio(x.hamming(y) as i64, 1))
}

/// True iff every vertex satisfies `|U(X, v)| <= (1 - zeta)(1 + lambda)/lambda`
/// for both sets, decided exactly.
pub fn unblocked_bound_holds(
    g: &Graph,
    x: &IndependentSet,
    y: &IndependentSet,
    lambda: &Ratio,
    zeta: &Ratio,
) -> bool {
    let rhs = (Ratio::one() - zeta.clone()) * (Ratio::one() + lambda.clone());
    g.vertices().all(|v| {
        let ux = unblocked(g, x, v).len() as i64;
        let uy = unblocked(g, y, v).len() as i64;
        ratio(ux.max(uy), 1) * lambda.clone() <= rhs
    })
}

pub fn min_max_unblocked(g: &Graph, x: &IndependentSet) -> (usize, usize) {
    let mut min = usize::MAX;
    let mut max = 0;
    for v in g.vertices() {
        let u = unblocked(g, x, v).len();
        min = min.min(u);
        max = max.max(u);
    }
    if min == usize::MAX {
        min = 0;
    }
    (min, max)
}

/// How the verification samplers draw from the Gibbs distribution.
#[derive(Clone, Debug)]
pub enum GibbsSampler {
    /// Enumerate all independent sets and draw by cumulative weight.
    Exact,
    /// Independent chains from the empty set with `burn_in` heat-bath steps.
    Mcmc { burn_in: u64 },
}

#[derive(Clone, Debug)]
pub struct UnblockedReport {
    pub n: usize,
    pub degree: usize,
    pub lambda: f64,
    pub zeta: f64,
    pub xi: f64,
    pub mu: f64,
    pub samples: u64,
    /// Window `[(mu - xi) degree, (mu + xi) degree]` every vertex must hit.
    pub window: (f64, f64),
    pub violations: u64,
    pub empirical_rate: f64,
    /// `3n exp(-(max(xi zeta/(8 lambda degree) - (e+1)^2/degree, 0))^2 degree/8)`.
    pub bound_raw: f64,
    /// Raw bound clamped to [0, 1].
    pub bound: f64,
    /// True when the clamp made the bound carry no information.
    pub vacuous: bool,
    pub pass: bool,
    pub sampler: String,
    pub burn_in: Option<u64>,
    /// Sample counts of `min_v |U(X, v)|`, by value.
    pub min_u_histogram: Vec<(usize, u64)>,
    /// Sample counts of `max_v |U(X, v)|`, by value.
    pub max_u_histogram: Vec<(usize, u64)>,
}

/// Statistical check that under the Gibbs distribution every vertex has an
/// unblocked-neighbor count in `(mu +- xi) degree`, where `mu` solves
/// `mu = exp(-mu lambda degree)`.
#[allow(clippy::too_many_arguments)]
pub fn verify_unblocked_uniformity(
    g: &Graph,
    lambda: f64,
    zeta: f64,
    xi: f64,
    samples: u64,
    sampler: &GibbsSampler,
    master_seed: u64,
    state_cap: usize,
) -> Result<UnblockedReport, HardcoreError> {
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(HardcoreError::InvalidParameter(format!("need zeta in (0,1), got {zeta}")));
    }
    if !(xi > 0.0) {
        return Err(HardcoreError::InvalidParameter(format!("need xi > 0, got {xi}")));
    }
    if samples == 0 {
        return Err(HardcoreError::InvalidParameter("need at least one sample".into()));
    }
    if !g.is_regular() || g.max_degree() == 0 {
        return Err(HardcoreError::HypothesisViolated(
            "graph must be regular with degree >= 1".into(),
        ));
    }
    if g.girth().is_some_and(|gi| gi < 6) {
        return Err(HardcoreError::HypothesisViolated(format!(
            "girth must be at least 6, got {:?}",
            g.girth()
        )));
    }
    let degree = g.max_degree();
    let d = degree as f64;
    if !(lambda >= 1.0 / d) || !(lambda <= (1.0 - zeta) * std::f64::consts::E / d) {
        return Err(HardcoreError::HypothesisViolated(format!(
            "need 1/degree <= lambda <= (1-zeta)e/degree, got lambda = {lambda}"
        )));
    }

    let n = g.vertex_count();
    let mu = fixed_point::solve_mu(lambda * d);
    let window = ((mu - xi) * d, (mu + xi) * d);

    let mut min_hist: std::collections::BTreeMap<usize, u64> = Default::default();
    let mut max_hist: std::collections::BTreeMap<usize, u64> = Default::default();
    let mut violations = 0u64;
    let mut record = |x: &IndependentSet| {
        let (min_u, max_u) = min_max_unblocked(g, x);
        *min_hist.entry(min_u).or_insert(0) += 1;
        *max_hist.entry(max_u).or_insert(0) += 1;
        if (min_u as f64) < window.0 || (max_u as f64) > window.1 {
            violations += 1;
        }
    };
    let mut burn_in_used = None;
    match sampler {
        GibbsSampler::Exact => {
            let space = exact::enumerate_independent_sets(g, state_cap)?;
            let weights: Vec<f64> = space.states().iter().map(|x| lambda.powi(x.size() as i32)).collect();
            let total: f64 = weights.iter().sum();
            let mut rng = seeding::derive_rng(master_seed, streams::REPLICA, 0);
            for _ in 0..samples {
                let mut u = rng.random::<f64>() * total;
                let mut idx = space.len() - 1;
                for (i, w) in weights.iter().enumerate() {
                    if u < *w {
                        idx = i;
                        break;
                    }
                    u -= w;
                }
                record(space.state(idx));
            }
        }
        GibbsSampler::Mcmc { burn_in } => {
            burn_in_used = Some(*burn_in);
            for i in 0..samples {
                let mut rng = seeding::derive_rng(master_seed, streams::BURN_IN, i);
                let mut x = IndependentSet::empty(n);
                for _ in 0..*burn_in {
                    glauber_step(g, &mut x, lambda, &mut rng);
                }
                record(&x);
            }
        }
    }

    let empirical_rate = violations as f64 / samples as f64;
    let inner = (xi * zeta / (8.0 * lambda * d) - (std::f64::consts::E + 1.0).powi(2) / d).max(0.0);
    let bound_raw = 3.0 * n as f64 * (-inner * inner * d / 8.0).exp();
    let bound = bound_raw.min(1.0);
    let vacuous = bound >= 1.0;
    let m = samples as f64;
    let pass = if vacuous {
        true
    } else {
        empirical_rate <= bound + 3.0 * (bound * (1.0 - bound) / m).sqrt() + 3.0 / m.sqrt()
    };
    Ok(UnblockedReport {
        n,
        degree,
        lambda,
        zeta,
        xi,
        mu,
        samples,
        window,
        violations,
        empirical_rate,
        bound_raw,
        bound,
        vacuous,
        pass,
        sampler: match sampler {
            GibbsSampler::Exact => "exact".into(),
            GibbsSampler::Mcmc { .. } => "mcmc".into(),
        },
        burn_in: burn_in_used,
        min_u_histogram: min_hist.into_iter().collect(),
        max_u_histogram: max_hist.into_iter().collect(),
    })
}

/// Exact Gibbs-weighted statistics of the unblocked-neighbor counts.
#[derive(Clone, Debug)]
pub struct UnblockedGroundTruth {
    pub state_count: usize,
    /// Gibbs probability that some vertex leaves the `(mu +- xi) degree` window.
    pub violation_rate: Ratio,
    /// Distribution of `min_v |U(X, v)|` under Gibbs, by value.
    pub min_u_dist: Vec<(usize, Ratio)>,
    /// Distribution of `max_v |U(X, v)|` under Gibbs, by value.
    pub max_u_dist: Vec<(usize, Ratio)>,
}

pub fn exact_unblocked_stats(
    g: &Graph,
    lambda: &Ratio,
    xi: f64,
    state_cap: usize,
) -> Result<UnblockedGroundTruth, HardcoreError> {
    let space = exact::enumerate_independent_sets(g, state_cap)?;
    let degree = g.max_degree() as f64;
    let lambda_f = crate::ratio_to_f64(lambda);
    let mu = fixed_point::solve_mu(lambda_f * degree);
    let window = ((mu - xi) * degree, (mu + xi) * degree);

    let mut z = Ratio::zero();
    let mut violating = Ratio::zero();
    let mut min_acc: std::collections::BTreeMap<usize, Ratio> = Default::default();
    let mut max_acc: std::collections::BTreeMap<usize, Ratio> = Default::default();
    for x in space.states() {
        let w = weight(x, lambda);
        z += w.clone();
        let (min_u, max_u) = min_max_unblocked(g, x);
        *min_acc.entry(min_u).or_insert_with(Ratio::zero) += w.clone();
        *max_acc.entry(max_u).or_insert_with(Ratio::zero) += w.clone();
        let out_of_window = g.vertices().any(|v| {
            let u = unblocked(g, x, v).len() as f64;
            u < window.0 || u > window.1
        });
        if out_of_window {
            violating += w;
        }
    }
    let normalize = |acc: std::collections::BTreeMap<usize, Ratio>| {
        acc.into_iter().map(|(k, w)| (k, w / z.clone())).collect::<Vec<_>>()
    };
    Ok(UnblockedGroundTruth {
        state_count: space.len(),
        violation_rate: violating / z.clone(),
        min_u_dist: normalize(min_acc),
        max_u_dist: normalize(max_acc),
    })
}

/// Degree threshold and step count for the warm-start mixing guarantee:
/// `degree >= 320000 ln(144 n^3/(zeta delta))/zeta^4` and
/// `T = ceil((8n/zeta) ln(2n/delta))` (the one-step contraction rate behind
/// the step count is `zeta/8n`).
#[derive(Clone, Copy, Debug)]
pub struct HardcoreMixingParams {
    pub min_degree: u64,
    pub steps: u64,
}

pub fn hardcore_mixing_parameters(
    n: usize,
    zeta: f64,
    delta: f64,
) -> Result<HardcoreMixingParams, HardcoreError> {
    if n == 0 {
        return Err(HardcoreError::InvalidParameter("need n >= 1".into()));
    }
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(HardcoreError::InvalidParameter(format!("need zeta in (0,1), got {zeta}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(HardcoreError::InvalidParameter(format!("need delta in (0,1), got {delta}")));
    }
    let nf = n as f64;
    let min_degree = (320_000.0 * (144.0 * nf.powi(3) / (zeta * delta)).ln() / zeta.powi(4)).ceil() as u64;
    let steps = ((8.0 * nf / zeta) * (2.0 * nf / delta).ln()).ceil() as u64;
    Ok(HardcoreMixingParams { min_degree, steps })
}

/// The conjectured critical fugacity `(d-1)^{d-1} / (d-2)^d`, asymptotically
/// `e/d`. Defined for `d >= 3`.
pub fn critical_fugacity(degree: usize) -> f64 {
    assert!(degree >= 3, "critical fugacity needs degree >= 3");
    let d = degree as f64;
    ((d - 1.0).ln() * (d - 1.0) - (d - 2.0).ln() * d).exp()
}
