//! Heat-bath dynamics on k-colorings, the greedy one-step coupling that
//! maximizes same-color choices, and the contraction / local-uniformity
//! checks built on top of them.
//!
//! States live in the full product space: colorings need not be proper. The
//! heat-bath step only ever assigns colors absent from the neighborhood, so
//! proper colorings form the recurrent class and the uniform distribution
//! over them is stationary (the exact kernels verify this).
//!
//! Contraction quantities are computed in exact rational arithmetic; the
//! boundary cases (expected distance exactly equal to the allowed bound)
//! make floating point unusable for verdicts.

use std::fmt;

use num_traits::{One, Zero};
use rand::Rng;

use crate::exact::{self, OracleError};
use crate::fixed_point;
use crate::graph::Graph;
use crate::rng::{self as seeding, streams};
use crate::{ratio, Ratio};

#[derive(Clone, Debug, PartialEq)]
pub enum ColoringError {
    ColorOutOfRange { vertex: usize, color: u32, k: u32 },
    LengthMismatch { expected: usize, got: usize },
    PaletteMismatch { kx: u32, ky: u32 },
    /// Distance-decreasing verdicts are about distinct pairs.
    IdenticalStates,
    HypothesisViolated(String),
    NoProperColoring { k: u32 },
    InvalidParameter(String),
    Parse(String),
    Oracle(OracleError),
}

impl fmt::Display for ColoringError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColoringError::ColorOutOfRange { vertex, color, k } => {
                write!(f, "color {color} at vertex {vertex} outside palette 1..={k}")
            }
            ColoringError::LengthMismatch { expected, got } => {
                write!(f, "coloring has {got} entries, graph has {expected} vertices")
            }
            ColoringError::PaletteMismatch { kx, ky } => {
                write!(f, "palette sizes differ: {kx} vs {ky}")
            }
            ColoringError::IdenticalStates => write!(f, "states are identical"),
            ColoringError::HypothesisViolated(msg) => write!(f, "hypothesis violated: {msg}"),
            ColoringError::NoProperColoring { k } => {
                write!(f, "could not construct a proper coloring with k = {k}")
            }
            ColoringError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            ColoringError::Parse(msg) => write!(f, "parse error: {msg}"),
            ColoringError::Oracle(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ColoringError {}

impl From<OracleError> for ColoringError {
    fn from(e: OracleError) -> Self {
        ColoringError::Oracle(e)
    }
}

/// Assignment of one color in `1..=k` per vertex; not necessarily proper.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coloring {
    colors: Vec<u32>,
    k: u32,
}

impl Coloring {
    pub fn new(colors: Vec<u32>, k: u32) -> Result<Coloring, ColoringError> {
        for (v, &c) in colors.iter().enumerate() {
            if c < 1 || c > k {
                return Err(ColoringError::ColorOutOfRange { vertex: v, color: c, k });
            }
        }
        Ok(Coloring { colors, k })
    }

    pub fn constant(n: usize, color: u32, k: u32) -> Result<Coloring, ColoringError> {
        Coloring::new(vec![color; n], k)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn color(&self, v: usize) -> u32 {
        self.colors[v]
    }

    pub fn set_color(&mut self, v: usize, c: u32) {
        debug_assert!(c >= 1 && c <= self.k);
        self.colors[v] = c;
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    /// No edge with equal endpoint colors.
    pub fn is_proper(&self, g: &Graph) -> bool {
        g.edges().iter().all(|&(u, v)| self.colors[u] != self.colors[v])
    }

    /// Number of vertices where the two colorings differ.
    pub fn hamming(&self, other: &Coloring) -> usize {
        assert_eq!(self.colors.len(), other.colors.len());
        self.colors.iter().zip(&other.colors).filter(|(a, b)| a != b).count()
    }

    /// One line of space-separated colors.
    pub fn to_line(&self) -> String {
        let strs: Vec<String> = self.colors.iter().map(u32::to_string).collect();
        strs.join(" ")
    }

    pub fn from_line(line: &str, k: u32) -> Result<Coloring, ColoringError> {
        let colors = line
            .split_whitespace()
            .map(|t| t.parse::<u32>().map_err(|_| ColoringError::Parse(format!("bad color {t:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Coloring::new(colors, k)
    }
}

/// Colors not appearing in `v`'s neighborhood, ascending. Always has at
/// least `k - deg(v)` entries.
pub fn available_colors(g: &Graph, x: &Coloring, v: usize) -> Vec<u32> {
    let k = x.k() as usize;
    let mut used = vec![false; k + 1];
    for &w in g.neighbors(v) {
        used[x.color(w) as usize] = true;
    }
    (1..=k as u32).filter(|&c| !used[c as usize]).collect()
}

pub fn min_available(g: &Graph, x: &Coloring) -> usize {
    g.vertices().map(|v| available_colors(g, x, v).len()).min().unwrap_or(x.k() as usize)
}

/// One heat-bath step: a uniform vertex is recolored uniformly over its
/// available colors. Consumes exactly two draws from `rng`: one vertex index,
/// one index into the available set. Returns the updated vertex.
///
/// The available set is never empty when `k >= max_degree + 1`; this is
/// asserted rather than surfaced as an error.
pub fn glauber_step<R: Rng + ?Sized>(g: &Graph, x: &mut Coloring, rng: &mut R) -> usize {
    let v = rng.random_range(0..g.vertex_count());
    let avail = available_colors(g, x, v);
    assert!(!avail.is_empty(), "empty available set at vertex {v}; palette too small");
    let c = avail[rng.random_range(0..avail.len())];
    x.set_color(v, c);
    v
}

/// Greedy proper coloring in vertex order; used as a start state for burn-in
/// sampling. Succeeds whenever `k >= max_degree + 1`.
pub fn greedy_coloring(g: &Graph, k: u32) -> Result<Coloring, ColoringError> {
    let mut colors = vec![0u32; g.vertex_count()];
    for v in g.vertices() {
        let mut used = vec![false; k as usize + 1];
        for &w in g.neighbors(v) {
            if w < v {
                used[colors[w] as usize] = true;
            }
        }
        match (1..=k).find(|&c| !used[c as usize]) {
            Some(c) => colors[v] = c,
            None => return Err(ColoringError::NoProperColoring { k }),
        }
    }
    Coloring::new(colors, k)
}

/// Exact joint table of the coupled color choice at one vertex, as integer
/// masses out of `|A_x| * |A_y|` total.
///
/// Layout of the unit interval, scaled to integers:
/// colors available to both chains are matched first, each with mass
/// `min(|A_x|, |A_y|)` (that is, probability `1/max`); the leftover mass of
/// each marginal is laid out sorted by color index and the two leftovers are
/// paired greedily by cumulative mass. This fixes the coupling completely,
/// so sampling and exact computation share one code path.
pub fn coupled_color_table(avail_x: &[u32], avail_y: &[u32]) -> Vec<(u32, u32, u64)> {
    let a = avail_x.len() as u64;
    let b = avail_y.len() as u64;
    assert!(a > 0 && b > 0);
    let mn = a.min(b);

    let is_common: Vec<bool> = avail_x.iter().map(|c| avail_y.contains(c)).collect();
    let mut table = Vec::new();
    for (i, &c) in avail_x.iter().enumerate() {
        if is_common[i] {
            table.push((c, c, mn));
        }
    }

    // Residual segments, sorted by color (the available lists are sorted).
    let seg_x: Vec<(u32, u64)> = avail_x
        .iter()
        .zip(&is_common)
        .map(|(&c, &common)| (c, if common { b - mn } else { b }))
        .filter(|&(_, m)| m > 0)
        .collect();
    let seg_y: Vec<(u32, u64)> = avail_y
        .iter()
        .map(|&c| (c, if avail_x.contains(&c) { a - mn } else { a }))
        .filter(|&(_, m)| m > 0)
        .collect();

    // Greedy cumulative pairing of the two residual layouts.
    let (mut ix, mut iy) = (0, 0);
    let (mut rx, mut ry) = (
        seg_x.first().map_or(0, |s| s.1),
        seg_y.first().map_or(0, |s| s.1),
    );
    while ix < seg_x.len() && iy < seg_y.len() {
        let step = rx.min(ry);
        table.push((seg_x[ix].0, seg_y[iy].0, step));
        rx -= step;
        ry -= step;
        if rx == 0 {
            ix += 1;
            rx = seg_x.get(ix).map_or(0, |s| s.1);
        }
        if ry == 0 {
            iy += 1;
            ry = seg_y.get(iy).map_or(0, |s| s.1);
        }
    }
    debug_assert_eq!(table.iter().map(|t| t.2).sum::<u64>(), a * b);
    table
}

/// One step of the coupled heat-bath dynamics: both chains recolor the same
/// uniform vertex, agreeing on the new color with the maximal probability
/// `|A_x cap A_y| / max(|A_x|, |A_y|)`; leftover mass is matched by the
/// deterministic rule of [`coupled_color_table`]. Each chain, viewed alone,
/// performs an exact heat-bath step.
///
/// Consumes exactly two draws: one vertex index, one integer below
/// `|A_x| * |A_y|`. Returns the updated vertex.
pub fn coupled_glauber_step<R: Rng + ?Sized>(
    g: &Graph,
    x: &mut Coloring,
    y: &mut Coloring,
    rng: &mut R,
) -> Result<usize, ColoringError> {
    check_pair(g, x, y)?;
    let v = rng.random_range(0..g.vertex_count());
    let avail_x = available_colors(g, x, v);
    let avail_y = available_colors(g, y, v);
    assert!(!avail_x.is_empty() && !avail_y.is_empty(), "empty available set at vertex {v}");
    let total = avail_x.len() as u64 * avail_y.len() as u64;
    let mut r = rng.random_range(0..total);
    for (cx, cy, mass) in coupled_color_table(&avail_x, &avail_y) {
        if r < mass {
            x.set_color(v, cx);
            y.set_color(v, cy);
            return Ok(v);
        }
        r -= mass;
    }
    unreachable!("coupled color table masses sum to the draw range");
}

fn check_pair(g: &Graph, x: &Coloring, y: &Coloring) -> Result<(), ColoringError> {
    if x.k() != y.k() {
        return Err(ColoringError::PaletteMismatch { kx: x.k(), ky: y.k() });
    }
    if x.len() != g.vertex_count() || y.len() != g.vertex_count() {
        return Err(ColoringError::LengthMismatch {
            expected: g.vertex_count(),
            got: if x.len() != g.vertex_count() { x.len() } else { y.len() },
        });
    }
    Ok(())
}

/// Probability the coupled choice at a vertex disagrees:
/// `1 - |A_x cap A_y| / max(|A_x|, |A_y|)`. The residual pairing never pairs
/// a color with itself (a common color has leftover mass on at most one
/// side), so this is exact for the coupling, not just an upper bound.
pub fn disagreement_probability(avail_x: &[u32], avail_y: &[u32]) -> Ratio {
    let common = avail_x.iter().filter(|c| avail_y.contains(c)).count() as i64;
    let max = avail_x.len().max(avail_y.len()) as i64;
    Ratio::one() - ratio(common, max)
}

/// Exact expected Hamming distance after one coupled step, summed in closed
/// form over the n vertex choices.
pub fn expected_coupled_distance(g: &Graph, x: &Coloring, y: &Coloring) -> Result<Ratio, ColoringError> {
    check_pair(g, x, y)?;
    let n = g.vertex_count();
    let rho = x.hamming(y) as i64;
    let mut total = Ratio::zero();
    for v in g.vertices() {
        let differs_here = i64::from(x.color(v) != y.color(v));
        let off_vertex = ratio(rho - differs_here, 1);
        let at_vertex = disagreement_probability(&available_colors(g, x, v), &available_colors(g, y, v));
        total += off_vertex + at_vertex;
    }
    Ok(total / ratio(n as i64, 1))
}

/// True iff the pair contracts strictly: `E[rho after one coupled step]
/// < (1 - eps) * rho(x, y)`, decided in exact rational arithmetic.
pub fn is_distance_decreasing_pair(
    g: &Graph,
    x: &Coloring,
    y: &Coloring,
    eps: &Ratio,
) -> Result<bool, ColoringError> {
    if x == y {
        return Err(ColoringError::IdenticalStates);
    }
    let expected = expected_coupled_distance(g, x, y)?;
    let allowed = (Ratio::one() - eps.clone()) * ratio(x.hamming(y) as i64, 1);
    Ok(expected < allowed)
}

/// True iff every vertex has at least `max_degree / (1 - beta)` available
/// colors, the slack condition under which every partner coloring contracts.
pub fn available_slack_holds(g: &Graph, x: &Coloring, beta: &Ratio) -> bool {
    let delta = ratio(g.max_degree() as i64, 1);
    let one_minus_beta = Ratio::one() - beta.clone();
    g.vertices().all(|v| {
        let avail = ratio(available_colors(g, x, v).len() as i64, 1);
        avail * one_minus_beta.clone() >= delta
    })
}

/// `min_v |A(x, v)| / (k e^{-max_degree/k})`: the local-uniformity statistic,
/// scaled so 1 means the ideal available-color count.
pub fn uniformity_statistic(g: &Graph, x: &Coloring) -> f64 {
    let k = x.k() as f64;
    let delta = g.max_degree() as f64;
    min_available(g, x) as f64 / (k * (-delta / k).exp())
}

/// Violation threshold `k (e^{-max_degree/k} - beta)`: a coloring violates
/// local uniformity at slack `beta` iff some vertex has fewer available
/// colors than this.
pub fn uniformity_threshold(g: &Graph, k: u32, beta: f64) -> f64 {
    let delta = g.max_degree() as f64;
    k as f64 * ((-delta / k as f64).exp() - beta)
}

/// How the verification samplers draw uniform proper colorings.
#[derive(Clone, Debug)]
pub enum ProperSampler {
    /// Enumerate all proper colorings and index uniformly.
    Exact,
    /// Independent chains: greedy proper start, then `burn_in` heat-bath steps.
    Mcmc { burn_in: u64 },
}

#[derive(Clone, Debug)]
pub struct UniformityReport {
    pub n: usize,
    pub k: u32,
    pub beta: f64,
    pub samples: u64,
    pub threshold: f64,
    pub violations: u64,
    pub empirical_rate: f64,
    /// `n e^{-beta^2 k / 8}`, unclamped.
    pub bound: f64,
    pub pass: bool,
    pub sampler: String,
    pub burn_in: Option<u64>,
    /// Sample counts of `min_v |A(X, v)|`, by value.
    pub min_available_histogram: Vec<(usize, u64)>,
}

/// Statistical check of the local-uniformity bound: samples proper colorings,
/// measures how often some vertex drops below the threshold, and compares the
/// empirical rate against `n e^{-beta^2 k / 8}` with three-sigma slack.
pub fn verify_available_uniformity(
    g: &Graph,
    k: u32,
    beta: f64,
    samples: u64,
    sampler: &ProperSampler,
    master_seed: u64,
    state_cap: usize,
) -> Result<UniformityReport, ColoringError> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(ColoringError::InvalidParameter(format!("need beta in (0, 1], got {beta}")));
    }
    if samples == 0 {
        return Err(ColoringError::InvalidParameter("need at least one sample".into()));
    }
    if !g.is_triangle_free() {
        return Err(ColoringError::HypothesisViolated("graph contains a triangle".into()));
    }
    let delta = g.max_degree() as f64;
    if (k as f64) < delta + 2.0 / beta {
        return Err(ColoringError::HypothesisViolated(format!(
            "need k >= max_degree + 2/beta = {}, got k = {k}",
            delta + 2.0 / beta
        )));
    }

    let n = g.vertex_count();
    let threshold = uniformity_threshold(g, k, beta);

    let mut histogram: std::collections::BTreeMap<usize, u64> = Default::default();
    let mut burn_in_used = None;
    match sampler {
        ProperSampler::Exact => {
            let space = exact::enumerate_proper_colorings(g, k, state_cap)?;
            if space.is_empty() {
                return Err(ColoringError::NoProperColoring { k });
            }
            let mut rng = seeding::derive_rng(master_seed, streams::REPLICA, 0);
            for _ in 0..samples {
                let x = space.state(rng.random_range(0..space.len()));
                *histogram.entry(min_available(g, x)).or_insert(0) += 1;
            }
        }
        ProperSampler::Mcmc { burn_in } => {
            burn_in_used = Some(*burn_in);
            let start = greedy_coloring(g, k)?;
            for i in 0..samples {
                let mut rng = seeding::derive_rng(master_seed, streams::BURN_IN, i);
                let mut x = start.clone();
                for _ in 0..*burn_in {
                    glauber_step(g, &mut x, &mut rng);
                }
                *histogram.entry(min_available(g, &x)).or_insert(0) += 1;
            }
        }
    }

    let violations: u64 =
        histogram.iter().filter(|(v, _)| (**v as f64) < threshold).map(|(_, c)| *c).sum();
    let empirical_rate = violations as f64 / samples as f64;
    let bound = n as f64 * (-beta * beta * k as f64 / 8.0).exp();
    let m = samples as f64;
    let pass = if bound >= 1.0 {
        true
    } else {
        empirical_rate <= bound + 3.0 * (bound * (1.0 - bound) / m).sqrt() + 3.0 / m.sqrt()
    };
    Ok(UniformityReport {
        n,
        k,
        beta,
        samples,
        threshold,
        violations,
        empirical_rate,
        bound,
        pass,
        sampler: match sampler {
            ProperSampler::Exact => "exact".into(),
            ProperSampler::Mcmc { .. } => "mcmc".into(),
        },
        burn_in: burn_in_used,
        min_available_histogram: histogram.into_iter().collect(),
    })
}

/// Enumeration ground truth for the uniformity violation event over uniform
/// proper colorings.
#[derive(Clone, Debug)]
pub struct UniformityGroundTruth {
    pub total_states: usize,
    pub violating_states: usize,
    pub violation_rate: Ratio,
    pub threshold: f64,
}

pub fn exact_uniformity_violation_rate(
    g: &Graph,
    k: u32,
    beta: f64,
    state_cap: usize,
) -> Result<UniformityGroundTruth, ColoringError> {
    let space = exact::enumerate_proper_colorings(g, k, state_cap)?;
    if space.is_empty() {
        return Err(ColoringError::NoProperColoring { k });
    }
    let threshold = uniformity_threshold(g, k, beta);
    let violating = space
        .states()
        .iter()
        .filter(|x| (min_available(g, x) as f64) < threshold)
        .count();
    Ok(UniformityGroundTruth {
        total_states: space.len(),
        violating_states: violating,
        violation_rate: ratio(violating as i64, space.len() as i64),
        threshold,
    })
}

/// Smallest palette size and step count under which the sampling guarantee
/// holds for a triangle-free graph on `n` vertices with the given maximum
/// degree: `k >= max((1+zeta) alpha max_degree, 288 ln(96 n^3 / zeta) / zeta^2)`
/// and `T = ceil(6 n ceil(ln 32n) ceil(ln 1/delta) / zeta)`.
#[derive(Clone, Copy, Debug)]
pub struct ColoringMixingParams {
    pub k_min: u64,
    pub steps: u64,
    /// The degree-driven palette term `(1+zeta) alpha max_degree`.
    pub degree_term: f64,
    /// The concentration-driven palette term `288 ln(96 n^3/zeta)/zeta^2`.
    pub concentration_term: f64,
}

pub fn coloring_mixing_parameters(
    n: usize,
    max_degree: usize,
    zeta: f64,
    delta: f64,
) -> Result<ColoringMixingParams, ColoringError> {
    if n == 0 {
        return Err(ColoringError::InvalidParameter("need n >= 1".into()));
    }
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(ColoringError::InvalidParameter(format!("need zeta in (0, 1), got {zeta}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(ColoringError::InvalidParameter(format!("need delta in (0, 1), got {delta}")));
    }
    let nf = n as f64;
    let degree_term = (1.0 + zeta) * fixed_point::solve_alpha() * max_degree as f64;
    let concentration_term = 288.0 * (96.0 * nf.powi(3) / zeta).ln() / (zeta * zeta);
    let k_min = degree_term.max(concentration_term).ceil() as u64;
    let steps = (6.0 * nf * (32.0 * nf).ln().ceil() * (1.0 / delta).ln().ceil() / zeta).ceil() as u64;
    Ok(ColoringMixingParams { k_min, steps, degree_term, concentration_term })
}
