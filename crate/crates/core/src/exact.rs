//! Brute-force ground truth on small instances: enumerated state spaces,
//! exact row-stochastic transition kernels with verified stationary
//! distributions, total-variation decay curves, exact mixing times, and exact
//! partition functions.
//!
//! Kernel rows are assembled in rational arithmetic (so row sums are exactly
//! one) and stored dense in `f64`; the rational rows stay recomputable for
//! the exact checks (stationarity, detailed balance) on instances small
//! enough to afford them.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;

use num_traits::{One, Zero};

use crate::coloring::Coloring;
use crate::graph::Graph;
use crate::hardcore::{self, IndependentSet};
use crate::{ratio, ratio_to_f64, Ratio};

/// Default limit on enumerated states.
pub const DEFAULT_STATE_CAP: usize = 1_000_000;
/// Default limit on dense kernel dimension.
pub const DEFAULT_KERNEL_CAP: usize = 10_000;
/// Step limit for mixing-time searches.
const MIXING_STEP_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum OracleError {
    CapExceeded { needed: Option<u128>, cap: usize },
    /// A kernel row left the enumerated space; the space is not closed.
    NotClosed { state: String },
    NoRecurrentStates,
    /// Stationarity failed numerically; signals a kernel bug.
    InvarianceViolated { entry: usize, error: f64 },
    /// The recurrent states split into several closed classes.
    NonErgodic { class_count: usize },
    MixingSearchExceeded { cap: usize },
    InvalidParameter(String),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::CapExceeded { needed, cap } => match needed {
                Some(n) => write!(f, "state space of size {n} exceeds cap {cap}"),
                None => write!(f, "state space exceeds cap {cap}"),
            },
            OracleError::NotClosed { state } => {
                write!(f, "kernel leaves the enumerated space at state {state}")
            }
            OracleError::NoRecurrentStates => write!(f, "no state carries stationary weight"),
            OracleError::InvarianceViolated { entry, error } => {
                write!(f, "stationary distribution not invariant at entry {entry} (error {error:e})")
            }
            OracleError::NonErgodic { class_count } => {
                write!(f, "recurrent states split into {class_count} closed classes")
            }
            OracleError::MixingSearchExceeded { cap } => {
                write!(f, "mixing time not reached within {cap} steps")
            }
            OracleError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

impl std::error::Error for OracleError {}

/// Deterministically ordered enumeration of a finite state space with an
/// index for constant-time lookup.
#[derive(Clone, Debug)]
pub struct StateSpace<S> {
    states: Vec<S>,
    index: HashMap<S, usize>,
}

impl<S: Clone + Eq + Hash> StateSpace<S> {
    pub fn from_states(states: Vec<S>) -> StateSpace<S> {
        let index = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        StateSpace { states, index }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &S {
        &self.states[i]
    }

    pub fn index_of(&self, s: &S) -> Option<usize> {
        self.index.get(s).copied()
    }
}

/// All colorings of `g` with palette `1..=k`, in lexicographic order of the
/// color vector. Requires `k^n <= cap`.
pub fn enumerate_all_colorings(g: &Graph, k: u32, cap: usize) -> Result<StateSpace<Coloring>, OracleError> {
    let n = g.vertex_count();
    let total = (k as u128).checked_pow(n as u32).ok_or(OracleError::CapExceeded { needed: None, cap })?;
    if total > cap as u128 {
        return Err(OracleError::CapExceeded { needed: Some(total), cap });
    }
    let mut states = Vec::with_capacity(total as usize);
    let mut colors = vec![1u32; n];
    loop {
        states.push(Coloring::new(colors.clone(), k).expect("enumerated colors in range"));
        // Increment the base-k counter, last vertex fastest.
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(StateSpace::from_states(states));
            }
            pos -= 1;
            if colors[pos] < k {
                colors[pos] += 1;
                break;
            }
            colors[pos] = 1;
        }
    }
}

/// Proper colorings only, enumerated by backtracking in the same order.
/// The cap applies to the number of proper colorings found.
pub fn enumerate_proper_colorings(
    g: &Graph,
    k: u32,
    cap: usize,
) -> Result<StateSpace<Coloring>, OracleError> {
    let n = g.vertex_count();
    let mut states = Vec::new();
    let mut colors = vec![0u32; n];
    fn rec(
        g: &Graph,
        k: u32,
        v: usize,
        colors: &mut Vec<u32>,
        states: &mut Vec<Coloring>,
        cap: usize,
    ) -> Result<(), OracleError> {
        let n = g.vertex_count();
        if v == n {
            if states.len() == cap {
                return Err(OracleError::CapExceeded { needed: None, cap });
            }
            states.push(Coloring::new(colors.clone(), k).expect("enumerated colors in range"));
            return Ok(());
        }
        'colors: for c in 1..=k {
            for &w in g.neighbors(v) {
                if w < v && colors[w] == c {
                    continue 'colors;
                }
            }
            colors[v] = c;
            rec(g, k, v + 1, colors, states, cap)?;
        }
        Ok(())
    }
    if n == 0 {
        return Ok(StateSpace::from_states(vec![Coloring::new(vec![], k).unwrap()]));
    }
    rec(g, k, 0, &mut colors, &mut states, cap)?;
    Ok(StateSpace::from_states(states))
}

/// All independent sets of `g` (including the empty set), enumerated by
/// backtracking; order is lexicographic in the occupancy vector.
pub fn enumerate_independent_sets(g: &Graph, cap: usize) -> Result<StateSpace<IndependentSet>, OracleError> {
    let n = g.vertex_count();
    let mut states = Vec::new();
    let mut current = IndependentSet::empty(n);
    fn rec(
        g: &Graph,
        v: usize,
        current: &mut IndependentSet,
        states: &mut Vec<IndependentSet>,
        cap: usize,
    ) -> Result<(), OracleError> {
        if v == g.vertex_count() {
            if states.len() == cap {
                return Err(OracleError::CapExceeded { needed: None, cap });
            }
            states.push(current.clone());
            return Ok(());
        }
        rec(g, v + 1, current, states, cap)?;
        if hardcore::addable(g, current, v) {
            current.insert(v);
            rec(g, v + 1, current, states, cap)?;
            current.remove(v);
        }
        Ok(())
    }
    rec(g, 0, &mut current, &mut states, cap)?;
    states.sort();
    Ok(StateSpace::from_states(states))
}

/// One-step transition law of a chain, in exact arithmetic, plus the
/// unnormalized stationary weight of each state.
pub trait StepKernel {
    type State: Clone + Eq + Hash + Ord;

    /// Exact distribution of the next state; probabilities sum to one.
    fn step_distribution(&self, s: &Self::State) -> Vec<(Self::State, Ratio)>;

    /// Unnormalized stationary weight (zero for transient states).
    fn stationary_weight(&self, s: &Self::State) -> Ratio;

    fn describe(&self) -> String;
}

/// Heat-bath kernel on colorings; stationary on the uniform distribution
/// over proper colorings.
pub struct ColoringGlauber<'g> {
    pub graph: &'g Graph,
    pub k: u32,
}

impl StepKernel for ColoringGlauber<'_> {
    type State = Coloring;

    fn step_distribution(&self, s: &Coloring) -> Vec<(Coloring, Ratio)> {
        let n = self.graph.vertex_count() as i64;
        let mut acc: BTreeMap<Coloring, Ratio> = BTreeMap::new();
        for v in self.graph.vertices() {
            let avail = crate::coloring::available_colors(self.graph, s, v);
            let p = ratio(1, n * avail.len() as i64);
            for c in avail {
                let mut next = s.clone();
                next.set_color(v, c);
                *acc.entry(next).or_insert_with(Ratio::zero) += p.clone();
            }
        }
        acc.into_iter().collect()
    }

    fn stationary_weight(&self, s: &Coloring) -> Ratio {
        if s.is_proper(self.graph) {
            Ratio::one()
        } else {
            Ratio::zero()
        }
    }

    fn describe(&self) -> String {
        format!("coloring heat-bath, k = {}", self.k)
    }
}

/// Heat-bath kernel on independent sets at rational fugacity; stationary on
/// the Gibbs distribution with weight `lambda^{|X|}`.
pub struct HardcoreGlauber<'g> {
    pub graph: &'g Graph,
    pub lambda: Ratio,
}

impl StepKernel for HardcoreGlauber<'_> {
    type State = IndependentSet;

    fn step_distribution(&self, s: &IndependentSet) -> Vec<(IndependentSet, Ratio)> {
        let n = self.graph.vertex_count() as i64;
        let p_add = self.lambda.clone() / (Ratio::one() + self.lambda.clone());
        let p_remove = Ratio::one() - p_add.clone();
        let mut acc: BTreeMap<IndependentSet, Ratio> = BTreeMap::new();
        for v in self.graph.vertices() {
            for (add, p) in [(true, &p_add), (false, &p_remove)] {
                let mut next = s.clone();
                hardcore::apply_update(self.graph, &mut next, v, add);
                *acc.entry(next).or_insert_with(Ratio::zero) += p.clone() / ratio(n, 1);
            }
        }
        acc.into_iter().collect()
    }

    fn stationary_weight(&self, s: &IndependentSet) -> Ratio {
        hardcore::weight(s, &self.lambda)
    }

    fn describe(&self) -> String {
        format!("hard-core heat-bath, lambda = {}", self.lambda)
    }
}

/// Enumerated chain: dense `f64` kernel plus exact stationary distribution,
/// with stationarity verified at construction.
pub struct ExactChain<K: StepKernel> {
    pub space: StateSpace<K::State>,
    pub source: K,
    /// Row-stochastic kernel, row sums exactly one before conversion.
    pub kernel: Vec<Vec<f64>>,
    pub pi: Vec<f64>,
    pub pi_exact: Vec<Ratio>,
    /// States with positive stationary weight.
    pub recurrent: Vec<bool>,
}

impl<K: StepKernel> ExactChain<K> {
    /// Builds the dense kernel and verifies: rows sum to one exactly,
    /// `pi` sums to one, and `pi` is invariant within 1e-12 per entry.
    pub fn build(space: StateSpace<K::State>, source: K, kernel_cap: usize) -> Result<Self, OracleError> {
        let n = space.len();
        if n == 0 {
            return Err(OracleError::NoRecurrentStates);
        }
        if n > kernel_cap {
            return Err(OracleError::CapExceeded { needed: Some(n as u128), cap: kernel_cap });
        }

        let mut kernel = vec![vec![0.0f64; n]; n];
        for (i, kernel_row) in kernel.iter_mut().enumerate() {
            let row = source.step_distribution(space.state(i));
            let mut sum = Ratio::zero();
            for (next, p) in row {
                let j = space.index_of(&next).ok_or_else(|| OracleError::NotClosed {
                    state: format!("row {i}"),
                })?;
                sum += p.clone();
                kernel_row[j] += ratio_to_f64(&p);
            }
            if !sum.is_one() {
                return Err(OracleError::InvalidParameter(format!(
                    "kernel row {i} sums to {sum}, expected 1"
                )));
            }
        }

        let weights: Vec<Ratio> = space.states().iter().map(|s| source.stationary_weight(s)).collect();
        let z: Ratio = weights.iter().cloned().sum();
        if z.is_zero() {
            return Err(OracleError::NoRecurrentStates);
        }
        let pi_exact: Vec<Ratio> = weights.iter().map(|w| w.clone() / z.clone()).collect();
        let pi: Vec<f64> = pi_exact.iter().map(ratio_to_f64).collect();
        let recurrent: Vec<bool> = weights.iter().map(|w| !w.is_zero()).collect();

        let chain = ExactChain { space, source, kernel, pi, pi_exact, recurrent };
        chain.check_invariance_f64()?;
        Ok(chain)
    }

    fn check_invariance_f64(&self) -> Result<(), OracleError> {
        let image = self.distribution_after(&self.pi, 1);
        for (j, (&got, &want)) in image.iter().zip(&self.pi).enumerate() {
            let err = (got - want).abs();
            if err > 1e-12 {
                return Err(OracleError::InvarianceViolated { entry: j, error: err });
            }
        }
        Ok(())
    }

    /// Kernel row recomputed in exact arithmetic.
    pub fn rational_row(&self, i: usize) -> Vec<Ratio> {
        let mut row = vec![Ratio::zero(); self.space.len()];
        for (next, p) in self.source.step_distribution(self.space.state(i)) {
            let j = self.space.index_of(&next).expect("row verified closed at build time");
            row[j] += p;
        }
        row
    }

    /// `pi P = pi`, in exact arithmetic. Quadratic in the state count.
    pub fn stationarity_exact(&self) -> bool {
        let n = self.space.len();
        let mut image = vec![Ratio::zero(); n];
        for i in 0..n {
            if self.pi_exact[i].is_zero() {
                continue;
            }
            for (j, p) in self.rational_row(i).into_iter().enumerate() {
                if !p.is_zero() {
                    image[j] += self.pi_exact[i].clone() * p;
                }
            }
        }
        image == self.pi_exact
    }

    /// Entrywise detailed balance `w(x) P(x,y) = w(y) P(y,x)`, in exact
    /// arithmetic. Quadratic in the state count.
    pub fn detailed_balance_exact(&self) -> bool {
        let n = self.space.len();
        let rows: Vec<Vec<Ratio>> = (0..n).map(|i| self.rational_row(i)).collect();
        let w: Vec<Ratio> =
            self.space.states().iter().map(|s| self.source.stationary_weight(s)).collect();
        for i in 0..n {
            for j in (i + 1)..n {
                if w[i].clone() * rows[i][j].clone() != w[j].clone() * rows[j][i].clone() {
                    return false;
                }
            }
        }
        true
    }

    pub fn point_mass(&self, i: usize) -> Vec<f64> {
        let mut d = vec![0.0; self.space.len()];
        d[i] = 1.0;
        d
    }

    /// `start * kernel^t` by repeated vector-kernel products with a fixed
    /// summation order.
    pub fn distribution_after(&self, start: &[f64], t: usize) -> Vec<f64> {
        assert_eq!(start.len(), self.space.len());
        let mut d = start.to_vec();
        let mut next = vec![0.0; d.len()];
        for _ in 0..t {
            next.iter_mut().for_each(|x| *x = 0.0);
            for (i, &mass) in d.iter().enumerate() {
                if mass == 0.0 {
                    continue;
                }
                for (j, &p) in self.kernel[i].iter().enumerate() {
                    if p != 0.0 {
                        next[j] += mass * p;
                    }
                }
            }
            std::mem::swap(&mut d, &mut next);
        }
        d
    }

    /// Total-variation distance to stationarity after `0..=t_max` steps.
    pub fn tv_decay(&self, start: &[f64], t_max: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(t_max + 1);
        let mut d = start.to_vec();
        out.push(tv_distance(&d, &self.pi));
        for _ in 0..t_max {
            d = self.distribution_after(&d, 1);
            out.push(tv_distance(&d, &self.pi));
        }
        out
    }

    /// Closed communicating classes among the recurrent states.
    pub fn recurrent_classes(&self) -> Vec<Vec<usize>> {
        let n = self.space.len();
        // Undirected reachability suffices: restricted to recurrent states the
        // kernel is reversible (positive weights, detailed balance), so
        // P(i,j) > 0 iff P(j,i) > 0.
        let mut seen = vec![false; n];
        let mut classes = Vec::new();
        for s in 0..n {
            if !self.recurrent[s] || seen[s] {
                continue;
            }
            let mut class = Vec::new();
            let mut queue = VecDeque::from([s]);
            seen[s] = true;
            while let Some(i) = queue.pop_front() {
                class.push(i);
                for (j, seen_j) in seen.iter_mut().enumerate() {
                    if self.recurrent[j]
                        && !*seen_j
                        && (self.kernel[i][j] > 0.0 || self.kernel[j][i] > 0.0)
                    {
                        *seen_j = true;
                        queue.push_back(j);
                    }
                }
            }
            class.sort_unstable();
            classes.push(class);
        }
        classes
    }

    /// Least `t` such that every recurrent point-mass start is within `delta`
    /// of stationarity in total variation. Reports non-ergodicity instead of
    /// silently returning a per-class value; see [`Self::class_mixing_times`]
    /// for the per-class notion.
    pub fn exact_mixing_time(&self, delta: f64) -> Result<usize, OracleError> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(OracleError::InvalidParameter(format!("need delta in (0,1), got {delta}")));
        }
        let classes = self.recurrent_classes();
        if classes.len() != 1 {
            return Err(OracleError::NonErgodic { class_count: classes.len() });
        }
        self.mixing_time_within(&classes[0], delta)
    }

    /// Mixing time of each closed recurrent class, against the stationary
    /// distribution restricted to (and renormalized on) that class. For an
    /// ergodic chain this is a single entry equal to the global value.
    pub fn class_mixing_times(&self, delta: f64) -> Result<Vec<ClassMixing>, OracleError> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(OracleError::InvalidParameter(format!("need delta in (0,1), got {delta}")));
        }
        self.recurrent_classes()
            .into_iter()
            .map(|class| {
                let steps = self.mixing_time_within(&class, delta)?;
                Ok(ClassMixing { size: class.len(), representative: class[0], steps })
            })
            .collect()
    }

    /// Worst-start mixing within one closed class of states.
    fn mixing_time_within(&self, class: &[usize], delta: f64) -> Result<usize, OracleError> {
        let mass: f64 = class.iter().map(|&i| self.pi[i]).sum();
        let mut pi_class = vec![0.0; self.space.len()];
        for &i in class {
            pi_class[i] = self.pi[i] / mass;
        }
        let mut dists: Vec<Vec<f64>> = class.iter().map(|&i| self.point_mass(i)).collect();
        for t in 0..=MIXING_STEP_CAP {
            let worst = dists.iter().map(|d| tv_distance(d, &pi_class)).fold(0.0, f64::max);
            if worst <= delta {
                return Ok(t);
            }
            for d in &mut dists {
                *d = self.distribution_after(d, 1);
            }
        }
        Err(OracleError::MixingSearchExceeded { cap: MIXING_STEP_CAP })
    }
}

/// Mixing time of one closed recurrent class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassMixing {
    pub size: usize,
    /// Smallest state index in the class.
    pub representative: usize,
    pub steps: usize,
}

/// `1/2 sum |a_i - b_i|`.
pub fn tv_distance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Exact partition function `sum_X lambda^{|X|}` over independent sets.
pub fn partition_function(g: &Graph, lambda: &Ratio, cap: usize) -> Result<Ratio, OracleError> {
    let space = enumerate_independent_sets(g, cap)?;
    Ok(space.states().iter().map(|x| hardcore::weight(x, lambda)).sum())
}
