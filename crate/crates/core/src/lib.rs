//! Single-site (heat-bath) Markov chains on graph colorings and independent
//! sets, their one-step couplings, and the machinery needed to check them:
//! exact transition kernels on small state spaces, contraction certificates in
//! rational arithmetic, local-uniformity statistics, fixed-point analysis of
//! the maps behind those statistics, and a fugacity-ladder annealing sampler.
//!
//! The crate is organized around one idea: every probabilistic claim made by a
//! sampler here can be cross-examined, either exactly (brute-force enumeration
//! of the state space, rational expectations of coupled steps) or statistically
//! (replica runs against enumerated ground truth with explicit slack).

// Parameter guards are written as `!(x >= lo)` on purpose: the negated form
// rejects NaN inputs, which `x < lo` would silently accept.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod annealing;
pub mod coloring;
pub mod coupling;
pub mod exact;
pub mod fixed_point;
pub mod graph;
pub mod hardcore;
pub mod rng;

pub use graph::Graph;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Exact rational scalar used wherever a probabilistic identity must hold
/// without rounding (coupled expectations, kernels, partition functions).
pub type Ratio = BigRational;

/// Shorthand for a small rational constant.
pub fn ratio(num: i64, den: i64) -> Ratio {
    Ratio::new(BigInt::from(num), BigInt::from(den))
}

/// Parses a rational from either `p/q` form or a finite decimal (`0.25`),
/// both read exactly.
pub fn parse_ratio(s: &str) -> Result<Ratio, String> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let q: BigInt = q.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        if q == BigInt::from(0) {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Ratio::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        use num_traits::Signed;
        let neg = int.starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" {
            BigInt::from(0)
        } else {
            int.parse().map_err(|_| format!("bad integer part in {s:?}"))?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad fractional part in {s:?}"));
        }
        let digits: BigInt = frac.parse().map_err(|_| format!("bad fractional part in {s:?}"))?;
        let scale = BigInt::from(10).pow(frac.len() as u32);
        let mut value = Ratio::from_integer(int_part.abs()) + Ratio::new(digits, scale);
        if neg {
            value = -value;
        }
        return Ok(value);
    }
    let n: BigInt = s.parse().map_err(|_| format!("not a rational: {s:?}"))?;
    Ok(Ratio::from_integer(n))
}

/// Lossy conversion for reporting; exact values should be kept as [`Ratio`].
pub fn ratio_to_f64(r: &Ratio) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
