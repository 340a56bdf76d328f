//! Subcommand runners: load or generate the instance, drive the core
//! routines, and write deterministic CSV/JSON artifacts that embed the
//! resolved configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use glauber_core::annealing::{self, StepRule};
use glauber_core::coloring::{self, Coloring, ProperSampler};
use glauber_core::coupling::{self, run_coupled};
use glauber_core::exact::{self, ColoringGlauber, ExactChain, HardcoreGlauber, OracleError, StepKernel};
use glauber_core::fixed_point;
use glauber_core::graph::{Graph, GraphError, GraphFamily};
use glauber_core::hardcore::{self, GibbsSampler, IndependentSet};
use glauber_core::rng::{derive_rng, derive_seed, streams};
use glauber_core::{parse_ratio, ratio, ratio_to_f64, Ratio};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::{
    AnnealArgs, AnnealMode, BoundsArgs, ChainKind, Command, CoupleColoringsArgs,
    CoupleHardcoreArgs, ExactTvArgs, FixedPointSweepArgs, GraphSource, SampleColoringsArgs,
    SampleHardcoreArgs, SamplerKind, VerifyLemma21Args, VerifyLemma23Args, VerifyLemma42Args,
    VerifyLemma48Args,
};

pub const FORMAT_VERSION: u32 = 1;
/// Dense-kernel guards for the exact oracle paths.
const COLORING_KERNEL_CAP: usize = exact::DEFAULT_KERNEL_CAP;
const HARDCORE_KERNEL_CAP: usize = 1 << 14;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    CapExceeded(String),
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::CapExceeded(_) => 3,
            CliError::Failed(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::CapExceeded(m) | CliError::Failed(m) => write!(f, "{m}"),
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::GenerationFailed { .. } => CliError::Failed(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::CapExceeded { .. } => CliError::CapExceeded(e.to_string()),
            OracleError::InvalidParameter(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<coloring::ColoringError> for CliError {
    fn from(e: coloring::ColoringError) -> Self {
        match e {
            coloring::ColoringError::Oracle(o) => o.into(),
            coloring::ColoringError::NoProperColoring { .. } => CliError::Failed(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<hardcore::HardcoreError> for CliError {
    fn from(e: hardcore::HardcoreError) -> Self {
        match e {
            hardcore::HardcoreError::Oracle(o) => o.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<annealing::AnnealError> for CliError {
    fn from(e: annealing::AnnealError) -> Self {
        match e {
            annealing::AnnealError::Oracle(o) => o.into(),
            annealing::AnnealError::Hardcore(h) => h.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<coupling::CouplingError> for CliError {
    fn from(e: coupling::CouplingError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<fixed_point::FixedPointError> for CliError {
    fn from(e: fixed_point::FixedPointError) -> Self {
        match e {
            fixed_point::FixedPointError::InvalidParameter(_) => CliError::Usage(e.to_string()),
            fixed_point::FixedPointError::NotContained { .. } => CliError::Failed(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(format!("io error: {e}"))
    }
}

/// Whether every assertion the experiment makes held.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Passed,
    AssertionFailed,
}

/// Splices `--config FILE` JSON keys in as long flags ahead of the explicit
/// arguments; explicit flags then override the file (last occurrence wins).
pub fn merge_config_args(argv: Vec<String>) -> Result<Vec<String>, String> {
    let mut config_path: Option<String> = None;
    let mut cleaned = Vec::with_capacity(argv.len());
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            config_path = Some(it.next().ok_or("--config needs a path")?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            config_path = Some(p.to_string());
        } else {
            cleaned.push(a);
        }
    }
    let Some(path) = config_path else { return Ok(cleaned) };
    if cleaned.len() < 2 {
        return Err("--config requires a subcommand".into());
    }
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format!("invalid config JSON: {e}"))?;
    let obj = value.as_object().ok_or("config must be a JSON object of flag values")?;
    let mut merged = cleaned[..2].to_vec();
    for (key, v) in obj {
        let rendered = match v {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            Value::Bool(b) => b.to_string(),
            other => return Err(format!("config key {key:?}: unsupported value {other}")),
        };
        merged.push(format!("--{key}"));
        merged.push(rendered);
    }
    merged.extend(cleaned[2..].iter().cloned());
    Ok(merged)
}

fn load_graph(source: &GraphSource) -> Result<Graph, CliError> {
    match (&source.graph, &source.generator) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read graph {}: {e}", path.display())))?;
            Ok(Graph::from_text(&text)?)
        }
        (None, Some(spec)) => {
            let family: GraphFamily = spec.parse()?;
            Ok(family.build()?)
        }
        _ => Err(CliError::Usage("provide exactly one of --graph or --gen".into())),
    }
}

/// Resolves an output path; when omitted, `default_name` is placed in
/// `$GLAUBER_OUT_DIR` (or the working directory).
fn resolve_out(out: &Option<PathBuf>, default_name: &str) -> PathBuf {
    match out {
        Some(p) => p.clone(),
        None => {
            let dir = std::env::var("GLAUBER_OUT_DIR").unwrap_or_else(|_| ".".into());
            Path::new(&dir).join(default_name)
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, contents)?;
    Ok(())
}

fn emit_json(path: &Path, payload: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(payload).expect("json serialization");
    write_file(path, &text)?;
    println!("{text}");
    Ok(())
}

fn config_value<T: serde::Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("args serialize")
}

fn seed_note() -> Value {
    json!({
        "scheme": "splitmix64 chain over (master, stream, index)",
        "streams": {"replica": streams::REPLICA, "level": streams::LEVEL, "burn_in": streams::BURN_IN, "generator": streams::GENERATOR},
    })
}

fn parse_ratio_arg(s: &str, what: &str) -> Result<Ratio, CliError> {
    parse_ratio(s).map_err(|e| CliError::Usage(format!("bad {what}: {e}")))
}

fn default_burn_in(n: usize) -> u64 {
    500 * n as u64
}

fn greedy_independent_set(g: &Graph) -> IndependentSet {
    let mut s = IndependentSet::empty(g.vertex_count());
    for v in g.vertices() {
        if hardcore::addable(g, &s, v) {
            s.insert(v);
        }
    }
    s
}

pub fn dispatch(cmd: Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::SampleColorings(a) => sample_colorings(a),
        Command::SampleHardcore(a) => sample_hardcore(a),
        Command::CoupleColorings(a) => couple_colorings(a),
        Command::CoupleHardcore(a) => couple_hardcore(a),
        Command::VerifyLemma21(a) => verify_lemma21(a),
        Command::VerifyLemma23(a) => verify_lemma23(a),
        Command::VerifyLemma42(a) => verify_lemma42(a),
        Command::VerifyLemma48(a) => verify_lemma48(a),
        Command::FixedPointSweep(a) => fixed_point_sweep(a),
        Command::Anneal(a) => anneal(a),
        Command::ExactTv(a) => exact_tv(a),
        Command::Bounds(a) => bounds(a),
    }
}

fn sample_colorings(args: SampleColoringsArgs) -> Result<Outcome, CliError> {
    let g = load_graph(&args.source)?;
    if (args.k as usize) < g.max_degree() + 1 {
        return Err(CliError::Usage(format!(
            "need k >= max_degree + 1 = {}, got {}",
            g.max_degree() + 1,
            args.k
        )));
    }
    let mut x = coloring::greedy_coloring(&g, args.k)?;
    let mut rng = derive_rng(args.seed, streams::REPLICA, 0);
    let mut csv = String::from("step,min_available\n");
    let _ = writeln!(csv, "0,{}", coloring::min_available(&g, &x));
    for step in 1..=args.steps {
        coloring::glauber_step(&g, &mut x, &mut rng);
        if step % args.record_every == 0 {
            let _ = writeln!(csv, "{step},{}", coloring::min_available(&g, &x));
        }
    }
    let csv_path = resolve_out(&args.out, "sample_colorings.csv");
    write_file(&csv_path, &csv)?;
    let summary = json!({
        "format_version": FORMAT_VERSION,
        "config": config_value(&args),
        "seed_derivation": seed_note(),
        "n": g.vertex_count(),
        "max_degree": g.max_degree(),
        "final_coloring": x.to_line(),
        "proper": x.is_proper(&g),
        "csv": csv_path.display().to_string(),
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
    Ok(Outcome::Passed)
}

fn sample_hardcore(args: SampleHardcoreArgs) -> Result<Outcome, CliError> {
    let g = load_graph(&args.source)?;
    let lambda = parse_ratio_arg(&args.lambda, "lambda")?;
    let lambda_f = ratio_to_f64(&lambda);
    if !(lambda_f > 0.0) {
        return Err(CliError::Usage("lambda must be positive".into()));
    }
    let mut x = IndependentSet::empty(g.vertex_count());
    let mut rng = derive_rng(args.seed, streams::REPLICA, 0);
    let mut csv = String::from("step,set_size,min_u,max_u\n");
    let (min_u, max_u) = hardcore::min_max_unblocked(&g, &x);
    let _ = writeln!(csv, "0,{},{min_u},{max_u}", x.size());
    for step in 1..=args.steps {
        hardcore::glauber_step(&g, &mut x, lambda_f, &mut rng);
        if step % args.record_every == 0 {
            let (min_u, max_u) = hardcore::min_max_unblocked(&g, &x);
            let _ = writeln!(csv, "{step},{},{min_u},{max_u}", x.size());
        }
    }
    let csv_path = resolve_out(&args.out, "sample_hardcore.csv");
    write_file(&csv_path, &csv)?;
    let summary = json!({
        "format_version": FORMAT_VERSION,
        "config": config_value(&args),
        "seed_derivation": seed_note(),
        "n": g.vertex_count(),
        "final_set": x.to_line(),
        "final_size": x.size(),
        "csv": csv_path.display().to_string(),
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
    Ok(Outcome::Passed)
}

fn couple_colorings(args: CoupleColoringsArgs) -> Result<Outcome, CliError> {
    let g = load_graph(&args.source)?;
    if (args.k as usize) < g.max_degree() + 1 || args.k < 2 {
        return Err(CliError::Usage(format!(
            "need k >= max(2, max_degree + 1), got {}",
            args.k
        )));
    }
    let n = g.vertex_count();
    let x0 = Coloring::constant(n, 1, args.k).expect("constant coloring");
    let y0 = Coloring::constant(n, 2, args.k).expect("constant coloring");
    let trajectories: Vec<Vec<u64>> = (0..args.replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = derive_rng(args.seed, streams::REPLICA, i);
            run_coupled(
                &x0,
                &y0,
                args.steps as usize,
                |a: &Coloring, b: &Coloring| a.hamming(b) as u64,
                |a, b, r| {
                    coloring::coupled_glauber_step(&g, a, b, r).expect("validated pair");
                },
                &mut rng,
            )
            .distances
        })
        .collect();
    write_coupled_csv(&args.out, "couple_colorings.csv", &trajectories, &config_value(&args))
}

fn couple_hardcore(args: CoupleHardcoreArgs) -> Result<Outcome, CliError> {
    let g = load_graph(&args.source)?;
    let lambda = parse_ratio_arg(&args.lambda, "lambda")?;
    let lambda_f = ratio_to_f64(&lambda);
    if !(lambda_f > 0.0) {
        return Err(CliError::Usage("lambda must be positive".into()));
    }
    let x0 = IndependentSet::empty(g.vertex_count());
    let y0 = greedy_independent_set(&g);
    let trajectories: Vec<Vec<u64>> = (0..args.replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = derive_rng(args.seed, streams::REPLICA, i);
            run_coupled(
                &x0,
                &y0,
                args.steps as usize,
                |a: &IndependentSet, b: &IndependentSet| a.hamming(b) as u64,
                |a, b, r| {
                    hardcore::coupled_glauber_step(&g, a, b, lambda_f, r).expect("validated pair");
                },
                &mut rng,
            )
            .distances
        })
        .collect();
    write_coupled_csv(&args.out, "couple_hardcore.csv", &trajectories, &config_value(&args))
}

fn write_coupled_csv(
    out: &Option<PathBuf>,
    default_name: &str,
    trajectories: &[Vec<u64>],
    config: &Value,
) -> Result<Outcome, CliError> {
    let mut csv = String::from("replica,step,distance\n");
    for (replica, distances) in trajectories.iter().enumerate() {
        for (step, d) in distances.iter().enumerate() {
            let _ = writeln!(csv, "{replica},{step},{d}");
        }
    }
    let csv_path = resolve_out(out, default_name);
    write_file(&csv_path, &csv)?;
    let met = trajectories.iter().filter(|t| *t.last().unwrap() == 0).count();
    let mean_final: f64 = trajectories.iter().map(|t| *t.last().unwrap() as f64).sum::<f64>()
        / trajectories.len().max(1) as f64;
    let summary = json!({
        "format_version": FORMAT_VERSION,
        "config": config,
        "seed_derivation": seed_note(),
        "replicas": trajectories.len(),
        "met_fraction": met as f64 / trajectories.len().max(1) as f64,
        "mean_final_distance": mean_final,
        "csv": csv_path.display().to_string(),
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
    Ok(Outcome::Passed)
}

fn verify_lemma21(args: VerifyLemma21Args) -> Result<Outcome, CliError> {
    let g = load_graph(&args.source)?;
    let sampler = match args.sampler {
        SamplerKind::Exact => ProperSampler::Exact,
        SamplerKind::Mcmc => ProperSampler::Mcmc {
            burn_in: args.burn_in.unwrap_or_else(|| default_burn_in(g.vertex_count())),
        },
    };
    let report = coloring::verify_available_uniformity(
        &g, args.k, args.beta, args.samples, &sampler, args.seed, args.cap,
    )?;
    // Enumerated ground truth, when the proper colorings fit under the cap.
    let truth = coloring::exact_uniformity_violation_rate(&g, args.k, args.beta, args.cap)
        .ok()
        .map(|t| {
            json!({
                "total_states": t.total_states,
                "violating_states": t.violating_states,
                "violation_rate": ratio_to_f64(&t.violation_rate),
                "violation_rate_exact": t.violation_rate.to_string(),
            })
        });
    if let Some(path) = &args.histogram {
        let mut csv = String::from("bin_lo,bin_hi,count\n");
        for (value, count) in &report.min_available_histogram {
            let _ = writeln!(csv, "{value},{},{count}", value + 1);
        }
        write_file(path, &csv)?;
    }
    let payload = json!({
        "format_version": FORMAT_VERSION,
        "config": config_value(&args),
        "seed_derivation": seed_note(),
        "n": report.n,
        "threshold": report.threshold,
        "violations": report.violations,
        "empirical_rate": report.empirical_rate,
        "bound": report.bound,
        "pass": report.pass,
        "sampler": report.sampler,
        "burn_in": report.burn_in,
        "min_available_histogram": report.min_available_histogram,
        "ground_truth": truth,
    });
    emit_json(&resolve_out(&args.out, "verify_lemma21.json"), &payload)?;
    Ok(if report.pass { Outcome::Passed } else { Outcome::AssertionFailed })
}

fn verify_lemma23(args: VerifyLemma23Args) -> Result<Outcome, CliError> {
    let g = load_graph(&args.source)?;
    let beta = parse_ratio_arg(&args.beta, "beta")?;
    if beta <= Ratio::zero() || beta >= Ratio::one() {
        return Err(CliError::Usage("beta must be in (0, 1)".into()));
    }
    let n = g.vertex_count() as i64;
    let space = exact::enumerate_all_colorings(&g, args.k, args.cap)?;
    let contraction = Ratio::one() - beta.clone() / ratio(n, 1);

    let mut checked = 0u64;
    let mut under_hypothesis = 0u64;
    let mut violations: Vec<Value> = Vec::new();
    let exhaustive = space.len() <= args.exhaustive_limit;
    let mut check_pair = |x: &Coloring, y: &Coloring| -> Result<(), CliError> {
        checked += 1;
        if !coloring::available_slack_holds(&g, x, &beta) {
            return Ok(());
        }
        under_hypothesis += 1;
        let expected = coloring::expected_coupled_distance(&g, x, y)?;
        let allowed = contraction.clone() * ratio(x.hamming(y) as i64, 1);
        if expected > allowed {
            violations.push(json!({
                "x": x.to_line(),
                "y": y.to_line(),
                "expected": expected.to_string(),
                "allowed": allowed.to_string(),
            }));
        }
        Ok(())
    };
    if exhaustive {
        for x in space.states() {
            for y in space.states() {
                if x != y {
                    check_pair(x, y)?;
                }
            }
        }
    } else {
        let mut rng = derive_rng(args.seed, streams::REPLICA, 0);
        use rand::Rng;
        let mut drawn = 0;
        while drawn < args.pairs {
            let i = rng.random_range(0..space.len());
            let j = rng.random_range(0..space.len());
            if i == j {
                continue;
            }
            check_pair(space.state(i), space.state(j))?;
            drawn += 1;
        }
    }
    let pass = violations.is_empty();
    let payload = json!({
        "format_version": FORMAT_VERSION,
        "config": config_value(&args),
        "seed_derivation": seed_note(),
        "states": space.len(),
        "mode": if exhaustive { "exhaustive" } else { "sampled" },
        "pairs_checked": checked,
        "pairs_under_hypothesis": under_hypothesis,
        "violations": violations,
        "pass": pass,
    });
    emit_json(&resolve_out(&args.out, "verify_lemma23.json"), &payload)?;
    Ok(if pass { Outcome::Passed } else { Outcome::AssertionFailed })
}

fn verify_lemma42(args: VerifyLemma42Args) -> Result<Outcome, CliError> {
    let g = load_graph(&args.source)?;
    let sampler = match args.sampler {
        SamplerKind::Exact => GibbsSampler::Exact,
        SamplerKind::Mcmc => GibbsSampler::Mcmc {
            burn_in: args.burn_in.unwrap_or_else(|| default_burn_in(g.vertex_count())),
        },
    };
    let report = hardcore::verify_unblocked_uniformity(
        &g, args.lambda, args.zeta, args.xi, args.samples, &sampler, args.seed, args.cap,
    )?;
    if let Some(path) = &args.histogram {
        let mut csv = String::from("stat,bin_lo,bin_hi,count\n");
        for (value, count) in &report.min_u_histogram {
            let _ = writeln!(csv, "min_u,{value},{},{count}", value + 1);
        }
        for (value, count) in &report.max_u_histogram {
            let _ = writeln!(csv, "max_u,{value},{},{count}", value + 1);
        }
        write_file(path, &csv)?;
    }
    let payload = json!({
        "format_version": FORMAT_VERSION,
        "config": config_value(&args),
        "seed_derivation": seed_note(),
        "n": report.n,
        "degree": report.degree,
        "mu": report.mu,
        "window": [report.window.0, report.window.1],
        "violations": report.violations,
        "empirical_rate": report.empirical_rate,
        "bound_raw": report.bound_raw,
        "bound": report.bound,
        "vacuous": report.vacuous,
        "pass": report.pass,
        "sampler": report.sampler,
        "burn_in": report.burn_in,
        "min_u_histogram": report.min_u_histogram,
        "max_u_histogram": report.max_u_histogram,
    });
    emit_json(&resolve_out(&args.out, "verify_lemma42.json"), &payload)?;
    Ok(if report.pass { Outcome::Passed } else { Outcome::AssertionFailed })
}

fn verify_lemma48(args: VerifyLemma48Args) -> Result<Outcome, CliError> {
    let g = load_graph(&args.source)?;
    let lambda = parse_ratio_arg(&args.lambda, "lambda")?;
    let zeta = parse_ratio_arg(&args.zeta, "zeta")?;
    if lambda <= Ratio::zero() {
        return Err(CliError::Usage("lambda must be positive".into()));
    }
    if zeta <= Ratio::zero() || zeta >= Ratio::one() {
        return Err(CliError::Usage("zeta must be in (0, 1)".into()));
    }
    let n = g.vertex_count() as i64;
    let space = exact::enumerate_independent_sets(&g, args.cap)?;
    let contraction = Ratio::one() - zeta.clone() / ratio(n, 1);

    let mut checked = 0u64;
    let mut under_hypothesis = 0u64;
    let mut violations: Vec<Value> = Vec::new();
    let exhaustive = space.len() <= args.exhaustive_limit;
    let mut check_pair = |x: &IndependentSet, y: &IndependentSet| -> Result<(), CliError> {
        checked += 1;
        if !hardcore::unblocked_bound_holds(&g, x, y, &lambda, &zeta) {
            return Ok(());
        }
        under_hypothesis += 1;
        let expected = hardcore::expected_coupled_distance(&g, x, y, &lambda)?;
        let allowed = contraction.clone() * ratio(x.hamming(y) as i64, 1);
        if expected > allowed {
            violations.push(json!({
                "x": x.to_line(),
                "y": y.to_line(),
                "expected": expected.to_string(),
                "allowed": allowed.to_string(),
            }));
        }
        Ok(())
    };
    if exhaustive {
        for x in space.states() {
            for y in space.states() {
                if x != y {
                    check_pair(x, y)?;
                }
            }
        }
    } else {
        let mut rng = derive_rng(args.seed, streams::REPLICA, 0);
        use rand::Rng;
        let mut drawn = 0;
        while drawn < args.pairs {
            let i = rng.random_range(0..space.len());
            let j = rng.random_range(0..space.len());
            if i == j {
                continue;
            }
            check_pair(space.state(i), space.state(j))?;
            drawn += 1;
        }
    }
    let pass = violations.is_empty();
    let payload = json!({
        "format_version": FORMAT_VERSION,
        "config": config_value(&args),
        "seed_derivation": seed_note(),
        "states": space.len(),
        "mode": if exhaustive { "exhaustive" } else { "sampled" },
        "pairs_checked": checked,
        "pairs_under_hypothesis": under_hypothesis,
        "violations": violations,
        "pass": pass,
    });
    emit_json(&resolve_out(&args.out, "verify_lemma48.json"), &payload)?;
    Ok(if pass { Outcome::Passed } else { Outcome::AssertionFailed })
}

fn parse_f64_list(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| CliError::Usage(format!("bad {what} entry {t:?}"))))
        .collect()
}

fn fixed_point_sweep(args: FixedPointSweepArgs) -> Result<Outcome, CliError> {
    let zetas = parse_f64_list(&args.zetas, "zetas")?;
    let xis = parse_f64_list(&args.xis, "xis")?;
    let cells = fixed_point::containment_sweep(&zetas, &xis);
    // Cells violating `1 <= C <= (1-zeta)e` cannot be run; they are counted
    // in the summary but carry no sweep result.
    let mut csv = String::from("c,zeta,xi,t_bound,t_actual,contained\n");
    let mut pass = true;
    for cell in &cells {
        if !cell.feasible {
            continue;
        }
        let t_actual = cell.t_actual.map_or_else(String::new, |t| t.to_string());
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            cell.c, cell.zeta, cell.xi, cell.t_bound, t_actual, cell.contained
        );
        if !cell.contained || cell.t_actual.unwrap_or(u64::MAX) > cell.t_bound {
            pass = false;
        }
    }
    let csv_path = resolve_out(&args.out, "fixed_point_sweep.csv");
    write_file(&csv_path, &csv)?;
    let feasible = cells.iter().filter(|c| c.feasible).count();
    let summary = json!({
        "format_version": FORMAT_VERSION,
        "config": config_value(&args),
        "cells": cells.len(),
        "feasible": feasible,
        "infeasible_skipped": cells.len() - feasible,
        "pass": pass,
        "csv": csv_path.display().to_string(),
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
    Ok(if pass { Outcome::Passed } else { Outcome::AssertionFailed })
}

fn anneal(args: AnnealArgs) -> Result<Outcome, CliError> {
    let g = load_graph(&args.source)?;
    let n = g.vertex_count();
    let lambda = parse_ratio_arg(&args.lambda, "lambda")?;

    let rule = match (args.mode, args.ti) {
        (AnnealMode::Paper, _) => StepRule::Paper,
        (AnnealMode::Practical, Some(t)) => StepRule::Uniform(t),
        (AnnealMode::Practical, None) => {
            // Oracle-calibrated: needs the ladder first, so build a skeleton.
            let skeleton =
                annealing::build_schedule(n, &lambda, args.delta, args.zeta, &StepRule::Uniform(0))?;
            let steps =
                annealing::calibrate_level_steps(&g, &skeleton.levels, args.delta, HARDCORE_KERNEL_CAP)?;
            StepRule::PerLevel(steps)
        }
    };
    let schedule = annealing::build_schedule(n, &lambda, args.delta, args.zeta, &rule)?;

    let space = exact::enumerate_independent_sets(&g, args.cap).ok();
    let mut counts = space.as_ref().map(|s| vec![0u64; s.len()]);
    let results: Vec<(IndependentSet, Vec<annealing::LevelLog>)> = (0..args.runs)
        .into_par_iter()
        .map(|i| {
            let run_seed = derive_seed(args.seed, streams::REPLICA, i);
            annealing::annealed_sample(&g, &schedule, run_seed)
        })
        .collect();
    if let (Some(space), Some(counts)) = (space.as_ref(), counts.as_mut()) {
        for (sample, _) in &results {
            counts[space.index_of(sample).expect("samples are independent sets")] += 1;
        }
    }

    let levels_json: Vec<Value> = schedule
        .levels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            json!({
                "level": i,
                "lambda": ratio_to_f64(l),
                "lambda_exact": l.to_string(),
                "steps": if i == 0 { 0 } else { schedule.steps_per_level[i - 1] },
            })
        })
        .collect();
    let first_run_logs: Vec<Value> = results
        .first()
        .map(|(_, logs)| {
            logs.iter()
                .map(|l| {
                    json!({"level": l.level, "lambda": l.lambda, "steps": l.steps, "set_size": l.set_size})
                })
                .collect()
        })
        .unwrap_or_default();
    let samples_json: Option<Vec<String>> = if args.runs <= 1000 {
        Some(results.iter().map(|(s, _)| s.to_line()).collect())
    } else {
        None
    };

    // Exact-TV report on enumerable instances.
    let mut pass = true;
    let exact_report = match (&space, &counts) {
        (Some(space), Some(counts)) => {
            let weights: Vec<Ratio> =
                space.states().iter().map(|x| hardcore::weight(x, &lambda)).collect();
            let z: Ratio = weights.iter().cloned().sum();
            let pi: Vec<f64> = weights.iter().map(|w| ratio_to_f64(&(w.clone() / z.clone()))).collect();
            let empirical: Vec<f64> =
                counts.iter().map(|&c| c as f64 / args.runs as f64).collect();
            let tv = exact::tv_distance(&empirical, &pi);
            let slack = 3.0 * (1.0 / args.runs as f64).sqrt() * space.len() as f64;
            pass = tv <= args.delta + slack;
            Some(json!({
                "states": space.len(),
                "tv_to_gibbs": tv,
                "budget": args.delta,
                "multinomial_slack": slack,
                "pass": pass,
            }))
        }
        _ => None,
    };

    let payload = json!({
        "format_version": FORMAT_VERSION,
        "config": config_value(&args),
        "seed_derivation": seed_note(),
        "n": n,
        "levels": levels_json,
        "level_count": schedule.level_count(),
        "first_run_levels": first_run_logs,
        "runs": args.runs,
        "samples": samples_json,
        "exact_tv": exact_report,
    });
    emit_json(&resolve_out(&args.out, "anneal.json"), &payload)?;
    Ok(if pass { Outcome::Passed } else { Outcome::AssertionFailed })
}

fn exact_tv(args: ExactTvArgs) -> Result<Outcome, CliError> {
    let g = load_graph(&args.source)?;
    enum Built {
        Coloring(ExactChain<ColoringGlauber<'static>>),
        Hardcore(ExactChain<HardcoreGlauber<'static>>),
    }
    // The chain borrows the graph; leak a boxed copy to keep lifetimes simple
    // for this one-shot command.
    let g: &'static Graph = Box::leak(Box::new(g));
    let built = match args.chain {
        ChainKind::Coloring => {
            let k = args.k.ok_or_else(|| CliError::Usage("--k required for the coloring chain".into()))?;
            let space = exact::enumerate_all_colorings(g, k, args.cap)?;
            Built::Coloring(ExactChain::build(space, ColoringGlauber { graph: g, k }, COLORING_KERNEL_CAP)?)
        }
        ChainKind::Hardcore => {
            let lambda = parse_ratio_arg(
                args.lambda.as_deref().ok_or_else(|| {
                    CliError::Usage("--lambda required for the hard-core chain".into())
                })?,
                "lambda",
            )?;
            let space = exact::enumerate_independent_sets(g, args.cap)?;
            Built::Hardcore(ExactChain::build(space, HardcoreGlauber { graph: g, lambda }, HARDCORE_KERNEL_CAP)?)
        }
    };

    fn run_decay<K: StepKernel>(
        chain: &ExactChain<K>,
        args: &ExactTvArgs,
    ) -> Result<(Vec<f64>, Value), CliError> {
        // Worst-case TV over recurrent point-mass starts, per step.
        let starts: Vec<usize> =
            (0..chain.space.len()).filter(|&i| chain.recurrent[i]).collect();
        let mut dists: Vec<Vec<f64>> = starts.iter().map(|&i| chain.point_mass(i)).collect();
        let mut curve = Vec::with_capacity(args.steps + 1);
        for _ in 0..=args.steps {
            let worst = dists.iter().map(|d| exact::tv_distance(d, &chain.pi)).fold(0.0, f64::max);
            curve.push(worst);
            for d in &mut dists {
                *d = chain.distribution_after(d, 1);
            }
        }
        let classes = chain.recurrent_classes();
        let mixing = match args.delta {
            Some(delta) => match chain.exact_mixing_time(delta) {
                Ok(t) => json!({"delta": delta, "steps": t, "ergodic": true}),
                Err(OracleError::NonErgodic { class_count }) => {
                    // Mixing is still defined class by class; report it.
                    let per_class: Vec<Value> = chain
                        .class_mixing_times(delta)?
                        .into_iter()
                        .map(|c| json!({"size": c.size, "representative": c.representative, "steps": c.steps}))
                        .collect();
                    json!({
                        "delta": delta,
                        "steps": null,
                        "ergodic": false,
                        "recurrent_classes": class_count,
                        "per_class": per_class,
                    })
                }
                Err(e) => return Err(e.into()),
            },
            None => json!({"ergodic": classes.len() == 1, "recurrent_classes": classes.len()}),
        };
        if let Some(path) = &args.export_kernel {
            let mut triples = String::new();
            for i in 0..chain.space.len() {
                for (j, p) in chain.rational_row(i).iter().enumerate() {
                    if !p.is_zero() {
                        let _ = writeln!(triples, "{i} {j} {p}");
                    }
                }
            }
            write_file(path, &triples)?;
        }
        Ok((curve, mixing))
    }

    let (curve, mixing, states) = match &built {
        Built::Coloring(chain) => {
            let (c, m) = run_decay(chain, &args)?;
            (c, m, chain.space.len())
        }
        Built::Hardcore(chain) => {
            let (c, m) = run_decay(chain, &args)?;
            (c, m, chain.space.len())
        }
    };

    let mut csv = String::from("T,tv\n");
    for (t, tv) in curve.iter().enumerate() {
        let _ = writeln!(csv, "{t},{tv}");
    }
    let csv_path = resolve_out(&args.out, "exact_tv.csv");
    write_file(&csv_path, &csv)?;
    // TV decay to stationarity never increases; violations mean kernel bugs.
    let monotone = curve.windows(2).all(|w| w[1] <= w[0] + 1e-13);
    let payload = json!({
        "format_version": FORMAT_VERSION,
        "config": config_value(&args),
        "states": states,
        "final_tv": curve.last(),
        "monotone": monotone,
        "mixing": mixing,
        "csv": csv_path.display().to_string(),
    });
    println!("{}", serde_json::to_string_pretty(&payload).expect("json"));
    Ok(if monotone { Outcome::Passed } else { Outcome::AssertionFailed })
}

fn bounds(args: BoundsArgs) -> Result<Outcome, CliError> {
    let inputs = json!({
        "diam": args.diam,
        "delta": args.delta,
        "eps": args.eps,
        "bad_prob": args.bad_prob,
        "steps": args.steps,
    });
    let value = match args.theorem.as_str() {
        "1.1" => {
            let t = coupling::mixing_time_all_pairs(args.diam, args.delta, args.eps)?;
            json!({"T": t})
        }
        "1.2" => {
            let m = coupling::mixing_time_stationary_set(args.diam, args.delta, args.eps)?;
            json!({"T": m.steps, "pi_S_threshold": m.stationary_mass_threshold})
        }
        "1.3" => {
            let m = coupling::mixing_time_warm_start(args.diam, args.delta, args.eps)?;
            json!({"T": m.steps, "pi_S_threshold": m.stationary_mass_threshold})
        }
        "3.1" => {
            let b =
                coupling::coupling_failure_bound(args.eps, args.bad_prob, args.steps, args.diam)?;
            json!({"raw": b.raw, "clamped": b.clamped})
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown bound id {other:?}; expected 1.1, 1.2, 1.3, or 3.1"
            )))
        }
    };
    let payload = json!({
        "format_version": FORMAT_VERSION,
        "config": config_value(&args),
        "theorem": args.theorem,
        "inputs": inputs,
        "value": value,
    });
    emit_json(&resolve_out(&args.out, "bounds.json"), &payload)?;
    Ok(Outcome::Passed)
}
