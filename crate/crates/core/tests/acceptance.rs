//! Acceptance suite: every guarantee the toolkit makes, checked end to end at
//! pinned tolerances. One test per criterion; each prints a `PASS <name>`
//! line (visible with `cargo test -- --nocapture`).
//!
//! Exact claims are decided in rational arithmetic; statistical claims use
//! three-sigma slack around enumerated ground truth.

use std::collections::BTreeMap;

use glauber_core::annealing::{self, StepRule};
use glauber_core::coloring::{self, Coloring, ProperSampler};
use glauber_core::coupling::{self, run_coupled};
use glauber_core::exact::{self, ColoringGlauber, ExactChain, HardcoreGlauber, StepKernel};
use glauber_core::fixed_point;
use glauber_core::graph::Graph;
use glauber_core::hardcore::{self, GibbsSampler, IndependentSet};
use glauber_core::rng::{derive_rng, streams};
use glauber_core::{ratio, ratio_to_f64, Ratio};
use num_traits::{One, Zero};
use rayon::prelude::*;

const CAP: usize = 1 << 20;
const KERNEL_CAP: usize = 4096;

fn k2() -> Graph {
    Graph::build(2, &[(0, 1)]).unwrap()
}

fn p3() -> Graph {
    Graph::path(3).unwrap()
}

fn p4() -> Graph {
    Graph::path(4).unwrap()
}

fn c6() -> Graph {
    Graph::cycle(6).unwrap()
}

/// Three-sigma binomial agreement between an empirical rate and an exact
/// probability, with a 3/M floor for tiny probabilities.
fn within_three_sigma(empirical: f64, p: f64, samples: u64) -> bool {
    let m = samples as f64;
    (empirical - p).abs() <= 3.0 * (p * (1.0 - p) / m).sqrt() + 3.0 / m
}

#[test]
fn exact_contraction_colorings() {
    let betas = [ratio(1, 10), ratio(1, 4), ratio(1, 2), ratio(3, 4), ratio(9, 10)];
    let instances = [(k2(), 3u32), (k2(), 4), (p3(), 3), (p3(), 4)];
    let mut checked = 0u64;
    let mut hypothesis_hits = 0u64;
    for (g, k) in &instances {
        let n = g.vertex_count() as i64;
        let space = exact::enumerate_all_colorings(g, *k, CAP).unwrap();
        for x in space.states() {
            let slack_at: Vec<bool> =
                betas.iter().map(|b| coloring::available_slack_holds(g, x, b)).collect();
            for y in space.states() {
                if x == y {
                    continue;
                }
                let expected = coloring::expected_coupled_distance(g, x, y).unwrap();
                let rho = ratio(x.hamming(y) as i64, 1);
                for (beta, holds) in betas.iter().zip(&slack_at) {
                    checked += 1;
                    if !holds {
                        continue;
                    }
                    hypothesis_hits += 1;
                    let allowed = (Ratio::one() - beta.clone() / ratio(n, 1)) * rho.clone();
                    assert!(
                        expected <= allowed,
                        "contraction violated: k={k}, beta={beta}, E={expected}, allowed={allowed}"
                    );
                }
            }
        }
    }

    // Spot value: on the single edge with k = 3, the pair (1,2)/(1,3) has
    // expected coupled distance exactly 3/4.
    let g = k2();
    let x = Coloring::new(vec![1, 2], 3).unwrap();
    let y = Coloring::new(vec![1, 3], 3).unwrap();
    assert_eq!(coloring::expected_coupled_distance(&g, &x, &y).unwrap(), ratio(3, 4));

    assert!(hypothesis_hits > 0, "hypothesis never fired; check is vacuous");
    println!(
        "PASS exact contraction (colorings): 0 violations over {checked} pair-beta checks \
         ({hypothesis_hits} under hypothesis)"
    );
}

#[test]
fn exact_contraction_hardcore() {
    let lambdas = [ratio(1, 2), ratio(1, 1), ratio(2, 1)];
    let zetas = [ratio(1, 10), ratio(1, 2), ratio(9, 10)];
    let instances = [k2(), p4(), c6()];
    let mut checked = 0u64;
    let mut hypothesis_hits = 0u64;
    for g in &instances {
        let n = g.vertex_count() as i64;
        let space = exact::enumerate_independent_sets(g, CAP).unwrap();
        for x in space.states() {
            for y in space.states() {
                if x == y {
                    continue;
                }
                let rho = ratio(x.hamming(y) as i64, 1);
                for lambda in &lambdas {
                    let expected =
                        hardcore::expected_coupled_distance(g, x, y, lambda).unwrap();
                    for zeta in &zetas {
                        checked += 1;
                        if !hardcore::unblocked_bound_holds(g, x, y, lambda, zeta) {
                            continue;
                        }
                        hypothesis_hits += 1;
                        let allowed =
                            (Ratio::one() - zeta.clone() / ratio(n, 1)) * rho.clone();
                        assert!(
                            expected <= allowed,
                            "contraction violated: lambda={lambda}, zeta={zeta}, \
                             X={}, Y={}, E={expected}, allowed={allowed}",
                            x.to_line(),
                            y.to_line()
                        );
                    }
                }
            }
        }
    }
    assert!(hypothesis_hits > 0, "hypothesis never fired; check is vacuous");
    println!(
        "PASS exact contraction (hard-core): 0 violations over {checked} pair-parameter checks \
         ({hypothesis_hits} under hypothesis)"
    );
}

#[test]
fn coupled_marginals_match_kernels() {
    // Colorings on the single edge, k = 3: both coupled components must have
    // exactly the heat-bath transition law, for every ordered pair.
    let g = k2();
    let n = g.vertex_count();
    let kernel = ColoringGlauber { graph: &g, k: 3 };
    let space = exact::enumerate_all_colorings(&g, 3, CAP).unwrap();
    let mut pairs = 0u64;
    for x in space.states() {
        let row_x: BTreeMap<Coloring, Ratio> = kernel.step_distribution(x).into_iter().collect();
        for y in space.states() {
            let mut mx: BTreeMap<Coloring, Ratio> = BTreeMap::new();
            let mut my: BTreeMap<Coloring, Ratio> = BTreeMap::new();
            for v in 0..n {
                let ax = coloring::available_colors(&g, x, v);
                let ay = coloring::available_colors(&g, y, v);
                let units_total = (ax.len() * ay.len()) as i64;
                for (cx, cy, units) in coloring::coupled_color_table(&ax, &ay) {
                    let p = ratio(units as i64, n as i64 * units_total);
                    let mut nx = x.clone();
                    nx.set_color(v, cx);
                    *mx.entry(nx).or_insert_with(Ratio::zero) += p.clone();
                    let mut ny = y.clone();
                    ny.set_color(v, cy);
                    *my.entry(ny).or_insert_with(Ratio::zero) += p;
                }
            }
            let row_y: BTreeMap<Coloring, Ratio> =
                kernel.step_distribution(y).into_iter().collect();
            assert_eq!(mx, row_x, "x-marginal diverged for pair {x:?}/{y:?}");
            assert_eq!(my, row_y, "y-marginal diverged for pair {x:?}/{y:?}");
            pairs += 1;
        }
    }
    let coloring_pairs = pairs;

    // Hard-core on the 6-cycle at lambda = 1/2.
    let g = c6();
    let n = g.vertex_count();
    let lambda = ratio(1, 2);
    let kernel = HardcoreGlauber { graph: &g, lambda: lambda.clone() };
    let space = exact::enumerate_independent_sets(&g, CAP).unwrap();
    let p_add = lambda.clone() / (Ratio::one() + lambda.clone());
    let p_remove = Ratio::one() - p_add.clone();
    pairs = 0;
    for x in space.states() {
        let row_x: BTreeMap<IndependentSet, Ratio> =
            kernel.step_distribution(x).into_iter().collect();
        for y in space.states() {
            let mut mx: BTreeMap<IndependentSet, Ratio> = BTreeMap::new();
            let mut my: BTreeMap<IndependentSet, Ratio> = BTreeMap::new();
            for v in 0..n {
                for (add, p) in [(true, &p_add), (false, &p_remove)] {
                    let share = p.clone() / ratio(n as i64, 1);
                    let mut nx = x.clone();
                    hardcore::apply_update(&g, &mut nx, v, add);
                    *mx.entry(nx).or_insert_with(Ratio::zero) += share.clone();
                    let mut ny = y.clone();
                    hardcore::apply_update(&g, &mut ny, v, add);
                    *my.entry(ny).or_insert_with(Ratio::zero) += share;
                }
            }
            let row_y: BTreeMap<IndependentSet, Ratio> =
                kernel.step_distribution(y).into_iter().collect();
            assert_eq!(mx, row_x, "x-marginal diverged");
            assert_eq!(my, row_y, "y-marginal diverged");
            pairs += 1;
        }
    }
    println!(
        "PASS coupled marginals match kernels: exact equality on {coloring_pairs} coloring pairs \
         and {pairs} hard-core pairs"
    );
}

#[test]
fn oracle_stationarity_and_partition_values() {
    let mut chains_checked = 0;
    for (g, k) in [(k2(), 3u32), (k2(), 4), (p3(), 3)] {
        let space = exact::enumerate_all_colorings(&g, k, CAP).unwrap();
        let chain = ExactChain::build(space, ColoringGlauber { graph: &g, k }, KERNEL_CAP).unwrap();
        assert!(chain.stationarity_exact(), "coloring chain k={k} not stationary");
        assert!(chain.detailed_balance_exact(), "coloring chain k={k} not reversible");
        chains_checked += 1;
    }
    for (g, lambda) in [
        (k2(), ratio(1, 1)),
        (p4(), ratio(1, 2)),
        (Graph::cycle(4).unwrap(), ratio(1, 3)),
        (Graph::cycle(5).unwrap(), ratio(1, 1)),
        (c6(), ratio(1, 2)),
    ] {
        let space = exact::enumerate_independent_sets(&g, CAP).unwrap();
        let chain =
            ExactChain::build(space, HardcoreGlauber { graph: &g, lambda: lambda.clone() }, KERNEL_CAP)
                .unwrap();
        assert!(chain.stationarity_exact(), "hard-core chain not stationary");
        assert!(chain.detailed_balance_exact(), "hard-core chain not reversible");
        chains_checked += 1;
    }

    assert_eq!(exact::partition_function(&k2(), &ratio(1, 1), CAP).unwrap(), ratio(3, 1));
    assert_eq!(
        exact::partition_function(&Graph::cycle(5).unwrap(), &ratio(1, 1), CAP).unwrap(),
        ratio(11, 1)
    );
    assert_eq!(
        exact::enumerate_independent_sets(&Graph::cycle(4).unwrap(), CAP).unwrap().len(),
        7
    );
    println!(
        "PASS oracle stationarity: {chains_checked} chains exactly stationary and reversible; \
         partition values 3, 11, 7 confirmed"
    );
}

#[test]
fn available_color_uniformity_statistics() {
    let beta = 0.5;
    let samples = 10_000u64;
    let burn_in = 2000u64;
    for (name, g, k) in [("6-cycle", c6(), 6u32), ("K33", Graph::complete_bipartite(3, 3).unwrap(), 7)]
    {
        let n = g.vertex_count() as f64;
        let truth = coloring::exact_uniformity_violation_rate(&g, k, beta, CAP).unwrap();
        let p = ratio_to_f64(&truth.violation_rate);
        let bound = n * (-beta * beta * k as f64 / 8.0).exp();
        assert!(p <= bound + 1e-15, "{name}: exact rate {p} above bound {bound}");

        // Exact histogram of the per-state minimum available count.
        let space = exact::enumerate_proper_colorings(&g, k, CAP).unwrap();
        let mut exact_hist: BTreeMap<usize, u64> = BTreeMap::new();
        for x in space.states() {
            *exact_hist.entry(coloring::min_available(&g, x)).or_insert(0) += 1;
        }
        let total = space.len() as f64;

        // Burn-in sampler: empirical violation rate and histogram.
        let start = coloring::greedy_coloring(&g, k).unwrap();
        let counts: BTreeMap<usize, u64> = (0..samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = derive_rng(500 + k as u64, streams::BURN_IN, i);
                let mut x = start.clone();
                for _ in 0..burn_in {
                    coloring::glauber_step(&g, &mut x, &mut rng);
                }
                coloring::min_available(&g, &x)
            })
            .fold(BTreeMap::new, |mut acc, v| {
                *acc.entry(v).or_insert(0u64) += 1;
                acc
            })
            .reduce(BTreeMap::new, |mut a, b| {
                for (key, c) in b {
                    *a.entry(key).or_insert(0) += c;
                }
                a
            });
        let empirical_rate = counts
            .iter()
            .filter(|(v, _)| (**v as f64) < truth.threshold)
            .map(|(_, c)| *c)
            .sum::<u64>() as f64
            / samples as f64;
        assert!(
            within_three_sigma(empirical_rate, p, samples),
            "{name}: sampled violation rate {empirical_rate} vs exact {p}"
        );
        let values: std::collections::BTreeSet<usize> =
            exact_hist.keys().copied().chain(counts.keys().copied()).collect();
        for value in values {
            let p_v = exact_hist.get(&value).copied().unwrap_or(0) as f64 / total;
            let emp = counts.get(&value).copied().unwrap_or(0) as f64 / samples as f64;
            assert!(
                within_three_sigma(emp, p_v, samples),
                "{name}: min-available={value} empirical {emp} vs exact {p_v}"
            );
        }

        // The published verifier agrees, with both samplers.
        let report = coloring::verify_available_uniformity(
            &g,
            k,
            beta,
            samples,
            &ProperSampler::Exact,
            77,
            CAP,
        )
        .unwrap();
        assert!(report.pass, "{name}: exact-sampler verification failed");
        assert!(
            (report.bound - bound).abs() < 1e-12,
            "{name}: verifier bound mismatch"
        );
    }
    println!(
        "PASS available-color uniformity: exact rates below bound; burn-in sampler matches \
         enumeration within three sigma on both instances"
    );
}

#[test]
fn unblocked_neighbor_uniformity_statistics() {
    let g = c6();
    let lambda = ratio(1, 2);
    let lambda_f = 0.5;
    let degree = 2.0f64;
    // Boundary slack: lambda = (1 - zeta) e / degree.
    let zeta = 1.0 - lambda_f * degree / std::f64::consts::E;
    let xi = 0.4;
    let samples = 10_000u64;
    let burn_in = 2000u64;

    let truth = hardcore::exact_unblocked_stats(&g, &lambda, xi, CAP).unwrap();
    assert_eq!(truth.state_count, 18);

    let report = hardcore::verify_unblocked_uniformity(
        &g,
        lambda_f,
        zeta,
        xi,
        samples,
        &GibbsSampler::Exact,
        601,
        CAP,
    )
    .unwrap();
    assert!(report.pass);
    // Degree 2 keeps the concentration bound vacuous; the exact rate must
    // never exceed the reported (clamped) bound.
    let exact_rate = ratio_to_f64(&truth.violation_rate);
    assert!(exact_rate <= report.bound + 1e-15);
    assert!(report.vacuous, "expected a vacuous bound at degree 2");

    // Burn-in sampler histograms of min/max unblocked counts.
    let mut min_counts: BTreeMap<usize, u64> = BTreeMap::new();
    let mut max_counts: BTreeMap<usize, u64> = BTreeMap::new();
    let mut violations = 0u64;
    let window = report.window;
    let samples_vec: Vec<(usize, usize)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = derive_rng(602, streams::BURN_IN, i);
            let mut x = IndependentSet::empty(6);
            for _ in 0..burn_in {
                hardcore::glauber_step(&g, &mut x, lambda_f, &mut rng);
            }
            hardcore::min_max_unblocked(&g, &x)
        })
        .collect();
    for (min_u, max_u) in samples_vec {
        *min_counts.entry(min_u).or_insert(0) += 1;
        *max_counts.entry(max_u).or_insert(0) += 1;
        if (min_u as f64) < window.0 || (max_u as f64) > window.1 {
            violations += 1;
        }
    }
    let empirical_rate = violations as f64 / samples as f64;
    assert!(
        within_three_sigma(empirical_rate, exact_rate, samples),
        "sampled violation rate {empirical_rate} vs exact {exact_rate}"
    );
    for (dist, counts, label) in
        [(&truth.min_u_dist, &min_counts, "min"), (&truth.max_u_dist, &max_counts, "max")]
    {
        let exact_map: BTreeMap<usize, f64> =
            dist.iter().map(|(v, p)| (*v, ratio_to_f64(p))).collect();
        let keys: std::collections::BTreeSet<usize> =
            exact_map.keys().copied().chain(counts.keys().copied()).collect();
        for v in keys {
            let p_v = exact_map.get(&v).copied().unwrap_or(0.0);
            let emp = counts.get(&v).copied().unwrap_or(0) as f64 / samples as f64;
            assert!(
                within_three_sigma(emp, p_v, samples),
                "{label} |U| = {v}: empirical {emp} vs exact {p_v}"
            );
        }
    }
    println!(
        "PASS unblocked-neighbor uniformity: burn-in sampler matches enumerated Gibbs \
         distribution within three sigma (exact violation rate {exact_rate:.4}, bound vacuous)"
    );
}

#[test]
fn fixed_point_values() {
    let e = std::f64::consts::E;
    assert!((fixed_point::solve_mu(e) - 1.0 / e).abs() < 1e-10);
    let alpha = fixed_point::solve_alpha();
    assert!((1.7632..=1.7633).contains(&alpha), "alpha = {alpha}");
    for i in 1..=99 {
        let zeta = i as f64 / 100.0;
        let check = fixed_point::contraction_margin(zeta).unwrap();
        assert!(check.holds, "margin fails at zeta = {zeta}");
    }
    println!(
        "PASS fixed points: mu(e) = 1/e, alpha = {alpha:.5} in [1.7632, 1.7633], margin holds on \
         the full zeta grid"
    );
}

#[test]
fn perturbed_iteration_containment() {
    let zetas: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let xis = [0.01, 0.05, 0.1, 0.5];
    let cells = fixed_point::containment_sweep(&zetas, &xis);
    let mut feasible = 0;
    let mut infeasible = 0;
    for cell in &cells {
        if !cell.feasible {
            infeasible += 1;
            continue;
        }
        feasible += 1;
        assert!(cell.contained, "not contained at C={} zeta={} xi={}", cell.c, cell.zeta, cell.xi);
        let t = cell.t_actual.unwrap();
        assert!(
            t <= cell.t_bound,
            "t_actual {t} exceeds bound {} at C={} zeta={} xi={}",
            cell.t_bound,
            cell.c,
            cell.zeta,
            cell.xi
        );
    }
    assert!(feasible > 0);

    // Pointwise bracket contraction on the x-grid, feasible cells only.
    let mut bracket_points = 0u64;
    for &zeta in &zetas {
        let c_max = (1.0 - zeta) * std::f64::consts::E;
        if c_max < 1.0 {
            continue;
        }
        for &c in &[1.0, 0.5 * (1.0 + c_max), c_max] {
            for &xi in &xis {
                let mut x = xi / 2.0;
                while x <= 1.0 {
                    assert!(
                        fixed_point::bracket_step_contracts(c, zeta, xi, x),
                        "bracket step fails at C={c} zeta={zeta} xi={xi} x={x}"
                    );
                    bracket_points += 1;
                    x += 0.005;
                }
            }
        }
    }
    println!(
        "PASS perturbed iteration: containment within the step bound on {feasible} feasible cells \
         ({infeasible} infeasible skipped); bracket contraction at {bracket_points} grid points"
    );
}

#[test]
fn empirical_meeting_bound() {
    let g = k2();
    let k = 3u32;
    let space = exact::enumerate_all_colorings(&g, k, CAP).unwrap();

    // Certify the contraction rate exactly: the minimum over ordered pairs of
    // 1 - E[rho']/rho.
    let mut eps_star: Option<Ratio> = None;
    for x in space.states() {
        for y in space.states() {
            if x == y {
                continue;
            }
            let e = coloring::expected_coupled_distance(&g, x, y).unwrap();
            let rho = ratio(x.hamming(y) as i64, 1);
            let contraction = Ratio::one() - e / rho;
            if eps_star.as_ref().is_none_or(|best| contraction < *best) {
                eps_star = Some(contraction);
            }
        }
    }
    let eps_star = eps_star.unwrap();
    assert_eq!(eps_star, ratio(1, 4), "certified contraction rate changed");
    let eps = ratio_to_f64(&eps_star);

    let diam = 2u64;
    let t_max = 30usize;
    let replicas = 100_000u64;
    let x0 = Coloring::new(vec![1, 1], k).unwrap();
    let y0 = Coloring::new(vec![2, 2], k).unwrap();
    let counts: Vec<u64> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = derive_rng(900, streams::REPLICA, i);
            let traj = run_coupled(
                &x0,
                &y0,
                t_max,
                |a: &Coloring, b: &Coloring| a.hamming(b) as u64,
                |a, b, r| {
                    coloring::coupled_glauber_step(&g, a, b, r).unwrap();
                },
                &mut rng,
            );
            let mut unmet = vec![0u64; t_max + 1];
            for (t, &d) in traj.distances.iter().enumerate() {
                unmet[t] = u64::from(d > 0);
            }
            unmet
        })
        .reduce(
            || vec![0u64; t_max + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );

    for (t, &unmet) in counts.iter().enumerate().skip(1) {
        let rate = unmet as f64 / replicas as f64;
        let bound = coupling::coupling_failure_bound(eps, 0.0, t as u64, diam).unwrap().raw;
        let slack = 3.0 * (rate * (1.0 - rate) / replicas as f64).sqrt() + 3.0 / replicas as f64;
        assert!(
            rate <= bound + slack,
            "t={t}: disagreement rate {rate} above bound {bound} + {slack}"
        );
    }
    println!(
        "PASS empirical meeting bound: certified eps = 1/4; replica rates below \
         (1-eps)^t * diam for t = 1..=30 over {replicas} replicas"
    );
}

#[test]
fn warm_start_ladder() {
    // Partition-function ladders, exactly.
    for (name, g, lambda) in [("single edge", k2(), ratio(1, 1)), ("6-cycle", c6(), ratio(1, 2))] {
        let schedule =
            annealing::build_schedule(g.vertex_count(), &lambda, 0.1, 0.5, &StepRule::Uniform(1))
                .unwrap();
        assert!(schedule.ratios_ok());
        let report = annealing::verify_partition_ladder(&g, &schedule, CAP).unwrap();
        assert!(report.all_ok, "{name}: ladder ratio check failed");
        assert!(report.levels[0].z.is_one());
        let z1_ratio = report.levels[1].ratio_to_prev.clone().unwrap();
        assert!(z1_ratio < ratio(2, 1), "{name}: Z_1 = {z1_ratio} not below 2");
        // Every consecutive Gibbs pair is a warm start within factor two.
        for pair in schedule.levels.windows(2) {
            let check = annealing::verify_level_warm_start(&g, &pair[0], &pair[1], CAP).unwrap();
            assert!(check.within_factor_two, "{name}: warm start fails {} -> {}", pair[0], pair[1]);
        }
    }

    // Warm-start preservation under one exact kernel step, in rational
    // arithmetic: a boundary (density exactly 2) start stays within 2.
    fn preservation<K: StepKernel>(chain: &ExactChain<K>) {
        let states = chain.space.len();
        let rows: Vec<Vec<Ratio>> = (0..states).map(|i| chain.rational_row(i)).collect();
        for x in 0..states {
            let pi_x = chain.pi_exact[x].clone();
            if pi_x.is_zero() {
                continue;
            }
            let one = Ratio::one();
            let t = if pi_x >= ratio(1, 2) {
                one.clone()
            } else {
                pi_x.clone() / (one.clone() - pi_x.clone())
            };
            let dist: Vec<Ratio> = (0..states)
                .map(|z| {
                    let mut d = (one.clone() - t.clone()) * chain.pi_exact[z].clone();
                    if z == x {
                        d += t.clone();
                    }
                    d
                })
                .collect();
            let before = coupling::warm_start_ratio_exact(&dist, &chain.pi_exact).unwrap();
            assert!(before <= ratio(2, 1));
            let mut after = vec![Ratio::zero(); states];
            for (i, mass) in dist.iter().enumerate() {
                if mass.is_zero() {
                    continue;
                }
                for (j, p) in rows[i].iter().enumerate() {
                    if !p.is_zero() {
                        after[j] += mass.clone() * p.clone();
                    }
                }
            }
            let ratio_after = coupling::warm_start_ratio_exact(&after, &chain.pi_exact).unwrap();
            assert!(
                ratio_after <= ratio(2, 1),
                "warm-start ratio grew to {ratio_after} from state {x}"
            );
        }
    }
    let g = k2();
    let hc = ExactChain::build(
        exact::enumerate_independent_sets(&g, CAP).unwrap(),
        HardcoreGlauber { graph: &g, lambda: ratio(1, 1) },
        KERNEL_CAP,
    )
    .unwrap();
    preservation(&hc);
    let col = ExactChain::build(
        exact::enumerate_all_colorings(&g, 3, CAP).unwrap(),
        ColoringGlauber { graph: &g, k: 3 },
        KERNEL_CAP,
    )
    .unwrap();
    preservation(&col);

    println!(
        "PASS warm-start ladder: Z ratios below e^(1/3) with Z_1 < 2 on both ladders; \
         boundary warm starts stay within factor two after one exact step"
    );
}

#[test]
fn annealing_end_to_end() {
    let g = c6();
    let lambda = ratio(1, 2);
    let delta = 0.05;
    let runs = 100_000u64;

    let base = annealing::build_schedule(6, &lambda, delta, 0.5, &StepRule::Uniform(0)).unwrap();
    let steps = annealing::calibrate_level_steps(&g, &base.levels, delta, KERNEL_CAP).unwrap();
    let schedule =
        annealing::build_schedule(6, &lambda, delta, 0.5, &StepRule::PerLevel(steps)).unwrap();

    let space = exact::enumerate_independent_sets(&g, CAP).unwrap();
    let chain = ExactChain::build(
        exact::enumerate_independent_sets(&g, CAP).unwrap(),
        HardcoreGlauber { graph: &g, lambda: lambda.clone() },
        KERNEL_CAP,
    )
    .unwrap();

    let counts: Vec<u64> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let run_seed = glauber_core::rng::derive_seed(1100, streams::REPLICA, i);
            let (sample, _) = annealing::annealed_sample(&g, &schedule, run_seed);
            space.index_of(&sample).expect("annealed samples are independent sets")
        })
        .fold(
            || vec![0u64; space.len()],
            |mut acc, idx| {
                acc[idx] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; space.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );

    let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / runs as f64).collect();
    let tv = exact::tv_distance(&empirical, &chain.pi);
    let slack = 3.0 * (1.0 / runs as f64).sqrt() * space.len() as f64;
    assert!(
        tv <= delta + slack,
        "annealed output TV {tv} above target {delta} + multinomial slack {slack}"
    );
    println!(
        "PASS annealing end-to-end: {} levels, TV to exact Gibbs = {tv:.4} <= {:.4} \
         over {runs} runs",
        schedule.level_count(),
        delta + slack
    );
}

#[test]
fn exact_tv_decay_regression() {
    // Frozen regression values, computed once via this oracle and pinned.
    let g = k2();
    let col = ExactChain::build(
        exact::enumerate_all_colorings(&g, 3, CAP).unwrap(),
        ColoringGlauber { graph: &g, k: 3 },
        KERNEL_CAP,
    )
    .unwrap();
    assert_eq!(col.exact_mixing_time(0.01).unwrap(), 15);

    let hc = ExactChain::build(
        exact::enumerate_independent_sets(&g, CAP).unwrap(),
        HardcoreGlauber { graph: &g, lambda: ratio(1, 1) },
        KERNEL_CAP,
    )
    .unwrap();
    assert_eq!(hc.exact_mixing_time(0.01).unwrap(), 14);

    // Decay curves are non-increasing from every recurrent start.
    fn check_decay<K: StepKernel>(chain: &ExactChain<K>) {
        for i in 0..chain.space.len() {
            if !chain.recurrent[i] {
                continue;
            }
            let curve = chain.tv_decay(&chain.point_mass(i), 60);
            for w in curve.windows(2) {
                assert!(w[1] <= w[0] + 1e-13, "TV decay increased: {} -> {}", w[0], w[1]);
            }
        }
    }
    check_decay(&col);
    check_decay(&hc);
    println!(
        "PASS exact TV decay: mixing times 15 (colorings) and 14 (hard-core) at delta 0.01; \
         decay curves monotone"
    );
}

#[test]
fn sampler_frequencies_match_stationary() {
    // Supplementary: burn-in sampler state frequencies against the exact
    // stationary distribution, per state, on both chains.
    let g = k2();
    let samples = 20_000u64;
    let burn_in = 300u64;

    let col = ExactChain::build(
        exact::enumerate_all_colorings(&g, 3, CAP).unwrap(),
        ColoringGlauber { graph: &g, k: 3 },
        KERNEL_CAP,
    )
    .unwrap();
    let start = coloring::greedy_coloring(&g, 3).unwrap();
    let mut counts = vec![0u64; col.space.len()];
    for i in 0..samples {
        let mut rng = derive_rng(1300, streams::BURN_IN, i);
        let mut x = start.clone();
        for _ in 0..burn_in {
            coloring::glauber_step(&g, &mut x, &mut rng);
        }
        counts[col.space.index_of(&x).unwrap()] += 1;
    }
    for (i, &c) in counts.iter().enumerate() {
        let emp = c as f64 / samples as f64;
        assert!(
            within_three_sigma(emp, col.pi[i], samples),
            "coloring state {i}: {emp} vs {}",
            col.pi[i]
        );
    }

    let hc = ExactChain::build(
        exact::enumerate_independent_sets(&g, CAP).unwrap(),
        HardcoreGlauber { graph: &g, lambda: ratio(1, 1) },
        KERNEL_CAP,
    )
    .unwrap();
    let mut counts = vec![0u64; hc.space.len()];
    for i in 0..samples {
        let mut rng = derive_rng(1301, streams::BURN_IN, i);
        let mut x = IndependentSet::empty(2);
        for _ in 0..burn_in {
            hardcore::glauber_step(&g, &mut x, 1.0, &mut rng);
        }
        counts[hc.space.index_of(&x).unwrap()] += 1;
    }
    for (i, &c) in counts.iter().enumerate() {
        let emp = c as f64 / samples as f64;
        assert!(
            within_three_sigma(emp, hc.pi[i], samples),
            "hard-core state {i}: {emp} vs {}",
            hc.pi[i]
        );
    }
    println!("PASS sampler frequencies: burn-in samples match stationary mass per state");
}
