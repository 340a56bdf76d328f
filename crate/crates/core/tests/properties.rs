//! Property tests for the structural invariants: graph construction, the
//! exactness of the coupled color table against its closed form, marginal
//! faithfulness, independence preservation, and kernel row stochasticity.

use glauber_core::coloring::{
    available_colors, coupled_color_table, disagreement_probability, glauber_step, greedy_coloring,
};
use glauber_core::exact::{ColoringGlauber, HardcoreGlauber, StepKernel};
use glauber_core::graph::Graph;
use glauber_core::hardcore::{self, IndependentSet};
use glauber_core::rng::derive_rng;
use glauber_core::{ratio, Ratio};
use num_traits::{One, Zero};
use proptest::prelude::*;

/// All `u < v` pairs for an n-vertex graph, so a bitmask picks an edge set.
fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            pairs.push((u, v));
        }
    }
    pairs
}

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = all_pairs(n);
        let mask = 0u32..(1u32 << pairs.len());
        mask.prop_map(move |m| {
            let edges: Vec<_> =
                pairs.iter().enumerate().filter(|(i, _)| m & (1 << i) != 0).map(|(_, &e)| e).collect();
            Graph::build(n, &edges).expect("edge sets from masks are valid")
        })
    })
}

fn arb_avail() -> impl Strategy<Value = Vec<u32>> {
    proptest::sample::subsequence((1u32..=8).collect::<Vec<_>>(), 1..=8)
}

proptest! {
    #[test]
    fn built_graphs_are_consistent(g in arb_graph(6)) {
        // Adjacency is symmetric and sorted; degree sum matches edge count.
        let degree_sum: usize = g.vertices().map(|v| g.degree(v)).sum();
        prop_assert_eq!(degree_sum, 2 * g.edge_count());
        for u in g.vertices() {
            let mut prev = None;
            for &v in g.neighbors(u) {
                prop_assert!(g.has_edge(v, u));
                prop_assert!(prev.is_none_or(|p| p < v));
                prev = Some(v);
            }
        }
        // Triangle-freeness and girth agree.
        prop_assert_eq!(g.is_triangle_free(), g.girth().is_none_or(|gi| gi > 3));
    }

    #[test]
    fn cycle_girth_is_its_length(n in 3usize..=12) {
        prop_assert_eq!(Graph::cycle(n).unwrap().girth(), Some(n));
    }

    #[test]
    fn coupled_table_matches_closed_form(ax in arb_avail(), ay in arb_avail()) {
        let table = coupled_color_table(&ax, &ay);
        let total = (ax.len() * ay.len()) as u64;
        prop_assert_eq!(table.iter().map(|t| t.2).sum::<u64>(), total);

        // Independent route to the disagreement probability: sum the
        // off-diagonal table mass and compare with 1 - |intersection|/max.
        let disagree: u64 = table.iter().filter(|(a, b, _)| a != b).map(|t| t.2).sum();
        prop_assert_eq!(ratio(disagree as i64, total as i64), disagreement_probability(&ax, &ay));

        // Each marginal stays uniform over its available set.
        for &c in &ax {
            let mass: u64 = table.iter().filter(|(a, _, _)| *a == c).map(|t| t.2).sum();
            prop_assert_eq!(mass, ay.len() as u64);
        }
        for &c in &ay {
            let mass: u64 = table.iter().filter(|(_, b, _)| *b == c).map(|t| t.2).sum();
            prop_assert_eq!(mass, ax.len() as u64);
        }
    }

    #[test]
    fn heat_bath_keeps_colorings_proper(g in arb_graph(6), seed in any::<u64>()) {
        let k = g.max_degree() as u32 + 1;
        let mut x = greedy_coloring(&g, k).unwrap();
        let mut rng = derive_rng(seed, 0, 0);
        for _ in 0..50 {
            glauber_step(&g, &mut x, &mut rng);
            prop_assert!(x.is_proper(&g));
        }
    }

    #[test]
    fn heat_bath_keeps_sets_independent(g in arb_graph(6), seed in any::<u64>()) {
        let mut x = IndependentSet::empty(g.vertex_count());
        let mut rng = derive_rng(seed, 0, 0);
        for _ in 0..100 {
            hardcore::glauber_step(&g, &mut x, 0.8, &mut rng);
            prop_assert!(x.is_independent(&g));
        }
    }

    #[test]
    fn unblocked_at_most_degree(g in arb_graph(6), seed in any::<u64>()) {
        let mut x = IndependentSet::empty(g.vertex_count());
        let mut rng = derive_rng(seed, 0, 0);
        for _ in 0..30 {
            hardcore::glauber_step(&g, &mut x, 1.0, &mut rng);
        }
        for v in g.vertices() {
            prop_assert!(hardcore::unblocked(&g, &x, v).len() <= g.degree(v));
        }
    }

    #[test]
    fn kernel_rows_are_stochastic(g in arb_graph(4), seed in any::<u64>()) {
        let k = g.max_degree() as u32 + 1;
        let coloring_kernel = ColoringGlauber { graph: &g, k };
        let x = greedy_coloring(&g, k).unwrap();
        let row = coloring_kernel.step_distribution(&x);
        prop_assert_eq!(row.iter().map(|(_, p)| p.clone()).sum::<Ratio>(), Ratio::one());

        let hc = HardcoreGlauber { graph: &g, lambda: ratio(2, 3) };
        let mut s = IndependentSet::empty(g.vertex_count());
        let mut rng = derive_rng(seed, 0, 0);
        for _ in 0..20 {
            hardcore::glauber_step(&g, &mut s, 0.66, &mut rng);
        }
        let row = hc.step_distribution(&s);
        prop_assert_eq!(row.iter().map(|(_, p)| p.clone()).sum::<Ratio>(), Ratio::one());
        prop_assert!(row.iter().all(|(_, p)| *p > Ratio::zero()
            || p.is_zero()));
    }

    #[test]
    fn available_colors_lower_bound(g in arb_graph(5)) {
        let k = g.max_degree() as u32 + 2;
        let x = greedy_coloring(&g, k).unwrap();
        for v in g.vertices() {
            let a = available_colors(&g, &x, v).len();
            prop_assert!(a >= k as usize - g.degree(v));
        }
    }
}
