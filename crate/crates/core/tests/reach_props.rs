use std::f64::consts::PI;
use std::sync::Arc;

use pbc::graph::{build_knn_graph, AngleCache, Symmetrization};
use pbc::pathfinder::{alpha_reachable, Reachability};
use pbc::{NeighborGraph, PointSet};
use pbc_oracles as common;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph_of(points: &[Vec<f64>], q: usize, mode: Symmetrization) -> NeighborGraph {
    build_knn_graph(Arc::new(PointSet::from_rows(points).unwrap()), q, mode).unwrap()
}

/// Up to 12 points; walk enumeration blows up beyond q = 2 in union mode.
fn small_graph() -> impl Strategy<Value = (Vec<Vec<f64>>, usize, bool)> {
    (4usize..=12, 2usize..=3, any::<bool>()).prop_flat_map(|(n, d, mutual)| {
        let max_q: usize = if mutual { 3 } else { 2 };
        (
            prop::collection::vec(prop::collection::vec(0.0..1.0f64, d), n),
            1..=max_q,
            Just(mutual),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn matches_both_oracles((points, q, mutual) in small_graph(), alpha in 0.0..PI, source_frac in 0.0..1.0f64) {
        let mode = if mutual { Symmetrization::Mutual } else { Symmetrization::Union };
        let g = graph_of(&points, q, mode);
        let adj = common::adjacency(points.len(), &common::knn_edges(&points, q, mutual));
        let source = ((source_frac * points.len() as f64) as usize).min(points.len() - 1);
        let walks = common::walk_enumeration(&points, &adj, source, alpha);
        let dfs = common::edge_state_dfs(&points, &adj, source, alpha);
        prop_assert_eq!(&walks, &dfs);
        prop_assert_eq!(alpha_reachable(&g, source, alpha), walks);
    }

    #[test]
    fn shrinks_as_alpha_grows(points in prop::collection::vec(prop::collection::vec(0.0..1.0f64, 2), 10..150), q in 2usize..8, a1 in 0.0..PI, a2 in 0.0..PI, s in any::<prop::sample::Index>()) {
        prop_assume!(q < points.len());
        let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
        let g = graph_of(&points, q, Symmetrization::Union);
        let source = s.index(points.len());
        let wide = alpha_reachable(&g, source, lo);
        let narrow = alpha_reachable(&g, source, hi);
        prop_assert!(narrow.iter().zip(&wide).all(|(&n, &w)| !n || w));
    }

    #[test]
    fn reachability_is_symmetric(points in prop::collection::vec(prop::collection::vec(0.0..1.0f64, 3), 10..80), q in 2usize..6, alpha in 0.0..PI) {
        prop_assume!(q < points.len());
        let g = graph_of(&points, q, Symmetrization::Union);
        let all: Vec<Vec<bool>> = (0..points.len()).map(|s| alpha_reachable(&g, s, alpha)).collect();
        for (i, row) in all.iter().enumerate() {
            for (j, &hit) in row.iter().enumerate() {
                prop_assert_eq!(hit, all[j][i], "{} -> {}", i, j);
            }
        }
    }

    #[test]
    fn rigid_motion_keeps_reachability(points in prop::collection::vec(prop::collection::vec(0.0..1.0f64, 3), 10..100), q in 2usize..6, alpha in 0.0..PI, seed: u64) {
        prop_assume!(q < points.len());
        let moved = common::rigid_motion(&mut ChaCha8Rng::seed_from_u64(seed), &points);
        let g = graph_of(&points, q, Symmetrization::Union);
        let h = graph_of(&moved, q, Symmetrization::Union);
        prop_assume!(g.edges().map(|e| (e.0, e.1)).eq(h.edges().map(|e| (e.0, e.1))));
        // an angle within rounding of alpha may flip; skip those draws
        let near = (0..g.len()).any(|v| {
            let nb = g.neighbors(v);
            nb.iter().any(|&a| nb.iter().any(|&c| a != c && (common::angle(&points[a], &points[v], &points[c]) - alpha).abs() < 1e-9))
        });
        prop_assume!(!near);
        for s in 0..points.len() {
            prop_assert_eq!(alpha_reachable(&g, s, alpha), alpha_reachable(&h, s, alpha));
        }
    }

    #[test]
    fn each_directed_edge_expands_once(points in prop::collection::vec(prop::collection::vec(0.0..1.0f64, 2), 10..300), q in 1usize..12, alpha in 0.0..PI) {
        prop_assume!(q < points.len());
        let g = graph_of(&points, q, Symmetrization::Union);
        let cache = AngleCache::new(&g);
        let reach = Reachability::with_cache(&g, &cache);
        for s in [0, points.len() / 2, points.len() - 1] {
            let r = reach.search(s, alpha);
            prop_assert!(r.expansions <= 2 * g.edge_count());
            prop_assert_eq!(&r.reached, &Reachability::new(&g).search(s, alpha).reached);
        }
    }
}

#[test]
fn zero_alpha_is_union_find_components() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (n, q) in [(50, 1), (400, 2), (2000, 3)] {
        let points = common::random_points(&mut rng, n, 2);
        let g = graph_of(&points, q, Symmetrization::Union);
        let mut uf = common::UnionFind::new(n);
        for (i, j) in common::knn_edges(&points, q, false) {
            uf.union(i, j);
        }
        for s in [0, n / 3, n - 1] {
            let root = uf.find(s);
            let expected: Vec<bool> = (0..n).map(|i| uf.find(i) == root).collect();
            assert_eq!(alpha_reachable(&g, s, 0.0), expected, "n = {n}, source {s}");
        }
    }
}
