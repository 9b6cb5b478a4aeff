use std::collections::BTreeSet;
use std::sync::Arc;

use pbc::graph::{
    build_knn_graph, build_knn_graph_brute, vertex_angle, AngleCache, Symmetrization,
};
use pbc::PointSet;
use pbc_oracles as common;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn point_cloud(max_n: usize, max_dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (3..=max_n, 1..=max_dim)
        .prop_flat_map(|(n, d)| prop::collection::vec(prop::collection::vec(-10.0..10.0f64, d), n))
}

fn edge_set(g: &pbc::NeighborGraph) -> BTreeSet<(usize, usize)> {
    g.edges().map(|(i, j, _)| (i, j)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kd_tree_graph_matches_sorted_pairs(points in point_cloud(120, 4), q_frac in 0.0..1.0f64, mutual: bool) {
        let n = points.len();
        let q = 1 + (q_frac * (n - 2) as f64) as usize;
        let mode = if mutual { Symmetrization::Mutual } else { Symmetrization::Union };
        let ps = Arc::new(PointSet::from_rows(&points).unwrap());
        let g = build_knn_graph(ps, q, mode).unwrap();
        prop_assert_eq!(edge_set(&g), common::knn_edges(&points, q, mutual));
        for (i, j, len) in g.edges() {
            prop_assert!((len - common::sq_dist(&points[i], &points[j]).sqrt()).abs() <= 1e-12);
        }
    }

    #[test]
    fn mutual_edges_are_union_edges(points in point_cloud(80, 3), q in 1usize..8) {
        prop_assume!(q < points.len());
        let ps = Arc::new(PointSet::from_rows(&points).unwrap());
        let union = edge_set(&build_knn_graph(ps.clone(), q, Symmetrization::Union).unwrap());
        let mutual = edge_set(&build_knn_graph(ps, q, Symmetrization::Mutual).unwrap());
        prop_assert!(mutual.is_subset(&union));
    }

    #[test]
    fn angle_is_symmetric(pts in prop::collection::vec(prop::collection::vec(-5.0..5.0f64, 3), 3)) {
        prop_assume!(pts[0] != pts[1] && pts[2] != pts[1]);
        let a = vertex_angle(&pts[0], &pts[1], &pts[2]).unwrap();
        let c = vertex_angle(&pts[2], &pts[1], &pts[0]).unwrap();
        prop_assert_eq!(a.to_bits(), c.to_bits());
        prop_assert!((0.0..=std::f64::consts::PI).contains(&a));
    }

    #[test]
    fn angle_survives_rigid_motion(pts in prop::collection::vec(prop::collection::vec(-5.0..5.0f64, 3), 3), seed: u64) {
        prop_assume!(common::sq_dist(&pts[0], &pts[1]) > 1e-4 && common::sq_dist(&pts[2], &pts[1]) > 1e-4);
        let moved = common::rigid_motion(&mut ChaCha8Rng::seed_from_u64(seed), &pts);
        let before = vertex_angle(&pts[0], &pts[1], &pts[2]).unwrap();
        let after = vertex_angle(&moved[0], &moved[1], &moved[2]).unwrap();
        prop_assert!((before - after).abs() <= 1e-9, "{} vs {}", before, after);
    }
}

#[test]
fn brute_force_builder_agrees_with_kd_tree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let points = common::random_points(&mut rng, 700, 3);
    let ps = Arc::new(PointSet::from_rows(&points).unwrap());
    for mode in [Symmetrization::Union, Symmetrization::Mutual] {
        let fast = build_knn_graph(ps.clone(), 9, mode).unwrap();
        let slow = build_knn_graph_brute(ps.clone(), 9, mode).unwrap();
        assert_eq!(edge_set(&fast), edge_set(&slow));
    }
}

#[test]
fn grid_ties_follow_lower_index() {
    // every interior point of a grid has four neighbors at the same distance
    let points: Vec<Vec<f64>> = (0..36)
        .map(|i| vec![(i % 6) as f64, (i / 6) as f64])
        .collect();
    let ps = Arc::new(PointSet::from_rows(&points).unwrap());
    for q in [1, 2, 3, 5] {
        for mutual in [false, true] {
            let mode = if mutual {
                Symmetrization::Mutual
            } else {
                Symmetrization::Union
            };
            let g = build_knn_graph(ps.clone(), q, mode).unwrap();
            assert_eq!(
                edge_set(&g),
                common::knn_edges(&points, q, mutual),
                "q = {q}, mutual = {mutual}"
            );
        }
    }
}

#[test]
fn cache_size_is_sum_of_squared_degrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let points = common::random_points(&mut rng, 200, 2);
    let g = build_knn_graph(
        Arc::new(PointSet::from_rows(&points).unwrap()),
        6,
        Symmetrization::Union,
    )
    .unwrap();
    let expected: usize = (0..g.len()).map(|v| g.degree(v).pow(2)).sum();
    assert_eq!(AngleCache::new(&g).len(), expected);
}
