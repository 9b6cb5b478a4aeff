//! Landmark selection and angle-constrained reachability.
//!
//! A path `y_1, ..., y_m` is alpha-constrained when the interior angle at
//! every interior vertex is at least `alpha`. Whether a path can be extended
//! past a node depends on the edge it arrived by, so the search runs over
//! directed-edge states `(u -> v)` rather than over nodes. A state expands to
//! `(v -> w)` when `angle(u, v, w) >= alpha`, and each directed edge is
//! entered at most once.

use std::collections::VecDeque;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{AngleCache, NeighborGraph};

/// Randomly chosen point indices that anchor the reachability features.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LandmarkSet {
    pub indices: Vec<usize>,
    pub seed: u64,
}

impl LandmarkSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Draws `m` distinct indices from `0..n`.
///
/// The generator is ChaCha8 seeded through `seed_from_u64`, and the draw is a
/// partial Fisher-Yates shuffle whose swap positions come from `u64` ranges,
/// so the result does not depend on the platform's pointer width.
pub fn select_landmarks(n: usize, m: usize, seed: u64) -> Result<LandmarkSet> {
    if m == 0 || m > n {
        return Err(Error::InvalidArgument(format!(
            "landmark count {m} outside 1..={n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..m {
        let j = rng.random_range(i as u64..n as u64) as usize;
        pool.swap(i, j);
    }
    pool.truncate(m);
    Ok(LandmarkSet {
        indices: pool,
        seed,
    })
}

/// Output of one reachability search.
#[derive(Debug, Clone)]
pub struct Reach {
    pub reached: Vec<bool>,
    /// Directed-edge states popped from the queue.
    pub expansions: usize,
}

/// Angle-constrained reachability over a fixed graph.
#[derive(Debug, Clone, Copy)]
pub struct Reachability<'g> {
    graph: &'g NeighborGraph,
    cache: Option<&'g AngleCache>,
}

impl<'g> Reachability<'g> {
    pub fn new(graph: &'g NeighborGraph) -> Self {
        Self { graph, cache: None }
    }

    /// Uses precomputed angles instead of evaluating them on demand.
    pub fn with_cache(graph: &'g NeighborGraph, cache: &'g AngleCache) -> Self {
        Self {
            graph,
            cache: Some(cache),
        }
    }

    pub fn graph(&self) -> &'g NeighborGraph {
        self.graph
    }

    #[inline]
    fn angle(&self, e_in: usize, e_out: usize) -> f64 {
        match self.cache {
            Some(c) => c.get(self.graph, e_in, e_out),
            None => self.graph.turn_angle(e_in, e_out),
        }
    }

    /// Every node joined to `source` by an alpha-constrained path.
    pub fn search(&self, source: usize, alpha: f64) -> Reach {
        let g = self.graph;
        let mut reached = vec![false; g.len()];
        let mut entered = vec![false; g.directed_edge_count()];
        let mut queue = VecDeque::new();

        reached[source] = true;
        // single edges have no interior vertex
        for e in g.out_edges(source) {
            entered[e] = true;
            reached[g.edge_target(e)] = true;
            queue.push_back(e);
        }

        let mut expansions = 0;
        while let Some(e_in) = queue.pop_front() {
            expansions += 1;
            let v = g.edge_target(e_in);
            for e_out in g.out_edges(v) {
                if entered[e_out] || self.angle(e_in, e_out) < alpha {
                    continue;
                }
                entered[e_out] = true;
                reached[g.edge_target(e_out)] = true;
                queue.push_back(e_out);
            }
        }
        Reach {
            reached,
            expansions,
        }
    }
}

/// Reachability vector for `source` under angle threshold `alpha`.
pub fn alpha_reachable(graph: &NeighborGraph, source: usize, alpha: f64) -> Vec<bool> {
    Reachability::new(graph).search(source, alpha).reached
}

/// `N x M` binary reachability signatures, one row per point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureMatrix {
    n: usize,
    m: usize,
    words: usize,
    bits: Vec<u64>,
    landmarks: Vec<usize>,
    expansions: Vec<usize>,
}

impl FeatureMatrix {
    /// Builds a matrix from its columns.
    pub fn from_columns(columns: &[Vec<bool>], landmarks: Vec<usize>) -> Self {
        let m = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        let words = m.div_ceil(64).max(1);
        let mut bits = vec![0u64; n * words];
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), n, "ragged feature columns");
            for (i, &b) in col.iter().enumerate() {
                if b {
                    bits[i * words + j / 64] |= 1 << (j % 64);
                }
            }
        }
        Self {
            n,
            m,
            words,
            bits,
            landmarks,
            expansions: vec![0; m],
        }
    }

    /// Builds a matrix from rows of 0/1 values.
    pub fn from_rows(rows: &[Vec<bool>]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let words = m.div_ceil(64).max(1);
        let mut bits = vec![0u64; n * words];
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), m, "ragged feature rows");
            for (j, &b) in row.iter().enumerate() {
                if b {
                    bits[i * words + j / 64] |= 1 << (j % 64);
                }
            }
        }
        Self {
            n,
            m,
            words,
            bits,
            landmarks: Vec::new(),
            expansions: vec![0; m],
        }
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    /// Packed bits of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        self.row(i).iter().all(|&w| w == 0)
    }

    pub fn landmarks(&self) -> &[usize] {
        &self.landmarks
    }

    /// Edge-state expansions performed for each landmark column.
    pub fn expansions(&self) -> &[usize] {
        &self.expansions
    }

    /// Writes the matrix as 0/1 CSV, one row per point.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for i in 0..self.n {
            let row: Vec<&str> = (0..self.m)
                .map(|j| if self.get(i, j) { "1" } else { "0" })
                .collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Computes one reachability column per landmark, in parallel.
pub fn compute_features(
    reach: Reachability<'_>,
    landmarks: &LandmarkSet,
    alpha: f64,
) -> FeatureMatrix {
    let results: Vec<Reach> = landmarks
        .indices
        .par_iter()
        .map(|&l| reach.search(l, alpha))
        .collect();
    let expansions = results.iter().map(|r| r.expansions).collect();
    let columns: Vec<Vec<bool>> = results.into_iter().map(|r| r.reached).collect();
    let mut fm = FeatureMatrix::from_columns(&columns, landmarks.indices.clone());
    fm.expansions = expansions;
    fm
}
