//! Symmetric q-nearest-neighbor graph and the vertex-angle primitive.

use std::io::{self, Write};
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{distance, PointSet};
use crate::error::{Error, Result};
use crate::kdtree::{brute_force_nearest, KdTree, Neighbor};

/// How directed q-NN relations become undirected edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetrization {
    /// Edge if either endpoint lists the other among its q nearest.
    #[default]
    Union,
    /// Edge only if both endpoints list each other.
    Mutual,
}

impl FromStr for Symmetrization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "union" => Ok(Self::Union),
            "mutual" => Ok(Self::Mutual),
            other => Err(Error::InvalidArgument(format!(
                "unknown symmetrization {other:?} (expected union or mutual)"
            ))),
        }
    }
}

/// Undirected neighbor graph in compressed adjacency form.
///
/// Every undirected edge `{u, v}` is stored as two directed edges `u -> v`
/// and `v -> u`; directed edge ids index `targets`, `lengths` and `reverse`.
#[derive(Debug, Clone)]
pub struct NeighborGraph {
    points: Arc<PointSet>,
    q: usize,
    mode: Symmetrization,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    lengths: Vec<f64>,
    reverse: Vec<usize>,
}

/// Builds the q-NN graph through a kd-tree.
pub fn build_knn_graph(
    points: Arc<PointSet>,
    q: usize,
    mode: Symmetrization,
) -> Result<NeighborGraph> {
    check_q(&points, q)?;
    let tree = KdTree::new(&points);
    let lists: Vec<Vec<Neighbor>> = (0..points.len())
        .into_par_iter()
        .map(|i| tree.nearest(points.point(i), q, Some(i)))
        .collect();
    drop(tree);
    NeighborGraph::from_neighbor_lists(points, q, mode, &lists)
}

/// Builds the q-NN graph by scanning all pairs. Slow; used as a reference.
pub fn build_knn_graph_brute(
    points: Arc<PointSet>,
    q: usize,
    mode: Symmetrization,
) -> Result<NeighborGraph> {
    check_q(&points, q)?;
    let lists: Vec<Vec<Neighbor>> = (0..points.len())
        .map(|i| brute_force_nearest(&points, i, q))
        .collect();
    NeighborGraph::from_neighbor_lists(points, q, mode, &lists)
}

fn check_q(points: &PointSet, q: usize) -> Result<()> {
    let n = points.len();
    if q == 0 || q >= n {
        return Err(Error::InvalidArgument(format!(
            "neighbor count q = {q} outside 1..={}",
            n.saturating_sub(1)
        )));
    }
    Ok(())
}

impl NeighborGraph {
    fn from_neighbor_lists(
        points: Arc<PointSet>,
        q: usize,
        mode: Symmetrization,
        lists: &[Vec<Neighbor>],
    ) -> Result<Self> {
        let n = points.len();
        // nearest neighbor at distance zero means a duplicate; report the
        // lowest offending point
        for (i, list) in lists.iter().enumerate() {
            if let Some(first) = list.first() {
                if first.dist2 == 0.0 {
                    return Err(Error::CoincidentPoints(
                        i.min(first.index),
                        i.max(first.index),
                    ));
                }
            }
        }

        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
        match mode {
            Symmetrization::Union => {
                for (i, list) in lists.iter().enumerate() {
                    for nb in list {
                        adjacency[i].push(nb.index);
                        adjacency[nb.index].push(i);
                    }
                }
            }
            Symmetrization::Mutual => {
                let sorted: Vec<Vec<usize>> = lists
                    .iter()
                    .map(|l| {
                        let mut v: Vec<usize> = l.iter().map(|nb| nb.index).collect();
                        v.sort_unstable();
                        v
                    })
                    .collect();
                for (i, list) in sorted.iter().enumerate() {
                    for &j in list {
                        if sorted[j].binary_search(&i).is_ok() {
                            adjacency[i].push(j);
                        }
                    }
                }
            }
        }

        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for adj in &mut adjacency {
            adj.sort_unstable();
            adj.dedup();
            targets.extend_from_slice(adj);
            offsets.push(targets.len());
        }
        let mut lengths = Vec::with_capacity(targets.len());
        let mut reverse = Vec::with_capacity(targets.len());
        for u in 0..n {
            for e in offsets[u]..offsets[u + 1] {
                let v = targets[e];
                lengths.push(distance(points.point(u), points.point(v)));
                let back = targets[offsets[v]..offsets[v + 1]]
                    .binary_search(&u)
                    .expect("adjacency is symmetric");
                reverse.push(offsets[v] + back);
            }
        }

        Ok(Self {
            points,
            q,
            mode,
            offsets,
            targets,
            lengths,
            reverse,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn mode(&self) -> Symmetrization {
        self.mode
    }

    pub fn points(&self) -> &Arc<PointSet> {
        &self.points
    }

    /// Sorted neighbor indices of node `i`.
    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Edge lengths aligned with [`neighbors`](Self::neighbors).
    #[inline]
    pub fn neighbor_lengths(&self, i: usize) -> &[f64] {
        &self.lengths[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Directed edge ids leaving node `i`.
    #[inline]
    pub fn out_edges(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    #[inline]
    pub fn edge_target(&self, e: usize) -> usize {
        self.targets[e]
    }

    #[inline]
    pub fn edge_source(&self, e: usize) -> usize {
        self.targets[self.reverse[e]]
    }

    #[inline]
    pub fn reverse_edge(&self, e: usize) -> usize {
        self.reverse[e]
    }

    #[inline]
    pub fn directed_edge_length(&self, e: usize) -> f64 {
        self.lengths[e]
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn directed_edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn edge_length(&self, i: usize, j: usize) -> Option<f64> {
        self.neighbors(i)
            .binary_search(&j)
            .ok()
            .map(|k| self.lengths[self.offsets[i] + k])
    }

    /// Undirected edges `(i, j, length)` with `i < j`, sorted by `(i, j)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.len()).flat_map(move |i| {
            self.out_edges(i)
                .filter(move |&e| self.targets[e] > i)
                .map(move |e| (i, self.targets[e], self.lengths[e]))
        })
    }

    /// Writes the `i j length` edge list.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (i, j, len) in self.edges() {
            writeln!(out, "{i} {j} {len}")?;
        }
        Ok(())
    }

    /// Interior angle at `v` on the path `u -> v -> w`, using stored lengths.
    #[inline]
    pub(crate) fn turn_angle(&self, e_in: usize, e_out: usize) -> f64 {
        let u = self.edge_source(e_in);
        let v = self.targets[e_in];
        let w = self.targets[e_out];
        let (a, b, c) = (
            self.points.point(u),
            self.points.point(v),
            self.points.point(w),
        );
        angle_from_parts(a, b, c, self.lengths[e_in], self.lengths[e_out])
    }
}

#[inline]
fn angle_from_parts(a: &[f64], b: &[f64], c: &[f64], len_ab: f64, len_cb: f64) -> f64 {
    let dot: f64 = a
        .iter()
        .zip(b)
        .zip(c)
        .map(|((a, b), c)| (a - b) * (c - b))
        .sum();
    (dot / (len_ab * len_cb)).clamp(-1.0, 1.0).acos()
}

/// Angle at `b` between the segments `b -> a` and `b -> c`, in `[0, pi]`.
///
/// A straight continuation gives `pi`; doubling back gives `0`.
pub fn vertex_angle(a: &[f64], b: &[f64], c: &[f64]) -> Result<f64> {
    let len_ab = distance(a, b);
    let len_cb = distance(c, b);
    if len_ab == 0.0 || len_cb == 0.0 {
        return Err(Error::ZeroLengthSegment);
    }
    Ok(angle_from_parts(a, b, c, len_ab, len_cb))
}

/// Precomputed interior angles for every pair of edges meeting at a node.
///
/// Costs `sum(deg^2)` floats; worth it when several angle thresholds are
/// evaluated on the same graph.
#[derive(Debug, Clone)]
pub struct AngleCache {
    offsets: Vec<usize>,
    angles: Vec<f64>,
}

impl AngleCache {
    pub fn new(graph: &NeighborGraph) -> Self {
        let n = graph.len();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for v in 0..n {
            let d = graph.degree(v);
            offsets.push(offsets[v] + d * d);
        }
        let blocks: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|v| {
                let mut block = Vec::with_capacity(graph.degree(v).pow(2));
                for e_back in graph.out_edges(v) {
                    let e_in = graph.reverse_edge(e_back);
                    for e_out in graph.out_edges(v) {
                        block.push(graph.turn_angle(e_in, e_out));
                    }
                }
                block
            })
            .collect();
        Self {
            offsets,
            angles: blocks.concat(),
        }
    }

    /// Angle for entering `v` along `e_in` and leaving along `e_out`.
    #[inline]
    pub(crate) fn get(&self, graph: &NeighborGraph, e_in: usize, e_out: usize) -> f64 {
        let v = graph.edge_target(e_in);
        let base = graph.out_edges(v).start;
        let d = graph.degree(v);
        let i = graph.reverse_edge(e_in) - base;
        self.angles[self.offsets[v] + i * d + (e_out - base)]
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}
