//! Exact k-nearest-neighbor queries over a [`PointSet`].
//!
//! Neighbors are ordered by `(squared distance, index)`, so ties resolve to
//! the lower point index. Pruning only discards a subtree when its bounding
//! box is strictly farther than the current worst candidate, which keeps the
//! result identical to a brute-force scan.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::dataset::{squared_distance, PointSet};

const LEAF_SIZE: usize = 12;
const NONE: usize = usize::MAX;

/// A neighbor candidate: squared distance and point index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub dist2: f64,
    pub index: usize,
}

impl Eq for Neighbor {}

impl Ord for Neighbor {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist2
            .total_cmp(&other.dist2)
            .then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for Neighbor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone)]
struct Node {
    start: usize,
    end: usize,
    left: usize,
    right: usize,
}

#[derive(Debug)]
pub struct KdTree<'a> {
    points: &'a PointSet,
    order: Vec<usize>,
    nodes: Vec<Node>,
    // per-node bounding boxes, `dim` values each
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl<'a> KdTree<'a> {
    /// Indexes every point of the set.
    pub fn new(points: &'a PointSet) -> Self {
        Self::with_subset(points, (0..points.len()).collect())
    }

    /// Indexes only the given point indices.
    pub fn with_subset(points: &'a PointSet, order: Vec<usize>) -> Self {
        let mut tree = Self {
            points,
            order,
            nodes: Vec::new(),
            lo: Vec::new(),
            hi: Vec::new(),
        };
        if !tree.order.is_empty() {
            tree.build(0, tree.order.len());
        }
        tree
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let dim = self.points.dim();
        let id = self.nodes.len();
        self.nodes.push(Node {
            start,
            end,
            left: NONE,
            right: NONE,
        });

        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for &i in &self.order[start..end] {
            for (k, &x) in self.points.point(i).iter().enumerate() {
                lo[k] = lo[k].min(x);
                hi[k] = hi[k].max(x);
            }
        }
        let split = (0..dim)
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])).then(b.cmp(&a)))
            .unwrap_or(0);
        let spread = hi[split] - lo[split];
        self.lo.extend_from_slice(&lo);
        self.hi.extend_from_slice(&hi);

        if end - start <= LEAF_SIZE || spread == 0.0 {
            return id;
        }

        let mid = start + (end - start) / 2;
        let points = self.points;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            points.point(a)[split]
                .total_cmp(&points.point(b)[split])
                .then(a.cmp(&b))
        });
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[id].left = left;
        self.nodes[id].right = right;
        id
    }

    fn box_dist2(&self, node: usize, q: &[f64]) -> f64 {
        let dim = q.len();
        let lo = &self.lo[node * dim..(node + 1) * dim];
        let hi = &self.hi[node * dim..(node + 1) * dim];
        let mut acc = 0.0;
        for k in 0..dim {
            let d = if q[k] < lo[k] {
                lo[k] - q[k]
            } else if q[k] > hi[k] {
                q[k] - hi[k]
            } else {
                0.0
            };
            acc += d * d;
        }
        acc
    }

    /// The `k` nearest indexed points to `query`, skipping `exclude`, sorted
    /// by `(distance, index)`.
    pub fn nearest(&self, query: &[f64], k: usize, exclude: Option<usize>) -> Vec<Neighbor> {
        let mut heap = BinaryHeap::with_capacity(k + 1);
        if k > 0 && !self.nodes.is_empty() {
            self.search(0, query, k, exclude, &mut heap);
        }
        heap.into_sorted_vec()
    }

    fn search(
        &self,
        node: usize,
        q: &[f64],
        k: usize,
        exclude: Option<usize>,
        heap: &mut BinaryHeap<Neighbor>,
    ) {
        let n = &self.nodes[node];
        if n.left == NONE {
            for &i in &self.order[n.start..n.end] {
                if Some(i) == exclude {
                    continue;
                }
                let cand = Neighbor {
                    dist2: squared_distance(q, self.points.point(i)),
                    index: i,
                };
                if heap.len() < k {
                    heap.push(cand);
                } else if cand < *heap.peek().expect("heap is full") {
                    heap.pop();
                    heap.push(cand);
                }
            }
            return;
        }

        let dl = self.box_dist2(n.left, q);
        let dr = self.box_dist2(n.right, q);
        let (first, second, d_first, d_second) = if dl <= dr {
            (n.left, n.right, dl, dr)
        } else {
            (n.right, n.left, dr, dl)
        };
        for (child, d) in [(first, d_first), (second, d_second)] {
            if heap.len() == k && d > heap.peek().expect("heap is full").dist2 {
                continue;
            }
            self.search(child, q, k, exclude, heap);
        }
    }
}

/// Reference `k` nearest neighbors of point `i` by full scan.
pub fn brute_force_nearest(points: &PointSet, i: usize, k: usize) -> Vec<Neighbor> {
    let q = points.point(i);
    let mut all: Vec<Neighbor> = (0..points.len())
        .filter(|&j| j != i)
        .map(|j| Neighbor {
            dist2: squared_distance(q, points.point(j)),
            index: j,
        })
        .collect();
    all.sort_unstable();
    all.truncate(k);
    all
}
