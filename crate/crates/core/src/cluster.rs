//! From reachability signatures to cluster labels.
//!
//! Identical signatures are grouped first, then the distinct nonzero
//! signatures are merged by complete-linkage agglomeration under Hamming
//! distance until `K` clusters remain. Points that no landmark reached carry
//! the all-zero signature; they sit out the linkage and take the label of
//! their nearest Euclidean neighbor with a nonzero signature.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dataset::PointSet;
use crate::error::{Error, Result, Stage, StageExt};
use crate::graph::{build_knn_graph, NeighborGraph, Symmetrization};
use crate::kdtree::KdTree;
use crate::pathfinder::{compute_features, select_landmarks, FeatureMatrix, Reachability};

/// Distinct signatures and the points that carry them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureGroups {
    /// Packed distinct rows, in order of first appearance.
    rows: Vec<Vec<u64>>,
    pub multiplicity: Vec<usize>,
    pub row_of_point: Vec<usize>,
}

impl FeatureGroups {
    /// Number of distinct signatures, `F`.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, g: usize) -> &[u64] {
        &self.rows[g]
    }

    pub fn is_zero(&self, g: usize) -> bool {
        self.rows[g].iter().all(|&w| w == 0)
    }

    /// Hamming distance between two distinct rows.
    pub fn hamming(&self, a: usize, b: usize) -> u32 {
        self.rows[a]
            .iter()
            .zip(&self.rows[b])
            .map(|(x, y)| (x ^ y).count_ones())
            .sum()
    }

    /// Indices of the nonzero distinct rows, ascending.
    pub fn nonzero(&self) -> Vec<usize> {
        (0..self.len()).filter(|&g| !self.is_zero(g)).collect()
    }
}

/// Deduplicates the rows of a feature matrix by hashing.
pub fn group_features(features: &FeatureMatrix) -> FeatureGroups {
    let n = features.rows();
    let mut index: HashMap<&[u64], usize> = HashMap::new();
    let mut rows = Vec::new();
    let mut multiplicity = Vec::new();
    let mut row_of_point = Vec::with_capacity(n);
    for i in 0..n {
        let row = features.row(i);
        let g = *index.entry(row).or_insert_with(|| {
            rows.push(row.to_vec());
            multiplicity.push(0);
            rows.len() - 1
        });
        multiplicity[g] += 1;
        row_of_point.push(g);
    }
    FeatureGroups {
        rows,
        multiplicity,
        row_of_point,
    }
}

/// One agglomeration step. Clusters are named by their smallest distinct-row
/// index, and `a < b`; the merged cluster keeps the name `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub distance: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Linkage {
    /// Cluster label per distinct row; `None` for the all-zero row.
    pub group_labels: Vec<Option<usize>>,
    pub merge_trace: Vec<Merge>,
}

/// Complete-linkage agglomeration of the nonzero distinct rows down to `k`
/// clusters.
///
/// The minimal-distance pair is merged at each step; ties go to the
/// lexicographically smallest `(a, b)`. Final labels follow the order of the
/// clusters' smallest row index.
pub fn complete_linkage(groups: &FeatureGroups, k: usize) -> Result<Linkage> {
    if k == 0 {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    let members = groups.nonzero();
    let f = members.len();
    if f < k {
        return Err(Error::TooFewSignatures { found: f, k });
    }

    let mut dist = vec![0u32; f * f];
    let mut heap = BinaryHeap::with_capacity(f * (f - 1) / 2);
    for a in 0..f {
        for b in a + 1..f {
            let d = groups.hamming(members[a], members[b]);
            dist[a * f + b] = d;
            dist[b * f + a] = d;
            heap.push(Reverse((d, a, b)));
        }
    }

    let mut active = vec![true; f];
    let mut owner: Vec<usize> = (0..f).collect();
    let mut remaining = f;
    let mut merge_trace = Vec::with_capacity(f - k);
    while remaining > k {
        let Reverse((d, a, b)) = heap.pop().expect("a live pair exists while clusters > k");
        if !active[a] || !active[b] || dist[a * f + b] != d {
            continue;
        }
        active[b] = false;
        remaining -= 1;
        for o in owner.iter_mut().filter(|o| **o == b) {
            *o = a;
        }
        for x in (0..f).filter(|&x| active[x] && x != a) {
            let merged = dist[a * f + x].max(dist[b * f + x]);
            dist[a * f + x] = merged;
            dist[x * f + a] = merged;
            heap.push(Reverse((merged, a.min(x), a.max(x))));
        }
        merge_trace.push(Merge {
            a: members[a],
            b: members[b],
            distance: d,
        });
    }

    let mut label_of_cluster = vec![usize::MAX; f];
    for (next, c) in (0..f).filter(|&c| active[c]).enumerate() {
        label_of_cluster[c] = next;
    }
    let mut group_labels = vec![None; groups.len()];
    for (pos, &g) in members.iter().enumerate() {
        group_labels[g] = Some(label_of_cluster[owner[pos]]);
    }
    Ok(Linkage {
        group_labels,
        merge_trace,
    })
}

/// Per-point labels before diagnostics are attached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub labels: Vec<usize>,
    pub zero_signature_count: usize,
}

/// Gives every point its signature's label; zero-signature points copy the
/// label of the nearest point (lowest index on ties) whose signature is
/// nonzero.
pub fn assign_labels(
    groups: &FeatureGroups,
    group_labels: &[Option<usize>],
    points: &PointSet,
) -> Result<Assignment> {
    if groups.row_of_point.len() != points.len() {
        return Err(Error::LengthMismatch(
            groups.row_of_point.len(),
            points.len(),
        ));
    }
    let mut labels = vec![usize::MAX; points.len()];
    let mut zeros = Vec::new();
    let mut labeled = Vec::new();
    for (i, &g) in groups.row_of_point.iter().enumerate() {
        if groups.is_zero(g) {
            zeros.push(i);
            continue;
        }
        labels[i] = group_labels[g].ok_or_else(|| {
            Error::InvalidArgument(format!("distinct row {g} has no cluster label"))
        })?;
        labeled.push(i);
    }
    if labeled.is_empty() {
        return Err(Error::AllZeroSignatures);
    }
    if !zeros.is_empty() {
        let tree = KdTree::with_subset(points, labeled);
        for &i in &zeros {
            let nearest = tree.nearest(points.point(i), 1, None)[0];
            labels[i] = labels[nearest.index];
        }
    }
    Ok(Assignment {
        labels,
        zero_signature_count: zeros.len(),
    })
}

/// Default angle threshold: a 120 degree interior angle.
pub const DEFAULT_ALPHA: f64 = 2.0 * PI / 3.0;

/// Default landmark count for `k` clusters.
pub fn default_landmarks(k: usize) -> usize {
    (2 * k).max(10)
}

/// Parameters of a path-based clustering run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PbcParams {
    /// Neighbors per point in the graph.
    pub q: usize,
    /// Number of clusters.
    pub k: usize,
    /// Number of landmarks, `M`.
    pub landmarks: usize,
    /// Minimum interior angle, radians.
    pub alpha: f64,
    pub seed: u64,
    pub mode: Symmetrization,
}

impl PbcParams {
    pub fn new(q: usize, k: usize) -> Self {
        Self {
            q,
            k,
            landmarks: default_landmarks(k),
            alpha: DEFAULT_ALPHA,
            seed: 0,
            mode: Symmetrization::Union,
        }
    }

    pub fn with_landmarks(mut self, m: usize) -> Self {
        self.landmarks = m;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_mode(mut self, mode: Symmetrization) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=PI).contains(&self.alpha) {
            return Err(Error::InvalidArgument(format!(
                "alpha = {} outside [0, pi]",
                self.alpha
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidArgument("K must be at least 1".into()));
        }
        if self.landmarks < self.k {
            return Err(Error::InvalidArgument(format!(
                "landmark count {} is below K = {}",
                self.landmarks, self.k
            )));
        }
        Ok(())
    }
}

/// Labels plus the diagnostics of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringResult {
    pub labels: Vec<usize>,
    pub k: usize,
    /// Distinct signatures, including the all-zero one if present.
    pub f: usize,
    pub landmarks: Vec<usize>,
    pub zero_signature_count: usize,
    pub merge_trace: Vec<Merge>,
    /// Largest number of edge-state expansions over all landmarks.
    pub max_expansions: usize,
}

/// Runs the full pipeline on raw points.
pub fn pbc_pipeline(points: Arc<PointSet>, params: &PbcParams) -> Result<ClusteringResult> {
    params.validate()?;
    let graph = build_knn_graph(points, params.q, params.mode).stage(Stage::Graph)?;
    cluster_graph(Reachability::new(&graph), params)
}

/// Runs everything after graph construction. `params.q` and `params.mode`
/// are ignored; the graph already fixes them.
pub fn cluster_graph(reach: Reachability<'_>, params: &PbcParams) -> Result<ClusteringResult> {
    params.validate()?;
    let graph: &NeighborGraph = reach.graph();
    let landmarks =
        select_landmarks(graph.len(), params.landmarks, params.seed).stage(Stage::Landmarks)?;
    let features = compute_features(reach, &landmarks, params.alpha);
    let groups = group_features(&features);
    let linkage = complete_linkage(&groups, params.k).stage(Stage::Cluster)?;
    let assignment =
        assign_labels(&groups, &linkage.group_labels, graph.points()).stage(Stage::Assign)?;
    Ok(ClusteringResult {
        labels: assignment.labels,
        k: params.k,
        f: groups.len(),
        landmarks: landmarks.indices,
        zero_signature_count: assignment.zero_signature_count,
        merge_trace: linkage.merge_trace,
        max_expansions: features.expansions().iter().copied().max().unwrap_or(0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(rows: &[&str]) -> FeatureMatrix {
        let rows: Vec<Vec<bool>> = rows
            .iter()
            .map(|r| r.chars().map(|c| c == '1').collect())
            .collect();
        FeatureMatrix::from_rows(&rows)
    }

    #[test]
    fn grouping_examples() {
        let g = group_features(&bits(&["10", "10", "01"]));
        assert_eq!(g.len(), 2);
        assert_eq!(g.multiplicity, vec![2, 1]);
        assert_eq!(g.row_of_point, vec![0, 0, 1]);

        assert_eq!(group_features(&bits(&["11", "11", "11"])).len(), 1);
        let distinct = group_features(&bits(&["00", "01", "10", "11"]));
        assert_eq!(distinct.len(), 4);
        assert!(distinct.multiplicity.iter().all(|&m| m == 1));
    }

    #[test]
    fn four_rows_into_two() {
        let g = group_features(&bits(&["1000", "1100", "0011", "0111"]));
        let l = complete_linkage(&g, 2).unwrap();
        assert_eq!(l.group_labels, vec![Some(0), Some(0), Some(1), Some(1)]);
        assert_eq!(
            l.merge_trace,
            vec![
                Merge {
                    a: 0,
                    b: 1,
                    distance: 1
                },
                Merge {
                    a: 2,
                    b: 3,
                    distance: 1
                }
            ]
        );
        // complete-linkage distance between the two survivors
        let across = [(0, 2), (0, 3), (1, 2), (1, 3)]
            .iter()
            .map(|&(a, b)| g.hamming(a, b))
            .max()
            .unwrap();
        assert_eq!(across, 4);
        let all = complete_linkage(&g, 1).unwrap();
        assert_eq!(all.merge_trace.last().unwrap().distance, 4);
    }

    #[test]
    fn k_equals_f_and_k_one() {
        let g = group_features(&bits(&["100", "010", "001"]));
        let id = complete_linkage(&g, 3).unwrap();
        assert!(id.merge_trace.is_empty());
        assert_eq!(id.group_labels, vec![Some(0), Some(1), Some(2)]);
        let one = complete_linkage(&g, 1).unwrap();
        assert!(one.group_labels.iter().all(|l| *l == Some(0)));
    }

    #[test]
    fn zero_row_sits_out() {
        let g = group_features(&bits(&["00", "10", "01"]));
        assert!(matches!(
            complete_linkage(&g, 3),
            Err(Error::TooFewSignatures { found: 2, k: 3 })
        ));
        let l = complete_linkage(&g, 2).unwrap();
        assert_eq!(l.group_labels, vec![None, Some(0), Some(1)]);
    }

    #[test]
    fn zero_signature_point_takes_nearest_label() {
        let points =
            PointSet::from_rows(&[[0.0, 0.0], [0.1, 0.0], [5.0, 0.0], [0.2, 0.0]]).unwrap();
        let g = group_features(&bits(&["10", "10", "01", "00"]));
        let l = complete_linkage(&g, 2).unwrap();
        let a = assign_labels(&g, &l.group_labels, &points).unwrap();
        assert_eq!(a.labels, vec![0, 0, 1, 0]);
        assert_eq!(a.zero_signature_count, 1);
    }

    #[test]
    fn all_zero_is_an_error() {
        let points = PointSet::from_rows(&[[0.0], [1.0]]).unwrap();
        let g = group_features(&bits(&["00", "00"]));
        assert!(matches!(
            assign_labels(&g, &[None], &points),
            Err(Error::AllZeroSignatures)
        ));
    }

    #[test]
    fn pure_composition_without_zero_rows() {
        let points = PointSet::from_rows(&[[0.0], [1.0], [2.0], [3.0]]).unwrap();
        let g = group_features(&bits(&["01", "10", "01", "11"]));
        let gl = vec![Some(1), Some(0), Some(0)];
        let a = assign_labels(&g, &gl, &points).unwrap();
        let expect: Vec<usize> = g.row_of_point.iter().map(|&r| gl[r].unwrap()).collect();
        assert_eq!(a.labels, expect);
        assert_eq!(a.zero_signature_count, 0);
    }

    #[test]
    fn params_validation() {
        assert!(PbcParams::new(5, 2).with_alpha(3.5).validate().is_err());
        assert!(PbcParams::new(5, 2).with_landmarks(1).validate().is_err());
        assert!(PbcParams::new(5, 0).validate().is_err());
        assert_eq!(PbcParams::new(5, 2).landmarks, 10);
        assert_eq!(default_landmarks(20), 40);
    }
}
