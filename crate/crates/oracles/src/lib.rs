//! Reference implementations used as oracles. Each is written from the
//! definitions, independently of the library code it checks.

use std::collections::{BTreeSet, HashSet};

use rand::Rng;

/// Undirected edge set `(i, j)` with `i < j` of the q-NN graph, by sorting
/// all pairs. Ties go to the lower index.
pub fn knn_edges(points: &[Vec<f64>], q: usize, mutual: bool) -> BTreeSet<(usize, usize)> {
    let n = points.len();
    let lists: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut cand: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (sq_dist(&points[i], &points[j]), j))
                .collect();
            cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            cand.iter().take(q).map(|c| c.1).collect()
        })
        .collect();
    let mut edges = BTreeSet::new();
    for i in 0..n {
        for &j in &lists[i] {
            if !mutual || lists[j].contains(&i) {
                edges.insert((i.min(j), i.max(j)));
            }
        }
    }
    edges
}

pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn adjacency(n: usize, edges: &BTreeSet<(usize, usize)>) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    adj
}

/// Interior angle at `b` via the law of cosines.
pub fn angle(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let ab = sq_dist(a, b);
    let cb = sq_dist(c, b);
    let ac = sq_dist(a, c);
    ((ab + cb - ac) / (2.0 * (ab * cb).sqrt()))
        .clamp(-1.0, 1.0)
        .acos()
}

/// Reachability by enumerating every walk that never repeats a directed
/// edge. Exponential; meant for graphs of a dozen nodes.
pub fn walk_enumeration(
    points: &[Vec<f64>],
    adj: &[Vec<usize>],
    source: usize,
    alpha: f64,
) -> Vec<bool> {
    fn extend(
        points: &[Vec<f64>],
        adj: &[Vec<usize>],
        alpha: f64,
        prev: usize,
        cur: usize,
        used: &mut HashSet<(usize, usize)>,
        reached: &mut [bool],
    ) {
        reached[cur] = true;
        for &next in &adj[cur] {
            if used.contains(&(cur, next)) {
                continue;
            }
            if angle(&points[prev], &points[cur], &points[next]) < alpha {
                continue;
            }
            used.insert((cur, next));
            extend(points, adj, alpha, cur, next, used, reached);
            used.remove(&(cur, next));
        }
    }

    let mut reached = vec![false; points.len()];
    reached[source] = true;
    for &first in &adj[source] {
        let mut used = HashSet::from([(source, first)]);
        extend(points, adj, alpha, source, first, &mut used, &mut reached);
    }
    reached
}

/// Reachability by a recursive depth-first search over directed-edge
/// states, each state visited once.
pub fn edge_state_dfs(
    points: &[Vec<f64>],
    adj: &[Vec<usize>],
    source: usize,
    alpha: f64,
) -> Vec<bool> {
    fn visit(
        points: &[Vec<f64>],
        adj: &[Vec<usize>],
        alpha: f64,
        state: (usize, usize),
        seen: &mut HashSet<(usize, usize)>,
        reached: &mut [bool],
    ) {
        let (prev, cur) = state;
        reached[cur] = true;
        for &next in &adj[cur] {
            if !seen.contains(&(cur, next))
                && angle(&points[prev], &points[cur], &points[next]) >= alpha
            {
                seen.insert((cur, next));
                visit(points, adj, alpha, (cur, next), seen, reached);
            }
        }
    }

    let mut reached = vec![false; points.len()];
    reached[source] = true;
    let mut seen = HashSet::new();
    for &first in &adj[source] {
        if seen.insert((source, first)) {
            visit(points, adj, alpha, (source, first), &mut seen, &mut reached);
        }
    }
    reached
}

pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.parent[ra] = rb;
    }
}

/// One merge of the naive linkage: cluster names are the smallest member
/// row, `a < b`.
pub type NaiveMerge = (usize, usize, u32);

/// Complete linkage by recomputing every cluster-pair distance from the
/// member rows at each step. Rows are `0/1` vectors; zero rows are skipped.
/// Ties go to the smallest `(a, b)`.
pub fn naive_complete_linkage(
    rows: &[Vec<bool>],
    k: usize,
) -> Option<(Vec<NaiveMerge>, Vec<Option<usize>>)> {
    let mut distinct: Vec<&Vec<bool>> = Vec::new();
    for r in rows {
        if !distinct.contains(&r) {
            distinct.push(r);
        }
    }
    let members: Vec<usize> = (0..distinct.len())
        .filter(|&g| distinct[g].iter().any(|&b| b))
        .collect();
    if members.len() < k {
        return None;
    }
    let ham = |a: usize, b: usize| -> u32 {
        distinct[a]
            .iter()
            .zip(distinct[b])
            .filter(|(x, y)| x != y)
            .count() as u32
    };
    let mut clusters: Vec<Vec<usize>> = members.iter().map(|&g| vec![g]).collect();
    let mut trace = Vec::new();
    while clusters.len() > k {
        let mut best: Option<(u32, usize, usize)> = None;
        for x in 0..clusters.len() {
            for y in x + 1..clusters.len() {
                let d = clusters[x]
                    .iter()
                    .flat_map(|&a| clusters[y].iter().map(move |&b| (a, b)))
                    .map(|(a, b)| ham(a, b))
                    .max()
                    .unwrap();
                let key = (d, clusters[x][0], clusters[y][0]);
                if best.is_none_or(|b| key < (b.0, clusters[b.1][0], clusters[b.2][0])) {
                    best = Some((d, x, y));
                }
            }
        }
        let (d, x, y) = best.unwrap();
        trace.push((clusters[x][0], clusters[y][0], d));
        let moved = clusters.remove(y);
        clusters[x].extend(moved);
        clusters[x].sort_unstable();
    }
    let mut labels = vec![None; distinct.len()];
    for (c, cluster) in clusters.iter().enumerate() {
        for &g in cluster {
            labels[g] = Some(c);
        }
    }
    Some((trace, labels))
}

/// Accuracy by trying every injective map of predicted to true labels.
pub fn brute_force_accuracy(pred: &[usize], truth: &[usize]) -> f64 {
    let kp = pred.iter().max().map_or(0, |m| m + 1);
    let kt = truth.iter().max().map_or(0, |m| m + 1);
    let k = kp.max(kt);
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = 0;
    permute(&mut perm, 0, &mut |p| {
        let hits = pred.iter().zip(truth).filter(|&(&a, &b)| p[a] == b).count();
        best = best.max(hits);
    });
    best as f64 / pred.len() as f64
}

fn permute(v: &mut Vec<usize>, i: usize, f: &mut impl FnMut(&[usize])) {
    if i == v.len() {
        f(v);
        return;
    }
    for j in i..v.len() {
        v.swap(i, j);
        permute(v, i + 1, f);
        v.swap(i, j);
    }
}

pub fn random_points<R: Rng>(rng: &mut R, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
        .collect()
}

/// Random rotation (product of Givens rotations) followed by a shift.
pub fn rigid_motion<R: Rng>(rng: &mut R, points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let dim = points[0].len();
    let mut out = points.to_vec();
    for i in 0..dim {
        for j in i + 1..dim {
            let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let (s, c) = t.sin_cos();
            for p in &mut out {
                let (a, b) = (p[i], p[j]);
                p[i] = c * a - s * b;
                p[j] = s * a + c * b;
            }
        }
    }
    let shift: Vec<f64> = (0..dim).map(|_| rng.random_range(-5.0..5.0)).collect();
    for p in &mut out {
        for (x, s) in p.iter_mut().zip(&shift) {
            *x += s;
        }
    }
    out
}

/// Two straight 20-point segments in the plane crossing at right angles at
/// the origin, spacing 0.1. The first runs along x and has a point at the
/// origin; the second runs along y with its points offset by half a step.
/// Labels are 0 for the first segment and 1 for the second.
pub fn x_shape() -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut points = Vec::with_capacity(40);
    for j in 0..20 {
        points.push(vec![(j as f64 - 9.0) * 0.1, 0.0]);
    }
    for j in 0..20 {
        points.push(vec![0.0, (j as f64 - 9.5) * 0.1]);
    }
    let labels = (0..40).map(|i| i / 20).collect();
    (points, labels)
}
