//! Permutation-matched clustering accuracy.

use serde::{Deserialize, Serialize};

use crate::dataset::dense_labels;
use crate::error::{Error, Result};

/// `counts[a][b]`: points with predicted label `a` and true label `b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<usize>>,
    pub n: usize,
}

impl ConfusionMatrix {
    pub fn predicted_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn true_classes(&self) -> usize {
        self.counts.first().map_or(0, Vec::len)
    }
}

/// Builds the confusion matrix. Labels are used as given, so gaps in the
/// label range produce empty rows or columns.
pub fn confusion(pred: &[usize], truth: &[usize]) -> Result<ConfusionMatrix> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch(pred.len(), truth.len()));
    }
    if pred.is_empty() {
        return Err(Error::InvalidArgument("no labels to compare".into()));
    }
    let kp = pred.iter().max().map_or(0, |m| m + 1);
    let kt = truth.iter().max().map_or(0, |m| m + 1);
    let mut counts = vec![vec![0; kt]; kp];
    for (&p, &t) in pred.iter().zip(truth) {
        counts[p][t] += 1;
    }
    Ok(ConfusionMatrix {
        counts,
        n: pred.len(),
    })
}

/// Largest number of points any injective relabeling gets right.
pub fn matched_count(cm: &ConfusionMatrix) -> usize {
    let size = cm.predicted_classes().max(cm.true_classes());
    if size == 0 {
        return 0;
    }
    let max = cm.counts.iter().flatten().copied().max().unwrap_or(0) as i64;
    // pad to square with zero gain; minimize max - gain
    let cost: Vec<Vec<i64>> = (0..size)
        .map(|a| {
            (0..size)
                .map(|b| {
                    max - cm
                        .counts
                        .get(a)
                        .and_then(|r| r.get(b))
                        .copied()
                        .unwrap_or(0) as i64
                })
                .collect()
        })
        .collect();
    let assignment = hungarian(&cost);
    assignment
        .iter()
        .enumerate()
        .map(|(a, &b)| {
            cm.counts
                .get(a)
                .and_then(|r| r.get(b))
                .copied()
                .unwrap_or(0)
        })
        .sum()
}

/// Fraction of points correctly labeled under the best matching of predicted
/// to true labels.
pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let (pred, kp) = dense_labels(pred);
    let (truth, kt) = dense_labels(truth);
    if kp > 64 || kt > 64 {
        return Err(Error::InvalidArgument(format!(
            "accuracy supports at most 64 labels per side (got {kp} and {kt})"
        )));
    }
    let cm = confusion(&pred, &truth)?;
    Ok(matched_count(&cm) as f64 / cm.n as f64)
}

/// Minimum-cost perfect assignment on a square matrix (Kuhn-Munkres with
/// potentials, `O(n^3)`). Returns the column assigned to each row.
pub fn hungarian(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    debug_assert!(cost.iter().all(|r| r.len() == n));

    let inf = i64::MAX / 4;
    // 1-based with a sentinel column 0
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of_row = vec![0; n];
    for j in 1..=n {
        col_of_row[row_of_col[j] - 1] = j - 1;
    }
    col_of_row
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confusion_examples() {
        let cm = confusion(&[0, 0, 1], &[0, 0, 1]).unwrap();
        assert_eq!(cm.counts, vec![vec![2, 0], vec![0, 1]]);
        let cm = confusion(&[1, 1, 0], &[0, 0, 1]).unwrap();
        assert_eq!(cm.counts, vec![vec![0, 1], vec![2, 0]]);
        assert!(confusion(&[], &[]).is_err());
        assert!(matches!(
            confusion(&[0], &[0, 1]),
            Err(Error::LengthMismatch(1, 2))
        ));
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[0, 1, 2, 1], &[0, 1, 2, 1]).unwrap(), 1.0);
        assert_eq!(accuracy(&[2, 0, 1, 0], &[0, 1, 2, 1]).unwrap(), 1.0);
        assert_eq!(accuracy(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap(), 0.5);
    }

    #[test]
    fn unequal_label_counts_are_padded() {
        // one predicted cluster: best is the majority class
        assert_eq!(accuracy(&[0, 0, 0, 0], &[0, 0, 0, 1]).unwrap(), 0.75);
        // extra predicted cluster contributes nothing
        assert_eq!(accuracy(&[0, 1, 2, 2], &[0, 0, 1, 1]).unwrap(), 0.75);
    }

    #[test]
    fn hungarian_small() {
        let cost = vec![vec![4, 1, 3], vec![2, 0, 5], vec![3, 2, 2]];
        let a = hungarian(&cost);
        let total: i64 = a.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        assert_eq!(total, 5);
    }
}
