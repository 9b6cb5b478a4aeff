//! Point-cloud containers, CSV ingestion and PCA preprocessing.
//!
//! CSV is the only input format: comma separated, one point per row, with an
//! optional header (a first row in which no field parses as a number) and an
//! optional trailing column of nonnegative integer labels.

use std::cmp::Ordering;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// `N` points in `R^D`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    coords: Vec<f64>,
    dim: usize,
}

impl PointSet {
    /// Builds a point set from row-major coordinates.
    pub fn new(coords: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidPoints("dimension must be at least 1".into()));
        }
        if coords.is_empty() {
            return Err(Error::InvalidPoints(
                "at least one point is required".into(),
            ));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidPoints(format!(
                "{} coordinates do not divide into rows of {}",
                coords.len(),
                dim
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidPoints(format!(
                "point {} coordinate {} is not finite",
                pos / dim,
                pos % dim
            )));
        }
        Ok(Self { coords, dim })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.as_ref().len());
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::InvalidPoints(format!(
                    "row {i} has {} coordinates, expected {dim}",
                    row.len()
                )));
            }
            coords.extend_from_slice(row);
        }
        Self::new(coords, dim)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false; a point set holds at least one point.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Applies `f` to every point, producing a set of dimension `dim`.
    pub fn map_points<F>(&self, dim: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64], &mut [f64]),
    {
        let mut coords = vec![0.0; self.len() * dim];
        for (src, dst) in self.iter().zip(coords.chunks_exact_mut(dim)) {
            f(src, dst);
        }
        Self::new(coords, dim)
    }
}

/// Squared Euclidean distance, summed in coordinate order.
#[inline]
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

/// A point set with a ground-truth partition into `k` classes.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPointSet {
    pub points: PointSet,
    pub labels: Vec<usize>,
    pub k: usize,
}

impl LabeledPointSet {
    /// Validates that labels cover exactly `0..k`.
    pub fn new(points: PointSet, labels: Vec<usize>, k: usize) -> Result<Self> {
        if labels.len() != points.len() {
            return Err(Error::LengthMismatch(labels.len(), points.len()));
        }
        let mut seen = vec![false; k];
        for &l in &labels {
            if l >= k {
                return Err(Error::InvalidArgument(format!("label {l} outside 0..{k}")));
            }
            seen[l] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidArgument(format!(
                "label {missing} never used"
            )));
        }
        Ok(Self { points, labels, k })
    }

    /// Checks label range but allows empty classes.
    pub(crate) fn from_parts(points: PointSet, labels: Vec<usize>, k: usize) -> Self {
        debug_assert_eq!(labels.len(), points.len());
        debug_assert!(labels.iter().all(|&l| l < k));
        Self { points, labels, k }
    }

    /// Indices of the points carrying label `k`.
    pub fn class_indices(&self, k: usize) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&i| self.labels[i] == k)
            .collect()
    }
}

/// Re-encodes arbitrary labels to `0..K` in order of first appearance.
pub fn dense_labels<T: Eq + std::hash::Hash + Copy>(raw: &[T]) -> (Vec<usize>, usize) {
    let mut map = std::collections::HashMap::new();
    let labels = raw
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect();
    (labels, map.len())
}

#[derive(Debug)]
struct CsvTable {
    rows: Vec<Vec<f64>>,
    labels: Vec<u64>,
}

fn read_table(path: &Path, has_label_column: bool) -> Result<CsvTable> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_table(file, path, has_label_column)
}

fn csv_error(path: &Path, err: csv::Error) -> Error {
    match err.into_kind() {
        csv::ErrorKind::Io(e) => Error::io(path, e),
        other => Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{other:?}")),
        ),
    }
}

fn parse_table<R: std::io::Read>(
    reader: R,
    path: &Path,
    has_label_column: bool,
) -> Result<CsvTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut width = None;
    let mut first = true;
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let row = record
            .position()
            .map_or(rows.len() + 1, |p| p.line() as usize);
        if first {
            first = false;
            if record.iter().all(|f| f.parse::<f64>().is_err()) {
                continue;
            }
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::RaggedRow {
                row,
                expected,
                found: record.len(),
            });
        }
        let numeric = if has_label_column {
            if record.len() < 2 {
                return Err(Error::InvalidPoints(
                    "a labeled file needs at least one coordinate column".into(),
                ));
            }
            record.len() - 1
        } else {
            record.len()
        };
        let mut coords = Vec::with_capacity(numeric);
        for (c, field) in record.iter().take(numeric).enumerate() {
            match field.parse::<f64>() {
                Ok(v) if v.is_finite() => coords.push(v),
                _ => {
                    return Err(Error::Parse {
                        row,
                        column: c + 1,
                        value: field.to_string(),
                    })
                }
            }
        }
        if has_label_column {
            let field = &record[numeric];
            let label = field.parse::<u64>().map_err(|_| Error::Parse {
                row,
                column: numeric + 1,
                value: field.to_string(),
            })?;
            labels.push(label);
        }
        rows.push(coords);
    }
    if rows.is_empty() {
        return Err(Error::EmptyFile {
            path: path.to_path_buf(),
        });
    }
    Ok(CsvTable { rows, labels })
}

/// Loads an unlabeled point set; every column is a coordinate.
pub fn load_points(path: impl AsRef<Path>) -> Result<PointSet> {
    let table = read_table(path.as_ref(), false)?;
    PointSet::from_rows(&table.rows)
}

/// Loads a point set whose last column holds integer labels. Labels are
/// re-encoded densely in order of first appearance.
pub fn load_labeled(path: impl AsRef<Path>) -> Result<LabeledPointSet> {
    let table = read_table(path.as_ref(), true)?;
    let points = PointSet::from_rows(&table.rows)?;
    let (labels, k) = dense_labels(&table.labels);
    LabeledPointSet::new(points, labels, k)
}

/// Reads only the trailing label column of a CSV file, without re-encoding.
/// Works for both `index,label` files and labeled point files.
pub fn load_label_column(path: impl AsRef<Path>) -> Result<Vec<u64>> {
    Ok(read_table(path.as_ref(), true)?.labels)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Writes one `index,label` line per point.
pub fn save_labels(path: impl AsRef<Path>, labels: &[usize]) -> Result<()> {
    let path = path.as_ref();
    if labels.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot save an empty labeling".into(),
        ));
    }
    let mut out = create(path)?;
    let io = |e| Error::io(path, e);
    for (i, l) in labels.iter().enumerate() {
        writeln!(out, "{i},{l}").map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Writes coordinates with a trailing label column.
pub fn save_labeled(path: impl AsRef<Path>, data: &LabeledPointSet) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    let io = |e| Error::io(path, e);
    for (p, l) in data.points.iter().zip(&data.labels) {
        for c in p {
            write!(out, "{c},").map_err(io)?;
        }
        writeln!(out, "{l}").map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn save_points(path: impl AsRef<Path>, points: &PointSet) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    let io = |e| Error::io(path, e);
    for p in points.iter() {
        let row: Vec<String> = p.iter().map(|c| c.to_string()).collect();
        writeln!(out, "{}", row.join(",")).map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Principal directions of a point set, in order of decreasing variance.
#[derive(Debug, Clone)]
pub struct Pca {
    pub mean: Vec<f64>,
    /// Unit component vectors, each of length `D`.
    pub components: Vec<Vec<f64>>,
    /// Population variance along each component.
    pub variances: Vec<f64>,
}

impl Pca {
    /// Fits the top `d` components of the population covariance.
    ///
    /// Each component is oriented so that its largest-magnitude entry is
    /// positive (ties go to the lowest coordinate index). Within a repeated
    /// eigenvalue the basis is whatever the solver returns, ordered by the
    /// oriented vectors; projections there are basis dependent but still
    /// distance preserving.
    pub fn fit(points: &PointSet, d: usize) -> Result<Self> {
        let n = points.len();
        let dim = points.dim();
        if d == 0 || d > dim {
            return Err(Error::InvalidArgument(format!(
                "target dimension {d} outside 1..={dim}"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidArgument(
                "PCA needs at least two points".into(),
            ));
        }

        let mut mean = vec![0.0; dim];
        for p in points.iter() {
            for (m, x) in mean.iter_mut().zip(p) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);

        let mut cov = DMatrix::<f64>::zeros(dim, dim);
        let mut centered = vec![0.0; dim];
        for p in points.iter() {
            for (c, (x, m)) in centered.iter_mut().zip(p.iter().zip(&mean)) {
                *c = x - m;
            }
            for r in 0..dim {
                for c in r..dim {
                    cov[(r, c)] += centered[r] * centered[c];
                }
            }
        }
        for r in 0..dim {
            for c in r..dim {
                let v = cov[(r, c)] / n as f64;
                cov[(r, c)] = v;
                cov[(c, r)] = v;
            }
        }

        let eig = SymmetricEigen::new(cov);
        let mut pairs: Vec<(f64, Vec<f64>)> = (0..dim)
            .map(|j| {
                let mut v: Vec<f64> = eig.eigenvectors.column(j).iter().copied().collect();
                orient(&mut v);
                (eig.eigenvalues[j].max(0.0), v)
            })
            .collect();
        pairs.sort_by(|a, b| {
            b.0.total_cmp(&a.0).then_with(|| {
                b.1.iter()
                    .zip(&a.1)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| *o != Ordering::Equal)
                    .unwrap_or(Ordering::Equal)
            })
        });
        pairs.truncate(d);
        let (variances, components) = pairs.into_iter().unzip();
        Ok(Self {
            mean,
            components,
            variances,
        })
    }

    pub fn transform(&self, points: &PointSet) -> Result<PointSet> {
        let d = self.components.len();
        points.map_points(d, |p, out| {
            for (o, comp) in out.iter_mut().zip(&self.components) {
                *o = p
                    .iter()
                    .zip(&self.mean)
                    .zip(comp)
                    .map(|((x, m), c)| (x - m) * c)
                    .sum();
            }
        })
    }
}

fn orient(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Centers the data and projects it onto its top `d` principal components.
pub fn pca_project(points: &PointSet, d: usize) -> Result<PointSet> {
    Pca::fit(points, d)?.transform(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse(text: &str, labeled: bool) -> Result<CsvTable> {
        parse_table(
            Cursor::new(text.as_bytes().to_vec()),
            Path::new("mem"),
            labeled,
        )
    }

    #[test]
    fn plain_rows_parse() {
        let t = parse("0,0\n1,0\n0,1\n", false).unwrap();
        let ps = PointSet::from_rows(&t.rows).unwrap();
        assert_eq!((ps.len(), ps.dim()), (3, 2));
        assert_eq!(ps.point(2), &[0.0, 1.0]);
    }

    #[test]
    fn label_column_is_densely_reencoded() {
        let t = parse("0,0,5\n1,0,5\n0,1,7\n", true).unwrap();
        let (labels, k) = dense_labels(&t.labels);
        assert_eq!(labels, vec![0, 0, 1]);
        assert_eq!(k, 2);
        assert_eq!(t.rows[0].len(), 2);
    }

    #[test]
    fn header_row_is_skipped() {
        let t = parse("x,y\n0,0\n1,1\n", false).unwrap();
        assert_eq!(t.rows.len(), 2);
    }

    #[test]
    fn bad_field_names_row_and_column() {
        match parse("1,abc\n", false) {
            Err(Error::Parse { row, column, value }) => {
                assert_eq!((row, column), (1, 2));
                assert_eq!(value, "abc");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_and_nonfinite_and_empty() {
        assert!(matches!(
            parse("0,0\n1\n", false),
            Err(Error::RaggedRow {
                row: 2,
                expected: 2,
                found: 1
            })
        ));
        assert!(matches!(
            parse("0,0\n1,inf\n", false),
            Err(Error::Parse {
                row: 2,
                column: 2,
                ..
            })
        ));
        assert!(matches!(parse("", false), Err(Error::EmptyFile { .. })));
        assert!(matches!(
            parse("0,0,-1\n", true),
            Err(Error::Parse {
                row: 1,
                column: 3,
                ..
            })
        ));
    }

    #[test]
    fn point_set_rejects_nan() {
        assert!(PointSet::new(vec![0.0, f64::NAN], 2).is_err());
        assert!(PointSet::new(vec![], 2).is_err());
    }

    #[test]
    fn save_labels_format() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("labels.csv");
        save_labels(&path, &[0, 1, 0]).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "0,0\n1,1\n2,0\n");
        assert!(save_labels(&path, &[]).is_err());
    }

    #[test]
    fn save_labels_to_missing_directory_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("no/such/dir/labels.csv");
        assert!(matches!(save_labels(&path, &[0]), Err(Error::Io { .. })));
    }

    #[test]
    fn pca_diagonal_direction() {
        let s = 3.0;
        let ps = PointSet::from_rows(&[
            [-s, -s],
            [1.0 * s, 1.0 * s],
            [-2.0 * s, -2.0 * s],
            [2.0 * s, 2.0 * s],
        ])
        .unwrap();
        let pca = Pca::fit(&ps, 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((pca.components[0][0] - h).abs() < 1e-12);
        assert!((pca.components[0][1] - h).abs() < 1e-12);
        // covariance along the diagonal: mean of 2*s^2*{1,1,4,4} = 5 s^2
        assert!((pca.variances[0] - 5.0 * s * s).abs() < 1e-9);
    }

    #[test]
    fn pca_dimension_checks() {
        let ps = PointSet::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(pca_project(&ps, 0).is_err());
        assert!(pca_project(&ps, 3).is_err());
        let single = PointSet::from_rows(&[[0.0, 1.0]]).unwrap();
        assert!(pca_project(&single, 1).is_err());
    }

    #[test]
    fn pca_rank_deficient_is_fine() {
        let ps = PointSet::from_rows(&[[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [2.0, 0.0, 1.0]]).unwrap();
        let out = pca_project(&ps, 3).unwrap();
        assert_eq!(out.dim(), 3);
        for p in out.iter() {
            assert!(p[1].abs() < 1e-12 && p[2].abs() < 1e-12);
        }
    }
}
