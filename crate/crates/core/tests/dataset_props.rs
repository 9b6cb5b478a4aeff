use pbc::dataset::{
    load_label_column, load_labeled, load_points, save_labeled, save_labels, save_points, Pca,
};
use pbc::{LabeledPointSet, PointSet};
use proptest::prelude::*;

fn cloud() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (5usize..60, 2usize..6).prop_flat_map(|(n, d)| {
        prop::collection::vec(prop::collection::vec(-100.0..100.0f64, d), n)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn labeled_csv_round_trip(rows in cloud(), raw in prop::collection::vec(0usize..4, 60)) {
        let n = rows.len();
        // dense in order of first appearance, as the loader re-encodes them
        let (labels, k) = pbc::dataset::dense_labels(&raw[..n]);
        let data = LabeledPointSet::new(PointSet::from_rows(&rows).unwrap(), labels, k).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        save_labeled(&path, &data).unwrap();
        let back = load_labeled(&path).unwrap();
        prop_assert_eq!(&back.labels, &data.labels);
        prop_assert_eq!(back.points.coords(), data.points.coords());

        let lpath = dir.path().join("labels.csv");
        save_labels(&lpath, &data.labels).unwrap();
        let col: Vec<usize> = load_label_column(&lpath).unwrap().into_iter().map(|l| l as usize).collect();
        prop_assert_eq!(col, data.labels);

        let ppath = dir.path().join("points.csv");
        save_points(&ppath, &data.points).unwrap();
        let reread = load_points(&ppath).unwrap();
        prop_assert_eq!(reread.coords(), data.points.coords());
    }

    #[test]
    fn components_are_orthonormal(rows in cloud()) {
        let points = PointSet::from_rows(&rows).unwrap();
        let d = points.dim().min(points.len() - 1);
        let pca = Pca::fit(&points, d).unwrap();
        for (a, u) in pca.components.iter().enumerate() {
            for (b, v) in pca.components.iter().enumerate() {
                let dot: f64 = u.iter().zip(v).map(|(x, y)| x * y).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                prop_assert!((dot - want).abs() < 1e-9, "gram[{}][{}] = {}", a, b, dot);
            }
        }
    }

    #[test]
    fn projection_ignores_translation(rows in cloud(), shift in prop::collection::vec(-50.0..50.0f64, 6)) {
        let points = PointSet::from_rows(&rows).unwrap();
        let moved: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().zip(&shift).map(|(x, s)| x + s).collect()).collect();
        let moved = PointSet::from_rows(&moved).unwrap();
        let d = 2.min(points.dim());
        let pa = Pca::fit(&points, d).unwrap();
        let pb = Pca::fit(&moved, d).unwrap();
        // skip draws whose eigenvalues nearly coincide or whose orientation
        // entry is nearly tied; there the basis is not well defined
        let full = Pca::fit(&points, points.dim().min(points.len() - 1)).unwrap();
        let gaps = full.variances.windows(2).all(|w| w[0] - w[1] > 1e-3 * w[0]);
        let oriented = pa.components.iter().all(|c| {
            let mut mags: Vec<f64> = c.iter().map(|x| x.abs()).collect();
            mags.sort_by(|a, b| b.total_cmp(a));
            mags[0] - mags[1] > 1e-6
        });
        prop_assume!(gaps && oriented);
        let a = pa.transform(&points).unwrap();
        let b = pb.transform(&moved).unwrap();
        for (x, y) in a.coords().iter().zip(b.coords()) {
            prop_assert!((x - y).abs() < 1e-9 * (1.0 + x.abs()), "{} vs {}", x, y);
        }
    }

    #[test]
    fn captured_variance_grows_with_d(rows in cloud()) {
        let points = PointSet::from_rows(&rows).unwrap();
        let mut last = 0.0;
        for d in 1..=points.dim() {
            let proj = pbc::dataset::pca_project(&points, d).unwrap();
            let n = proj.len() as f64;
            let total: f64 = (0..d)
                .map(|c| {
                    let mean = proj.iter().map(|p| p[c]).sum::<f64>() / n;
                    proj.iter().map(|p| (p[c] - mean).powi(2)).sum::<f64>() / n
                })
                .sum();
            prop_assert!(total + 1e-9 * (1.0 + last) >= last);
            last = total;
        }
    }
}
