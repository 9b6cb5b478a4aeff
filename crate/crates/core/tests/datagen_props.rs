use pbc::datagen::{make_benchmark, Benchmark, MixtureSpec, Shape, SurfaceSpec};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_class_is_present(bench in prop::sample::select(Benchmark::ALL.to_vec()), seed: u64, extra in 0usize..200) {
        let n = 50 * bench.k() + extra;
        let data = make_benchmark(bench, n, bench.default_noise(), seed).unwrap();
        prop_assert_eq!(data.points.len(), n);
        prop_assert_eq!(data.labels.len(), n);
        prop_assert_eq!(data.points.dim(), bench.dim());
        let mut seen = vec![false; bench.k()];
        for &l in &data.labels {
            prop_assert!(l < bench.k());
            seen[l] = true;
        }
        prop_assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn noiseless_points_sit_on_their_surface(bench in prop::sample::select(Benchmark::ALL.to_vec()), seed: u64) {
        let data = make_benchmark(bench, 600, 0.0, seed).unwrap();
        let surfaces = bench.surfaces();
        for (p, &l) in data.points.iter().zip(&data.labels) {
            let r = surfaces[l].residual(p);
            prop_assert!(r <= 1e-9, "{} class {}: residual {}", bench, l, r);
        }
    }
}

#[test]
fn same_seed_same_sample() {
    for bench in Benchmark::ALL {
        let a = make_benchmark(bench, 500, 0.01, 3).unwrap();
        let b = make_benchmark(bench, 500, 0.01, 3).unwrap();
        assert_eq!(a.points.coords(), b.points.coords());
        assert_eq!(a.labels, b.labels);
    }
}

#[test]
fn sphere_samples_are_centered() {
    // the mean of n uniform points on the unit sphere has expected squared
    // norm 1/n
    let n = 20_000;
    let sphere = SurfaceSpec::new(Shape::Sphere { radius: 1.0 }, 3).unwrap();
    let data =
        pbc::datagen::sample_mixture(&MixtureSpec::uniform(vec![sphere], n, 0.0, 17)).unwrap();
    let mut mean = [0.0; 3];
    for p in data.points.iter() {
        for (m, x) in mean.iter_mut().zip(p) {
            *m += x / n as f64;
        }
    }
    let norm = mean.iter().map(|m| m * m).sum::<f64>().sqrt();
    assert!(norm <= 5.0 / (n as f64).sqrt(), "mean norm {norm}");
}
