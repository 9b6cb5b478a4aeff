//! Grid search over (q, alpha, M) for one benchmark, averaged over seeds.
//!
//! cargo run --release -p pbc-core --example tune -- TSI 1500 "8,10,12" "130,140,150" "6,10" 10

use std::sync::Arc;

use pbc::cluster::{cluster_graph, PbcParams};
use pbc::datagen::{make_benchmark, Benchmark};
use pbc::eval::accuracy;
use pbc::graph::{build_knn_graph, AngleCache, Symmetrization};
use pbc::pathfinder::Reachability;

fn list<T: std::str::FromStr>(s: &str) -> Vec<T>
where
    T::Err: std::fmt::Debug,
{
    s.split(',').map(|x| x.trim().parse().unwrap()).collect()
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let bench: Benchmark = args[1].parse().unwrap();
    let n: usize = args[2].parse().unwrap();
    let qs: Vec<usize> = list(&args[3]);
    let alphas: Vec<f64> = list(&args[4]);
    let ms: Vec<usize> = list(&args[5]);
    let seeds: u64 = args[6].parse().unwrap();
    let noise = args
        .get(7)
        .map_or(bench.default_noise(), |s| s.parse().unwrap());

    let mode: Symmetrization =
        std::env::var("PBC_MODE").map_or(Symmetrization::Union, |m| m.parse().unwrap());
    let data: Vec<_> = (0..seeds)
        .map(|s| make_benchmark(bench, n, noise, s).unwrap())
        .collect();
    for &q in &qs {
        let graphs: Vec<_> = data
            .iter()
            .map(|d| build_knn_graph(Arc::new(d.points.clone()), q, mode).unwrap())
            .collect();
        let caches: Vec<_> = graphs.iter().map(AngleCache::new).collect();
        for &a in &alphas {
            for &m in &ms {
                let mut accs = Vec::new();
                let mut zeros = 0;
                let mut fs = 0;
                for (s, d) in data.iter().enumerate() {
                    let params = PbcParams::new(q, bench.k())
                        .with_alpha(a.to_radians())
                        .with_landmarks(m)
                        .with_seed(s as u64)
                        .with_mode(mode);
                    let reach = Reachability::with_cache(&graphs[s], &caches[s]);
                    match cluster_graph(reach, &params) {
                        Ok(r) => {
                            accs.push(accuracy(&r.labels, &d.labels).unwrap());
                            zeros += r.zero_signature_count;
                            fs += r.f;
                        }
                        Err(_) => accs.push(0.0),
                    }
                }
                let mean = accs.iter().sum::<f64>() / accs.len() as f64;
                let min = accs.iter().cloned().fold(1.0, f64::min);
                println!(
                    "{bench} q={q:3} alpha={a:5.1} M={m:3}  mean={mean:.4} min={min:.4} F~{} zeros~{}",
                    fs / accs.len(),
                    zeros / accs.len()
                );
            }
        }
    }
}
