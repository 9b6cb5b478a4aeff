//! Path-based clustering of points sampled near intersecting manifolds.
//!
//! Points are joined in a symmetric q-nearest-neighbor graph. For a handful
//! of random landmarks, every point records whether it can reach the landmark
//! along a path whose interior angles all stay above a threshold `alpha`;
//! paths cannot bend sharply, so they rarely cross from one surface onto
//! another at an intersection. The binary reachability signatures are then
//! grouped and merged by complete linkage into `K` clusters.
//!
//! ```no_run
//! use std::sync::Arc;
//! use pbc::{datagen::{make_benchmark, Benchmark}, cluster::{pbc_pipeline, PbcParams}, eval::accuracy};
//!
//! let data = make_benchmark(Benchmark::TSI, 1500, 0.01, 7).unwrap();
//! let params = PbcParams::new(10, 2).with_alpha(140f64.to_radians()).with_landmarks(6);
//! let result = pbc_pipeline(Arc::new(data.points.clone()), &params).unwrap();
//! println!("accuracy {}", accuracy(&result.labels, &data.labels).unwrap());
//! ```

pub mod cluster;
pub mod datagen;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod graph;
pub mod kdtree;
pub mod pathfinder;

pub use cluster::{pbc_pipeline, ClusteringResult, PbcParams};
pub use dataset::{LabeledPointSet, PointSet};
pub use error::{Error, Result, Stage};
pub use graph::{build_knn_graph, NeighborGraph, Symmetrization};
