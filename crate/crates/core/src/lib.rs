//! Iterative spanning forest (ISF) superpixel and supervoxel segmentation.
//!
//! Each ISF pass grows a spanning forest from a seed set by ordered queue
//! extraction over a 4-neighbour (2D) or 6-neighbour (3D) lattice; between
//! passes the seeds move towards the color or geometric medoid of their
//! trees. Every tree is connected by construction, so no post-processing is
//! needed to obtain connected superpixels.
//!
//! ```
//! use isf_core::{isf_run, IsfConfig, Lattice, Method};
//!
//! let colors = (0..32 * 32)
//!     .map(|i| if i % 32 < 16 { [20.0, 0.0, 0.0] } else { [80.0, 10.0, -5.0] })
//!     .collect();
//! let image = Lattice::from_lab_2d(32, 32, colors).unwrap();
//! let out = isf_run(&image, &IsfConfig::new(Method::MixMean, 16)).unwrap();
//! assert!(out.superpixels() <= 16);
//! ```
//!
//! Colors, costs and statistics are generic over [`Scalar`] (`f32` or
//! `f64`, defaulting to `f64`); the `*32`/`*64` aliases below name the
//! concrete instantiations.

pub mod color;
pub mod connectivity;
pub mod error;
pub mod forest;
pub mod gradient;
pub mod io;
pub mod isf;
pub mod lattice;
pub mod metrics;
pub mod queue;
pub mod scalar;
pub mod seeding;

pub use color::{rgb_to_lab, to_grayscale_lab};
pub use connectivity::{reference_colors, trivial_cost, CostVariant, PathCostSpec, DEFAULT_ALPHA, DEFAULT_BETA};
pub use error::{IsfError, Result};
pub use forest::{
    functional, ift_pass, ift_pass_with, label_components, verify_forest, ForestReport, ForestState, NodeState,
    QueueKind,
};
pub use gradient::{closest_minimum, gradient_map, regional_minima, GradientMap, MinimaSet, DEFAULT_LEVELS};
pub use isf::{isf_run, isf_run_observed, IsfConfig, IsfDiagnostics, IsfOutput, Method, PassView, DEFAULT_MAX_ITERS};
pub use lattice::{Adjacency, AdjacencyKind, Coord, Lattice};
pub use metrics::{
    boundary_recall, dice, evaluate, majority_object_labels, mean_compactness, object_dice, undersegmentation_error,
    LabelMap, MetricResult,
};
pub use scalar::Scalar;
pub use seeding::{
    grid_sample, mixed_sample, nse, quad_tree_stats, recompute_seeds, recompute_seeds_with_stats, regmin_seeds,
    QuadTreeStats, RecomputePolicy, SeedSet, SeedUpdateStats,
};

pub type Lattice32 = Lattice<f32>;
pub type Lattice64 = Lattice<f64>;
pub type SeedSet32 = SeedSet<f32>;
pub type SeedSet64 = SeedSet<f64>;
pub type PathCostSpec32 = PathCostSpec<f32>;
pub type PathCostSpec64 = PathCostSpec<f64>;
pub type ForestState32 = ForestState<f32>;
pub type ForestState64 = ForestState<f64>;
pub type IsfOutput32 = IsfOutput<f32>;
pub type IsfOutput64 = IsfOutput<f64>;
