//! Spectral recovery of hidden communities in sparse random graphs.
//!
//! The crate covers the two-block and `k`-block stochastic block models and
//! the censor block model:
//!
//! - [`graph`]: graphs, samplers, random edge coloring and vertex splitting.
//! - [`spectral`]: degree trimming, subspace iteration, projections, angles.
//! - [`twoblock`]: spectral partition on one edge half, threshold correction
//!   on the other.
//! - [`multiblock`]: bipartite spectral step with random-column projection,
//!   density filtering, argmax correction and merging.
//! - [`censor`]: recovery from noisy edge parities.
//! - [`harness`]: the gamma-correctness metric, statistical verification
//!   suites, density heatmaps and the batch experiment runner.

pub mod censor;
pub mod error;
pub mod graph;
pub mod harness;
pub mod multiblock;
pub mod rng;
pub mod spectral;
pub mod twoblock;

pub use error::{Error, Result};
pub use graph::{Clustering, Graph};
