//! Topologically regularized embeddings.
//!
//! This crate is `no_std` (it needs `alloc`). It contains the numerical
//! pipeline end to end:
//!
//! * [`geometry`]: planar Delaunay triangulation and alpha-filtration values
//!   together with their gradients with respect to point coordinates.
//! * [`persistence`]: boundary-matrix reduction over GF(2), persistence
//!   diagrams, Betti queries and representative cycles.
//! * [`topo`]: persistence-based loss functions with subsampling and
//!   centrality restriction, returning values and gradients.
//! * [`embeddings`]: linear projection, fuzzy neighbor graph, random-walk
//!   and inner-product graph embedding losses.
//! * [`optimizer`]: gradient descent on `L_emb + lambda * L_top`.
//! * [`trajectory`]: circular pseudotimes from the dominant cycle, plus
//!   evaluation metrics.
//!
//! IO, dataset generators and the command-line tool live in the `toporeg`
//! crate.
#![no_std]
// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod embeddings;
mod error;
pub mod geometry;
pub mod optimizer;
pub mod persistence;
pub mod rng;
pub mod topo;
pub mod trajectory;

pub use error::{Error, Result};
pub use geometry::{alpha_filtration, alpha_value_gradient, delaunay, Filtration, PointCloud, Simplex};

pub use persistence::{betti, compute_persistence, representative_cycle, Persistence, PersistenceDiagram, PersistencePair};
pub use rng::RngKey;
pub use topo::{centrality, spec_gradient, spec_value, term_gradient, term_value, Sampling, TopoLossSpec, TopoLossTerm, WeightedTerm};

pub use embeddings::{EmbeddingModel, Graph, LossGrad};
pub use optimizer::{run, run_linear_with_topo, LossTrace, Method, OptimizerConfig, RunOutput, TraceRow};
pub use trajectory::{circular_correlation, community_separation, infer_pseudotime, two_means, CycleProjection};
