//! File formats, dataset generators, run configurations and the `toporeg`
//! command-line tool around the numerical core in `toporeg_core`.
//!
//! * [`io`]: CSV and edge-list readers and writers with exact float round
//!   trips.
//! * [`generate`] and [`karate`]: synthetic datasets and the bundled Karate
//!   club network.
//! * [`config`]: the JSON run configuration and loss specification.
//! * [`experiment`]: builds models from a configuration and runs the
//!   ordinary, topology-only and regularized variants.
//! * [`plot`]: standalone SVG figures.
//! * [`cli`]: argument parsing and command dispatch.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod generate;
pub mod io;
pub mod karate;
pub mod plot;

pub use error::{Error, Result};
