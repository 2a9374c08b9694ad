//! Turning a [`RunConfig`] into data, a model and optimization runs.

use std::path::Path;

use nalgebra::DMatrix;
use toporeg_core::embeddings::{
    EmbeddingModel, InnerProductGraphModel, LinearProjectionModel, LossGrad, NeighborConfig, NeighborEmbeddingModel, PointModel, RandomWalkConfig,
    RandomWalkGraphModel,
};
use toporeg_core::geometry::Point;
use toporeg_core::optimizer::{epoch_key, run_with_clock, snapshot};
use toporeg_core::{Graph, OptimizerConfig, RngKey, RunOutput, TopoLossSpec};

use crate::config::{BackendJson, DataSource, RunConfig};
use crate::generate::{generate_bifurcation, generate_circle, generate_clusters};
use crate::io::{default_ids, feature_names, read_edge_list, read_matrix, read_points, DataMatrix};
use crate::karate::load_karate;
use crate::{Error, Result};

/// Input data of a run, with optional ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub ids: Vec<String>,
    pub input: Input,
    pub labels: Option<Vec<usize>>,
    /// True circle angles of generated circle data.
    pub angles: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Matrix(DataMatrix),
    Points(Vec<Point>),
    Graph(Graph),
}

/// Loads or generates the data of `source`. Generators draw from `seed`.
pub fn load_data(source: &DataSource, seed: u64) -> Result<Dataset> {
    let matrix = |data: DMatrix<f64>| Input::Matrix(DataMatrix { features: feature_names(data.ncols()), data });
    Ok(match source {
        DataSource::Circle { n, ambient_dim, noise_half_width } => {
            let c = generate_circle(*n, *ambient_dim, *noise_half_width, seed)?;
            Dataset { ids: default_ids(*n), input: matrix(c.data), labels: None, angles: Some(c.angles) }
        }
        DataSource::Clusters { centers, points_per_cluster, spread } => {
            let c = generate_clusters(centers, *points_per_cluster, *spread, seed)?;
            Dataset { ids: default_ids(c.points.len()), input: Input::Points(c.points), labels: Some(c.labels), angles: None }
        }
        DataSource::Bifurcation { arm_length_points, ambient_dim, noise_half_width } => {
            let b = generate_bifurcation(*arm_length_points, *ambient_dim, *noise_half_width, seed)?;
            Dataset { ids: default_ids(b.data.nrows()), input: matrix(b.data), labels: Some(b.labels), angles: None }
        }
        DataSource::Karate {} => {
            let k = load_karate()?;
            Dataset { ids: k.names, input: Input::Graph(k.graph), labels: Some(k.labels), angles: None }
        }
        DataSource::Matrix { path } => {
            let m = read_matrix(path)?;
            Dataset { ids: default_ids(m.data.nrows()), input: Input::Matrix(m), labels: None, angles: None }
        }
        DataSource::Points { path } => {
            let p = read_points(path)?;
            Dataset { ids: p.ids, input: Input::Points(p.points), labels: None, angles: None }
        }
        DataSource::Edges { path } => {
            let g = read_edge_list(path)?;
            Dataset { ids: g.names, input: Input::Graph(g.graph), labels: None, angles: None }
        }
    })
}

/// Any of the embedding backends behind one type.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyModel {
    Points(PointModel),
    Linear(LinearProjectionModel),
    Neighbor(NeighborEmbeddingModel),
    RandomWalk(RandomWalkGraphModel),
    InnerProduct(InnerProductGraphModel),
}

macro_rules! delegate {
    ($self:expr, $m:ident => $body:expr) => {
        match $self {
            AnyModel::Points($m) => $body,
            AnyModel::Linear($m) => $body,
            AnyModel::Neighbor($m) => $body,
            AnyModel::RandomWalk($m) => $body,
            AnyModel::InnerProduct($m) => $body,
        }
    };
}

impl EmbeddingModel for AnyModel {
    fn parameters(&self) -> &[f64] {
        delegate!(self, m => m.parameters())
    }

    fn parameters_mut(&mut self) -> &mut [f64] {
        delegate!(self, m => m.parameters_mut())
    }

    fn embedding(&self) -> Vec<Point> {
        delegate!(self, m => m.embedding())
    }

    fn embedding_loss(&self, key: RngKey) -> toporeg_core::Result<LossGrad> {
        delegate!(self, m => m.embedding_loss(key))
    }

    fn batches(&self) -> usize {
        delegate!(self, m => m.batches())
    }

    fn batch_loss(&self, key: RngKey, batch: usize) -> toporeg_core::Result<LossGrad> {
        delegate!(self, m => m.batch_loss(key, batch))
    }

    fn penalty(&self) -> toporeg_core::Result<Option<LossGrad>> {
        delegate!(self, m => m.penalty())
    }

    fn pullback(&self, grad: &[[f64; 2]]) -> Vec<f64> {
        delegate!(self, m => m.pullback(grad))
    }
}

/// Key of the random initial coordinates of graph backends.
pub fn init_key(seed: u64) -> RngKey {
    RngKey::new(seed).derive(u64::MAX)
}

/// Column-centered copy of `data`.
pub fn centered(data: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = data.clone();
    for mut col in out.column_iter_mut() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
    }
    out
}

/// The initial model of `backend` on `data`.
pub fn build_model(backend: &BackendJson, data: &Dataset, seed: u64) -> Result<AnyModel> {
    let mismatch = || Error::Config(format!("backend `{}` cannot consume this data", backend.name()));
    Ok(match (backend, &data.input) {
        (BackendJson::Points {}, Input::Points(p)) => AnyModel::Points(PointModel::new(p)),
        (BackendJson::Linear { ortho_weight, ortho_norm, center }, Input::Matrix(m)) => {
            let x = if *center { centered(&m.data) } else { m.data.clone() };
            AnyModel::Linear(LinearProjectionModel::from_pca(x)?.with_ortho(*ortho_weight, (*ortho_norm).into()))
        }
        (BackendJson::Neighbor { k, min_dist, negatives }, Input::Matrix(m)) => {
            let config = NeighborConfig { k: *k, min_dist: *min_dist, negatives: *negatives };
            AnyModel::Neighbor(NeighborEmbeddingModel::new(&m.data, config)?)
        }
        (BackendJson::RandomWalk { walk_length, walks_per_node, window, negatives, batch_walks }, Input::Graph(g)) => {
            let config = RandomWalkConfig {
                walk_length: *walk_length,
                walks_per_node: *walks_per_node,
                window: *window,
                negatives: *negatives,
                batch_walks: batch_walks.unwrap_or(usize::MAX),
            };
            AnyModel::RandomWalk(RandomWalkGraphModel::new(g.clone(), config, init_key(seed)))
        }
        (BackendJson::InnerProduct {}, Input::Graph(g)) => AnyModel::InnerProduct(InnerProductGraphModel::new(g.clone(), init_key(seed))),
        _ => return Err(mismatch()),
    })
}

/// A finished optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub model: AnyModel,
    pub output: RunOutput,
}

impl Outcome {
    /// Embedding loss of the final state, without constraint penalties, on
    /// the random stream of the final trace row.
    pub fn embedding_loss(&self, config: &OptimizerConfig) -> Result<f64> {
        if let AnyModel::Points(_) = self.model {
            return Ok(0.0);
        }
        let epoch = self.output.trace.last().map_or(config.epochs, |r| r.epoch);
        Ok(self.model.embedding_loss(epoch_key(config.seed, epoch).derive(0))?.value)
    }

    pub fn topo_loss(&self) -> f64 {
        self.output.trace.last().map_or(0.0, |r| r.topo_loss)
    }
}

/// Optimizes `model` in place and keeps the result.
pub fn optimize(mut model: AnyModel, spec: Option<&TopoLossSpec>, config: &OptimizerConfig, clock: &mut dyn FnMut() -> f64) -> Result<Outcome> {
    let output = run_with_clock(&mut model, spec, config, clock)?;
    Ok(Outcome { model, output })
}

/// The three runs compared in a loss report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Embedding loss only. The topological loss is still recorded.
    Ordinary,
    /// Topological loss only, starting from the ordinary result.
    TopoOnly,
    /// Embedding plus weighted topological loss, from the initial model.
    Regularized,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Ordinary, Variant::TopoOnly, Variant::Regularized];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Ordinary => "ordinary",
            Variant::TopoOnly => "topo_only",
            Variant::Regularized => "regularized",
        }
    }
}

/// Optimizer settings of `variant` derived from the configured ones.
pub fn variant_config(base: &OptimizerConfig, variant: Variant) -> OptimizerConfig {
    match variant {
        Variant::Ordinary => OptimizerConfig { lambda_top: 0.0, topo_only: false, ..*base },
        Variant::TopoOnly => OptimizerConfig { topo_only: true, ..*base },
        Variant::Regularized => OptimizerConfig { topo_only: false, ..*base },
    }
}

/// Whether the initial model of `backend` already minimizes its embedding
/// loss. The linear backend starts at the PCA loadings.
pub fn starts_at_optimum(backend: &BackendJson) -> bool {
    matches!(backend, BackendJson::Linear { .. })
}

/// Runs all three variants of a configuration that has a topological loss
/// with positive weight. The ordinary embedding of a backend that
/// [starts at its optimum](starts_at_optimum) is the initial model itself.
pub fn run_variants(config: &RunConfig, data: &Dataset) -> Result<Vec<(Variant, OptimizerConfig, Outcome)>> {
    let spec = config.spec()?.ok_or_else(|| Error::Config(format!("{}: a report needs topo_spec", config.experiment)))?;
    let base = config.optimizer.to_config(config.seed);
    if !(base.lambda_top > 0.0) {
        return Err(Error::Config(format!("{}: a report needs lambda_top > 0", config.experiment)));
    }
    let initial = build_model(&config.backend, data, config.seed)?;
    let mut clock = || 0.0;
    let ordinary_config = variant_config(&base, Variant::Ordinary);
    let ordinary = if starts_at_optimum(&config.backend) {
        let output = snapshot(&initial, Some(&spec), &ordinary_config)?;
        Outcome { model: initial.clone(), output }
    } else {
        optimize(initial.clone(), Some(&spec), &ordinary_config, &mut clock)?
    };
    let topo_config = variant_config(&base, Variant::TopoOnly);
    let topo = optimize(ordinary.model.clone(), Some(&spec), &topo_config, &mut clock)?;
    let reg_config = variant_config(&base, Variant::Regularized);
    let reg = optimize(initial, Some(&spec), &reg_config, &mut clock)?;
    Ok(vec![(Variant::Ordinary, ordinary_config, ordinary), (Variant::TopoOnly, topo_config, topo), (Variant::Regularized, reg_config, reg)])
}

/// One line of a loss report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub experiment: String,
    pub variant: Variant,
    pub emb_loss: f64,
    pub topo_loss: f64,
}

pub fn report_rows(config: &RunConfig) -> Result<Vec<ReportRow>> {
    let data = load_data(&config.data, config.seed)?;
    run_variants(config, &data)?
        .into_iter()
        .map(|(variant, opt, outcome)| {
            Ok(ReportRow { experiment: config.experiment.clone(), variant, emb_loss: outcome.embedding_loss(&opt)?, topo_loss: outcome.topo_loss() })
        })
        .collect()
}

pub fn write_report(path: &Path, rows: &[ReportRow]) -> Result<()> {
    use crate::io::fmt_f64;
    let mut text = String::from("experiment,variant,emb_loss,topo_loss\n");
    for r in rows {
        text.push_str(&format!("{},{},{},{}\n", r.experiment, r.variant.name(), fmt_f64(r.emb_loss), fmt_f64(r.topo_loss)));
    }
    crate::io::write_text(path, &text)
}
