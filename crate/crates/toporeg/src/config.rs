//! JSON documents: the topological loss spec and the run configuration.
//!
//! Both are parsed strictly. Unknown keys are rejected and every value is
//! checked before any computation starts.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use toporeg_core::embeddings::{NeighborConfig, OrthoNorm, RandomWalkConfig};
use toporeg_core::{Method, OptimizerConfig, Sampling, TopoLossSpec, TopoLossTerm, WeightedTerm};

use crate::{Error, Result};

/// One term of a loss spec. `j = null` means "all remaining pairs" and
/// `tau = null` means no centrality restriction. `f_s` and `n_s` are given
/// together or not at all.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    #[serde(default = "one")]
    pub weight: f64,
    pub dim: usize,
    pub i: usize,
    #[serde(default)]
    pub j: Option<usize>,
    pub mu: i8,
    #[serde(default = "one")]
    pub p: f64,
    #[serde(default)]
    pub q: f64,
    #[serde(default)]
    pub f_s: Option<f64>,
    #[serde(default)]
    pub n_s: Option<usize>,
    #[serde(default)]
    pub with_replacement: bool,
    #[serde(default)]
    pub tau: Option<f64>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossSpecJson {
    pub terms: Vec<TermJson>,
}

impl LossSpecJson {
    pub fn to_spec(&self) -> Result<TopoLossSpec> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (k, t) in self.terms.iter().enumerate() {
            let sampling = match (t.f_s, t.n_s) {
                (None, None) => None,
                (Some(fraction), Some(repeats)) => Some(Sampling { fraction, repeats, with_replacement: t.with_replacement }),
                _ => return Err(Error::Config(format!("term {k}: f_s and n_s must be given together"))),
            };
            if sampling.is_none() && t.with_replacement {
                return Err(Error::Config(format!("term {k}: with_replacement needs f_s and n_s")));
            }
            let term = TopoLossTerm { dim: t.dim, i: t.i, j: t.j, mu: t.mu, p: t.p, q: t.q, sampling, functional_tau: t.tau };
            terms.push(WeightedTerm { weight: t.weight, term });
        }
        Ok(TopoLossSpec::new(terms)?)
    }

    pub fn from_spec(spec: &TopoLossSpec) -> Self {
        let terms = spec
            .terms
            .iter()
            .map(|w| TermJson {
                weight: w.weight,
                dim: w.term.dim,
                i: w.term.i,
                j: w.term.j,
                mu: w.term.mu,
                p: w.term.p,
                q: w.term.q,
                f_s: w.term.sampling.map(|s| s.fraction),
                n_s: w.term.sampling.map(|s| s.repeats),
                with_replacement: w.term.sampling.is_some_and(|s| s.with_replacement),
                tau: w.term.functional_tau,
            })
            .collect();
        LossSpecJson { terms }
    }
}

pub fn parse_loss_spec(text: &str) -> Result<TopoLossSpec> {
    let json: LossSpecJson = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    json.to_spec()
}

/// Where the input comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    /// Noisy unit circle lifted to `ambient_dim` dimensions.
    Circle { n: usize, ambient_dim: usize, noise_half_width: f64 },
    /// Planar Gaussian blobs.
    Clusters { centers: Vec<[f64; 2]>, points_per_cluster: usize, spread: f64 },
    /// Planar three-armed star lifted to `ambient_dim` dimensions.
    Bifurcation { arm_length_points: usize, ambient_dim: usize, noise_half_width: f64 },
    /// The bundled Karate club network.
    Karate {},
    /// Data matrix CSV with a header of feature names.
    Matrix { path: PathBuf },
    /// Point CSV `id,x,y`.
    Points { path: PathBuf },
    /// Whitespace-separated edge list.
    Edges { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OrthoNormJson {
    #[default]
    Frobenius,
    FrobeniusSquared,
    Spectral,
}

impl From<OrthoNormJson> for OrthoNorm {
    fn from(n: OrthoNormJson) -> Self {
        match n {
            OrthoNormJson::Frobenius => OrthoNorm::Frobenius,
            OrthoNormJson::FrobeniusSquared => OrthoNorm::FrobeniusSquared,
            OrthoNormJson::Spectral => OrthoNorm::Spectral,
        }
    }
}

/// Embedding backend and its options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum BackendJson {
    /// Optimize planar coordinates directly; no embedding loss.
    Points {},
    /// `E = X W` from PCA, trained on reconstruction error.
    Linear {
        #[serde(default = "default_ortho_weight")]
        ortho_weight: f64,
        #[serde(default)]
        ortho_norm: OrthoNormJson,
        /// Subtract column means from the data first.
        #[serde(default = "yes")]
        center: bool,
    },
    /// Fuzzy kNN neighbor embedding.
    Neighbor {
        #[serde(default = "default_k")]
        k: usize,
        #[serde(default = "default_min_dist")]
        min_dist: f64,
        #[serde(default = "default_negatives")]
        negatives: usize,
    },
    /// Skip-gram over random walks.
    RandomWalk {
        #[serde(default = "default_walk_length")]
        walk_length: usize,
        #[serde(default = "default_walks_per_node")]
        walks_per_node: usize,
        #[serde(default = "default_window")]
        window: usize,
        #[serde(default = "default_negatives")]
        negatives: usize,
        #[serde(default)]
        batch_walks: Option<usize>,
    },
    /// Logistic inner products predicting edges.
    InnerProduct {},
}

fn default_ortho_weight() -> f64 {
    toporeg_core::embeddings::LinearProjectionModel::DEFAULT_ORTHO_WEIGHT
}
fn yes() -> bool {
    true
}
fn default_k() -> usize {
    NeighborConfig::default().k
}
fn default_min_dist() -> f64 {
    NeighborConfig::default().min_dist
}
fn default_negatives() -> usize {
    NeighborConfig::default().negatives
}
fn default_walk_length() -> usize {
    RandomWalkConfig::default().walk_length
}
fn default_walks_per_node() -> usize {
    RandomWalkConfig::default().walks_per_node
}
fn default_window() -> usize {
    RandomWalkConfig::default().window
}

impl BackendJson {
    pub fn name(&self) -> &'static str {
        match self {
            BackendJson::Points {} => "points",
            BackendJson::Linear { .. } => "linear",
            BackendJson::Neighbor { .. } => "neighbor",
            BackendJson::RandomWalk { .. } => "random_walk",
            BackendJson::InnerProduct {} => "inner_product",
        }
    }

    /// Backend with default options, by name.
    pub fn by_name(name: &str) -> Result<Self> {
        serde_json::from_value(serde_json::json!({ "name": name.replace('-', "_") })).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MethodJson {
    #[default]
    Plain,
    Adam,
}

impl From<MethodJson> for Method {
    fn from(m: MethodJson) -> Self {
        match m {
            MethodJson::Plain => Method::Plain,
            MethodJson::Adam => Method::Adam,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerJson {
    #[serde(default)]
    pub lambda_top: f64,
    #[serde(default = "default_lr")]
    pub learning_rate: f64,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default)]
    pub method: MethodJson,
    #[serde(default)]
    pub topo_only: bool,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
}

fn default_lr() -> f64 {
    OptimizerConfig::default().learning_rate
}
fn default_epochs() -> usize {
    OptimizerConfig::default().epochs
}
fn default_record_every() -> usize {
    OptimizerConfig::default().record_every
}

impl Default for OptimizerJson {
    fn default() -> Self {
        OptimizerJson {
            lambda_top: 0.0,
            learning_rate: default_lr(),
            epochs: default_epochs(),
            method: MethodJson::Plain,
            topo_only: false,
            record_every: default_record_every(),
        }
    }
}

impl OptimizerJson {
    pub fn to_config(&self, seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            lambda_top: self.lambda_top,
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            method: self.method.into(),
            seed,
            topo_only: self.topo_only,
            record_every: self.record_every,
        }
    }
}

/// A complete, self-describing experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Name used in reports.
    pub experiment: String,
    pub data: DataSource,
    pub backend: BackendJson,
    #[serde(default)]
    pub topo_spec: Option<LossSpecJson>,
    #[serde(default)]
    pub optimizer: OptimizerJson,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn spec(&self) -> Result<Option<TopoLossSpec>> {
        self.topo_spec.as_ref().map(LossSpecJson::to_spec).transpose()
    }

    /// Checks values and the pairing of data source and backend.
    pub fn validate(&self) -> Result<()> {
        self.spec()?;
        self.optimizer.to_config(self.seed).validate()?;
        let matrix = matches!(self.data, DataSource::Circle { .. } | DataSource::Bifurcation { .. } | DataSource::Matrix { .. });
        let planar = matches!(self.data, DataSource::Clusters { .. } | DataSource::Points { .. });
        let graph = matches!(self.data, DataSource::Karate {} | DataSource::Edges { .. });
        let ok = match self.backend {
            BackendJson::Points {} => planar,
            BackendJson::Linear { .. } | BackendJson::Neighbor { .. } => matrix,
            BackendJson::RandomWalk { .. } | BackendJson::InnerProduct {} => graph,
        };
        if !ok {
            return Err(Error::Config(format!("backend `{}` cannot consume this data source", self.backend.name())));
        }
        if let BackendJson::RandomWalk { batch_walks: Some(0), .. } = self.backend {
            return Err(Error::Config("batch_walks must be >= 1".into()));
        }
        if let BackendJson::Linear { ortho_weight, .. } = self.backend {
            if !(ortho_weight >= 0.0 && ortho_weight.is_finite()) {
                return Err(Error::Config(format!("ortho_weight must be finite and >= 0, got {ortho_weight}")));
            }
        }
        if let DataSource::Clusters { centers, .. } = &self.data {
            if centers.is_empty() {
                return Err(Error::Config("clusters need at least one center".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loss_spec_round_trips() {
        let text = r#"{"terms":[{"weight":1.0,"dim":0,"i":2,"j":null,"mu":-1,"p":1.0,"q":0.0,"f_s":0.25,"n_s":10,"tau":null}]}"#;
        let spec = parse_loss_spec(text).unwrap();
        assert_eq!(spec.terms[0].term, TopoLossTerm::new(0, 2, None, -1).with_sampling(0.25, 10));
        let back = LossSpecJson::from_spec(&spec).to_spec().unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(parse_loss_spec(r#"{"terms":[{"dim":0,"i":1,"mu":1,"extra":3}]}"#).is_err());
        assert!(parse_loss_spec(r#"{"terms":[], "x": 1}"#).is_err());
        let cfg = r#"{"experiment":"e","data":{"source":"karate","bogus":1},"backend":{"name":"inner_product"}}"#;
        assert!(RunConfig::parse(cfg).is_err());
        let cfg = r#"{"experiment":"e","data":{"source":"karate"},"backend":{"name":"random_walk","walks":3}}"#;
        assert!(RunConfig::parse(cfg).is_err());
    }

    #[test]
    fn half_given_sampling_is_rejected() {
        assert!(matches!(parse_loss_spec(r#"{"terms":[{"dim":0,"i":1,"mu":1,"f_s":0.5}]}"#), Err(Error::Config(_))));
    }

    #[test]
    fn backend_must_match_data() {
        let cfg = r#"{"experiment":"e","data":{"source":"karate"},"backend":{"name":"linear"}}"#;
        assert!(matches!(RunConfig::parse(cfg), Err(Error::Config(_))));
    }

    #[test]
    fn backends_by_name_use_defaults() {
        assert_eq!(
            BackendJson::by_name("random-walk").unwrap(),
            BackendJson::RandomWalk { walk_length: 40, walks_per_node: 10, window: 5, negatives: 5, batch_walks: None }
        );
        assert!(BackendJson::by_name("umap").is_err());
    }
}
