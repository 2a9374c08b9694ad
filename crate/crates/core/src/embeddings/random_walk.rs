//! Skip-gram with negative sampling over truncated random walks, using one
//! coordinate table for both center and context nodes.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::{as_points, random_coordinates, sigmoid, softplus, EmbeddingModel, Graph, LossGrad};
use crate::geometry::Point;
use crate::rng::RngKey;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomWalkConfig {
    pub walk_length: usize,
    pub walks_per_node: usize,
    pub window: usize,
    pub negatives: usize,
    /// Walks per optimization step; one epoch passes over all walks.
    pub batch_walks: usize,
}

impl Default for RandomWalkConfig {
    fn default() -> Self {
        RandomWalkConfig { walk_length: 40, walks_per_node: 10, window: 5, negatives: 5, batch_walks: usize::MAX }
    }
}

impl RandomWalkConfig {
    /// Number of optimization steps per epoch on a graph with `nodes` nodes.
    pub fn batches(&self, nodes: usize) -> usize {
        let walks = self.walks_per_node * nodes;
        walks.div_ceil(self.batch_walks.max(1)).max(1)
    }
}

/// `walks_per_node` rounds of one walk started from every node in index
/// order. A walk stops early at a node without neighbors.
pub fn random_walks(graph: &Graph, config: &RandomWalkConfig, key: RngKey) -> Vec<Vec<usize>> {
    let mut rng = key.rng();
    let mut walks = Vec::with_capacity(config.walks_per_node * graph.num_nodes());
    for _ in 0..config.walks_per_node {
        for start in 0..graph.num_nodes() {
            let mut walk = Vec::with_capacity(config.walk_length);
            walk.push(start);
            while walk.len() < config.walk_length {
                let next = graph.neighbors(*walk.last().expect("walk starts nonempty"));
                if next.is_empty() {
                    break;
                }
                walk.push(next[rng.random_range(0..next.len())]);
            }
            walks.push(walk);
        }
    }
    walks
}

/// Skip-gram loss summed over co-occurrence pairs: each pair `(u, v)` within the
/// window contributes `-ln sigmoid(<e_u, e_v>) - sum ln sigmoid(-<e_u, e_n>)`
/// with negatives `n` drawn uniformly from the nodes other than `u`. Walks
/// come from `key.derive(0)` and negatives from `key.derive(1)`.
pub fn random_walk_loss(graph: &Graph, coords: &[f64], config: &RandomWalkConfig, key: RngKey) -> Result<LossGrad> {
    if graph.num_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    let walks = random_walks(graph, config, key.derive(0));
    skip_gram(&walks, graph.num_nodes(), coords, config, key.derive(1))
}

/// The loss of [`random_walk_loss`] restricted to the walks of one batch:
/// walks `batch * batch_walks ..` of the same walk set, with negatives drawn
/// from `key.derive(1).derive(batch)`.
pub fn random_walk_batch_loss(graph: &Graph, coords: &[f64], config: &RandomWalkConfig, key: RngKey, batch: usize) -> Result<LossGrad> {
    if graph.num_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    let walks = random_walks(graph, config, key.derive(0));
    let size = config.batch_walks.max(1);
    let start = batch.saturating_mul(size).min(walks.len());
    let end = start.saturating_add(size).min(walks.len());
    skip_gram(&walks[start..end], graph.num_nodes(), coords, config, key.derive(1).derive(batch as u64))
}

fn skip_gram(walks: &[Vec<usize>], n: usize, coords: &[f64], config: &RandomWalkConfig, negatives: RngKey) -> Result<LossGrad> {
    let mut neg_rng = negatives.rng();
    let points = as_points(coords);
    let mut value = 0.0;
    let mut grad = vec![0.0; coords.len()];
    let mut pairs = 0usize;
    let term = |grad: &mut [f64], u: usize, v: usize, label: f64| -> f64 {
        let s = points[u][0] * points[v][0] + points[u][1] * points[v][1];
        // d/ds of -ln sigmoid(s) is sigmoid(s) - 1, of -ln sigmoid(-s) is sigmoid(s).
        let coef = sigmoid(s) - label;
        for c in 0..2 {
            grad[2 * u + c] += coef * points[v][c];
            grad[2 * v + c] += coef * points[u][c];
        }
        if label > 0.5 {
            softplus(-s)
        } else {
            softplus(s)
        }
    };
    for walk in walks {
        for (pos, &u) in walk.iter().enumerate() {
            for &v in walk.iter().skip(pos + 1).take(config.window) {
                pairs += 1;
                value += term(&mut grad, u, v, 1.0);
                for _ in 0..config.negatives {
                    let pick = neg_rng.random_range(0..n - 1);
                    let m = if pick >= u { pick + 1 } else { pick };
                    value += term(&mut grad, u, m, 0.0);
                }
            }
        }
    }
    if pairs == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok(LossGrad { value, grad })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomWalkGraphModel {
    graph: Graph,
    coords: Vec<f64>,
    pub config: RandomWalkConfig,
}

impl RandomWalkGraphModel {
    /// Starts from coordinates uniform in `[-0.5, 0.5)^2` drawn from `key`.
    pub fn new(graph: Graph, config: RandomWalkConfig, key: RngKey) -> Self {
        let coords = random_coordinates(graph.num_nodes(), key);
        RandomWalkGraphModel { graph, coords, config }
    }

    pub fn from_parts(graph: Graph, coords: Vec<f64>, config: RandomWalkConfig) -> Result<Self> {
        if coords.len() != 2 * graph.num_nodes() {
            return Err(Error::ShapeMismatch(alloc::format!("{} coordinates for {} nodes", coords.len(), graph.num_nodes())));
        }
        Ok(RandomWalkGraphModel { graph, coords, config })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }
}

impl EmbeddingModel for RandomWalkGraphModel {
    fn parameters(&self) -> &[f64] {
        &self.coords
    }

    fn parameters_mut(&mut self) -> &mut [f64] {
        &mut self.coords
    }

    fn embedding(&self) -> Vec<Point> {
        as_points(&self.coords)
    }

    fn embedding_loss(&self, key: RngKey) -> Result<LossGrad> {
        random_walk_loss(&self.graph, &self.coords, &self.config, key)
    }

    fn batches(&self) -> usize {
        self.config.batches(self.graph.num_nodes())
    }

    fn batch_loss(&self, key: RngKey, batch: usize) -> Result<LossGrad> {
        random_walk_batch_loss(&self.graph, &self.coords, &self.config, key, batch)
    }

    fn pullback(&self, grad: &[[f64; 2]]) -> Vec<f64> {
        super::flatten(grad)
    }
}
