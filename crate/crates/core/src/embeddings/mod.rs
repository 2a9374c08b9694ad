//! Embedding backends.
//!
//! Every backend owns a flat parameter vector, produces a planar embedding
//! from it and knows how to pull a gradient on that embedding back onto its
//! parameters. The optimizer combines the backend's own loss with a
//! topological loss evaluated on the embedding.

mod inner_product;
mod linear;
mod neighbor;
mod random_walk;

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::geometry::Point;
use crate::rng::RngKey;
use crate::{Error, Result};

pub use inner_product::{inner_product_loss, InnerProductGraphModel};
pub use linear::{feature_importance, linear_loss, pca_init, LinearProjectionModel, OrthoNorm};
pub use neighbor::{fit_curve, fuzzy_graph, neighbor_loss, similarity, FuzzyGraph, NeighborConfig, NeighborEmbeddingModel};
pub use random_walk::{random_walk_batch_loss, random_walk_loss, random_walks, RandomWalkConfig, RandomWalkGraphModel};

/// A loss value with its gradient on the model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LossGrad {
    pub value: f64,
    pub grad: Vec<f64>,
}

pub trait EmbeddingModel {
    fn parameters(&self) -> &[f64];

    fn parameters_mut(&mut self) -> &mut [f64];

    /// The planar point cloud induced by the current parameters.
    fn embedding(&self) -> Vec<Point>;

    /// Structure-preserving loss. Dropped in topology-only runs.
    fn embedding_loss(&self, key: RngKey) -> Result<LossGrad>;

    /// Number of optimization steps per epoch. Each step uses the loss of one
    /// batch; the default is a single full batch.
    fn batches(&self) -> usize {
        1
    }

    /// Loss of batch `batch` of the epoch whose random stream is `key`.
    fn batch_loss(&self, key: RngKey, batch: usize) -> Result<LossGrad> {
        let _ = batch;
        self.embedding_loss(key)
    }

    /// Constraint penalty that stays active in topology-only runs.
    fn penalty(&self) -> Result<Option<LossGrad>> {
        Ok(None)
    }

    /// Chain rule from a gradient on the embedding to the parameters.
    fn pullback(&self, grad: &[[f64; 2]]) -> Vec<f64>;
}

/// Point coordinates optimized directly, with no embedding loss of their own.
#[derive(Debug, Clone, PartialEq)]
pub struct PointModel {
    coords: Vec<f64>,
}

impl PointModel {
    pub fn new(points: &[Point]) -> Self {
        PointModel { coords: flatten(points) }
    }
}

impl EmbeddingModel for PointModel {
    fn parameters(&self) -> &[f64] {
        &self.coords
    }

    fn parameters_mut(&mut self) -> &mut [f64] {
        &mut self.coords
    }

    fn embedding(&self) -> Vec<Point> {
        as_points(&self.coords)
    }

    fn embedding_loss(&self, _key: RngKey) -> Result<LossGrad> {
        Ok(LossGrad { value: 0.0, grad: vec![0.0; self.coords.len()] })
    }

    fn pullback(&self, grad: &[[f64; 2]]) -> Vec<f64> {
        flatten(grad)
    }
}

/// Undirected simple graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<[usize; 2]>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Self loops and repeated edges are dropped.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list = Vec::new();
        for (u, v) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, nodes: n });
                }
            }
            if u != v {
                list.push(if u < v { [u, v] } else { [v, u] });
            }
        }
        list.sort_unstable();
        list.dedup();
        let mut adjacency = vec![Vec::new(); n];
        for e in &list {
            adjacency[e[0]].push(e[1]);
            adjacency[e[1]].push(e[0]);
        }
        for a in &mut adjacency {
            a.sort_unstable();
        }
        Ok(Graph { n, edges: list, adjacency })
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }
}

pub(crate) fn as_points(flat: &[f64]) -> Vec<Point> {
    flat.chunks_exact(2).map(|c| [c[0], c[1]]).collect()
}

pub(crate) fn flatten(grad: &[[f64; 2]]) -> Vec<f64> {
    grad.as_flattened().to_vec()
}

/// Uniform coordinates in `[-0.5, 0.5)^2` for `n` nodes.
pub(crate) fn random_coordinates(n: usize, key: RngKey) -> Vec<f64> {
    let mut rng = key.rng();
    (0..2 * n).map(|_| rng.random::<f64>() - 0.5).collect()
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

/// `ln(1 + exp(x))` without overflow.
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + libm::log1p(libm::exp(-x))
    } else {
        libm::log1p(libm::exp(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_normalizes_edges() {
        let g = Graph::new(4, [(1, 0), (0, 1), (2, 2), (2, 3)]).unwrap();
        assert_eq!(g.edges(), &[[0, 1], [2, 3]]);
        assert!(!g.is_connected());
        assert!(g.has_edge(1, 0));
        assert_eq!(Graph::new(2, [(0, 2)]), Err(Error::NodeOutOfRange { node: 2, nodes: 2 }));
    }

    #[test]
    fn stable_logistic_helpers() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((softplus(0.0) - core::f64::consts::LN_2).abs() < 1e-15);
        assert!(softplus(800.0).is_finite());
        assert_eq!(sigmoid(-800.0), 0.0);
    }
}
