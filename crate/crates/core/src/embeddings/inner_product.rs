//! Graph embedding whose pairwise inner products, through the logistic
//! function, predict the edge indicator.

use alloc::vec;
use alloc::vec::Vec;

use super::{as_points, random_coordinates, sigmoid, softplus, EmbeddingModel, Graph, LossGrad};
use crate::geometry::Point;
use crate::rng::RngKey;
use crate::{Error, Result};

/// Mean binary cross-entropy over all unordered node pairs, with target 1 on
/// edges and 0 elsewhere.
pub fn inner_product_loss(graph: &Graph, coords: &[f64]) -> Result<LossGrad> {
    let n = graph.num_nodes();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let points = as_points(coords);
    let mut value = 0.0;
    let mut grad = vec![0.0; coords.len()];
    for u in 0..n {
        for v in u + 1..n {
            let s = points[u][0] * points[v][0] + points[u][1] * points[v][1];
            let y = if graph.has_edge(u, v) { 1.0 } else { 0.0 };
            value += softplus(s) - y * s;
            let coef = sigmoid(s) - y;
            for c in 0..2 {
                grad[2 * u + c] += coef * points[v][c];
                grad[2 * v + c] += coef * points[u][c];
            }
        }
    }
    let scale = 2.0 / (n * (n - 1)) as f64;
    grad.iter_mut().for_each(|g| *g *= scale);
    Ok(LossGrad { value: value * scale, grad })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerProductGraphModel {
    graph: Graph,
    coords: Vec<f64>,
}

impl InnerProductGraphModel {
    /// Starts from coordinates uniform in `[-0.5, 0.5)^2` drawn from `key`.
    pub fn new(graph: Graph, key: RngKey) -> Self {
        let coords = random_coordinates(graph.num_nodes(), key);
        InnerProductGraphModel { graph, coords }
    }

    pub fn from_parts(graph: Graph, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != 2 * graph.num_nodes() {
            return Err(Error::ShapeMismatch(alloc::format!("{} coordinates for {} nodes", coords.len(), graph.num_nodes())));
        }
        Ok(InnerProductGraphModel { graph, coords })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }
}

impl EmbeddingModel for InnerProductGraphModel {
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
        inner_product_loss(&self.graph, &self.coords)
    }

    fn pullback(&self, grad: &[[f64; 2]]) -> Vec<f64> {
        super::flatten(grad)
    }
}
