//! Neighbor embedding on a fuzzy kNN membership graph: attraction along graph
//! edges and repulsion from uniformly sampled negatives.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::Rng;

use super::{as_points, pca_init, EmbeddingModel, LossGrad};
use crate::geometry::Point;
use crate::rng::RngKey;
use crate::{Error, Result};

/// Keeps `ln(1 - nu)` finite when a negative sample sits on top of its head.
const REPULSION_EPS: f64 = 1e-3;

/// Largest absolute coordinate of the initial layout.
const INIT_EXTENT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborConfig {
    pub k: usize,
    pub min_dist: f64,
    pub negatives: usize,
}

impl Default for NeighborConfig {
    fn default() -> Self {
        NeighborConfig { k: 15, min_dist: 0.1, negatives: 5 }
    }
}

/// Symmetric membership graph. Edges are `[i, j]` with `i < j`, sorted, with
/// weights in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyGraph {
    n: usize,
    edges: Vec<[usize; 2]>,
    weights: Vec<f64>,
}

impl FuzzyGraph {
    pub fn num_nodes(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Graph from explicit weighted edges. Weights outside `(0, 1]` are
    /// rejected.
    pub fn from_edges(n: usize, edges: &[([usize; 2], f64)]) -> Result<Self> {
        let mut list: Vec<([usize; 2], f64)> = Vec::with_capacity(edges.len());
        for &([u, v], w) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, nodes: n });
                }
            }
            if !(w > 0.0 && w <= 1.0) {
                return Err(Error::InvalidConfig(alloc::format!("membership weight {w} outside (0, 1]")));
            }
            if u != v {
                list.push((if u < v { [u, v] } else { [v, u] }, w));
            }
        }
        list.sort_by_key(|e| e.0);
        list.dedup_by(|a, b| a.0 == b.0);
        Ok(FuzzyGraph { n, edges: list.iter().map(|e| e.0).collect(), weights: list.iter().map(|e| e.1).collect() })
    }
}

/// Membership graph over the rows of `data`: each row's `k` nearest rows get
/// `exp(-(d - rho) / sigma)`, with `rho` the nearest distance and `sigma`
/// chosen so the memberships sum to `log2(k)`; directed memberships are
/// merged by fuzzy union.
pub fn fuzzy_graph(data: &DMatrix<f64>, k: usize) -> Result<FuzzyGraph> {
    let n = data.nrows();
    if n < 2 || k == 0 {
        return Err(Error::EmptyGraph);
    }
    let k = k.min(n - 1);
    let target = libm::log2(k as f64).max(1e-3);
    let mut directed: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, out) in directed.iter_mut().enumerate() {
        let mut dists: Vec<(f64, usize)> = (0..n).filter(|&j| j != i).map(|j| (libm::sqrt((data.row(i) - data.row(j)).norm_squared()), j)).collect();
        dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        dists.truncate(k);
        let rho = dists[0].0;
        let sigma = calibrate_bandwidth(&dists, rho, target);
        for &(d, j) in &dists {
            let w = libm::exp(-(d - rho).max(0.0) / sigma);
            if w > 0.0 {
                out.push((j, w));
            }
        }
    }
    let mut merged: Vec<([usize; 2], f64)> = Vec::new();
    for i in 0..n {
        for &(j, w_ij) in &directed[i] {
            let w_ji = directed[j].iter().find(|e| e.0 == i).map_or(0.0, |e| e.1);
            if w_ji > 0.0 && j < i {
                // Already emitted from the other side.
                continue;
            }
            let w = w_ij + w_ji - w_ij * w_ji;
            merged.push(([i.min(j), i.max(j)], w.min(1.0)));
        }
    }
    FuzzyGraph::from_edges(n, &merged)
}

fn calibrate_bandwidth(dists: &[(f64, usize)], rho: f64, target: f64) -> f64 {
    let total = |sigma: f64| dists.iter().map(|&(d, _)| libm::exp(-(d - rho).max(0.0) / sigma)).sum::<f64>();
    let (mut lo, mut hi) = (0.0_f64, f64::INFINITY);
    let mut sigma = 1.0;
    for _ in 0..128 {
        if total(sigma) > target {
            hi = sigma;
            sigma = 0.5 * (lo + hi);
        } else {
            lo = sigma;
            sigma = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * sigma };
        }
        if hi.is_finite() && hi - lo <= 1e-12 * hi {
            break;
        }
    }
    sigma.max(1e-12)
}

/// Low-dimensional similarity `1 / (1 + a * d^(2b))` from the squared
/// distance `d^2`.
pub fn similarity(dist_sq: f64, a: f64, b: f64) -> f64 {
    1.0 / (1.0 + a * libm::pow(dist_sq, b))
}

/// Least-squares fit of `(a, b)` so that `similarity` matches 1 below
/// `min_dist` and `exp(-(d - min_dist))` above it, on 300 samples of `[0, 3]`.
pub fn fit_curve(min_dist: f64) -> (f64, f64) {
    let xs: Vec<f64> = (0..300).map(|i| 3.0 * i as f64 / 299.0).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| if x <= min_dist { 1.0 } else { libm::exp(-(x - min_dist)) }).collect();
    let residuals = |a: f64, b: f64| -> f64 {
        xs.iter()
            .zip(&ys)
            .map(|(&x, &y)| {
                let r = similarity(x * x, a, b) - y;
                r * r
            })
            .sum()
    };
    let (mut a, mut b) = (1.0, 1.0);
    let mut damping = 1e-3;
    let mut cost = residuals(a, b);
    for _ in 0..500 {
        let (mut jtj, mut jtr) = ([[0.0; 2]; 2], [0.0; 2]);
        for (&x, &y) in xs.iter().zip(&ys) {
            if x == 0.0 {
                continue;
            }
            let p = libm::pow(x, 2.0 * b);
            let f = 1.0 / (1.0 + a * p);
            let r = f - y;
            let da = -f * f * p;
            let db = -f * f * a * p * 2.0 * libm::log(x);
            let j = [da, db];
            for u in 0..2 {
                jtr[u] += j[u] * r;
                for v in 0..2 {
                    jtj[u][v] += j[u] * j[v];
                }
            }
        }
        let m00 = jtj[0][0] * (1.0 + damping);
        let m11 = jtj[1][1] * (1.0 + damping);
        let det = m00 * m11 - jtj[0][1] * jtj[1][0];
        if det == 0.0 {
            break;
        }
        let step_a = (m11 * jtr[0] - jtj[0][1] * jtr[1]) / det;
        let step_b = (m00 * jtr[1] - jtj[1][0] * jtr[0]) / det;
        let (na, nb) = (a - step_a, b - step_b);
        let new_cost = if na > 0.0 && nb > 0.0 { residuals(na, nb) } else { f64::INFINITY };
        if new_cost < cost {
            let done = cost - new_cost <= 1e-15 * cost;
            a = na;
            b = nb;
            cost = new_cost;
            damping *= 0.3;
            if done {
                break;
            }
        } else {
            damping *= 10.0;
            if damping > 1e12 {
                break;
            }
        }
    }
    (a, b)
}

/// Negative samples for each edge's head node, drawn uniformly from the other
/// nodes.
fn draw_negatives(graph: &FuzzyGraph, negatives: usize, key: RngKey) -> Vec<usize> {
    let mut rng = key.rng();
    let n = graph.n;
    let mut out = Vec::with_capacity(graph.edges.len() * negatives);
    for e in &graph.edges {
        for _ in 0..negatives {
            let pick = rng.random_range(0..n - 1);
            out.push(if pick >= e[0] { pick + 1 } else { pick });
        }
    }
    out
}

/// Membership-weighted cross-entropy of the layout `coords` (flattened
/// `n x 2`) with its gradient. Each edge `[i, j]` contributes
/// `w * (ln(1 + a s^b) - sum ln(1 - nu(i, n) + eps))` where `s` is the
/// squared distance and the negatives `n` are drawn from `key`. The gradient
/// of a pair at zero distance is taken to be zero.
pub fn neighbor_loss(graph: &FuzzyGraph, coords: &[f64], a: f64, b: f64, negatives: usize, key: RngKey) -> Result<LossGrad> {
    if graph.edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let points = as_points(coords);
    let samples = draw_negatives(graph, negatives, key);
    let mut value = 0.0;
    let mut grad = vec![0.0; coords.len()];
    let push = |grad: &mut [f64], i: usize, j: usize, coef: f64| {
        for c in 0..2 {
            let g = coef * 2.0 * (points[i][c] - points[j][c]);
            grad[2 * i + c] += g;
            grad[2 * j + c] -= g;
        }
    };
    for (e, (&[i, j], &w)) in graph.edges.iter().zip(&graph.weights).enumerate() {
        let s = dist_sq(&points[i], &points[j]);
        let sb = libm::pow(s, b);
        value += w * libm::log1p(a * sb);
        if s > 0.0 {
            push(&mut grad, i, j, w * a * b * sb / s / (1.0 + a * sb));
        }
        for &m in &samples[e * negatives..(e + 1) * negatives] {
            let s = dist_sq(&points[i], &points[m]);
            let nu = similarity(s, a, b);
            let denom = 1.0 - nu + REPULSION_EPS;
            value -= w * libm::log(denom);
            if s > 0.0 {
                let sb = libm::pow(s, b);
                let dnu = -nu * nu * a * b * sb / s;
                push(&mut grad, i, m, w * dnu / denom);
            }
        }
    }
    Ok(LossGrad { value, grad })
}

fn dist_sq(p: &Point, q: &Point) -> f64 {
    let dx = p[0] - q[0];
    let dy = p[1] - q[1];
    dx * dx + dy * dy
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborEmbeddingModel {
    graph: FuzzyGraph,
    coords: Vec<f64>,
    pub a: f64,
    pub b: f64,
    pub negatives: usize,
}

impl NeighborEmbeddingModel {
    /// Builds the membership graph of `data` and starts from its PCA scores
    /// scaled so the largest absolute coordinate is 10.
    pub fn new(data: &DMatrix<f64>, config: NeighborConfig) -> Result<Self> {
        let graph = fuzzy_graph(data, config.k)?;
        let w = pca_init(data)?;
        let mut centered = data.clone();
        for mut col in centered.column_iter_mut() {
            let mean = col.mean();
            col.add_scalar_mut(-mean);
        }
        let scores = centered * w;
        let extent = scores.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let scale = if extent > 0.0 { INIT_EXTENT / extent } else { 1.0 };
        let coords = (0..scores.nrows()).flat_map(|r| [scores[(r, 0)] * scale, scores[(r, 1)] * scale]).collect();
        Self::from_parts(graph, coords, config)
    }

    pub fn from_parts(graph: FuzzyGraph, coords: Vec<f64>, config: NeighborConfig) -> Result<Self> {
        if coords.len() != 2 * graph.n {
            return Err(Error::ShapeMismatch(alloc::format!("{} coordinates for {} nodes", coords.len(), graph.n)));
        }
        let (a, b) = fit_curve(config.min_dist);
        Ok(NeighborEmbeddingModel { graph, coords, a, b, negatives: config.negatives })
    }

    pub fn graph(&self) -> &FuzzyGraph {
        &self.graph
    }
}

impl EmbeddingModel for NeighborEmbeddingModel {
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
        neighbor_loss(&self.graph, &self.coords, self.a, self.b, self.negatives, key)
    }

    fn pullback(&self, grad: &[[f64; 2]]) -> Vec<f64> {
        super::flatten(grad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_fit_for_default_min_dist() {
        let (a, b) = fit_curve(0.1);
        assert!((a - 1.577).abs() < 0.01, "a = {a}");
        assert!((b - 0.895).abs() < 0.01, "b = {b}");
    }

    #[test]
    fn zero_distance_similarity_is_one() {
        assert_eq!(similarity(0.0, 1.5, 0.9), 1.0);
    }

    #[test]
    fn memberships_are_in_unit_interval() {
        let data = DMatrix::from_fn(30, 3, |r, c| libm::sin((r * 7 + c * 3) as f64));
        let g = fuzzy_graph(&data, 5).unwrap();
        assert!(!g.edges().is_empty());
        assert!(g.weights().iter().all(|&w| w > 0.0 && w <= 1.0));
        assert!(g.edges().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn attraction_decreases_as_points_approach() {
        let g = FuzzyGraph::from_edges(2, &[([0, 1], 1.0)]).unwrap();
        let (a, b) = fit_curve(0.1);
        let mut last = f64::INFINITY;
        for d in [3.0, 2.0, 1.0, 0.5, 0.1] {
            let v = neighbor_loss(&g, &[0.0, 0.0, d, 0.0], a, b, 0, RngKey::new(0)).unwrap().value;
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn empty_graph() {
        let g = FuzzyGraph::from_edges(3, &[]).unwrap();
        assert_eq!(neighbor_loss(&g, &[0.0; 6], 1.0, 1.0, 5, RngKey::new(0)), Err(Error::EmptyGraph));
    }
}
