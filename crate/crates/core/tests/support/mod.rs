//! Independent reference implementations shared by the integration tests.
//!
//! Nothing here calls into the triangulation, filtration or reduction code of
//! the library. The Delaunay complex is found by brute force over all
//! triples, the boundary matrix is reduced densely, and the spanning tree
//! comes from Prim's algorithm on the complete graph.

#![allow(dead_code)]

use rand::Rng;
use toporeg_core::geometry::Point;
use toporeg_core::RngKey;

/// `n` points uniform in the unit square.
pub fn random_cloud(seed: u64, n: usize) -> Vec<Point> {
    let mut rng = RngKey::new(seed).derive(0xC10D).rng();
    (0..n).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect()
}

fn sq_dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// Circumcenter and squared circumradius, or `None` for collinear points.
fn circumcircle(a: Point, b: Point, c: Point) -> Option<(Point, f64)> {
    let d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]));
    if d.abs() < 1e-300 {
        return None;
    }
    let (a2, b2, c2) = (a[0] * a[0] + a[1] * a[1], b[0] * b[0] + b[1] * b[1], c[0] * c[0] + c[1] * c[1]);
    let ux = (a2 * (b[1] - c[1]) + b2 * (c[1] - a[1]) + c2 * (a[1] - b[1])) / d;
    let uy = (a2 * (c[0] - b[0]) + b2 * (a[0] - c[0]) + c2 * (b[0] - a[0])) / d;
    let center = [ux, uy];
    Some((center, sq_dist(center, a)))
}

/// A simplex as its sorted vertex list, with its alpha value.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveSimplex {
    pub vertices: Vec<usize>,
    pub value: f64,
}

/// Alpha complex of points in general position: Delaunay triangles are the
/// triples with an empty open circumdisc, edges are their sides (plus the
/// single segment for two points). An edge whose open diametral disc holds no
/// other input point enters at its squared half-length, otherwise at the
/// smallest circumradius of its triangles.
pub fn naive_alpha_complex(points: &[Point]) -> Vec<NaiveSimplex> {
    let n = points.len();
    let mut triangles = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let Some((c, r2)) = circumcircle(points[i], points[j], points[k]) else { continue };
                let empty = (0..n).filter(|&m| m != i && m != j && m != k).all(|m| sq_dist(points[m], c) >= r2);
                if empty {
                    triangles.push(([i, j, k], r2));
                }
            }
        }
    }
    let mut edges: Vec<[usize; 2]> = Vec::new();
    for (t, _) in &triangles {
        for e in [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]] {
            if !edges.contains(&e) {
                edges.push(e);
            }
        }
    }
    if n == 2 {
        edges.push([0, 1]);
    }
    edges.sort();

    let mut out: Vec<NaiveSimplex> = (0..n).map(|v| NaiveSimplex { vertices: vec![v], value: 0.0 }).collect();
    for e in &edges {
        let (a, b) = (points[e[0]], points[e[1]]);
        let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
        let r2 = sq_dist(a, b) / 4.0;
        let gabriel = (0..n).filter(|&m| m != e[0] && m != e[1]).all(|m| sq_dist(points[m], mid) >= r2);
        let value = if gabriel {
            r2
        } else {
            triangles.iter().filter(|(t, _)| t.contains(&e[0]) && t.contains(&e[1])).map(|&(_, v)| v).fold(f64::INFINITY, f64::min)
        };
        out.push(NaiveSimplex { vertices: e.to_vec(), value });
    }
    for (t, v) in &triangles {
        out.push(NaiveSimplex { vertices: t.to_vec(), value: *v });
    }
    out
}

/// A persistence pair described by the vertices of its simplices.
#[derive(Debug, Clone, PartialEq)]
pub struct NaivePair {
    pub dimension: usize,
    pub birth: f64,
    pub death: f64,
    pub birth_vertices: Vec<usize>,
    pub death_vertices: Option<Vec<usize>>,
}

/// Persistence pairs with positive persistence (and all essential classes)
/// from a dense left-to-right reduction of the boundary matrix, with the
/// simplices ordered by value, then dimension, then vertex list.
pub fn naive_persistence(complex: &[NaiveSimplex]) -> Vec<NaivePair> {
    let mut order: Vec<usize> = (0..complex.len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (&complex[a], &complex[b]);
        x.value.total_cmp(&y.value).then(x.vertices.len().cmp(&y.vertices.len())).then(x.vertices.cmp(&y.vertices))
    });
    let sorted: Vec<&NaiveSimplex> = order.iter().map(|&k| &complex[k]).collect();
    let m = sorted.len();
    let mut matrix = vec![vec![false; m]; m];
    for (col, s) in sorted.iter().enumerate() {
        if s.vertices.len() < 2 {
            continue;
        }
        for skip in 0..s.vertices.len() {
            let face: Vec<usize> = s.vertices.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v).collect();
            let row = sorted.iter().position(|t| t.vertices == face).expect("face in complex");
            matrix[col][row] = true;
        }
    }
    let low = |c: &Vec<bool>| c.iter().rposition(|&x| x);
    for j in 0..m {
        while let Some(l) = low(&matrix[j]) {
            let Some(k) = (0..j).find(|&k| low(&matrix[k]) == Some(l)) else { break };
            let other = matrix[k].clone();
            for (x, y) in matrix[j].iter_mut().zip(other) {
                *x ^= y;
            }
        }
    }
    let mut paired = vec![false; m];
    let mut pairs = Vec::new();
    for j in 0..m {
        if let Some(l) = low(&matrix[j]) {
            paired[l] = true;
            paired[j] = true;
            if sorted[j].value > sorted[l].value {
                pairs.push(NaivePair {
                    dimension: sorted[l].vertices.len() - 1,
                    birth: sorted[l].value,
                    death: sorted[j].value,
                    birth_vertices: sorted[l].vertices.clone(),
                    death_vertices: Some(sorted[j].vertices.clone()),
                });
            }
        }
    }
    for k in 0..m {
        if !paired[k] {
            pairs.push(NaivePair {
                dimension: sorted[k].vertices.len() - 1,
                birth: sorted[k].value,
                death: f64::INFINITY,
                birth_vertices: sorted[k].vertices.clone(),
                death_vertices: None,
            });
        }
    }
    pairs
}

/// Edge lengths of a Euclidean minimum spanning tree (Prim, dense).
pub fn mst_edge_lengths(points: &[Point]) -> Vec<f64> {
    let n = points.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut lengths = Vec::with_capacity(n.saturating_sub(1));
    best[0] = 0.0;
    for step in 0..n {
        let u = (0..n).filter(|&v| !in_tree[v]).min_by(|&a, &b| best[a].total_cmp(&best[b])).expect("vertex left");
        in_tree[u] = true;
        if step > 0 {
            lengths.push(best[u].sqrt());
        }
        for v in 0..n {
            if !in_tree[v] {
                best[v] = best[v].min(sq_dist(points[u], points[v]));
            }
        }
    }
    lengths
}

/// Central finite differences of `f` at `x`.
pub fn finite_difference(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    (0..x.len())
        .map(|k| {
            y[k] = x[k] + h;
            let up = f(&y);
            y[k] = x[k] - h;
            let down = f(&y);
            y[k] = x[k];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// `|a - b| / max(|a|, |b|)` in the Euclidean norm; 0 when both vanish.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(b.iter().map(|x| x * x).sum::<f64>().sqrt());
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

pub fn flatten(points: &[Point]) -> Vec<f64> {
    points.iter().flat_map(|p| [p[0], p[1]]).collect()
}

pub fn unflatten(x: &[f64]) -> Vec<Point> {
    x.chunks_exact(2).map(|c| [c[0], c[1]]).collect()
}
