//! Alpha-filtration values on the Delaunay complex.
//!
//! Vertices enter at 0, triangles at their squared circumradius. An edge
//! whose diametral disc contains no opposite vertex of an incident triangle
//! (boundary counts as outside) is Gabriel and enters at its squared
//! half-length. Otherwise it inherits the smallest value among its incident
//! triangles, which keeps every face no later than its cofaces.

use alloc::vec;
use alloc::vec::Vec;

use super::{delaunay_complex, Point, PointCloud, Simplex};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// The value is the simplex's own squared circumradius.
    Gabriel,
    /// The value is copied from the coface with this simplex index.
    Inherited(usize),
}

/// Simplices of the Delaunay complex with their alpha values.
///
/// Simplex indices are stable: vertices come first (index = point index),
/// then edges, then triangles, each group in lexicographic vertex order.
/// [`Filtration::order`] lists simplex indices sorted by
/// `(value, dimension, vertices)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtration {
    simplices: Vec<Simplex>,
    values: Vec<f64>,
    provenance: Vec<Provenance>,
    order: Vec<usize>,
    num_vertices: usize,
    num_edges: usize,
}

impl Filtration {
    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn num_triangles(&self) -> usize {
        self.simplices.len() - self.num_vertices - self.num_edges
    }

    /// Simplex index of the edge `{u, v}`, if it belongs to the complex.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let key = if u < v { [u, v] } else { [v, u] };
        let edges = &self.simplices[self.num_vertices..self.num_vertices + self.num_edges];
        edges
            .binary_search_by(|s| match s {
                Simplex::Edge(e) => e.cmp(&key),
                _ => unreachable!(),
            })
            .ok()
            .map(|i| i + self.num_vertices)
    }

    /// Simplex indices of the codimension-one faces.
    pub fn boundary(&self, index: usize) -> Vec<usize> {
        match self.simplices[index] {
            Simplex::Vertex(_) => Vec::new(),
            Simplex::Edge([u, v]) => vec![u, v],
            Simplex::Triangle([a, b, c]) => {
                [[a, b], [a, c], [b, c]].iter().map(|e| self.edge_index(e[0], e[1]).expect("triangle edges belong to the complex")).collect()
            }
        }
    }

    /// Sparse gradient of the value of simplex `index` with respect to the
    /// coordinates, as `(point, d value / d point)` entries.
    pub(crate) fn value_gradient_sparse(&self, points: &[Point], index: usize) -> Vec<(usize, [f64; 2])> {
        match (self.simplices[index], self.provenance[index]) {
            (Simplex::Vertex(_), _) => Vec::new(),
            (Simplex::Edge([u, v]), Provenance::Gabriel) => {
                let d = [(points[u][0] - points[v][0]) / 2.0, (points[u][1] - points[v][1]) / 2.0];
                vec![(u, d), (v, [-d[0], -d[1]])]
            }
            (Simplex::Triangle(t), Provenance::Gabriel) => {
                let g = circumradius_sq_gradient(&points[t[0]], &points[t[1]], &points[t[2]]);
                vec![(t[0], g[0]), (t[1], g[1]), (t[2], g[2])]
            }
            (_, Provenance::Inherited(coface)) => self.value_gradient_sparse(points, coface),
        }
    }

    /// Build the filtration of distinct points (not re-validated).
    pub(crate) fn from_points(points: &[Point]) -> Filtration {
        let tri = delaunay_complex(points);
        let n = points.len();
        let m = tri.edges.len();
        let mut simplices = Vec::with_capacity(n + m + tri.triangles.len());
        simplices.extend((0..n).map(Simplex::Vertex));
        simplices.extend(tri.edges.iter().map(|&e| Simplex::Edge(e)));
        simplices.extend(tri.triangles.iter().map(|&t| Simplex::Triangle(t)));

        let mut values = vec![0.0; simplices.len()];
        let mut provenance = vec![Provenance::Gabriel; simplices.len()];
        let mut cofaces: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m];
        let mut partial = Filtration { simplices, values: Vec::new(), provenance: Vec::new(), order: Vec::new(), num_vertices: n, num_edges: m };
        for (k, t) in tri.triangles.iter().enumerate() {
            let idx = n + m + k;
            values[idx] = circumradius_sq(&points[t[0]], &points[t[1]], &points[t[2]]);
            for (e, opp) in [([t[0], t[1]], t[2]), ([t[0], t[2]], t[1]), ([t[1], t[2]], t[0])] {
                let ei = partial.edge_index(e[0], e[1]).expect("triangle edge");
                cofaces[ei - n].push((idx, opp));
            }
        }
        for (k, e) in tri.edges.iter().enumerate() {
            let idx = n + k;
            let (u, v) = (&points[e[0]], &points[e[1]]);
            let gabriel = cofaces[k].iter().all(|&(_, w)| {
                let w = &points[w];
                (u[0] - w[0]) * (v[0] - w[0]) + (u[1] - w[1]) * (v[1] - w[1]) >= 0.0
            });
            if gabriel {
                let dx = u[0] - v[0];
                let dy = u[1] - v[1];
                values[idx] = (dx * dx + dy * dy) / 4.0;
            } else {
                let &(best, _) =
                    cofaces[k].iter().min_by(|a, b| values[a.0].total_cmp(&values[b.0]).then(a.0.cmp(&b.0))).expect("non-Gabriel edge has a coface");
                values[idx] = values[best];
                provenance[idx] = Provenance::Inherited(best);
            }
        }

        let mut order: Vec<usize> = (0..partial.simplices.len()).collect();
        order.sort_by(|&a, &b| {
            values[a]
                .total_cmp(&values[b])
                .then(partial.simplices[a].dimension().cmp(&partial.simplices[b].dimension()))
                .then(partial.simplices[a].vertices().cmp(partial.simplices[b].vertices()))
        });
        partial.values = values;
        partial.provenance = provenance;
        partial.order = order;
        partial
    }
}

/// Alpha filtration of a validated point cloud.
///
/// Degenerate inputs are accepted: one point gives a single vertex, collinear
/// points give a path of Gabriel edges.
pub fn alpha_filtration(cloud: &PointCloud) -> Result<Filtration> {
    if cloud.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    Ok(Filtration::from_points(cloud.points()))
}

/// Gradient of the value of simplex `index` with respect to every point.
pub fn alpha_value_gradient(cloud: &PointCloud, filtration: &Filtration, index: usize) -> Result<Vec<[f64; 2]>> {
    if index >= filtration.len() {
        return Err(Error::SimplexOutOfRange { index, len: filtration.len() });
    }
    let mut grad = vec![[0.0; 2]; cloud.len()];
    for (p, g) in filtration.value_gradient_sparse(cloud.points(), index) {
        grad[p][0] += g[0];
        grad[p][1] += g[1];
    }
    Ok(grad)
}

fn sq_dist(a: &Point, b: &Point) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

/// Twice the signed area of `abc`.
fn cross(a: &Point, b: &Point, c: &Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Squared circumradius `|ab|^2 |bc|^2 |ca|^2 / (4 D^2)` with `D` twice the
/// signed area.
pub fn circumradius_sq(a: &Point, b: &Point, c: &Point) -> f64 {
    let d = cross(a, b, c);
    sq_dist(a, b) * sq_dist(b, c) * sq_dist(c, a) / (4.0 * d * d)
}

/// Gradient of [`circumradius_sq`] with respect to `a`, `b` and `c`.
pub fn circumradius_sq_gradient(a: &Point, b: &Point, c: &Point) -> [[f64; 2]; 3] {
    let r2 = circumradius_sq(a, b, c);
    let d = cross(a, b, c);
    let (lab, lbc, lca) = (sq_dist(a, b), sq_dist(b, c), sq_dist(c, a));
    let dd = [[b[1] - c[1], c[0] - b[0]], [c[1] - a[1], a[0] - c[0]], [a[1] - b[1], b[0] - a[0]]];
    let pts = [a, b, c];
    let mut out = [[0.0; 2]; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let p = pts[k];
        let (q, lq) = match k {
            0 => ((b, lab), (c, lca)),
            1 => ((c, lbc), (a, lab)),
            _ => ((a, lca), (b, lbc)),
        };
        for axis in 0..2 {
            let t1 = 2.0 * (p[axis] - q.0[axis]) / q.1;
            let t2 = 2.0 * (p[axis] - lq.0[axis]) / lq.1;
            o[axis] = r2 * (t1 + t2 - 2.0 * dd[k][axis] / d);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn filt(p: Vec<Point>) -> (PointCloud, Filtration) {
        let c = PointCloud::new(p).unwrap();
        let f = alpha_filtration(&c).unwrap();
        (c, f)
    }

    #[test]
    fn equilateral_values() {
        let h = libm::sqrt(3.0) / 2.0;
        let (_, f) = filt(vec![[0.0, 0.0], [1.0, 0.0], [0.5, h]]);
        for i in 3..6 {
            assert!((f.values()[i] - 0.25).abs() < 1e-15);
        }
        assert!((f.values()[6] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn two_points_single_edge() {
        let (_, f) = filt(vec![[0.0, 0.0], [2.0, 0.0]]);
        assert_eq!(f.simplices(), &[Simplex::Vertex(0), Simplex::Vertex(1), Simplex::Edge([0, 1])]);
        assert_eq!(f.values()[2], 1.0);
    }

    #[test]
    fn obtuse_edge_inherits_triangle_value() {
        let (_, f) = filt(vec![[0.0, 0.0], [2.0, 0.0], [1.0, 0.5]]);
        let long = f.edge_index(0, 1).unwrap();
        assert_eq!(f.provenance()[long], Provenance::Inherited(6));
        assert!((f.values()[long] - 1.5625).abs() < 1e-12);
        assert!((f.values()[6] - 1.5625).abs() < 1e-12);
        // Circumcenter (1, -0.75) is equidistant from all three vertices.
        for p in [[0.0, 0.0], [2.0, 0.0], [1.0, 0.5]] {
            let r2: f64 = (p[0] - 1.0) * (p[0] - 1.0) + (p[1] + 0.75) * (p[1] + 0.75);
            assert!((r2 - 1.5625).abs() < 1e-12);
        }
    }

    #[test]
    fn right_angle_opposite_vertex_counts_as_gabriel() {
        let (_, f) = filt(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        let diag = f.edge_index(0, 2).unwrap();
        assert_eq!(f.provenance()[diag], Provenance::Gabriel);
        assert_eq!(f.values()[diag], 0.5);
    }

    #[test]
    fn edge_gradient_and_vertex_gradient() {
        let (c, f) = filt(vec![[0.0, 0.0], [2.0, 0.0]]);
        assert_eq!(alpha_value_gradient(&c, &f, 2).unwrap(), vec![[-1.0, 0.0], [1.0, 0.0]]);
        assert_eq!(alpha_value_gradient(&c, &f, 0).unwrap(), vec![[0.0, 0.0], [0.0, 0.0]]);
        assert_eq!(alpha_value_gradient(&c, &f, 3), Err(Error::SimplexOutOfRange { index: 3, len: 3 }));
    }

    #[test]
    fn order_sorts_by_value_then_dimension() {
        let (_, f) = filt(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        let vals: Vec<f64> = f.order().iter().map(|&i| f.values()[i]).collect();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        // Diagonal (edge) precedes the two triangles at the same value.
        let pos_diag = f.order().iter().position(|&i| i == f.edge_index(0, 2).unwrap()).unwrap();
        assert!(f.order()[pos_diag + 1..].iter().all(|&i| f.simplices()[i].dimension() == 2));
    }
}
