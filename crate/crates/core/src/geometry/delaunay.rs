//! Sweep triangulation followed by Lawson flips.
//!
//! Points are inserted in lexicographic order, so every new point lies
//! strictly outside the current hull and is connected to the visible hull
//! edges. Non-Delaunay edges are then flipped. Orientation and in-circle
//! tests are exact (adaptive precision). When four points are cocircular the
//! diagonal touching the lowest vertex index is kept; this is the symbolic
//! perturbation that lowers each point's lift by an amount decreasing with its
//! index, so the flip sequence terminates and the result is unique.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use robust::Coord;

use super::{lex_order, Point, PointCloud};
use crate::{Error, Result};

/// Edges and triangles of a planar triangulation, each with sorted vertices,
/// listed in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangulation {
    pub edges: Vec<[usize; 2]>,
    pub triangles: Vec<[usize; 3]>,
}

fn coord(p: &Point) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

pub(crate) fn orient(a: &Point, b: &Point, c: &Point) -> f64 {
    robust::orient2d(coord(a), coord(b), coord(c))
}

fn incircle(a: &Point, b: &Point, c: &Point, d: &Point) -> f64 {
    robust::incircle(coord(a), coord(b), coord(c), coord(d))
}

/// Delaunay triangulation of a cloud with at least three non-collinear points.
pub fn delaunay(cloud: &PointCloud) -> Result<Triangulation> {
    if cloud.len() < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: cloud.len() });
    }
    let tri = delaunay_complex(cloud.points());
    if tri.triangles.is_empty() {
        return Err(Error::AllCollinear);
    }
    Ok(tri)
}

/// Delaunay complex of distinct points, including the degenerate cases: a
/// single point, or collinear points joined into a path.
pub(crate) fn delaunay_complex(points: &[Point]) -> Triangulation {
    let scaled = normalize_magnitude(points);
    let points = &scaled[..];
    let n = points.len();
    let order = lex_order(points);
    if n < 2 {
        return Triangulation { edges: Vec::new(), triangles: Vec::new() };
    }
    let first_off_line = (2..n).find(|&k| orient(&points[order[0]], &points[order[1]], &points[order[k]]) != 0.0);
    let Some(k) = first_off_line else {
        let mut edges: Vec<[usize; 2]> = order.windows(2).map(|w| sorted2(w[0], w[1])).collect();
        edges.sort_unstable();
        return Triangulation { edges, triangles: Vec::new() };
    };

    let mut mesh = Mesh::default();
    let apex = order[k];
    let line = &order[..k];
    let left = orient(&points[line[0]], &points[line[1]], &points[apex]) > 0.0;
    for w in line.windows(2) {
        if left {
            mesh.push([w[0], w[1], apex]);
        } else {
            mesh.push([w[1], w[0], apex]);
        }
    }
    // Hull as a counter-clockwise vertex cycle.
    let mut hull: Vec<usize> = if left {
        line.iter().copied().chain(core::iter::once(apex)).collect()
    } else {
        core::iter::once(line[0]).chain(core::iter::once(apex)).chain(line[1..].iter().rev().copied()).collect()
    };

    for &p in &order[k + 1..] {
        let h = hull.len();
        let visible: Vec<bool> = (0..h).map(|i| orient(&points[hull[i]], &points[hull[(i + 1) % h]], &points[p]) < 0.0).collect();
        // The visible edges form one contiguous run; find where it starts.
        let start = (0..h).find(|&i| visible[i] && !visible[(i + h - 1) % h]).expect("new point sees the hull");
        let mut count = 0;
        while visible[(start + count) % h] {
            let a = hull[(start + count) % h];
            let b = hull[(start + count + 1) % h];
            mesh.push([b, a, p]);
            count += 1;
        }
        // Replace the interior vertices of the visible chain by p.
        let mut next = Vec::with_capacity(h + 1);
        for off in 0..h {
            let idx = (start + count + off) % h;
            next.push(hull[idx]);
            if off == h - count {
                break;
            }
        }
        next.push(p);
        hull = next;
    }

    mesh.legalize(points);
    mesh.into_triangulation()
}

/// Rescales by a power of two so the largest coordinate magnitude is about
/// one. The scaling is exact and keeps the predicates free of overflow and
/// underflow for very large or very small inputs.
fn normalize_magnitude(points: &[Point]) -> Vec<Point> {
    let max = points.iter().flat_map(|p| p.iter()).fold(0.0_f64, |m, v| m.max(v.abs()));
    if !(max > 0.0) || !max.is_finite() {
        return points.to_vec();
    }
    let (_, exp) = libm::frexp(max);
    let factor = libm::ldexp(1.0, -exp);
    points.iter().map(|p| [p[0] * factor, p[1] * factor]).collect()
}

fn sorted2(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

const NONE: usize = usize::MAX;

#[derive(Default)]
struct Mesh {
    /// Counter-clockwise triangles.
    tris: Vec<[usize; 3]>,
    /// Undirected edge to its (up to two) incident triangles.
    edges: BTreeMap<[usize; 2], [usize; 2]>,
}

impl Mesh {
    fn push(&mut self, t: [usize; 3]) {
        let id = self.tris.len();
        self.tris.push(t);
        for e in 0..3 {
            self.attach(sorted2(t[e], t[(e + 1) % 3]), id);
        }
    }

    fn attach(&mut self, key: [usize; 2], id: usize) {
        let slot = self.edges.entry(key).or_insert([NONE, NONE]);
        if slot[0] == NONE {
            slot[0] = id;
        } else {
            debug_assert_eq!(slot[1], NONE);
            slot[1] = id;
        }
    }

    fn replace(&mut self, key: [usize; 2], old: usize, new: usize) {
        let slot = self.edges.get_mut(&key).expect("edge present");
        if slot[0] == old {
            slot[0] = new;
        } else {
            debug_assert_eq!(slot[1], old);
            slot[1] = new;
        }
    }

    /// Vertex of triangle `t` opposite its directed edge `a -> b`.
    fn opposite(&self, t: usize, a: usize, b: usize) -> usize {
        let tri = self.tris[t];
        for r in 0..3 {
            if tri[r] == a && tri[(r + 1) % 3] == b {
                return tri[(r + 2) % 3];
            }
        }
        unreachable!("triangle does not contain the directed edge")
    }

    fn has_directed(&self, t: usize, a: usize, b: usize) -> bool {
        let tri = self.tris[t];
        (0..3).any(|r| tri[r] == a && tri[(r + 1) % 3] == b)
    }

    fn legalize(&mut self, points: &[Point]) {
        let mut stack: Vec<[usize; 2]> = self.edges.keys().copied().collect();
        while let Some(key) = stack.pop() {
            let Some(&[t1, t2]) = self.edges.get(&key) else { continue };
            if t2 == NONE {
                continue;
            }
            // Orient so that t1 holds a -> b and t2 holds b -> a.
            let (mut a, mut b) = (key[0], key[1]);
            if !self.has_directed(t1, a, b) {
                core::mem::swap(&mut a, &mut b);
            }
            let c = self.opposite(t1, a, b);
            let d = self.opposite(t2, b, a);
            let det = incircle(&points[a], &points[b], &points[c], &points[d]);
            let flip = if det > 0.0 {
                true
            } else if det < 0.0 {
                false
            } else {
                let lowest = a.min(b).min(c).min(d);
                lowest == c || lowest == d
            };
            if !flip {
                continue;
            }
            // Quad a, d, b, c is counter-clockwise; new diagonal c-d.
            self.tris[t1] = [a, d, c];
            self.tris[t2] = [d, b, c];
            self.edges.remove(&key);
            self.edges.insert(sorted2(c, d), [t1, t2]);
            self.replace(sorted2(a, d), t2, t1);
            self.replace(sorted2(b, c), t1, t2);
            stack.extend([sorted2(a, d), sorted2(d, b), sorted2(b, c), sorted2(c, a)]);
        }
    }

    fn into_triangulation(self) -> Triangulation {
        let edges: Vec<[usize; 2]> = self.edges.keys().copied().collect();
        let mut triangles: Vec<[usize; 3]> = self
            .tris
            .into_iter()
            .map(|mut t| {
                t.sort_unstable();
                t
            })
            .collect();
        triangles.sort_unstable();
        Triangulation { edges, triangles }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn cloud(p: Vec<Point>) -> PointCloud {
        PointCloud::new(p).unwrap()
    }

    #[test]
    fn equilateral_triangle() {
        let h = libm::sqrt(3.0) / 2.0;
        let t = delaunay(&cloud(vec![[0.0, 0.0], [1.0, 0.0], [0.5, h]])).unwrap();
        assert_eq!(t.triangles, vec![[0, 1, 2]]);
        assert_eq!(t.edges, vec![[0, 1], [0, 2], [1, 2]]);
    }

    #[test]
    fn unit_square_keeps_diagonal_through_vertex_zero() {
        let t = delaunay(&cloud(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])).unwrap();
        assert_eq!(t.triangles, vec![[0, 1, 2], [0, 2, 3]]);
        // Relabel so that vertex 0 sits on the other diagonal.
        let t = delaunay(&cloud(vec![[1.0, 0.0], [0.0, 0.0], [1.0, 1.0], [0.0, 1.0]])).unwrap();
        assert!(t.edges.contains(&[0, 3]));
        assert!(!t.edges.contains(&[1, 2]));
    }

    #[test]
    fn collinear_input() {
        let c = cloud(vec![[0.0, 0.0], [3.0, 3.0], [1.0, 1.0], [2.0, 2.0]]);
        assert_eq!(delaunay(&c), Err(Error::AllCollinear));
        let t = delaunay_complex(c.points());
        assert_eq!(t.edges, vec![[0, 2], [1, 3], [2, 3]]);
    }

    #[test]
    fn too_few_points() {
        assert_eq!(delaunay(&cloud(vec![[0.0, 0.0], [1.0, 0.0]])), Err(Error::TooFewPoints { needed: 3, got: 2 }));
    }

    #[test]
    fn collinear_prefix_then_apex_below() {
        let t = delaunay(&cloud(vec![[0.0, 0.0], [0.0, 1.0], [0.0, 2.0], [1.0, -5.0]])).unwrap();
        assert_eq!(t.triangles.len(), 2);
        assert_eq!(t.edges.len(), 5);
    }
}
