//! Planar point clouds, Delaunay triangulation and alpha filtrations.

mod alpha;
mod delaunay;

use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

pub use alpha::{alpha_filtration, alpha_value_gradient, circumradius_sq, circumradius_sq_gradient, Filtration, Provenance};
pub(crate) use delaunay::delaunay_complex;
pub use delaunay::{delaunay, Triangulation};

/// Two points closer than this are considered the same point.
pub const DUPLICATE_TOLERANCE: f64 = 1e-12;

pub type Point = [f64; 2];

/// An ordered set of distinct, finite points in the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Point>,
    ids: Option<Vec<String>>,
}

impl PointCloud {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        Self::with_ids(points, None)
    }

    pub fn with_ids(points: Vec<Point>, ids: Option<Vec<String>>) -> Result<Self> {
        if let Some(ids) = &ids {
            if ids.len() != points.len() {
                return Err(Error::IdsLengthMismatch { ids: ids.len(), points: points.len() });
            }
        }
        for (i, p) in points.iter().enumerate() {
            if !p[0].is_finite() || !p[1].is_finite() {
                return Err(Error::NonFiniteCoordinate { index: i });
            }
        }
        if let Some((first, second)) = first_duplicate(&points) {
            return Err(Error::DuplicatePoints { first, second });
        }
        Ok(PointCloud { points, ids })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn ids(&self) -> Option<&[String]> {
        self.ids.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }
}

/// A simplex of dimension 0, 1 or 2 given by strictly increasing vertex indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Simplex {
    Vertex(usize),
    Edge([usize; 2]),
    Triangle([usize; 3]),
}

impl Simplex {
    pub fn dimension(&self) -> usize {
        match self {
            Simplex::Vertex(_) => 0,
            Simplex::Edge(_) => 1,
            Simplex::Triangle(_) => 2,
        }
    }

    pub fn vertices(&self) -> &[usize] {
        match self {
            Simplex::Vertex(v) => core::slice::from_ref(v),
            Simplex::Edge(e) => e,
            Simplex::Triangle(t) => t,
        }
    }
}

fn lex_cmp(a: &Point, b: &Point) -> core::cmp::Ordering {
    a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1]))
}

/// Indices sorted lexicographically by coordinates.
pub(crate) fn lex_order(points: &[Point]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| lex_cmp(&points[a], &points[b]).then(a.cmp(&b)));
    order
}

fn within_tolerance(a: &Point, b: &Point) -> bool {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy <= DUPLICATE_TOLERANCE * DUPLICATE_TOLERANCE
}

/// For every point, the lowest index among the points it is chained to by
/// coincidences within [`DUPLICATE_TOLERANCE`].
pub(crate) fn duplicate_representatives(points: &[Point]) -> Vec<usize> {
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let order = lex_order(points);
    let mut parent: Vec<usize> = (0..points.len()).collect();
    for (k, &i) in order.iter().enumerate() {
        for &j in order[..k].iter().rev() {
            if points[i][0] - points[j][0] > DUPLICATE_TOLERANCE {
                break;
            }
            if within_tolerance(&points[i], &points[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    (0..points.len()).map(|i| find(&mut parent, i)).collect()
}

fn first_duplicate(points: &[Point]) -> Option<(usize, usize)> {
    let order = lex_order(points);
    let mut best: Option<(usize, usize)> = None;
    for (k, &i) in order.iter().enumerate() {
        for &j in order[..k].iter().rev() {
            if points[i][0] - points[j][0] > DUPLICATE_TOLERANCE {
                break;
            }
            if within_tolerance(&points[i], &points[j]) {
                let pair = (i.min(j), i.max(j));
                if best.is_none_or(|b| pair < b) {
                    best = Some(pair);
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_duplicates_and_non_finite() {
        assert_eq!(PointCloud::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 5e-13]]), Err(Error::DuplicatePoints { first: 0, second: 2 }));
        assert_eq!(PointCloud::new(vec![[0.0, f64::NAN]]), Err(Error::NonFiniteCoordinate { index: 0 }));
        assert!(PointCloud::new(vec![[0.0, 0.0], [0.0, 2e-12]]).is_ok());
    }

    #[test]
    fn ids_must_match() {
        let r = PointCloud::with_ids(vec![[0.0, 0.0]], Some(vec![]));
        assert_eq!(r, Err(Error::IdsLengthMismatch { ids: 0, points: 1 }));
    }

    #[test]
    fn representatives_group_coincident_points() {
        let pts = vec![[1.0, 1.0], [0.0, 0.0], [1.0, 1.0], [0.0, 0.0], [2.0, 0.0]];
        assert_eq!(duplicate_representatives(&pts), vec![0, 1, 0, 1, 4]);
    }
}
