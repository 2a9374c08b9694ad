//! Circular pseudotime from the most persistent cycle of an embedding, and
//! metrics for comparing embeddings with ground truth.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::geometry::{alpha_filtration, Point, PointCloud};
use crate::persistence::{compute_persistence, representative_cycle};
use crate::{Error, Result};

/// Where one point lands on the loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopPosition {
    /// Segment `s` joins anchors `s` and `s + 1` (cyclically).
    pub segment: usize,
    /// Position along the segment, in `[0, 1]`.
    pub t: f64,
    pub point: Point,
    /// Distance along the loop from its first anchor, in `[0, length)`.
    pub arc_position: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleProjection {
    /// Input indices of the anchors, in loop order.
    pub anchor_ids: Vec<usize>,
    pub anchors: Vec<Point>,
    pub positions: Vec<LoopPosition>,
    pub length: f64,
}

impl CycleProjection {
    /// Angles `2 pi * arc_position / length`, in `[0, 2 pi)`.
    pub fn pseudotimes(&self) -> Vec<f64> {
        self.positions
            .iter()
            .map(|p| {
                let angle = TAU * p.arc_position / self.length;
                if angle >= TAU {
                    0.0
                } else {
                    angle
                }
            })
            .collect()
    }
}

/// Twice the signed area of the polygon through `anchors`.
fn signed_area2(anchors: &[Point]) -> f64 {
    let k = anchors.len();
    (0..k)
        .map(|s| {
            let p = anchors[s];
            let q = anchors[(s + 1) % k];
            p[0] * q[1] - q[0] * p[1]
        })
        .sum()
}

/// Orthogonal projection of every point onto the closed polyline through
/// `anchor_ids`. Each point goes to the nearest segment, ties going to the
/// lower segment index.
pub fn project_onto_loop(points: &[Point], anchor_ids: &[usize]) -> Result<CycleProjection> {
    if anchor_ids.len() < 3 {
        return Err(Error::NotALoop);
    }
    if let Some(&index) = anchor_ids.iter().find(|&&i| i >= points.len()) {
        return Err(Error::SimplexOutOfRange { index, len: points.len() });
    }
    let anchors: Vec<Point> = anchor_ids.iter().map(|&i| points[i]).collect();
    let k = anchors.len();
    let lengths: Vec<f64> = (0..k).map(|s| dist(&anchors[s], &anchors[(s + 1) % k])).collect();
    let mut offsets = vec![0.0; k];
    for s in 1..k {
        offsets[s] = offsets[s - 1] + lengths[s - 1];
    }
    let length = offsets[k - 1] + lengths[k - 1];
    if !(length > 0.0) {
        return Err(Error::NotALoop);
    }
    let positions = points
        .iter()
        .map(|x| {
            let mut best: Option<(f64, LoopPosition)> = None;
            for s in 0..k {
                let a = anchors[s];
                let b = anchors[(s + 1) % k];
                let ab = [b[0] - a[0], b[1] - a[1]];
                let len2 = ab[0] * ab[0] + ab[1] * ab[1];
                let t = if len2 > 0.0 { (((x[0] - a[0]) * ab[0] + (x[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
                let point = [a[0] + t * ab[0], a[1] + t * ab[1]];
                let d = dist(x, &point);
                if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                    let mut arc = offsets[s] + t * lengths[s];
                    if arc >= length {
                        arc = 0.0;
                    }
                    best = Some((d, LoopPosition { segment: s, t, point, arc_position: arc }));
                }
            }
            best.expect("loop has segments").1
        })
        .collect();
    Ok(CycleProjection { anchor_ids: anchor_ids.to_vec(), anchors, positions, length })
}

/// Projection onto the representative loop of the most persistent
/// 1-dimensional pair, oriented counterclockwise and starting at its lowest
/// point index.
pub fn cycle_projection(cloud: &PointCloud) -> Result<CycleProjection> {
    let filtration = alpha_filtration(cloud)?;
    let persistence = compute_persistence(&filtration, 1);
    let diagram = persistence.diagram(1);
    if diagram.is_empty() {
        return Err(Error::NoCycle);
    }
    let mut ids = representative_cycle(&filtration, diagram, 0)?;
    let anchors: Vec<Point> = ids.iter().map(|&i| cloud.points()[i]).collect();
    if signed_area2(&anchors) < 0.0 {
        ids[1..].reverse();
    }
    project_onto_loop(cloud.points(), &ids)
}

/// Circular pseudotime in `[0, 2 pi)` for every point of `embedding`.
pub fn infer_pseudotime(embedding: &PointCloud) -> Result<Vec<f64>> {
    Ok(cycle_projection(embedding)?.pseudotimes())
}

/// Fisher-Lee circular correlation coefficient of two angle samples.
pub fn circular_correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.len() < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: a.len() });
    }
    let (mut num, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let sa = libm::sin(a[i] - a[j]);
            let sb = libm::sin(b[i] - b[j]);
            num += sa * sb;
            saa += sa * sa;
            sbb += sb * sb;
        }
    }
    let den = libm::sqrt(saa * sbb);
    Ok(if den > 0.0 { (num / den).clamp(-1.0, 1.0) } else { 0.0 })
}

/// Mean distance between differently labeled points divided by the mean
/// distance between equally labeled points.
pub fn community_separation(points: &[Point], labels: &[usize]) -> Result<f64> {
    if points.len() != labels.len() {
        return Err(Error::LengthMismatch { left: points.len(), right: labels.len() });
    }
    let mut counts: Vec<usize> = Vec::new();
    for &l in labels {
        if l >= counts.len() {
            counts.resize(l + 1, 0);
        }
        counts[l] += 1;
    }
    let present: Vec<usize> = counts.iter().copied().filter(|&c| c > 0).collect();
    if present.len() < 2 || present.iter().any(|&c| c < 2) {
        return Err(Error::SingleLabel);
    }
    let (mut inter, mut n_inter, mut intra, mut n_intra) = (0.0, 0usize, 0.0, 0usize);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = dist(&points[i], &points[j]);
            if labels[i] == labels[j] {
                intra += d;
                n_intra += 1;
            } else {
                inter += d;
                n_inter += 1;
            }
        }
    }
    let intra = intra / n_intra as f64;
    if !(intra > 0.0) {
        return Err(Error::DegenerateCloud);
    }
    Ok(inter / n_inter as f64 / intra)
}

/// Deterministic 2-means clustering. The first center is the point farthest
/// from the centroid and the second the point farthest from the first; Lloyd
/// iterations run until the assignment is stable. Point 0 always gets label 0.
pub fn two_means(points: &[Point]) -> Result<Vec<usize>> {
    let n = points.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let centroid = mean(points.iter());
    let farthest = |from: &Point| {
        let mut best = 0;
        for i in 1..n {
            if dist(&points[i], from) > dist(&points[best], from) {
                best = i;
            }
        }
        best
    };
    let c0 = farthest(&centroid);
    let mut centers = [points[c0], points[farthest(&points[c0])]];
    if dist(&centers[0], &centers[1]) == 0.0 {
        return Err(Error::DegenerateCloud);
    }
    let mut labels = vec![usize::MAX; n];
    for _ in 0..1000 {
        let next: Vec<usize> = points.iter().map(|p| usize::from(dist(p, &centers[1]) < dist(p, &centers[0]))).collect();
        if next == labels {
            break;
        }
        labels = next;
        for (c, center) in centers.iter_mut().enumerate() {
            let members = points.iter().zip(&labels).filter(|(_, &l)| l == c).map(|(p, _)| p);
            if labels.contains(&c) {
                *center = mean(members);
            }
        }
    }
    if labels[0] == 1 {
        labels.iter_mut().for_each(|l| *l = 1 - *l);
    }
    Ok(labels)
}

/// Fraction of points on which two binary labelings agree, maximized over
/// swapping the labels of one of them.
pub fn binary_agreement(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let same = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / a.len() as f64;
    Ok(same.max(1.0 - same))
}

fn mean<'a>(points: impl Iterator<Item = &'a Point>) -> Point {
    let (mut s, mut k) = ([0.0, 0.0], 0usize);
    for p in points {
        s[0] += p[0];
        s[1] += p[1];
        k += 1;
    }
    [s[0] / k as f64, s[1] / k as f64]
}

fn dist(p: &Point, q: &Point) -> f64 {
    libm::hypot(p[0] - q[0], p[1] - q[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_loop_pseudotimes() {
        let pts = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let proj = cycle_projection(&PointCloud::new(pts).unwrap()).unwrap();
        assert_eq!(proj.anchor_ids, vec![0, 1, 2, 3]);
        assert_eq!(proj.length, 4.0);
        let t = proj.pseudotimes();
        for (i, v) in t.iter().enumerate() {
            assert!((v - TAU * i as f64 / 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn clockwise_loop_is_reoriented() {
        let pts = vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]];
        let proj = cycle_projection(&PointCloud::new(pts).unwrap()).unwrap();
        assert_eq!(proj.anchor_ids, vec![0, 3, 2, 1]);
    }

    #[test]
    fn center_goes_to_first_segment_midpoint() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]];
        let proj = project_onto_loop(&pts, &[0, 1, 2, 3]).unwrap();
        let c = proj.positions[4];
        assert_eq!(c.segment, 0);
        assert_eq!(c.point, [0.5, 0.0]);
        assert!((proj.pseudotimes()[4] - TAU / 8.0).abs() < 1e-12);
    }

    #[test]
    fn no_cycle_in_obtuse_triangle() {
        let cloud = PointCloud::new(vec![[0.0, 0.0], [2.0, 0.0], [1.0, 0.5]]).unwrap();
        assert_eq!(infer_pseudotime(&cloud), Err(Error::NoCycle));
    }

    #[test]
    fn correlation_identities() {
        let a = [0.1, 1.0, 2.5, 4.0, 5.5];
        let shifted: Vec<f64> = a.iter().map(|x| (x + 2.0) % TAU).collect();
        let reflected: Vec<f64> = a.iter().map(|x| (TAU - x) % TAU).collect();
        assert!((circular_correlation(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        assert!((circular_correlation(&a, &shifted).unwrap() - 1.0).abs() < 1e-12);
        assert!((circular_correlation(&a, &reflected).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(circular_correlation(&a, &a[..4]), Err(Error::LengthMismatch { left: 5, right: 4 }));
    }

    #[test]
    fn separation_and_two_means() {
        let pts = [[0.0, 0.0], [0.1, 0.0], [10.0, 0.0], [10.1, 0.0]];
        let labels = [0, 0, 1, 1];
        assert!(community_separation(&pts, &labels).unwrap() > 50.0);
        assert_eq!(community_separation(&pts, &[0, 0, 0, 1]), Err(Error::SingleLabel));
        assert_eq!(community_separation(&pts, &[0, 0, 0, 0]), Err(Error::SingleLabel));
        assert_eq!(two_means(&pts).unwrap(), vec![0, 0, 1, 1]);
        assert_eq!(binary_agreement(&[0, 0, 1, 1], &[1, 1, 0, 0]).unwrap(), 1.0);
    }
}
