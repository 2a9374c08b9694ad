//! Seeded synthetic datasets.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use toporeg_core::geometry::Point;
use toporeg_core::RngKey;

use crate::error::{Error, Result};

/// Points on the unit circle in the first two coordinates, lifted with
/// uniform noise in the remaining ones.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleData {
    pub data: DMatrix<f64>,
    /// Ground-truth angle of each row, in `[0, 2 pi)`.
    pub angles: Vec<f64>,
}

pub fn generate_circle(n: usize, ambient_dim: usize, noise_half_width: f64, seed: u64) -> Result<CircleData> {
    if n < 3 || ambient_dim < 2 {
        return Err(Error::BadDimensions(format!("circle needs n >= 3 and ambient_dim >= 2, got {n} x {ambient_dim}")));
    }
    check_noise(noise_half_width)?;
    let mut rng = RngKey::new(seed).rng();
    let angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
    let mut data = DMatrix::zeros(n, ambient_dim);
    for (r, a) in angles.iter().enumerate() {
        data[(r, 0)] = a.cos();
        data[(r, 1)] = a.sin();
        fill_noise(&mut data, r, noise_half_width, &mut rng);
    }
    Ok(CircleData { data, angles })
}

/// Planar points with integer labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoints {
    pub points: Vec<Point>,
    pub labels: Vec<usize>,
}

/// Isotropic Gaussian blobs of `points_per_cluster` points around each
/// center, labeled by center index. A zero spread yields coincident points,
/// which point-cloud validation later rejects.
pub fn generate_clusters(centers: &[Point], points_per_cluster: usize, spread: f64, seed: u64) -> Result<LabeledPoints> {
    if centers.is_empty() {
        return Err(Error::BadDimensions("at least one center is required".into()));
    }
    let normal = Normal::new(0.0, spread).map_err(|e| Error::BadDimensions(format!("spread {spread}: {e}")))?;
    let mut rng = RngKey::new(seed).rng();
    let mut points = Vec::with_capacity(centers.len() * points_per_cluster);
    let mut labels = Vec::with_capacity(points.capacity());
    for (label, c) in centers.iter().enumerate() {
        for _ in 0..points_per_cluster {
            points.push([c[0] + normal.sample(&mut rng), c[1] + normal.sample(&mut rng)]);
            labels.push(label);
        }
    }
    Ok(LabeledPoints { points, labels })
}

/// Corners of a square of side 4 centered at the origin.
pub const FOUR_CORNERS: [Point; 4] = [[-2.0, -2.0], [2.0, -2.0], [2.0, 2.0], [-2.0, 2.0]];

/// Label of the junction row in [`generate_bifurcation`].
pub const JUNCTION: usize = 3;

/// A planar 'Y': three unit arms at 90, 210 and 330 degrees sharing the
/// origin, with `arm_length_points` evenly spaced points per arm (labels 0, 1
/// and 2) plus the junction itself (label 3). Coordinates beyond the first
/// two are uniform noise.
#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationData {
    pub data: DMatrix<f64>,
    pub labels: Vec<usize>,
}

pub fn generate_bifurcation(arm_length_points: usize, ambient_dim: usize, noise_half_width: f64, seed: u64) -> Result<BifurcationData> {
    if arm_length_points == 0 || ambient_dim < 2 {
        return Err(Error::BadDimensions(format!(
            "bifurcation needs arm_length_points >= 1 and ambient_dim >= 2, got {arm_length_points} x {ambient_dim}"
        )));
    }
    check_noise(noise_half_width)?;
    let n = 3 * arm_length_points + 1;
    let mut rng = RngKey::new(seed).rng();
    let mut data = DMatrix::zeros(n, ambient_dim);
    let mut labels = Vec::with_capacity(n);
    let mut row = 0;
    for arm in 0..3 {
        let angle = (90.0 + 120.0 * arm as f64).to_radians();
        for step in 1..=arm_length_points {
            let r = step as f64 / arm_length_points as f64;
            data[(row, 0)] = r * angle.cos();
            data[(row, 1)] = r * angle.sin();
            labels.push(arm);
            row += 1;
        }
    }
    labels.push(JUNCTION);
    for r in 0..n {
        fill_noise(&mut data, r, noise_half_width, &mut rng);
    }
    Ok(BifurcationData { data, labels })
}

fn check_noise(half_width: f64) -> Result<()> {
    if half_width >= 0.0 && half_width.is_finite() {
        Ok(())
    } else {
        Err(Error::BadDimensions(format!("noise half width must be finite and >= 0, got {half_width}")))
    }
}

fn fill_noise(data: &mut DMatrix<f64>, row: usize, half_width: f64, rng: &mut impl Rng) {
    for c in 2..data.ncols() {
        data[(row, c)] = if half_width > 0.0 { rng.random_range(-half_width..=half_width) } else { 0.0 };
    }
}
