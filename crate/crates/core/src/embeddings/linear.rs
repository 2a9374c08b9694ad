//! Linear projection `E = X W` trained on reconstruction error with an
//! orthonormality penalty on `W`.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, Matrix2};

use super::{EmbeddingModel, LossGrad};
use crate::geometry::Point;
use crate::rng::RngKey;
use crate::{Error, Result};

/// Below this norm `W^T W - I` is treated as exactly zero and the penalty's
/// subgradient is taken to be zero.
const KINK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrthoNorm {
    #[default]
    Frobenius,
    FrobeniusSquared,
    Spectral,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProjectionModel {
    data: DMatrix<f64>,
    loadings: DMatrix<f64>,
    pub ortho_weight: f64,
    pub ortho_norm: OrthoNorm,
}

impl LinearProjectionModel {
    pub const DEFAULT_ORTHO_WEIGHT: f64 = 1e4;

    pub fn new(data: DMatrix<f64>, loadings: DMatrix<f64>) -> Result<Self> {
        if loadings.ncols() != 2 || loadings.nrows() != data.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "data is {}x{}, loadings are {}x{} (expected {}x2)",
                data.nrows(),
                data.ncols(),
                loadings.nrows(),
                loadings.ncols(),
                data.ncols()
            )));
        }
        Ok(LinearProjectionModel { data, loadings, ortho_weight: Self::DEFAULT_ORTHO_WEIGHT, ortho_norm: OrthoNorm::Frobenius })
    }

    /// Model initialized with the PCA loadings of `data`.
    pub fn from_pca(data: DMatrix<f64>) -> Result<Self> {
        let w = pca_init(&data)?;
        Self::new(data, w)
    }

    pub fn with_ortho(mut self, weight: f64, norm: OrthoNorm) -> Self {
        self.ortho_weight = weight;
        self.ortho_norm = norm;
        self
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn loadings(&self) -> &DMatrix<f64> {
        &self.loadings
    }

    /// Mean squared error of `X W W^T` against `X`, with its gradient.
    pub fn reconstruction(&self) -> (f64, DMatrix<f64>) {
        let x = &self.data;
        let w = &self.loadings;
        let xw = x * w;
        let resid = &xw * w.transpose() - x;
        let count = (x.nrows() * x.ncols()) as f64;
        let value = resid.norm_squared() / count;
        let xt_r = x.transpose() * &resid;
        let grad = (&xt_r * w + xt_r.transpose() * w) * (2.0 / count);
        (value, grad)
    }

    pub fn reconstruction_loss(&self) -> f64 {
        self.reconstruction().0
    }

    /// Unweighted `||W^T W - I||` with its (sub)gradient.
    pub fn orthogonality(&self) -> (f64, DMatrix<f64>) {
        let w = &self.loadings;
        let m: Matrix2<f64> = {
            let g = w.transpose() * w;
            Matrix2::new(g[(0, 0)] - 1.0, g[(0, 1)], g[(1, 0)], g[(1, 1)] - 1.0)
        };
        let zero = DMatrix::zeros(w.nrows(), 2);
        match self.ortho_norm {
            OrthoNorm::Frobenius => {
                let norm = m.norm();
                if norm <= KINK_TOLERANCE {
                    return (norm, zero);
                }
                let dm = DMatrix::from_column_slice(2, 2, (m / norm).as_slice());
                (norm, w * dm * 2.0)
            }
            OrthoNorm::FrobeniusSquared => {
                let norm = m.norm_squared();
                let dm = DMatrix::from_column_slice(2, 2, (m * 2.0).as_slice());
                (norm, w * dm * 2.0)
            }
            OrthoNorm::Spectral => {
                let eig = m.symmetric_eigen();
                let k = if eig.eigenvalues[0].abs() >= eig.eigenvalues[1].abs() { 0 } else { 1 };
                let lambda = eig.eigenvalues[k];
                let norm = lambda.abs();
                if norm <= KINK_TOLERANCE {
                    return (norm, zero);
                }
                let v = eig.eigenvectors.column(k);
                let vvt = v * v.transpose() * lambda.signum();
                let dm = DMatrix::from_column_slice(2, 2, vvt.as_slice());
                (norm, w * dm * 2.0)
            }
        }
    }

    pub fn orthogonality_loss(&self) -> f64 {
        self.orthogonality().0
    }
}

/// Reconstruction error plus weighted orthonormality penalty, with the
/// gradient with respect to `W`.
pub fn linear_loss(model: &LinearProjectionModel) -> (f64, DMatrix<f64>) {
    let (rv, rg) = model.reconstruction();
    let (ov, og) = model.orthogonality();
    (rv + model.ortho_weight * ov, rg + og * model.ortho_weight)
}

impl EmbeddingModel for LinearProjectionModel {
    fn parameters(&self) -> &[f64] {
        self.loadings.as_slice()
    }

    fn parameters_mut(&mut self) -> &mut [f64] {
        self.loadings.as_mut_slice()
    }

    fn embedding(&self) -> Vec<Point> {
        let e = &self.data * &self.loadings;
        (0..e.nrows()).map(|r| [e[(r, 0)], e[(r, 1)]]).collect()
    }

    fn embedding_loss(&self, _key: RngKey) -> Result<LossGrad> {
        let (value, grad) = self.reconstruction();
        Ok(LossGrad { value, grad: grad.as_slice().to_vec() })
    }

    fn penalty(&self) -> Result<Option<LossGrad>> {
        let (value, grad) = self.orthogonality();
        Ok(Some(LossGrad { value: self.ortho_weight * value, grad: (grad * self.ortho_weight).as_slice().to_vec() }))
    }

    fn pullback(&self, grad: &[[f64; 2]]) -> Vec<f64> {
        let g = DMatrix::from_fn(grad.len(), 2, |r, c| grad[r][c]);
        (self.data.transpose() * g).as_slice().to_vec()
    }
}

/// Top two right singular vectors of the column-centered data, each signed so
/// that its largest-magnitude entry is positive.
pub fn pca_init(data: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (n, d) = data.shape();
    if n < 2 || d < 2 {
        return Err(Error::ShapeMismatch(format!("PCA needs at least 2x2 data, got {n}x{d}")));
    }
    let mut centered = data.clone();
    for mut col in centered.column_iter_mut() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
    }
    let svd = centered.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]).then(a.cmp(&b)));
    let s1 = svd.singular_values[idx[0]];
    let s2 = svd.singular_values[idx[1]];
    if !(s1 > 0.0) || s2 <= 1e-10 * s1 {
        return Err(Error::RankDeficient);
    }
    let mut w = DMatrix::zeros(d, 2);
    for (c, &k) in idx[..2].iter().enumerate() {
        let row = v_t.row(k);
        let mut big = 0;
        for f in 0..d {
            if row[f].abs() > row[big].abs() {
                big = f;
            }
        }
        let sign = if row[big] < 0.0 { -1.0 } else { 1.0 };
        for f in 0..d {
            w[(f, c)] = sign * row[f];
        }
    }
    Ok(w)
}

/// Sum of absolute loadings of each feature.
pub fn feature_importance(loadings: &DMatrix<f64>) -> Vec<f64> {
    loadings.row_iter().map(|r| r.iter().map(|v| v.abs()).sum()).collect()
}
