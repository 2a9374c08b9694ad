//! Topological loss functions on planar point clouds.
//!
//! A term sums `mu * (d - b)^p * ((d + b) / 2)^q` over the pairs ranked
//! `i..=j` (1-based, most persistent first) of one persistence diagram,
//! skipping essential pairs. Optionally the cloud is first restricted to the
//! points far from its mean (centrality at most `tau`) and the value is
//! averaged over random subsamples.
//!
//! Gradients are Clarke subgradients: the pair ranking, the subsample and the
//! restricted subset are held fixed, and each birth/death value is
//! differentiated through the simplex that defines it.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;

use crate::geometry::{duplicate_representatives, Filtration, Point};
use crate::persistence::compute_persistence;
use crate::rng::RngKey;
use crate::{Error, Result};

/// Subsampling of the cloud before each evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampling {
    /// Fraction of points per sample, in `(0, 1]`.
    pub fraction: f64,
    /// Number of samples averaged per evaluation.
    pub repeats: usize,
    pub with_replacement: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopoLossTerm {
    /// Homology dimension, 0 or 1.
    pub dim: usize,
    /// First rank included (1-based).
    pub i: usize,
    /// Last rank included; `None` means all remaining pairs.
    pub j: Option<usize>,
    /// `1` penalizes persistence, `-1` rewards it.
    pub mu: i8,
    pub p: f64,
    pub q: f64,
    pub sampling: Option<Sampling>,
    pub functional_tau: Option<f64>,
}

impl TopoLossTerm {
    pub fn new(dim: usize, i: usize, j: Option<usize>, mu: i8) -> Self {
        TopoLossTerm { dim, i, j, mu, p: 1.0, q: 0.0, sampling: None, functional_tau: None }
    }

    pub fn with_exponents(mut self, p: f64, q: f64) -> Self {
        self.p = p;
        self.q = q;
        self
    }

    pub fn with_sampling(mut self, fraction: f64, repeats: usize) -> Self {
        self.sampling = Some(Sampling { fraction, repeats, with_replacement: false });
        self
    }

    pub fn with_replacement(mut self) -> Self {
        if let Some(s) = &mut self.sampling {
            s.with_replacement = true;
        }
        self
    }

    pub fn with_functional(mut self, tau: f64) -> Self {
        self.functional_tau = Some(tau);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidSpec(msg.into()));
        if self.dim > 1 {
            return bad("dim must be 0 or 1");
        }
        if self.i < 1 {
            return bad("i must be at least 1");
        }
        if let Some(j) = self.j {
            if j < self.i {
                return Err(Error::InvalidSpec(format!("j = {} is smaller than i = {}", j, self.i)));
            }
        }
        if self.mu != 1 && self.mu != -1 {
            return bad("mu must be 1 or -1");
        }
        if !(self.p > 0.0 && self.p.is_finite()) {
            return bad("p must be positive");
        }
        if !(self.q >= 0.0 && self.q.is_finite()) {
            return bad("q must be non-negative");
        }
        if let Some(s) = self.sampling {
            if !(s.fraction > 0.0 && s.fraction <= 1.0) {
                return bad("sampling fraction must lie in (0, 1]");
            }
            if s.repeats < 1 {
                return bad("sampling repeats must be at least 1");
            }
        }
        if let Some(tau) = self.functional_tau {
            if !(tau > 0.0 && tau.is_finite()) {
                return bad("tau must be positive");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedTerm {
    pub weight: f64,
    pub term: TopoLossTerm,
}

/// Linear combination of loss terms.
#[derive(Debug, Clone, PartialEq)]
pub struct TopoLossSpec {
    pub terms: Vec<WeightedTerm>,
}

impl TopoLossSpec {
    pub fn single(term: TopoLossTerm) -> Self {
        TopoLossSpec { terms: vec![WeightedTerm { weight: 1.0, term }] }
    }

    pub fn new(terms: Vec<WeightedTerm>) -> Result<Self> {
        let spec = TopoLossSpec { terms };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::InvalidSpec("at least one term is required".into()));
        }
        for t in &self.terms {
            if !t.weight.is_finite() {
                return Err(Error::InvalidSpec("weights must be finite".into()));
            }
            t.term.validate()?;
        }
        Ok(())
    }

    /// Total persistence of regular H0 pairs minus the persistence of the
    /// third H0 pair among points with centrality at most `tau`, both raised
    /// to `p`. Encourages a connected shape with three flares.
    pub fn flare(p: f64, tau: f64) -> Self {
        TopoLossSpec {
            terms: vec![
                WeightedTerm { weight: 1.0, term: TopoLossTerm::new(0, 2, None, 1).with_exponents(p, 0.0) },
                WeightedTerm { weight: 1.0, term: TopoLossTerm::new(0, 3, Some(3), -1).with_exponents(p, 0.0).with_functional(tau) },
            ],
        }
    }
}

fn check_finite(points: &[Point]) -> Result<()> {
    match points.iter().position(|p| !p[0].is_finite() || !p[1].is_finite()) {
        Some(index) => Err(Error::NonFiniteCoordinate { index }),
        None => Ok(()),
    }
}

fn centrality_values(points: &[Point]) -> Result<Vec<f64>> {
    let n = points.len() as f64;
    let mean = points.iter().fold([0.0, 0.0], |acc, p| [acc[0] + p[0] / n, acc[1] + p[1] / n]);
    let dist: Vec<f64> = points.iter().map(|p| libm::hypot(p[0] - mean[0], p[1] - mean[1])).collect();
    let max = dist.iter().copied().fold(0.0, f64::max);
    if !(max > 0.0) {
        return Err(Error::DegenerateCloud);
    }
    Ok(dist.into_iter().map(|d| 1.0 - d / max).collect())
}

/// Scaled centrality `1 - |x - mean| / max_y |y - mean|` of every point.
pub fn centrality(points: &[Point]) -> Result<Vec<f64>> {
    check_finite(points)?;
    if points.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: points.len() });
    }
    centrality_values(points)
}

/// Minimum subset size accepted after restriction or sampling.
const MIN_SUBSET: usize = 3;

/// Deterministic term value (and gradient) on the points `subset` of
/// `points`, with gradients scattered into `grad` scaled by `scale`.
fn subset_term(points: &[Point], subset: &[usize], term: &TopoLossTerm, grad: Option<(&mut [[f64; 2]], f64)>) -> f64 {
    let sub: Vec<Point> = subset.iter().map(|&k| points[k]).collect();
    let reps = duplicate_representatives(&sub);
    let unique: Vec<usize> = (0..sub.len()).filter(|&k| reps[k] == k).collect();
    let pts: Vec<Point> = unique.iter().map(|&k| sub[k]).collect();
    let filtration = Filtration::from_points(&pts);
    let pers = compute_persistence(&filtration, term.dim);
    let diagram = pers.diagram(term.dim);

    let mu = f64::from(term.mu);
    let last = term.j.unwrap_or(usize::MAX).min(diagram.len());
    let mut value = 0.0;
    let mut grad = grad;
    for pair in diagram.pairs.iter().take(last).skip(term.i - 1) {
        let Some(death_simplex) = pair.death_simplex else { continue };
        let pers = pair.persistence();
        let mid = pair.midlife();
        let pp = libm::pow(pers, term.p);
        let mq = if term.q == 0.0 { 1.0 } else { libm::pow(mid, term.q) };
        value += mu * pp * mq;
        if let Some((g, scale)) = grad.as_mut() {
            let dpers = term.p * libm::pow(pers, term.p - 1.0) * mq;
            let dmid = if term.q == 0.0 { 0.0 } else { 0.5 * term.q * pp * libm::pow(mid, term.q - 1.0) };
            let d_death = mu * (dpers + dmid) * *scale;
            let d_birth = mu * (dmid - dpers) * *scale;
            for (simplex, coeff) in [(death_simplex, d_death), (pair.birth_simplex, d_birth)] {
                if coeff == 0.0 {
                    continue;
                }
                for (local, dv) in filtration.value_gradient_sparse(&pts, simplex) {
                    let original = subset[unique[local]];
                    g[original][0] += coeff * dv[0];
                    g[original][1] += coeff * dv[1];
                }
            }
        }
    }
    value
}

fn evaluate_term(points: &[Point], term: &TopoLossTerm, key: RngKey, mut grad: Option<&mut [[f64; 2]]>) -> Result<f64> {
    term.validate()?;
    check_finite(points)?;
    if points.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let mut candidates: Vec<usize> = (0..points.len()).collect();
    if let Some(tau) = term.functional_tau {
        let c = centrality_values(points)?;
        candidates.retain(|&k| c[k] <= tau);
        if candidates.len() < MIN_SUBSET {
            return Err(Error::TooFewPoints { needed: MIN_SUBSET, got: candidates.len() });
        }
    }
    let Some(sampling) = term.sampling else {
        return Ok(subset_term(points, &candidates, term, grad.map(|g| (g, 1.0))));
    };
    let m = candidates.len();
    let size = libm::round(sampling.fraction * m as f64) as usize;
    if size < MIN_SUBSET {
        return Err(Error::TooFewPoints { needed: MIN_SUBSET, got: size });
    }
    let scale = 1.0 / sampling.repeats as f64;
    // Running mean, so identical subsamples reproduce the unsampled value bit for bit.
    let mut mean = 0.0;
    for r in 0..sampling.repeats {
        let mut rng = key.derive(r as u64).rng();
        let mut picks: Vec<usize> =
            if sampling.with_replacement { (0..size).map(|_| rng.random_range(0..m)).collect() } else { index::sample(&mut rng, m, size).into_vec() };
        picks.sort_unstable();
        picks.dedup();
        let subset: Vec<usize> = picks.into_iter().map(|k| candidates[k]).collect();
        let value = subset_term(points, &subset, term, grad.as_deref_mut().map(|g| (g, scale)));
        mean += (value - mean) / (r + 1) as f64;
    }
    Ok(mean)
}

/// Value of one loss term. Coincident points are merged before the
/// persistence computation.
pub fn term_value(points: &[Point], term: &TopoLossTerm, key: RngKey) -> Result<f64> {
    evaluate_term(points, term, key, None)
}

/// Value and gradient with respect to every point of one loss term.
pub fn term_gradient(points: &[Point], term: &TopoLossTerm, key: RngKey) -> Result<(f64, Vec<[f64; 2]>)> {
    let mut grad = vec![[0.0; 2]; points.len()];
    let value = evaluate_term(points, term, key, Some(&mut grad))?;
    Ok((value, grad))
}

/// Weighted sum of term values. All terms draw their samples from `key`.
pub fn spec_value(points: &[Point], spec: &TopoLossSpec, key: RngKey) -> Result<f64> {
    spec.validate()?;
    let mut total = 0.0;
    for t in &spec.terms {
        total += t.weight * term_value(points, &t.term, key)?;
    }
    Ok(total)
}

/// Weighted sum of term values and gradients.
pub fn spec_gradient(points: &[Point], spec: &TopoLossSpec, key: RngKey) -> Result<(f64, Vec<[f64; 2]>)> {
    spec.validate()?;
    let mut total = 0.0;
    let mut grad = vec![[0.0; 2]; points.len()];
    for t in &spec.terms {
        let (v, g) = term_gradient(points, &t.term, key)?;
        total += t.weight * v;
        for (acc, gi) in grad.iter_mut().zip(&g) {
            acc[0] += t.weight * gi[0];
            acc[1] += t.weight * gi[1];
        }
    }
    Ok((total, grad))
}
