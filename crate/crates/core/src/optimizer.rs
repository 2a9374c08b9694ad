//! Gradient descent on `L_emb + lambda * L_top` with per-epoch random streams.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::embeddings::{EmbeddingModel, LinearProjectionModel};
use crate::geometry::Point;
use crate::rng::RngKey;
use crate::topo::{spec_gradient, TopoLossSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Plain,
    /// Adaptive moment estimation with `beta1 = 0.9`, `beta2 = 0.999`,
    /// `eps = 1e-8`.
    Adam,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub lambda_top: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub method: Method,
    pub seed: u64,
    pub topo_only: bool,
    pub record_every: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { lambda_top: 0.0, learning_rate: 0.1, epochs: 100, method: Method::Plain, seed: 0, topo_only: false, record_every: 1 }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_top >= 0.0 && self.lambda_top.is_finite()) {
            return Err(Error::InvalidConfig(format!("lambda_top must be finite and >= 0, got {}", self.lambda_top)));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!("learning_rate must be finite and > 0, got {}", self.learning_rate)));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be >= 1".into()));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig("record_every must be >= 1".into()));
        }
        Ok(())
    }
}

/// Key of the random stream used in `epoch`. Step `b` of the epoch draws
/// its embedding loss from `derive(0)` and its topological loss from
/// `derive(1 + b)`; recorded trace rows use step 0's streams.
pub fn epoch_key(seed: u64, epoch: usize) -> RngKey {
    RngKey::new(seed).derive(epoch as u64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub epoch: usize,
    /// Embedding loss plus any constraint penalty of the model.
    pub emb_loss: f64,
    /// Unweighted topological loss; zero when no spec is given.
    pub topo_loss: f64,
    /// The objective actually minimized at this state.
    pub total_loss: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LossTrace {
    pub rows: Vec<TraceRow>,
}

impl LossTrace {
    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub parameters: Vec<f64>,
    pub embedding: Vec<Point>,
    pub trace: LossTrace,
}

struct Evaluation {
    row: TraceRow,
    grad: Vec<f64>,
}

/// Objective and gradient at the current parameters. `batch` selects one
/// batch of the embedding loss; `None` evaluates it in full.
fn evaluate<M: EmbeddingModel>(
    model: &M,
    spec: Option<&TopoLossSpec>,
    config: &OptimizerConfig,
    epoch: usize,
    batch: Option<usize>,
) -> Result<Evaluation> {
    let key = epoch_key(config.seed, epoch);
    let emb = match batch {
        Some(b) => model.batch_loss(key.derive(0), b)?,
        None => model.embedding_loss(key.derive(0))?,
    };
    let penalty = model.penalty()?;
    let mut grad = if config.topo_only { vec![0.0; emb.grad.len()] } else { emb.grad };
    let mut emb_loss = emb.value;
    let mut total = if config.topo_only { 0.0 } else { emb.value };
    if let Some(p) = penalty {
        emb_loss += p.value;
        total += p.value;
        grad.iter_mut().zip(&p.grad).for_each(|(g, d)| *g += d);
    }
    let mut topo_loss = 0.0;
    if let Some(spec) = spec {
        let embedding = model.embedding();
        let (value, point_grad) = spec_gradient(&embedding, spec, key.derive(1 + batch.unwrap_or(0) as u64))?;
        topo_loss = value;
        let weight = config.lambda_top;
        if weight != 0.0 {
            total += weight * value;
            let lifted = model.pullback(&point_grad);
            grad.iter_mut().zip(&lifted).for_each(|(g, d)| *g += weight * d);
        }
    }
    if !(emb_loss.is_finite() && topo_loss.is_finite() && total.is_finite()) || grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFiniteLoss { epoch });
    }
    Ok(Evaluation { row: TraceRow { epoch, emb_loss, topo_loss, total_loss: total, seconds: 0.0 }, grad })
}

struct Stepper {
    method: Method,
    lr: f64,
    steps: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Stepper {
    fn new(method: Method, lr: f64, size: usize) -> Self {
        Stepper { method, lr, steps: 0, m: vec![0.0; size], v: vec![0.0; size] }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.steps += 1;
        match self.method {
            Method::Plain => {
                for (p, g) in params.iter_mut().zip(grad) {
                    *p -= self.lr * g;
                }
            }
            Method::Adam => {
                const BETA1: f64 = 0.9;
                const BETA2: f64 = 0.999;
                const EPS: f64 = 1e-8;
                let t = self.steps as f64;
                let c1 = 1.0 - libm::pow(BETA1, t);
                let c2 = 1.0 - libm::pow(BETA2, t);
                for (k, g) in grad.iter().enumerate() {
                    self.m[k] = BETA1 * self.m[k] + (1.0 - BETA1) * g;
                    self.v[k] = BETA2 * self.v[k] + (1.0 - BETA2) * g * g;
                    params[k] -= self.lr * (self.m[k] / c1) / (libm::sqrt(self.v[k] / c2) + EPS);
                }
            }
        }
    }
}

/// Runs `config.epochs` updates on `model` and returns its final state.
///
/// Each epoch records the objective at the current parameters when
/// `epoch % record_every == 0` or in the last epoch, then takes one step per
/// batch of the model's embedding loss.
/// A final row with `epoch = epochs` describes the returned state. With
/// `topo_only` the embedding loss is recorded but not optimized, while a
/// zero `lambda_top` leaves the topological loss out. On a non-finite loss
/// the model keeps its last finite parameters and `NonFiniteLoss` is
/// returned.
pub fn run<M: EmbeddingModel>(model: &mut M, spec: Option<&TopoLossSpec>, config: &OptimizerConfig) -> Result<RunOutput> {
    run_with_clock(model, spec, config, &mut || 0.0)
}

/// As [`run`], filling the `seconds` column from `clock`, which returns the
/// time elapsed since the start of the run.
pub fn run_with_clock<M: EmbeddingModel>(
    model: &mut M,
    spec: Option<&TopoLossSpec>,
    config: &OptimizerConfig,
    clock: &mut dyn FnMut() -> f64,
) -> Result<RunOutput> {
    config.validate()?;
    if let Some(spec) = spec {
        spec.validate()?;
    }
    let mut trace = LossTrace::default();
    let mut stepper = Stepper::new(config.method, config.learning_rate, model.parameters().len());
    let batches = model.batches().max(1);
    for epoch in 0..config.epochs {
        let record = epoch % config.record_every == 0 || epoch + 1 == config.epochs;
        if record && batches > 1 {
            let row = evaluate(model, spec, config, epoch, None)?.row;
            trace.rows.push(TraceRow { seconds: clock(), ..row });
        }
        for batch in 0..batches {
            let eval = evaluate(model, spec, config, epoch, Some(batch))?;
            if record && batches == 1 {
                trace.rows.push(TraceRow { seconds: clock(), ..eval.row });
            }
            let mut params = model.parameters().to_vec();
            stepper.step(&mut params, &eval.grad);
            if params.iter().any(|p| !p.is_finite()) {
                return Err(Error::NonFiniteLoss { epoch });
            }
            model.parameters_mut().copy_from_slice(&params);
        }
    }
    let last = evaluate(model, spec, config, config.epochs, None)?;
    trace.rows.push(TraceRow { seconds: clock(), ..last.row });
    Ok(RunOutput { parameters: model.parameters().to_vec(), embedding: model.embedding(), trace })
}

/// The output of `model` as it stands, without any update. The trace holds
/// one row at epoch 0, evaluated on the random stream of epoch 0.
pub fn snapshot<M: EmbeddingModel>(model: &M, spec: Option<&TopoLossSpec>, config: &OptimizerConfig) -> Result<RunOutput> {
    config.validate()?;
    if let Some(spec) = spec {
        spec.validate()?;
    }
    let row = evaluate(model, spec, config, 0, None)?.row;
    Ok(RunOutput { parameters: model.parameters().to_vec(), embedding: model.embedding(), trace: LossTrace { rows: vec![row] } })
}

/// Optimizes the loadings of `E = X W` starting from `w0`, with the default
/// orthonormality weight.
pub fn run_linear_with_topo(
    data: DMatrix<f64>,
    w0: DMatrix<f64>,
    spec: Option<&TopoLossSpec>,
    config: &OptimizerConfig,
) -> Result<(LinearProjectionModel, RunOutput)> {
    let mut model = LinearProjectionModel::new(data, w0)?;
    let out = run(&mut model, spec, config)?;
    Ok((model, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::LossGrad;
    use crate::topo::TopoLossTerm;

    /// Free coordinates with no embedding loss.
    struct Free(Vec<f64>);

    impl EmbeddingModel for Free {
        fn parameters(&self) -> &[f64] {
            &self.0
        }
        fn parameters_mut(&mut self) -> &mut [f64] {
            &mut self.0
        }
        fn embedding(&self) -> Vec<Point> {
            self.0.chunks_exact(2).map(|c| [c[0], c[1]]).collect()
        }
        fn embedding_loss(&self, _key: RngKey) -> Result<LossGrad> {
            Ok(LossGrad { value: 0.0, grad: vec![0.0; self.0.len()] })
        }
        fn pullback(&self, grad: &[[f64; 2]]) -> Vec<f64> {
            grad.as_flattened().to_vec()
        }
    }

    #[test]
    fn two_points_one_plain_step() {
        let mut model = Free(vec![0.0, 0.0, 2.0, 0.0]);
        let spec = TopoLossSpec::single(TopoLossTerm::new(0, 1, None, 1));
        let config = OptimizerConfig { lambda_top: 1.0, learning_rate: 0.1, epochs: 1, topo_only: true, ..Default::default() };
        let out = run(&mut model, Some(&spec), &config).unwrap();
        let d = out.embedding[1][0] - out.embedding[0][0];
        assert!((d - 1.8).abs() < 1e-12);
        assert_eq!(out.trace.rows.len(), 2);
        assert!((out.trace.rows[0].topo_loss - 1.0).abs() < 1e-12);
        assert!((out.trace.rows[1].topo_loss - 0.81).abs() < 1e-12);
        assert_eq!(out.trace.rows[1].epoch, 1);
    }

    #[test]
    fn snapshot_matches_the_first_trace_row() {
        let spec = TopoLossSpec::single(TopoLossTerm::new(0, 1, None, 1));
        let config = OptimizerConfig { lambda_top: 2.0, epochs: 3, ..Default::default() };
        let model = Free(vec![0.0, 0.0, 2.0, 0.0, 0.0, 3.0]);
        let still = snapshot(&model, Some(&spec), &config).unwrap();
        let moved = run(&mut Free(model.0.clone()), Some(&spec), &config).unwrap();
        assert_eq!(still.trace.rows, [moved.trace.rows[0]]);
        assert_eq!(still.parameters, model.0);
    }

    #[test]
    fn invalid_configs() {
        let bad = [
            OptimizerConfig { learning_rate: 0.0, ..Default::default() },
            OptimizerConfig { epochs: 0, ..Default::default() },
            OptimizerConfig { lambda_top: -1.0, ..Default::default() },
            OptimizerConfig { record_every: 0, ..Default::default() },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn divergence_keeps_last_finite_state() {
        struct Blowup(Vec<f64>);
        impl EmbeddingModel for Blowup {
            fn parameters(&self) -> &[f64] {
                &self.0
            }
            fn parameters_mut(&mut self) -> &mut [f64] {
                &mut self.0
            }
            fn embedding(&self) -> Vec<Point> {
                vec![[self.0[0], self.0[1]]]
            }
            fn embedding_loss(&self, _key: RngKey) -> Result<LossGrad> {
                let x = self.0[0];
                Ok(LossGrad { value: libm::exp(x), grad: vec![-1e300, 0.0] })
            }
            fn pullback(&self, grad: &[[f64; 2]]) -> Vec<f64> {
                grad.as_flattened().to_vec()
            }
        }
        let mut model = Blowup(vec![0.0, 0.0]);
        let config = OptimizerConfig { learning_rate: 1e10, epochs: 10, ..Default::default() };
        let err = run(&mut model, None, &config).unwrap_err();
        assert!(matches!(err, Error::NonFiniteLoss { .. }));
        assert!(model.0.iter().all(|p| p.is_finite()));
    }
}
