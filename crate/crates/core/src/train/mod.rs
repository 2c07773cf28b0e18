//! Training of the NBP and DRN decoders.
//!
//! Each optimizer step draws a fresh mixed-SNR batch, runs forward and
//! reverse passes per sample (in parallel), reduces gradients over a fixed
//! binary tree and applies one RMSprop update. The loss is the batch mean of
//! the cross-entropy on the final soft values.

mod backward;
mod batch;
pub mod gradcheck;
mod loss;
mod rmsprop;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use backward::{backward_drn, backward_nbp};
pub use batch::{make_batch, make_sample, CodewordSource, Sample};
pub use loss::{bce_loss, PROB_CLAMP};
pub use rmsprop::{rmsprop_step, OptimizerState};

use crate::code::{CodeSpec, TannerGraph};
use crate::decoder::weights::WeightFile;
use crate::decoder::{decode_drn_taped, decode_nbp_taped, DrnWeights, NbpWeights};
use crate::parallel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrainError {
    #[error("tape does not belong to this graph and weight shape")]
    TapeMismatch,
    #[error("optimizer shapes disagree: {params} params, {grads} grads, {state} accumulators")]
    ShapeMismatch {
        params: usize,
        grads: usize,
        state: usize,
    },
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("loss became non-finite at step {step}")]
    DivergenceDetected {
        step: u64,
        /// Weights before the failing step.
        last_good: Vec<f64>,
        log: Vec<LossRecord>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub snr_grid: Vec<f64>,
    pub samples_per_snr: usize,
    pub learning_rate: f64,
    pub rho: f64,
    pub epsilon: f64,
    pub steps: u64,
    pub iterations: usize,
    pub seed: u64,
    pub codeword_source: CodewordSource,
    /// Loss is logged at step 0, every `log_every` steps and at the last step.
    pub log_every: u64,
    pub workers: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            snr_grid: vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            samples_per_snr: 64,
            learning_rate: 1e-3,
            rho: 0.9,
            epsilon: 1e-8,
            steps: 20_000,
            iterations: 5,
            seed: 0,
            codeword_source: CodewordSource::RandomMessage,
            log_every: 100,
            workers: 1,
        }
    }
}

impl TrainConfig {
    pub fn batch_size(&self) -> usize {
        self.snr_grid.len() * self.samples_per_snr
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |m: &str| Err(TrainError::InvalidConfig(m.to_string()));
        if self.snr_grid.is_empty() || self.samples_per_snr == 0 {
            return bad("batch would be empty");
        }
        if self.snr_grid.iter().any(|s| !s.is_finite()) {
            return bad("non-finite SNR");
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad("learning rate must be finite and non-negative");
        }
        if !(0.0..1.0).contains(&self.rho) || !(self.epsilon > 0.0) {
            return bad("need 0 <= rho < 1 and epsilon > 0");
        }
        if self.iterations == 0 {
            return bad("at least one decoding iteration");
        }
        if self.log_every == 0 {
            return bad("log_every must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossRecord {
    pub step: u64,
    /// Batch-mean loss before this step's update.
    pub loss: f64,
    pub wall_ms: u64,
}

/// Weights that can be trained by [`train`].
pub trait Trainable: Clone + Send + Sync {
    const VARIANT: &'static str;

    /// All-ones weights, which reproduce the classical decoder.
    fn unit(graph: &TannerGraph, iterations: usize) -> Self;
    fn values(&self) -> &[f64];
    fn values_mut(&mut self) -> &mut [f64];
    /// Loss of one sample and its gradient over the flat weight vector.
    fn loss_and_grad(&self, graph: &TannerGraph, llr: &[f64], target: &[u8]) -> (f64, Vec<f64>);
    fn loss(&self, graph: &TannerGraph, llr: &[f64], target: &[u8]) -> f64;
    /// Distance of the forward pass from the nearest kink of the decoder map.
    fn smoothness_margin(&self, graph: &TannerGraph, llr: &[f64]) -> f64;
    fn weight_file(&self, code: &str, graph: &TannerGraph) -> WeightFile;
}

impl Trainable for DrnWeights {
    const VARIANT: &'static str = "drn";

    fn unit(graph: &TannerGraph, iterations: usize) -> Self {
        DrnWeights::ones(graph, iterations)
    }
    fn values(&self) -> &[f64] {
        DrnWeights::values(self)
    }
    fn values_mut(&mut self) -> &mut [f64] {
        DrnWeights::values_mut(self)
    }
    fn loss_and_grad(&self, graph: &TannerGraph, llr: &[f64], target: &[u8]) -> (f64, Vec<f64>) {
        let (r, tape) = decode_drn_taped(llr, graph, self).expect("shapes checked by caller");
        let (loss, ds) = bce_loss(r.final_soft(), target);
        let g = backward_drn(&tape, graph, self, &ds).expect("tape from this forward");
        (loss, g)
    }
    fn loss(&self, graph: &TannerGraph, llr: &[f64], target: &[u8]) -> f64 {
        let r = crate::decoder::decode_drn(llr, graph, self).expect("shapes checked by caller");
        bce_loss(r.final_soft(), target).0
    }
    fn smoothness_margin(&self, graph: &TannerGraph, llr: &[f64]) -> f64 {
        gradcheck::drn_margin(graph, self, llr)
    }
    fn weight_file(&self, code: &str, graph: &TannerGraph) -> WeightFile {
        WeightFile::from_drn(code, graph, self)
    }
}

impl Trainable for NbpWeights {
    const VARIANT: &'static str = "nbp";

    fn unit(graph: &TannerGraph, iterations: usize) -> Self {
        NbpWeights::ones(graph, iterations)
    }
    fn values(&self) -> &[f64] {
        NbpWeights::values(self)
    }
    fn values_mut(&mut self) -> &mut [f64] {
        NbpWeights::values_mut(self)
    }
    fn loss_and_grad(&self, graph: &TannerGraph, llr: &[f64], target: &[u8]) -> (f64, Vec<f64>) {
        let (r, tape) = decode_nbp_taped(llr, graph, self).expect("shapes checked by caller");
        let (loss, ds) = bce_loss(r.final_soft(), target);
        let g = backward_nbp(&tape, graph, self, &ds).expect("tape from this forward");
        (loss, g)
    }
    fn loss(&self, graph: &TannerGraph, llr: &[f64], target: &[u8]) -> f64 {
        let r = crate::decoder::decode_nbp(llr, graph, self).expect("shapes checked by caller");
        bce_loss(r.final_soft(), target).0
    }
    fn smoothness_margin(&self, graph: &TannerGraph, llr: &[f64]) -> f64 {
        gradcheck::nbp_margin(graph, self, llr)
    }
    fn weight_file(&self, code: &str, graph: &TannerGraph) -> WeightFile {
        WeightFile::from_nbp(code, graph, self)
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome<W> {
    pub weights: W,
    pub log: Vec<LossRecord>,
    pub optimizer: OptimizerState,
}

/// Batch-mean loss and gradient of `weights` on the batch of `step`.
pub fn batch_loss_and_grad<W: Trainable>(
    code: &CodeSpec,
    weights: &W,
    config: &TrainConfig,
    step: u64,
) -> (f64, Vec<f64>) {
    let per_sample: Vec<(f64, Vec<f64>)> = (0..config.batch_size())
        .into_par_iter()
        .map(|i| {
            let s = make_sample(code, config, step, i);
            weights.loss_and_grad(&code.graph, &s.llr, &s.target)
        })
        .collect();
    let scale = 1.0 / per_sample.len() as f64;
    let losses: Vec<f64> = per_sample.iter().map(|(l, _)| *l).collect();
    let grads: Vec<Vec<f64>> = per_sample.into_iter().map(|(_, g)| g).collect();
    let mut grad = parallel::tree_sum(&grads);
    grad.iter_mut().for_each(|g| *g *= scale);
    (parallel::tree_sum_scalar(&losses) * scale, grad)
}

/// Trains from `init`; `on_log` sees every logged record as it is produced.
pub fn train<W: Trainable>(
    code: &CodeSpec,
    init: W,
    config: &TrainConfig,
    mut on_log: impl FnMut(&LossRecord),
) -> Result<TrainOutcome<W>, TrainError> {
    config.validate()?;
    let pool = parallel::pool(config.workers);
    let started = Instant::now();
    let mut weights = init;
    let mut optimizer = OptimizerState::new(weights.values().len());
    let mut log = Vec::new();

    for step in 0..config.steps {
        let (loss, grad) = pool.install(|| batch_loss_and_grad(code, &weights, config, step));
        let finite = loss.is_finite() && grad.iter().all(|g| g.is_finite());
        if finite && (step % config.log_every == 0 || step + 1 == config.steps) {
            let rec = LossRecord {
                step,
                loss,
                wall_ms: started.elapsed().as_millis() as u64,
            };
            on_log(&rec);
            log.push(rec);
        }
        if !finite {
            return Err(TrainError::DivergenceDetected {
                step,
                last_good: weights.values().to_vec(),
                log,
            });
        }
        let mut next = weights.values().to_vec();
        rmsprop_step(
            &mut next,
            &grad,
            &mut optimizer,
            config.learning_rate,
            config.rho,
            config.epsilon,
        )?;
        if next.iter().any(|w| !w.is_finite()) {
            return Err(TrainError::DivergenceDetected {
                step,
                last_good: weights.values().to_vec(),
                log,
            });
        }
        weights.values_mut().copy_from_slice(&next);
    }
    Ok(TrainOutcome {
        weights,
        log,
        optimizer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::construct;
    use crate::decoder::{decode_min_sum, decode_sum_product};

    fn hamming() -> CodeSpec {
        CodeSpec::new("hamming_7_4", construct::hamming_7_4(), Some(4)).unwrap()
    }

    fn small_config() -> TrainConfig {
        TrainConfig {
            samples_per_snr: 4,
            steps: 3,
            iterations: 3,
            seed: 11,
            log_every: 1,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn initial_loss_matches_classical_decoders() {
        let code = hamming();
        let cfg = small_config();
        let batch = make_batch(&code, &cfg, 0);
        let mean = |f: &dyn Fn(&Sample) -> f64| {
            batch.iter().map(f).sum::<f64>() / batch.len() as f64
        };
        let ms = mean(&|s| {
            bce_loss(decode_min_sum(&s.llr, &code.graph, 3).unwrap().final_soft(), &s.target).0
        });
        let bp = mean(&|s| {
            bce_loss(decode_sum_product(&s.llr, &code.graph, 3).unwrap().final_soft(), &s.target).0
        });
        let (drn, _) = batch_loss_and_grad(&code, &DrnWeights::ones(&code.graph, 3), &cfg, 0);
        let (nbp, _) = batch_loss_and_grad(&code, &NbpWeights::ones(&code.graph, 3), &cfg, 0);
        assert!((drn - ms).abs() < 1e-9, "{drn} vs {ms}");
        assert!((nbp - bp).abs() < 1e-9, "{nbp} vs {bp}");
    }

    #[test]
    fn zero_learning_rate_keeps_weights() {
        let code = hamming();
        let cfg = TrainConfig {
            learning_rate: 0.0,
            ..small_config()
        };
        let out = train(&code, DrnWeights::ones(&code.graph, 3), &cfg, |_| {}).unwrap();
        assert!(out.weights.values().iter().all(|&w| w == 1.0));
        assert_eq!(out.log.len(), 3);
    }

    #[test]
    fn training_is_identical_across_worker_counts() {
        let code = hamming();
        let a = train(&code, NbpWeights::ones(&code.graph, 3), &small_config(), |_| {}).unwrap();
        let cfg = TrainConfig {
            workers: 3,
            ..small_config()
        };
        let b = train(&code, NbpWeights::ones(&code.graph, 3), &cfg, |_| {}).unwrap();
        assert_eq!(a.weights, b.weights);
        assert_eq!(
            a.log.iter().map(|r| r.loss).collect::<Vec<_>>(),
            b.log.iter().map(|r| r.loss).collect::<Vec<_>>()
        );
    }

    #[test]
    fn divergence_returns_last_good_weights() {
        let code = hamming();
        let cfg = TrainConfig {
            learning_rate: f64::MAX,
            steps: 5,
            ..small_config()
        };
        match train(&code, DrnWeights::ones(&code.graph, 3), &cfg, |_| {}) {
            Err(TrainError::DivergenceDetected { last_good, .. }) => {
                assert!(last_good.iter().all(|w| w.is_finite()));
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        assert_eq!(TrainConfig::default().batch_size(), 384);
        let bad = TrainConfig {
            snr_grid: vec![],
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
