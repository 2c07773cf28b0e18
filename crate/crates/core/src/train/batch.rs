//! On-the-fly mixed-SNR training batches.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::TrainConfig;
use crate::channel::{llr_from_received, modulate, sigma_from_snr, stream_rng, streams, transmit};
use crate::code::CodeSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodewordSource {
    RandomMessage,
    AllZero,
}

/// One training example.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub snr_db: f64,
    pub llr: Vec<f64>,
    pub target: Vec<u8>,
}

/// Sample `index` of optimizer step `step`, drawn from its own stream.
///
/// Samples `[j·samples_per_snr, (j+1)·samples_per_snr)` use `snr_grid[j]`.
pub fn make_sample(code: &CodeSpec, config: &TrainConfig, step: u64, index: usize) -> Sample {
    let snr_db = config.snr_grid[index / config.samples_per_snr];
    let mut rng = stream_rng(config.seed, &[streams::TRAIN, step, index as u64]);
    let target = match config.codeword_source {
        CodewordSource::AllZero => vec![0u8; code.n],
        CodewordSource::RandomMessage => {
            let msg: Vec<u8> = (0..code.k).map(|_| u8::from(rng.random::<bool>())).collect();
            code.generator.encode(&msg).expect("message length is k")
        }
    };
    let sigma = sigma_from_snr(snr_db, code.rate()).expect("code rate in (0, 1]");
    let received = transmit(&modulate(&target), sigma, &mut rng);
    Sample {
        snr_db,
        llr: llr_from_received(&received, sigma),
        target,
    }
}

/// The full batch of step `step`, ordered by SNR then sample.
pub fn make_batch(code: &CodeSpec, config: &TrainConfig, step: u64) -> Vec<Sample> {
    (0..config.batch_size())
        .map(|i| make_sample(code, config, step, i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::construct;

    fn ldpc() -> CodeSpec {
        CodeSpec::new("ldpc_49_24", construct::array_ldpc(7, 4), Some(24)).unwrap()
    }

    #[test]
    fn default_batch_has_64_per_snr() {
        let code = ldpc();
        let cfg = TrainConfig::default();
        let batch = make_batch(&code, &cfg, 0);
        assert_eq!(batch.len(), 384);
        for (j, snr) in cfg.snr_grid.iter().enumerate() {
            assert_eq!(batch.iter().filter(|s| s.snr_db == *snr).count(), 64, "grid {j}");
        }
        assert!(batch.iter().all(|s| code.graph.is_codeword(&s.target)));
    }

    #[test]
    fn all_zero_source() {
        let code = ldpc();
        let cfg = TrainConfig {
            codeword_source: CodewordSource::AllZero,
            samples_per_snr: 3,
            ..TrainConfig::default()
        };
        assert!(make_batch(&code, &cfg, 5)
            .iter()
            .all(|s| s.target.iter().all(|&b| b == 0)));
    }

    #[test]
    fn batches_are_reproducible_and_step_dependent() {
        let code = ldpc();
        let cfg = TrainConfig {
            samples_per_snr: 2,
            ..TrainConfig::default()
        };
        assert_eq!(make_batch(&code, &cfg, 3), make_batch(&code, &cfg, 3));
        assert_ne!(make_batch(&code, &cfg, 3), make_batch(&code, &cfg, 4));
    }
}
