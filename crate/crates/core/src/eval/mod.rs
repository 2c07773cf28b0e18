//! Monte-Carlo evaluation and cost accounting.
//!
//! Codewords are simulated in fixed-size batches; batch `b` at SNR `snr`
//! draws from its own stream `(seed, EVAL, snr bits, b)`. Batches are decoded
//! in parallel waves but consumed strictly in order, and simulation stops at
//! the exact codeword where the bit-error target is met, so a report depends
//! only on the seed, never on the worker count.

mod cost;
mod diagnostic;
mod report;

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cost::{count_flops, count_params, CostReport, FlopBreakdown, FlopConvention};
pub use diagnostic::{s_vs_l_diagnostic, DiagnosticRow};
pub use report::{csv_header, EvalPoint, EvalReport};

use crate::channel::{llr_from_received, modulate, sigma_from_snr, stream_rng, transmit};
use crate::code::CodeSpec;
use crate::decoder::{Decoder, DecoderError};
use crate::parallel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("zero bit errors observed; -ln(BER) is at least {lower_bound:.4}")]
    ZeroBer { lower_bound: f64 },
    #[error(transparent)]
    Decoder(#[from] DecoderError),
    #[error("invalid evaluation config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    /// Stop once this many bit errors have been seen.
    pub min_bit_errors: u64,
    /// Hard cap on simulated codewords; reaching it is flagged in the report.
    pub max_codewords: u64,
    /// Codewords per independently seeded batch.
    pub batch_codewords: usize,
    pub seed: u64,
    pub workers: usize,
    /// Transmit without noise while computing LLRs at the nominal sigma.
    pub noiseless: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            min_bit_errors: 100,
            max_codewords: 1_000_000,
            batch_codewords: 64,
            seed: 0,
            workers: 1,
            noiseless: false,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        if self.batch_codewords == 0 || self.max_codewords == 0 {
            return Err(EvalError::InvalidConfig(
                "batch_codewords and max_codewords must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// `-ln(ber)`; a zero estimate reports the bound `ln(bits)` instead.
pub fn neg_ln(ber: f64, bits_simulated: u64) -> Result<f64, EvalError> {
    if ber > 0.0 {
        Ok(-ber.ln())
    } else {
        Err(EvalError::ZeroBer {
            lower_bound: (bits_simulated.max(1) as f64).ln(),
        })
    }
}

/// Wilson score interval at 95% for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    const Z: f64 = 1.959_963_984_540_054;
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let low = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let high = if k as f64 == n { 1.0 } else { (centre + half).min(1.0) };
    (low, high)
}

/// Stream tag of an SNR point (its bit pattern, so 4.0 and 4.5 differ).
fn snr_tag(snr_db: f64) -> u64 {
    snr_db.to_bits()
}

/// Per-codeword error counts of several decision lanes.
pub(crate) struct LaneTotals<const L: usize> {
    pub codewords: u64,
    pub bit_errors: [u64; L],
    pub frame_errors: [u64; L],
    pub cap_reached: bool,
}

/// Runs the batch/wave loop. `lanes` maps `(llr, codeword)` to the number of
/// bit errors in each lane; the stop test uses the smallest lane count.
pub(crate) fn simulate<const L: usize, F>(
    code: &CodeSpec,
    snr_db: f64,
    sigma_rate: f64,
    stream: u64,
    cfg: &EvalConfig,
    lanes: F,
) -> Result<LaneTotals<L>, EvalError>
where
    F: Fn(&[f64], &[u8]) -> Result<[u64; L], EvalError> + Sync,
{
    cfg.validate()?;
    let sigma = sigma_from_snr(snr_db, sigma_rate)
        .map_err(|e| EvalError::InvalidConfig(e.to_string()))?;
    let pool = parallel::pool(cfg.workers);
    let wave = cfg.workers.max(1);
    let mut totals = LaneTotals {
        codewords: 0,
        bit_errors: [0; L],
        frame_errors: [0; L],
        cap_reached: false,
    };
    let mut next_batch = 0u64;
    loop {
        let batches: Vec<u64> = (next_batch..next_batch + wave as u64).collect();
        next_batch += wave as u64;
        let results: Vec<Result<Vec<[u64; L]>, EvalError>> = pool.install(|| {
            batches
                .par_iter()
                .map(|&b| {
                    let mut rng = stream_rng(cfg.seed, &[stream, snr_tag(snr_db), b]);
                    (0..cfg.batch_codewords)
                        .map(|_| {
                            let msg: Vec<u8> =
                                (0..code.k).map(|_| u8::from(rng.random::<bool>())).collect();
                            let cw = code.generator.encode(&msg).expect("message length is k");
                            let symbols = modulate(&cw);
                            let received = if cfg.noiseless {
                                symbols
                            } else {
                                transmit(&symbols, sigma, &mut rng)
                            };
                            lanes(&llr_from_received(&received, sigma), &cw)
                        })
                        .collect()
                })
                .collect()
        });
        for batch in results {
            for errs in batch? {
                totals.codewords += 1;
                for i in 0..L {
                    totals.bit_errors[i] += errs[i];
                    totals.frame_errors[i] += u64::from(errs[i] > 0);
                }
                if totals.bit_errors.iter().all(|&e| e >= cfg.min_bit_errors) {
                    return Ok(totals);
                }
                if totals.codewords >= cfg.max_codewords {
                    totals.cap_reached = true;
                    return Ok(totals);
                }
            }
        }
    }
}

pub(crate) fn count_bit_errors(decided: &[u8], sent: &[u8]) -> u64 {
    decided.iter().zip(sent).filter(|(a, b)| a != b).count() as u64
}

/// Bit and frame error rates of `decoder` at one SNR.
///
/// The uncoded lane is simulated at rate 1 so that its SNR axis is that of
/// plain BPSK.
pub fn estimate_ber(
    decoder: &Decoder,
    code: &CodeSpec,
    snr_db: f64,
    cfg: &EvalConfig,
) -> Result<EvalPoint, EvalError> {
    let started = Instant::now();
    let rate = match decoder {
        Decoder::Uncoded => 1.0,
        _ => code.rate(),
    };
    let t = simulate::<1, _>(
        code,
        snr_db,
        rate,
        crate::channel::streams::EVAL,
        cfg,
        |llr, cw| {
            let r = decoder.decode(llr, &code.graph)?;
            Ok([count_bit_errors(&r.hard_bits, cw)])
        },
    )?;
    Ok(EvalPoint::new(
        code,
        decoder,
        snr_db,
        t.codewords,
        t.bit_errors[0],
        t.frame_errors[0],
        t.cap_reached,
        started.elapsed().as_millis() as u64,
    ))
}

/// [`estimate_ber`] over an SNR list, in order.
pub fn sweep(
    decoder: &Decoder,
    code: &CodeSpec,
    snrs: &[f64],
    cfg: &EvalConfig,
) -> Result<EvalReport, EvalError> {
    let points = snrs
        .iter()
        .map(|&snr| estimate_ber(decoder, code, snr, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EvalReport {
        code: code.name.clone(),
        variant: decoder.variant().to_string(),
        iterations: decoder.iterations(),
        seed: cfg.seed,
        min_bit_errors: cfg.min_bit_errors,
        max_codewords: cfg.max_codewords,
        points,
        cost: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::construct;
    use statrs::distribution::{ContinuousCDF, Normal};

    fn ldpc() -> CodeSpec {
        CodeSpec::new("ldpc_49_24", construct::array_ldpc(7, 4), Some(24)).unwrap()
    }

    #[test]
    fn neg_ln_examples() {
        assert!((neg_ln((-5.0f64).exp(), 10).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(neg_ln(1.0, 10).unwrap(), 0.0);
        assert!((neg_ln(0.0117, 10).unwrap() - 4.448).abs() < 1e-3);
        match neg_ln(0.0, 1000) {
            Err(EvalError::ZeroBer { lower_bound }) => {
                assert!((lower_bound - 1000f64.ln()).abs() < 1e-12)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wilson_reference_values() {
        // 10 of 100: textbook Wilson interval (0.0552, 0.1744)
        let (lo, hi) = wilson_interval(10, 100);
        assert!((lo - 0.05522).abs() < 1e-4 && (hi - 0.17436).abs() < 1e-4);
        let (lo, hi) = wilson_interval(0, 50);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.1);
    }

    #[test]
    fn noiseless_runs_hit_the_cap_with_zero_errors() {
        let code = ldpc();
        let cfg = EvalConfig {
            max_codewords: 300,
            noiseless: true,
            ..EvalConfig::default()
        };
        let p = estimate_ber(&Decoder::SumProduct { iterations: 5 }, &code, 2.0, &cfg).unwrap();
        assert_eq!((p.bit_errors, p.codewords), (0, 300));
        assert!(p.cap_reached && p.ber == 0.0);
        assert!(p.neg_ln_is_lower_bound);
    }

    #[test]
    fn stops_exactly_at_error_target() {
        let code = ldpc();
        let cfg = EvalConfig {
            min_bit_errors: 100,
            ..EvalConfig::default()
        };
        let p = estimate_ber(&Decoder::Uncoded, &code, 1.0, &cfg).unwrap();
        assert!(!p.cap_reached);
        assert!(p.bit_errors >= 100);
        // the last codeword pushed the count over the target
        assert!(p.bit_errors - 100 < code.n as u64);
    }

    #[test]
    fn uncoded_lane_matches_gaussian_tail() {
        let code = ldpc();
        let cfg = EvalConfig {
            min_bit_errors: 4000,
            seed: 5,
            ..EvalConfig::default()
        };
        let q = Normal::new(0.0, 1.0).unwrap();
        for snr in [0.0, 3.0] {
            let p = estimate_ber(&Decoder::Uncoded, &code, snr, &cfg).unwrap();
            let expected = q.sf((2.0 * 10f64.powf(snr / 10.0)).sqrt());
            let bits = (p.codewords * code.n as u64) as f64;
            let se = (expected * (1.0 - expected) / bits).sqrt();
            assert!((p.ber - expected).abs() < 3.0 * se, "snr {snr}: {} vs {expected}", p.ber);
        }
    }

    #[test]
    fn results_do_not_depend_on_worker_count() {
        let code = ldpc();
        let d = Decoder::MinSum { iterations: 5 };
        let a = estimate_ber(&d, &code, 2.0, &EvalConfig::default()).unwrap();
        let b = estimate_ber(
            &d,
            &code,
            2.0,
            &EvalConfig {
                workers: 3,
                ..EvalConfig::default()
            },
        )
        .unwrap();
        assert_eq!(a.csv_row(), b.csv_row());
    }
}
