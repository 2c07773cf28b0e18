//! Hard decisions on the soft values versus on the channel LLRs.
//!
//! After one BP iteration, deciding from `s¹ = l + Σ c2v` should beat
//! deciding from `l` alone; the gap is the information a single round of
//! check messages adds.

use serde::{Deserialize, Serialize};

use super::{count_bit_errors, simulate, wilson_interval, EvalConfig, EvalError};
use crate::channel::streams;
use crate::code::CodeSpec;
use crate::decoder::{decode_sum_product, hard_decision};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub snr_db: f64,
    pub codewords: u64,
    pub bits: u64,
    pub bit_errors_s: u64,
    pub bit_errors_l: u64,
    pub ber_s: f64,
    pub ber_l: f64,
    pub ci_s: (f64, f64),
    pub ci_l: (f64, f64),
    pub cap_reached: bool,
}

impl DiagnosticRow {
    /// The `s` interval lies entirely below the `l` interval.
    pub fn separated(&self) -> bool {
        self.ci_s.1 < self.ci_l.0
    }
}

/// One-iteration BP on each codeword, both decision lanes on the same
/// samples. Stops when both lanes reach `cfg.min_bit_errors` or at the cap.
pub fn s_vs_l_diagnostic(
    code: &CodeSpec,
    snrs: &[f64],
    cfg: &EvalConfig,
) -> Result<Vec<DiagnosticRow>, EvalError> {
    snrs.iter()
        .map(|&snr| {
            let t = simulate::<2, _>(code, snr, code.rate(), streams::DIAG, cfg, |llr, cw| {
                let r = decode_sum_product(llr, &code.graph, 1)?;
                Ok([
                    count_bit_errors(&r.hard_bits, cw),
                    count_bit_errors(&hard_decision(llr), cw),
                ])
            })?;
            let bits = t.codewords * code.n as u64;
            Ok(DiagnosticRow {
                snr_db: snr,
                codewords: t.codewords,
                bits,
                bit_errors_s: t.bit_errors[0],
                bit_errors_l: t.bit_errors[1],
                ber_s: t.bit_errors[0] as f64 / bits as f64,
                ber_l: t.bit_errors[1] as f64 / bits as f64,
                ci_s: wilson_interval(t.bit_errors[0], bits),
                ci_l: wilson_interval(t.bit_errors[1], bits),
                cap_reached: t.cap_reached,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::construct;

    #[test]
    fn pure_noise_gives_half_in_both_lanes() {
        let code = CodeSpec::new("ldpc_49_24", construct::array_ldpc(7, 4), Some(24)).unwrap();
        let cfg = EvalConfig {
            min_bit_errors: 20_000,
            ..EvalConfig::default()
        };
        let rows = s_vs_l_diagnostic(&code, &[-60.0], &cfg).unwrap();
        assert!((rows[0].ber_l - 0.5).abs() < 0.02);
        assert!((rows[0].ber_s - 0.5).abs() < 0.02);
    }
}
