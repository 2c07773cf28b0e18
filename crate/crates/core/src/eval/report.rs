//! Evaluation records and their CSV, JSON and gnuplot renderings.

use serde::{Deserialize, Serialize};

use super::{neg_ln, wilson_interval, CostReport, EvalError};
use crate::code::CodeSpec;
use crate::decoder::Decoder;

/// One SNR point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalPoint {
    pub code: String,
    pub variant: String,
    pub iterations: usize,
    pub snr_db: f64,
    pub codewords: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    /// `-ln(ber)`, or its lower bound `ln(bits)` when no error was seen.
    pub neg_ln_ber: f64,
    pub neg_ln_is_lower_bound: bool,
    /// Wilson 95% interval on the BER.
    pub ci_low: f64,
    pub ci_high: f64,
    pub cap_reached: bool,
    pub wall_ms: u64,
}

impl EvalPoint {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        code: &CodeSpec,
        decoder: &Decoder,
        snr_db: f64,
        codewords: u64,
        bit_errors: u64,
        frame_errors: u64,
        cap_reached: bool,
        wall_ms: u64,
    ) -> Self {
        let bits = codewords * code.n as u64;
        let ber = bit_errors as f64 / bits as f64;
        let (neg_ln_ber, bound) = match neg_ln(ber, bits) {
            Ok(v) => (v, false),
            Err(EvalError::ZeroBer { lower_bound }) => (lower_bound, true),
            Err(_) => unreachable!("neg_ln only reports ZeroBer"),
        };
        let (ci_low, ci_high) = wilson_interval(bit_errors, bits);
        Self {
            code: code.name.clone(),
            variant: decoder.variant().to_string(),
            iterations: decoder.iterations(),
            snr_db,
            codewords,
            bits,
            bit_errors,
            frame_errors,
            ber,
            fer: frame_errors as f64 / codewords as f64,
            neg_ln_ber,
            neg_ln_is_lower_bound: bound,
            ci_low,
            ci_high,
            cap_reached,
            wall_ms,
        }
    }

    /// `-ln` of the interval ends: (from the upper BER bound, from the lower).
    pub fn neg_ln_interval(&self) -> (f64, f64) {
        let lo = -self.ci_high.ln();
        let hi = if self.ci_low > 0.0 {
            -self.ci_low.ln()
        } else {
            f64::INFINITY
        };
        (lo, hi)
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.6e},{:.4},{:.6e},{:.6e}",
            self.code,
            self.variant,
            self.snr_db,
            self.codewords,
            self.bit_errors,
            self.ber,
            self.neg_ln_ber,
            self.ci_low,
            self.ci_high
        )
    }
}

pub fn csv_header() -> &'static str {
    "code,variant,snr_db,codewords,bit_errors,ber,neg_ln_ber,ci_low,ci_high"
}

/// A BER-vs-SNR curve of one decoder on one code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub code: String,
    pub variant: String,
    pub iterations: usize,
    pub seed: u64,
    pub min_bit_errors: u64,
    pub max_codewords: u64,
    pub points: Vec<EvalPoint>,
    pub cost: Option<CostReport>,
}

impl EvalReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(csv_header());
        out.push('\n');
        for p in &self.points {
            out.push_str(&p.csv_row());
            out.push('\n');
        }
        out
    }

    /// Whitespace-separated columns for gnuplot.
    pub fn to_gnuplot(&self) -> String {
        let mut out = format!(
            "# {} {} T={}\n# snr_db ber ci_low ci_high neg_ln_ber\n",
            self.code, self.variant, self.iterations
        );
        for p in &self.points {
            out.push_str(&format!(
                "{} {:.6e} {:.6e} {:.6e} {:.4}\n",
                p.snr_db, p.ber, p.ci_low, p.ci_high, p.neg_ln_ber
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }
}
