//! Parameter and FLOP accounting.
//!
//! FLOPs follow the unfolded layer graph: every edge message is computed
//! from its own extrinsic inputs (no shared prefix products), so a check of
//! degree `d` evaluates `d` leave-one-out combinations of `d - 1` inputs.
//! Adds, multiplies, compares, absolute values and sign operations cost 1;
//! `tanh`/`artanh` cost [`FlopConvention::transcendental`]; each clipped
//! value costs [`FlopConvention::clip`] compares.
//!
//! Per iteration (`d_v`, `d_c` are node degrees, `E` the edge count):
//!
//! ```text
//! BP   var    Σ_v d_v(d_v-1) adds                         + clip·E
//!      check  Σ_c d_c[(d_c-1)(1+τ) + (d_c-2) + clip + τ + 1] + clip·E
//!      out    Σ_v d_v adds
//! NBP  BP plus Σ_v d_v² weight multiplies in the variable update and,
//!      once, Σ_v (d_v+1) output-weight multiplies
//! MS   var as BP; check Σ_c d_c[(d_c-1) + 2(d_c-2) + 1] + clip·E; out as BP
//! DRN  var    E residual subtractions                     + clip·E
//!      check  Σ_c d_c[(d_c-1) + 2(d_c-2) + 2]             + clip·E
//!      out    2E (m - u, then accumulate)
//! ```
//!
//! Here τ is the transcendental cost; the `+ clip` inside the BP check term
//! is the artanh-argument guard, and the final `+ 1` the factor 2.

use serde::{Deserialize, Serialize};

use crate::code::TannerGraph;
use crate::decoder::{Decoder, NbpWeights};

/// Bytes per stored weight (single precision, as in deployed models).
pub const BYTES_PER_PARAM: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlopConvention {
    pub transcendental: u64,
    pub clip: u64,
}

impl Default for FlopConvention {
    fn default() -> Self {
        Self {
            transcendental: 1,
            clip: 2,
        }
    }
}

impl FlopConvention {
    pub fn describe(&self) -> String {
        format!(
            "unfolded pairwise messages; add/mul/compare/abs/sign = 1, tanh/artanh = {}, clip = {} per value",
            self.transcendental, self.clip
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FlopBreakdown {
    pub variable_update: u64,
    pub check_update: u64,
    pub output: u64,
}

impl FlopBreakdown {
    pub fn total(&self) -> u64 {
        self.variable_update + self.check_update + self.output
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub variant: String,
    pub code: String,
    pub iterations: usize,
    pub parameter_count: usize,
    pub parameter_bytes: usize,
    pub flops: FlopBreakdown,
    pub flops_total: u64,
    pub convention: String,
}

impl CostReport {
    pub fn new(
        code: &str,
        variant: &str,
        graph: &TannerGraph,
        iterations: usize,
        conv: FlopConvention,
    ) -> Option<Self> {
        let parameter_count = params_for(variant, graph, iterations)?;
        let flops = count_flops(variant, graph, iterations, conv)?;
        Some(Self {
            variant: variant.to_string(),
            code: code.to_string(),
            iterations,
            parameter_count,
            parameter_bytes: BYTES_PER_PARAM * parameter_count,
            flops,
            flops_total: flops.total(),
            convention: conv.describe(),
        })
    }
}

fn params_for(variant: &str, graph: &TannerGraph, iterations: usize) -> Option<usize> {
    match variant {
        "uncoded" | "bp" | "minsum" => Some(0),
        "drn" => Some(iterations * graph.n_checks()),
        "nbp" => Some(NbpWeights::param_count(
            graph.n_vars(),
            graph.n_edges(),
            iterations,
        )),
        _ => None,
    }
}

/// `(parameter count, bytes)` of a decoder.
pub fn count_params(decoder: &Decoder) -> (usize, usize) {
    let p = match decoder {
        Decoder::Nbp(w) => w.len(),
        Decoder::Drn(w) => w.len(),
        _ => 0,
    };
    (p, BYTES_PER_PARAM * p)
}

/// FLOPs to decode one codeword; `None` for an unknown variant name.
pub fn count_flops(
    variant: &str,
    graph: &TannerGraph,
    iterations: usize,
    conv: FlopConvention,
) -> Option<FlopBreakdown> {
    let t = iterations as u64;
    let e = graph.n_edges() as u64;
    let vdeg: Vec<u64> = (0..graph.n_vars()).map(|v| graph.var_degree(v) as u64).collect();
    let cdeg: Vec<u64> = (0..graph.n_checks())
        .map(|c| graph.check_degree(c) as u64)
        .collect();
    let (tr, clip) = (conv.transcendental, conv.clip);
    let sum_v = |f: &dyn Fn(u64) -> u64| vdeg.iter().map(|&d| f(d)).sum::<u64>();
    let sum_c = |f: &dyn Fn(u64) -> u64| cdeg.iter().map(|&d| f(d)).sum::<u64>();
    // (d - 2) with degree-1 checks contributing nothing
    let less2 = |d: u64| d.saturating_sub(2);

    let bp_var = sum_v(&|d| d * d.saturating_sub(1)) + clip * e;
    let bp_check = sum_c(&|d| d * (d.saturating_sub(1) * (1 + tr) + less2(d) + clip + tr + 1))
        + clip * e;
    let out = sum_v(&|d| d);
    let ms_check = sum_c(&|d| d * (d.saturating_sub(1) + 2 * less2(d) + 1)) + clip * e;

    let per_iter = |var, check, output| FlopBreakdown {
        variable_update: t * var,
        check_update: t * check,
        output: t * output,
    };
    Some(match variant {
        "uncoded" => FlopBreakdown::default(),
        "bp" => per_iter(bp_var, bp_check, out),
        "minsum" => per_iter(bp_var, ms_check, out),
        "nbp" => {
            let mut f = per_iter(bp_var + sum_v(&|d| d * d), bp_check, out);
            f.output += sum_v(&|d| d + 1);
            f
        }
        "drn" => per_iter(
            e + clip * e,
            sum_c(&|d| d * (d.saturating_sub(1) + 2 * less2(d) + 2)) + clip * e,
            2 * e,
        ),
        _ => return None,
    })
}
