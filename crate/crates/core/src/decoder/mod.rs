//! Iterative decoders on the Tanner graph.
//!
//! All decoders use a flooding schedule, run exactly `T` iterations and keep
//! the soft value `s` of every iteration. Messages (variable-to-check and
//! check-to-variable) are clipped to `[-MESSAGE_CLIP, MESSAGE_CLIP]`; the soft
//! values themselves are sums of clipped messages and stay finite for finite
//! channel LLRs.
//!
//! LLRs follow the `ln P(0)/P(1)` convention of [`crate::channel`].

mod check;
mod classic;
mod drn;
mod nbp;
pub mod weights;

use thiserror::Error;

use crate::code::TannerGraph;

pub use check::{check_min_sum, check_sum_product, sign};
pub use classic::{
    decode_min_sum, decode_min_sum_traced, decode_sum_product, decode_sum_product_traced,
    DecoderState,
};
pub use drn::{decode_drn, decode_drn_taped, DrnBlockTape, DrnTape, DrnWeights};
pub use nbp::{decode_nbp, decode_nbp_taped, NbpIterationTape, NbpTape, NbpWeights};

pub(crate) use check::TwoMin;

/// Clip bound for every message, in LLR units.
pub const MESSAGE_CLIP: f64 = 20.0;
/// Distance kept between the artanh argument and ±1.
pub const ATANH_CLIP_EPS: f64 = 1e-12;

#[inline]
pub(crate) fn clip(x: f64) -> f64 {
    x.clamp(-MESSAGE_CLIP, MESSAGE_CLIP)
}

#[inline]
pub(crate) fn inside_clip(x: f64) -> bool {
    x.abs() <= MESSAGE_CLIP
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecoderError {
    #[error("llr length {got} does not match code length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("weights shaped {found} do not fit graph/iterations {expected}")]
    ShapeMismatch { expected: String, found: String },
}

/// Output of one decode.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub hard_bits: Vec<u8>,
    /// `s^0 = l, s^1, …, s^T`.
    pub soft_trajectory: Vec<Vec<f64>>,
    /// First iteration whose hard decision satisfies every check.
    pub converged_at: Option<usize>,
}

impl DecodeResult {
    pub fn final_soft(&self) -> &[f64] {
        self.soft_trajectory.last().expect("trajectory holds s^0")
    }

    pub(crate) fn from_trajectory(trajectory: Vec<Vec<f64>>, graph: &TannerGraph) -> Self {
        let converged_at = trajectory
            .iter()
            .enumerate()
            .skip(1)
            .find(|(_, s)| graph.is_codeword(&hard_decision(s)))
            .map(|(t, _)| t);
        let hard_bits = hard_decision(trajectory.last().expect("nonempty"));
        Self {
            hard_bits,
            soft_trajectory: trajectory,
            converged_at,
        }
    }
}

/// Bit 1 exactly when the soft value is negative; zero decides 0.
pub fn hard_decision(s: &[f64]) -> Vec<u8> {
    s.iter().map(|&x| u8::from(x < 0.0)).collect()
}

pub(crate) fn check_llr(llr: &[f64], graph: &TannerGraph) -> Result<(), DecoderError> {
    if llr.len() != graph.n_vars() {
        return Err(DecoderError::LengthMismatch {
            expected: graph.n_vars(),
            got: llr.len(),
        });
    }
    Ok(())
}

/// Decoder selection for evaluation and the CLI.
#[derive(Debug, Clone, PartialEq)]
pub enum Decoder {
    /// Hard decision on the channel LLRs alone.
    Uncoded,
    SumProduct { iterations: usize },
    MinSum { iterations: usize },
    Nbp(NbpWeights),
    Drn(DrnWeights),
}

impl Decoder {
    pub fn decode(&self, llr: &[f64], graph: &TannerGraph) -> Result<DecodeResult, DecoderError> {
        match self {
            Decoder::Uncoded => {
                check_llr(llr, graph)?;
                Ok(DecodeResult::from_trajectory(vec![llr.to_vec()], graph))
            }
            Decoder::SumProduct { iterations } => decode_sum_product(llr, graph, *iterations),
            Decoder::MinSum { iterations } => decode_min_sum(llr, graph, *iterations),
            Decoder::Nbp(w) => decode_nbp(llr, graph, w),
            Decoder::Drn(w) => decode_drn(llr, graph, w),
        }
    }

    pub fn variant(&self) -> &'static str {
        match self {
            Decoder::Uncoded => "uncoded",
            Decoder::SumProduct { .. } => "bp",
            Decoder::MinSum { .. } => "minsum",
            Decoder::Nbp(_) => "nbp",
            Decoder::Drn(_) => "drn",
        }
    }

    pub fn iterations(&self) -> usize {
        match self {
            Decoder::Uncoded => 0,
            Decoder::SumProduct { iterations } | Decoder::MinSum { iterations } => *iterations,
            Decoder::Nbp(w) => w.iterations(),
            Decoder::Drn(w) => w.iterations(),
        }
    }
}
