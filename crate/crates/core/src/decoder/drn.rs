//! Doubly residual neural (DRN) decoder.
//!
//! Each block keeps only the soft values `s` and the previous check messages
//! `u`. For block `t`:
//!
//! ```text
//! a[e]   = clip(s_v - u[e])                                   residual input
//! m[e]   = clip(w[t][c] · ∏_{e'≠e} sign(a[e']) · min_{e'≠e} |a[e']|)
//! b[e]   = a[e] + m[e]                                        residual output
//! s'_v   = s_v + Σ_{e ∈ N(v)} (m[e] - u[e]),   u' = m
//! ```
//!
//! with `s = l` and `u = 0` before the first block. The soft update
//! telescopes to `s^t = l + Σ u^t`, so unit weights give plain min-sum.
//! One weight is shared by all edges of a check within a block.

use serde::{Deserialize, Serialize};

use super::check::sign;
use super::{check_llr, clip, DecodeResult, DecoderError, TwoMin};
use crate::code::TannerGraph;

/// `w[t][c]`, flattened row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrnWeights {
    iterations: usize,
    n_checks: usize,
    values: Vec<f64>,
}

impl DrnWeights {
    pub fn ones(graph: &TannerGraph, iterations: usize) -> Self {
        Self::filled(graph, iterations, 1.0)
    }

    pub fn filled(graph: &TannerGraph, iterations: usize, value: f64) -> Self {
        Self {
            iterations,
            n_checks: graph.n_checks(),
            values: vec![value; iterations * graph.n_checks()],
        }
    }

    pub fn from_values(
        graph: &TannerGraph,
        iterations: usize,
        values: Vec<f64>,
    ) -> Result<Self, DecoderError> {
        if values.len() != iterations * graph.n_checks() {
            return Err(DecoderError::ShapeMismatch {
                expected: format!("{iterations}x{} values", graph.n_checks()),
                found: format!("{} values", values.len()),
            });
        }
        Ok(Self {
            iterations,
            n_checks: graph.n_checks(),
            values,
        })
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn n_checks(&self) -> usize {
        self.n_checks
    }

    #[inline]
    pub fn get(&self, t: usize, c: usize) -> f64 {
        self.values[t * self.n_checks + c]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Forward intermediates of one DRN block.
#[derive(Debug, Clone, Default)]
pub struct DrnBlockTape {
    /// `s - u` before clipping.
    pub a_pre: Vec<f64>,
    /// Clipped residual input.
    pub a: Vec<f64>,
    /// Sign product over the other edges of the check.
    pub sign_product: Vec<f64>,
    /// `min |a|` over the other edges of the check.
    pub min_abs: Vec<f64>,
    /// Edge achieving that minimum (lowest id on ties); `None` for degree-1 checks.
    pub argmin: Vec<Option<usize>>,
    /// Check output before clipping.
    pub m_pre: Vec<f64>,
    pub m: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct DrnTape {
    pub blocks: Vec<DrnBlockTape>,
}

impl DrnTape {
    /// Residual output `b = a + m` of block `t` (0-based).
    pub fn residual_output(&self, t: usize) -> Vec<f64> {
        let b = &self.blocks[t];
        b.a.iter().zip(&b.m).map(|(a, m)| a + m).collect()
    }
}

pub fn decode_drn(
    llr: &[f64],
    graph: &TannerGraph,
    weights: &DrnWeights,
) -> Result<DecodeResult, DecoderError> {
    forward(llr, graph, weights, None)
}

pub fn decode_drn_taped(
    llr: &[f64],
    graph: &TannerGraph,
    weights: &DrnWeights,
) -> Result<(DecodeResult, DrnTape), DecoderError> {
    let mut tape = DrnTape::default();
    let r = forward(llr, graph, weights, Some(&mut tape))?;
    Ok((r, tape))
}

fn forward(
    llr: &[f64],
    graph: &TannerGraph,
    w: &DrnWeights,
    mut tape: Option<&mut DrnTape>,
) -> Result<DecodeResult, DecoderError> {
    check_llr(llr, graph)?;
    if w.n_checks != graph.n_checks() {
        return Err(DecoderError::ShapeMismatch {
            expected: format!("{} checks", graph.n_checks()),
            found: format!("{} checks", w.n_checks),
        });
    }
    let n_edges = graph.n_edges();
    let mut s = llr.to_vec();
    let mut u = vec![0.0; n_edges];
    let mut trajectory = Vec::with_capacity(w.iterations + 1);
    trajectory.push(s.clone());
    if let Some(tape) = tape.as_deref_mut() {
        tape.blocks.clear();
    }

    for t in 0..w.iterations {
        let a_pre: Vec<f64> = (0..n_edges).map(|e| s[graph.edge_var(e)] - u[e]).collect();
        let a: Vec<f64> = a_pre.iter().map(|&x| clip(x)).collect();
        let mut block = DrnBlockTape {
            sign_product: vec![0.0; n_edges],
            min_abs: vec![0.0; n_edges],
            argmin: vec![None; n_edges],
            m_pre: vec![0.0; n_edges],
            ..Default::default()
        };
        for c in 0..graph.n_checks() {
            let range = graph.check_edges(c);
            let start = range.start;
            let two = TwoMin::scan(a[range.clone()].iter().copied());
            let wc = w.get(t, c);
            for e in range {
                let (min, pos) = two.excluding(e - start);
                let sp = two.sign * sign(a[e]);
                block.sign_product[e] = sp;
                block.min_abs[e] = min;
                block.argmin[e] = pos.map(|p| p + start);
                block.m_pre[e] = wc * sp * min;
            }
        }
        let m: Vec<f64> = block.m_pre.iter().map(|&x| clip(x)).collect();
        for (v, sv) in s.iter_mut().enumerate() {
            *sv += graph
                .var_edges(v)
                .iter()
                .map(|&e| m[e] - u[e])
                .sum::<f64>();
        }
        trajectory.push(s.clone());
        if let Some(tape) = tape.as_deref_mut() {
            block.a_pre = a_pre;
            block.a = a;
            block.m = m.clone();
            tape.blocks.push(block);
        }
        u = m;
    }
    Ok(DecodeResult::from_trajectory(trajectory, graph))
}
