//! Neural BP: sum-product BP with a learned multiplicative weight on every
//! channel input and every incoming check message, per iteration, plus a
//! weighted output layer.
//!
//! Forward pass, iteration `t` (0-based below, `c2v` of the previous
//! iteration starting at zero):
//!
//! ```text
//! v2c[e]  = clip(w_in[t][v]·l_v + Σ_{e' ∈ N(v), e' ≠ e} w_edge[t][e']·c2v[e'])
//! c2v[e]  = clip(2·artanh(∏_{e' ∈ M(c), e' ≠ e} tanh(v2c[e'] / 2)))
//! ```
//!
//! Intermediate soft values are the plain marginals `l_v + Σ c2v`; the final
//! one is `w_out[v]·l_v + Σ_{e ∈ N(v)} w_out_edge[e]·c2v[e]`. With every
//! weight at 1 the decoder reduces to sum-product BP.

use serde::{Deserialize, Serialize};

use super::check::clip_atanh_arg;
use super::{check_llr, clip, DecodeResult, DecoderError};
use crate::code::TannerGraph;

/// NBP parameters in one flat vector:
/// `w_in[T][n] | w_edge[T][E] | w_out[n] | w_out_edge[E]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbpWeights {
    iterations: usize,
    n_vars: usize,
    n_edges: usize,
    values: Vec<f64>,
}

impl NbpWeights {
    pub fn param_count(n_vars: usize, n_edges: usize, iterations: usize) -> usize {
        iterations * (n_vars + n_edges) + n_vars + n_edges
    }

    pub fn ones(graph: &TannerGraph, iterations: usize) -> Self {
        Self::filled(graph, iterations, 1.0)
    }

    pub fn filled(graph: &TannerGraph, iterations: usize, value: f64) -> Self {
        let (n, e) = (graph.n_vars(), graph.n_edges());
        Self {
            iterations,
            n_vars: n,
            n_edges: e,
            values: vec![value; Self::param_count(n, e, iterations)],
        }
    }

    pub fn from_values(
        graph: &TannerGraph,
        iterations: usize,
        values: Vec<f64>,
    ) -> Result<Self, DecoderError> {
        let (n, e) = (graph.n_vars(), graph.n_edges());
        let expected = Self::param_count(n, e, iterations);
        if values.len() != expected {
            return Err(DecoderError::ShapeMismatch {
                expected: format!("{expected} values (T={iterations}, n={n}, E={e})"),
                found: format!("{} values", values.len()),
            });
        }
        Ok(Self {
            iterations,
            n_vars: n,
            n_edges: e,
            values,
        })
    }

    #[inline]
    pub fn iterations(&self) -> usize {
        self.iterations
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

    #[inline]
    pub fn idx_in(&self, t: usize, v: usize) -> usize {
        t * self.n_vars + v
    }

    #[inline]
    pub fn idx_edge(&self, t: usize, e: usize) -> usize {
        self.iterations * self.n_vars + t * self.n_edges + e
    }

    #[inline]
    pub fn idx_out(&self, v: usize) -> usize {
        self.iterations * (self.n_vars + self.n_edges) + v
    }

    #[inline]
    pub fn idx_out_edge(&self, e: usize) -> usize {
        self.iterations * (self.n_vars + self.n_edges) + self.n_vars + e
    }

    pub fn w_in(&self, t: usize, v: usize) -> f64 {
        self.values[self.idx_in(t, v)]
    }

    pub fn w_edge(&self, t: usize, e: usize) -> f64 {
        self.values[self.idx_edge(t, e)]
    }

    pub fn w_out(&self, v: usize) -> f64 {
        self.values[self.idx_out(v)]
    }

    pub fn w_out_edge(&self, e: usize) -> f64 {
        self.values[self.idx_out_edge(e)]
    }

    pub(crate) fn check_shape(&self, graph: &TannerGraph) -> Result<(), DecoderError> {
        if self.n_vars != graph.n_vars()
            || self.n_edges != graph.n_edges()
            || self.values.len() != Self::param_count(self.n_vars, self.n_edges, self.iterations)
        {
            return Err(DecoderError::ShapeMismatch {
                expected: format!("n={}, E={}", graph.n_vars(), graph.n_edges()),
                found: format!("n={}, E={}", self.n_vars, self.n_edges),
            });
        }
        Ok(())
    }
}

/// Forward intermediates of one NBP iteration.
#[derive(Debug, Clone, Default)]
pub struct NbpIterationTape {
    /// Variable-to-check pre-activation, before clipping.
    pub v2c_pre: Vec<f64>,
    /// `tanh(v2c / 2)` of the clipped message.
    pub tanh: Vec<f64>,
    /// Leave-one-out product of tanh values per edge.
    pub product: Vec<f64>,
    /// `2·artanh(·)` of the clipped product, before message clipping.
    pub c2v_pre: Vec<f64>,
    pub c2v: Vec<f64>,
}

/// Everything the reverse pass needs from an NBP forward pass.
#[derive(Debug, Clone, Default)]
pub struct NbpTape {
    pub llr: Vec<f64>,
    pub iterations: Vec<NbpIterationTape>,
}

pub fn decode_nbp(
    llr: &[f64],
    graph: &TannerGraph,
    weights: &NbpWeights,
) -> Result<DecodeResult, DecoderError> {
    forward(llr, graph, weights, None)
}

/// [`decode_nbp`] that also records the reverse-pass tape.
pub fn decode_nbp_taped(
    llr: &[f64],
    graph: &TannerGraph,
    weights: &NbpWeights,
) -> Result<(DecodeResult, NbpTape), DecoderError> {
    let mut tape = NbpTape::default();
    let r = forward(llr, graph, weights, Some(&mut tape))?;
    Ok((r, tape))
}

fn forward(
    llr: &[f64],
    graph: &TannerGraph,
    w: &NbpWeights,
    mut tape: Option<&mut NbpTape>,
) -> Result<DecodeResult, DecoderError> {
    check_llr(llr, graph)?;
    w.check_shape(graph)?;
    let (n, n_edges, iters) = (graph.n_vars(), graph.n_edges(), w.iterations());
    let mut c2v = vec![0.0; n_edges];
    let mut trajectory = Vec::with_capacity(iters + 1);
    trajectory.push(llr.to_vec());
    if let Some(tape) = tape.as_deref_mut() {
        tape.llr = llr.to_vec();
        tape.iterations.clear();
    }

    for t in 0..iters {
        let mut v2c_pre = vec![0.0; n_edges];
        for (v, &l) in llr.iter().enumerate() {
            let adj = graph.var_edges(v);
            let total: f64 = adj.iter().map(|&e| w.w_edge(t, e) * c2v[e]).sum();
            let base = w.w_in(t, v) * l + total;
            for &e in adj {
                v2c_pre[e] = base - w.w_edge(t, e) * c2v[e];
            }
        }
        let tanh: Vec<f64> = v2c_pre.iter().map(|&x| (clip(x) / 2.0).tanh()).collect();
        let mut product = vec![0.0; n_edges];
        for c in 0..graph.n_checks() {
            let range = graph.check_edges(c);
            let mut acc = 1.0;
            for e in range.clone() {
                product[e] = acc;
                acc *= tanh[e];
            }
            acc = 1.0;
            for e in range.rev() {
                product[e] *= acc;
                acc *= tanh[e];
            }
        }
        let c2v_pre: Vec<f64> = product
            .iter()
            .map(|&p| 2.0 * clip_atanh_arg(p).atanh())
            .collect();
        c2v = c2v_pre.iter().map(|&x| clip(x)).collect();

        let last = t + 1 == iters;
        let s: Vec<f64> = (0..n)
            .map(|v| {
                let adj = graph.var_edges(v);
                if last {
                    w.w_out(v) * llr[v] + adj.iter().map(|&e| w.w_out_edge(e) * c2v[e]).sum::<f64>()
                } else {
                    llr[v] + adj.iter().map(|&e| c2v[e]).sum::<f64>()
                }
            })
            .collect();
        trajectory.push(s);

        if let Some(tape) = tape.as_deref_mut() {
            tape.iterations.push(NbpIterationTape {
                v2c_pre,
                tanh,
                product,
                c2v_pre,
                c2v: c2v.clone(),
            });
        }
    }
    Ok(DecodeResult::from_trajectory(trajectory, graph))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{build_tanner, construct};
    use crate::decoder::decode_sum_product;

    #[test]
    fn unit_weights_reduce_to_sum_product() {
        let (g, _) = build_tanner(&construct::hamming_7_4());
        let llr = [1.2, -0.3, 0.8, 2.1, -1.7, 0.4, 0.05];
        let a = decode_nbp(&llr, &g, &NbpWeights::ones(&g, 4)).unwrap();
        let b = decode_sum_product(&llr, &g, 4).unwrap();
        for (x, y) in a.soft_trajectory.iter().zip(&b.soft_trajectory) {
            for (p, q) in x.iter().zip(y) {
                assert!((p - q).abs() < 1e-9);
            }
        }
        assert_eq!(a.hard_bits, b.hard_bits);
    }

    #[test]
    fn zero_first_iteration_inputs_silence_v2c() {
        let (g, _) = build_tanner(&construct::hamming_7_4());
        let mut w = NbpWeights::ones(&g, 2);
        for v in 0..7 {
            let i = w.idx_in(0, v);
            w.values_mut()[i] = 0.0;
        }
        for e in 0..g.n_edges() {
            let i = w.idx_edge(0, e);
            w.values_mut()[i] = 0.0;
        }
        let llr = [1.0, -2.0, 0.5, 0.1, 3.0, -1.0, 2.0];
        let (_, tape) = decode_nbp_taped(&llr, &g, &w).unwrap();
        assert!(tape.iterations[0].v2c_pre.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn shape_is_checked() {
        let (g, _) = build_tanner(&construct::hamming_7_4());
        let (g2, _) = build_tanner(&construct::single_parity_check(4));
        let w = NbpWeights::ones(&g2, 2);
        assert!(matches!(
            decode_nbp(&[0.0; 7], &g, &w),
            Err(DecoderError::ShapeMismatch { .. })
        ));
        assert!(NbpWeights::from_values(&g, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn parameter_layout_is_disjoint() {
        let (g, _) = build_tanner(&construct::hamming_7_4());
        let w = NbpWeights::ones(&g, 3);
        let mut seen = vec![false; w.len()];
        let mut mark = |i: usize| {
            assert!(!seen[i]);
            seen[i] = true;
        };
        for t in 0..3 {
            (0..7).for_each(|v| mark(w.idx_in(t, v)));
            (0..g.n_edges()).for_each(|e| mark(w.idx_edge(t, e)));
        }
        (0..7).for_each(|v| mark(w.idx_out(v)));
        (0..g.n_edges()).for_each(|e| mark(w.idx_out_edge(e)));
        assert!(seen.iter().all(|&s| s));
    }
}
