//! Reverse passes through the unrolled NBP and DRN decoders.
//!
//! Both take the tape of a completed forward pass and `dL/ds` of the final
//! soft values, and return `dL/dw` in the flat layout of the weight type.
//! Clipped quantities pass no gradient. The min in the DRN check update is
//! differentiated as a subgradient through the recorded argmin, with the sign
//! product held constant.

use super::TrainError;
use crate::code::TannerGraph;
use crate::decoder::{
    inside_clip, sign, DrnTape, DrnWeights, NbpTape, NbpWeights, ATANH_CLIP_EPS,
};

/// `dL/dw` for a DRN forward pass.
pub fn backward_drn(
    tape: &DrnTape,
    graph: &TannerGraph,
    weights: &DrnWeights,
    dloss_ds: &[f64],
) -> Result<Vec<f64>, TrainError> {
    let iters = weights.iterations();
    let n_edges = graph.n_edges();
    if tape.blocks.len() != iters
        || dloss_ds.len() != graph.n_vars()
        || tape.blocks.iter().any(|b| b.a.len() != n_edges)
    {
        return Err(TrainError::TapeMismatch);
    }
    let m = graph.n_checks();
    let mut grad = vec![0.0; iters * m];
    let mut gs = dloss_ds.to_vec();
    let mut gu = vec![0.0; n_edges];
    let mut da = vec![0.0; n_edges];

    for t in (0..iters).rev() {
        let blk = &tape.blocks[t];
        da.iter_mut().for_each(|x| *x = 0.0);
        for c in 0..m {
            let wc = weights.get(t, c);
            let mut gw = 0.0;
            for e in graph.check_edges(c) {
                if !inside_clip(blk.m_pre[e]) {
                    continue;
                }
                let dm = gs[graph.edge_var(e)] + gu[e];
                if dm == 0.0 {
                    continue;
                }
                gw += dm * blk.sign_product[e] * blk.min_abs[e];
                if let Some(j) = blk.argmin[e] {
                    da[j] += dm * wc * blk.sign_product[e] * sign(blk.a[j]);
                }
            }
            grad[t * m + c] = gw;
        }
        // s^t = s^{t-1} + Σ(m - u^{t-1}),  a = clip(s^{t-1} - u^{t-1})
        let mut next_gu = vec![0.0; n_edges];
        for e in 0..n_edges {
            let v = graph.edge_var(e);
            next_gu[e] = -gs[v];
        }
        for e in 0..n_edges {
            if inside_clip(blk.a_pre[e]) && da[e] != 0.0 {
                gs[graph.edge_var(e)] += da[e];
                next_gu[e] -= da[e];
            }
        }
        gu = next_gu;
    }
    Ok(grad)
}

/// `dL/dw` for an NBP forward pass.
pub fn backward_nbp(
    tape: &NbpTape,
    graph: &TannerGraph,
    weights: &NbpWeights,
    dloss_ds: &[f64],
) -> Result<Vec<f64>, TrainError> {
    let iters = weights.iterations();
    let (n, n_edges) = (graph.n_vars(), graph.n_edges());
    if tape.iterations.len() != iters
        || tape.llr.len() != n
        || dloss_ds.len() != n
        || tape.iterations.iter().any(|it| it.c2v.len() != n_edges)
    {
        return Err(TrainError::TapeMismatch);
    }
    let mut grad = vec![0.0; weights.len()];
    if iters == 0 {
        return Ok(grad);
    }
    let llr = &tape.llr;

    // output layer
    let last = &tape.iterations[iters - 1];
    let mut dc2v = vec![0.0; n_edges];
    for v in 0..n {
        grad[weights.idx_out(v)] = dloss_ds[v] * llr[v];
        for &e in graph.var_edges(v) {
            grad[weights.idx_out_edge(e)] = dloss_ds[v] * last.c2v[e];
            dc2v[e] = dloss_ds[v] * weights.w_out_edge(e);
        }
    }

    let zeros = vec![0.0; n_edges];
    let mut dtanh = vec![0.0; n_edges];
    let mut prefix = Vec::new();
    let mut suffix = Vec::new();
    for t in (0..iters).rev() {
        let it = &tape.iterations[t];
        // c2v = clip(2 artanh(clip_eps(P)))
        let dprod: Vec<f64> = (0..n_edges)
            .map(|e| {
                let p = it.product[e];
                if !inside_clip(it.c2v_pre[e]) || p.abs() > 1.0 - ATANH_CLIP_EPS {
                    0.0
                } else {
                    dc2v[e] * 2.0 / (1.0 - p * p)
                }
            })
            .collect();

        // P_i = prefix_i · suffix_i over the tanh values of the check
        for c in 0..graph.n_checks() {
            let range = graph.check_edges(c);
            let tau = &it.tanh[range.clone()];
            let dp = &dprod[range.clone()];
            let d = tau.len();
            prefix.clear();
            suffix.clear();
            suffix.resize(d, 1.0);
            let mut acc = 1.0;
            for &x in tau {
                prefix.push(acc);
                acc *= x;
            }
            acc = 1.0;
            for i in (0..d).rev() {
                suffix[i] = acc;
                acc *= tau[i];
            }
            let out = &mut dtanh[range];
            out.iter_mut().for_each(|x| *x = 0.0);
            // prefix chain p_{i+1} = p_i τ_i
            let mut g_next = 0.0;
            for i in (0..d).rev() {
                out[i] += g_next * prefix[i];
                g_next = dp[i] * suffix[i] + g_next * tau[i];
            }
            // suffix chain q_{i-1} = q_i τ_i
            let mut g_prev = 0.0;
            for i in 0..d {
                out[i] += g_prev * suffix[i];
                g_prev = dp[i] * prefix[i] + g_prev * tau[i];
            }
        }

        // τ = tanh(clip(v2c_pre) / 2)
        let dv2c: Vec<f64> = (0..n_edges)
            .map(|e| {
                if inside_clip(it.v2c_pre[e]) {
                    let tau = it.tanh[e];
                    dtanh[e] * 0.5 * (1.0 - tau * tau)
                } else {
                    0.0
                }
            })
            .collect();

        // v2c_pre[e] = w_in·l_v + Σ_{e'≠e} w_edge[e']·c2v_prev[e']
        let c2v_prev = if t > 0 {
            &tape.iterations[t - 1].c2v
        } else {
            &zeros
        };
        let mut dc2v_prev = vec![0.0; n_edges];
        for v in 0..n {
            let adj = graph.var_edges(v);
            let total: f64 = adj.iter().map(|&e| dv2c[e]).sum();
            grad[weights.idx_in(t, v)] += total * llr[v];
            for &e in adj {
                let coef = total - dv2c[e];
                grad[weights.idx_edge(t, e)] += coef * c2v_prev[e];
                dc2v_prev[e] = coef * weights.w_edge(t, e);
            }
        }
        dc2v = dc2v_prev;
    }
    Ok(grad)
}
