//! Classical sum-product and min-sum BP.

use super::check::{min_sum_extrinsic, sum_product_extrinsic};
use super::{check_llr, clip, DecodeResult, DecoderError};
use crate::code::TannerGraph;

/// Snapshot of the message state after one iteration.
#[derive(Debug, Clone)]
pub struct DecoderState<'a> {
    pub iteration: usize,
    pub s: &'a [f64],
    pub u_v2c: &'a [f64],
    pub u_c2v: &'a [f64],
}

#[derive(Clone, Copy)]
enum CheckRule {
    SumProduct,
    MinSum,
}

fn run(
    llr: &[f64],
    graph: &TannerGraph,
    iterations: usize,
    rule: CheckRule,
    observer: &mut dyn FnMut(&DecoderState<'_>),
) -> Result<DecodeResult, DecoderError> {
    check_llr(llr, graph)?;
    let n_edges = graph.n_edges();
    let mut v2c = vec![0.0; n_edges];
    let mut c2v = vec![0.0; n_edges];
    let mut trajectory = Vec::with_capacity(iterations + 1);
    trajectory.push(llr.to_vec());
    let mut inputs = Vec::with_capacity(graph.max_check_degree());
    let mut outputs = vec![0.0; graph.max_check_degree()];

    for t in 1..=iterations {
        for v in 0..graph.n_vars() {
            let adj = graph.var_edges(v);
            for &e in adj {
                let extrinsic: f64 = adj.iter().filter(|&&o| o != e).map(|&o| c2v[o]).sum();
                v2c[e] = clip(llr[v] + extrinsic);
            }
        }
        for c in 0..graph.n_checks() {
            let range = graph.check_edges(c);
            inputs.clear();
            inputs.extend_from_slice(&v2c[range.clone()]);
            let out = &mut outputs[..inputs.len()];
            match rule {
                CheckRule::SumProduct => sum_product_extrinsic(&inputs, out),
                CheckRule::MinSum => min_sum_extrinsic(&inputs, 1.0, out),
            }
            for (e, &o) in range.zip(out.iter()) {
                c2v[e] = clip(o);
            }
        }
        let s: Vec<f64> = (0..graph.n_vars())
            .map(|v| llr[v] + graph.var_edges(v).iter().map(|&e| c2v[e]).sum::<f64>())
            .collect();
        observer(&DecoderState {
            iteration: t,
            s: &s,
            u_v2c: &v2c,
            u_c2v: &c2v,
        });
        trajectory.push(s);
    }
    Ok(DecodeResult::from_trajectory(trajectory, graph))
}

/// Sum-product BP for `iterations` flooding iterations.
pub fn decode_sum_product(
    llr: &[f64],
    graph: &TannerGraph,
    iterations: usize,
) -> Result<DecodeResult, DecoderError> {
    run(llr, graph, iterations, CheckRule::SumProduct, &mut |_| {})
}

/// [`decode_sum_product`], calling `observer` after every iteration.
pub fn decode_sum_product_traced(
    llr: &[f64],
    graph: &TannerGraph,
    iterations: usize,
    observer: &mut dyn FnMut(&DecoderState<'_>),
) -> Result<DecodeResult, DecoderError> {
    run(llr, graph, iterations, CheckRule::SumProduct, observer)
}

/// Min-sum BP (unit weight).
pub fn decode_min_sum(
    llr: &[f64],
    graph: &TannerGraph,
    iterations: usize,
) -> Result<DecodeResult, DecoderError> {
    run(llr, graph, iterations, CheckRule::MinSum, &mut |_| {})
}

pub fn decode_min_sum_traced(
    llr: &[f64],
    graph: &TannerGraph,
    iterations: usize,
    observer: &mut dyn FnMut(&DecoderState<'_>),
) -> Result<DecodeResult, DecoderError> {
    run(llr, graph, iterations, CheckRule::MinSum, observer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{build_tanner, construct};
    use crate::gf2::Gf2Matrix;

    /// Exact bitwise posterior LLRs by enumerating all codewords.
    fn map_llr(h: &Gf2Matrix, llr: &[f64]) -> Vec<f64> {
        let n = h.cols();
        let mut p0 = vec![0.0; n];
        let mut p1 = vec![0.0; n];
        for word in 0u32..(1 << n) {
            let bits: Vec<u8> = (0..n).map(|i| (word >> i & 1) as u8).collect();
            if h.mul_vec(&bits).unwrap().iter().any(|&s| s == 1) {
                continue;
            }
            // P(r | x) ∝ exp(-Σ_{x_i=1} L_i)
            let weight: f64 = (-bits
                .iter()
                .zip(llr)
                .map(|(&b, &l)| if b == 1 { l } else { 0.0 })
                .sum::<f64>())
            .exp();
            for i in 0..n {
                if bits[i] == 1 {
                    p1[i] += weight;
                } else {
                    p0[i] += weight;
                }
            }
        }
        p0.iter().zip(&p1).map(|(a, b)| (a / b).ln()).collect()
    }

    #[test]
    fn single_parity_check_one_iteration_is_map() {
        let h = construct::single_parity_check(3);
        let (g, _) = build_tanner(&h);
        let llr = [0.7, -1.2, 2.5];
        let r = decode_sum_product(&llr, &g, 1).unwrap();
        let map = map_llr(&h, &llr);
        for (a, b) in r.final_soft().iter().zip(&map) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn min_sum_overestimates_on_tree() {
        let (g, _) = build_tanner(&construct::single_parity_check(3));
        let llr = [0.7, -1.2, 2.5];
        let sp = decode_sum_product(&llr, &g, 1).unwrap();
        let ms = decode_min_sum(&llr, &g, 1).unwrap();
        for ((a, b), l) in sp.final_soft().iter().zip(ms.final_soft()).zip(&llr) {
            assert_eq!(a.signum(), b.signum());
            assert!((b - l).abs() >= (a - l).abs());
        }
    }

    #[test]
    fn noiseless_codeword_is_fixpoint() {
        let h = construct::hamming_7_4();
        let (g, _) = build_tanner(&h);
        let cw = [1u8, 1, 1, 0, 0, 0, 0];
        assert!(g.is_codeword(&cw));
        let llr: Vec<f64> = cw.iter().map(|&b| if b == 0 { 15.0 } else { -15.0 }).collect();
        for r in [
            decode_sum_product(&llr, &g, 5).unwrap(),
            decode_min_sum(&llr, &g, 5).unwrap(),
        ] {
            assert_eq!(r.hard_bits, cw);
            assert_eq!(r.converged_at, Some(1));
        }
    }

    #[test]
    fn residual_input_identity_holds() {
        let (g, _) = build_tanner(&construct::array_ldpc(7, 4));
        let llr: Vec<f64> = (0..49).map(|i| ((i * 37 % 11) as f64 - 4.0) * 0.6).collect();
        let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
        let mut checked = 0;
        decode_sum_product_traced(&llr, &g, 5, &mut |st| {
            let (s_prev, c2v_prev) = prev
                .take()
                .unwrap_or_else(|| (llr.clone(), vec![0.0; g.n_edges()]));
            for e in 0..g.n_edges() {
                let a = s_prev[g.edge_var(e)] - c2v_prev[e];
                assert!((a.clamp(-20.0, 20.0) - st.u_v2c[e]).abs() < 1e-12);
                checked += 1;
            }
            prev = Some((st.s.to_vec(), st.u_c2v.to_vec()));
        })
        .unwrap();
        assert_eq!(checked, 5 * g.n_edges());
    }

    #[test]
    fn rejects_wrong_llr_length() {
        let (g, _) = build_tanner(&construct::hamming_7_4());
        assert!(matches!(
            decode_min_sum(&[0.0; 3], &g, 1),
            Err(DecoderError::LengthMismatch { expected: 7, got: 3 })
        ));
    }
}
