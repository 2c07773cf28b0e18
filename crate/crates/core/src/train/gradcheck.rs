//! Finite-difference verification of the reverse passes.
//!
//! The decoders are piecewise smooth: DRN has kinks where two candidate
//! minima tie, where a message changes sign, and at the clip boundaries; NBP
//! only at its clips. [`drn_margin`] and [`nbp_margin`] measure how far a
//! forward pass is from the nearest kink so that checks can skip inputs on
//! which central differences straddle one.

use rand::Rng;

use super::Trainable;
use crate::channel::{llr_from_received, modulate, sigma_from_snr, stream_rng, streams, transmit};
use crate::code::{CodeSpec, TannerGraph};
use crate::decoder::{
    decode_drn_taped, decode_nbp_taped, DrnWeights, NbpWeights, MESSAGE_CLIP,
};

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub params: usize,
    /// `‖g_analytic - g_fd‖ / max(‖g_analytic‖, ‖g_fd‖)`.
    pub rel_error: f64,
    pub max_abs_error: f64,
    pub grad_norm: f64,
}

/// Compares the analytic gradient of the summed loss over `samples` with
/// central differences of step `h` in every weight.
pub fn gradient_check<W: Trainable>(
    graph: &TannerGraph,
    weights: &W,
    samples: &[(Vec<f64>, Vec<u8>)],
    h: f64,
) -> GradCheckReport {
    let p = weights.values().len();
    let mut analytic = vec![0.0; p];
    for (llr, x) in samples {
        let (_, g) = weights.loss_and_grad(graph, llr, x);
        analytic.iter_mut().zip(&g).for_each(|(a, b)| *a += b);
    }
    let total = |w: &W| -> f64 { samples.iter().map(|(l, x)| w.loss(graph, l, x)).sum() };
    let mut numeric = vec![0.0; p];
    let mut probe = weights.clone();
    for i in 0..p {
        let w0 = weights.values()[i];
        probe.values_mut()[i] = w0 + h;
        let up = total(&probe);
        probe.values_mut()[i] = w0 - h;
        let down = total(&probe);
        probe.values_mut()[i] = w0;
        numeric[i] = (up - down) / (2.0 * h);
    }
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = analytic.iter().zip(&numeric).map(|(a, b)| a - b).collect();
    let scale = norm(&analytic).max(norm(&numeric));
    GradCheckReport {
        params: p,
        rel_error: if scale == 0.0 { 0.0 } else { norm(&diff) / scale },
        max_abs_error: diff.iter().fold(0.0, |m, d| m.max(d.abs())),
        grad_norm: norm(&analytic),
    }
}

fn clip_distance(x: f64) -> f64 {
    (x.abs() - MESSAGE_CLIP).abs()
}

/// Smallest distance to a DRN kink: ties among the two or three smallest
/// `|a|` of a check, `a` near zero, and pre-clip values near the clip.
pub fn drn_margin(graph: &TannerGraph, weights: &DrnWeights, llr: &[f64]) -> f64 {
    let (_, tape) = decode_drn_taped(llr, graph, weights).expect("shapes checked by caller");
    let mut margin = f64::INFINITY;
    let mut mags = Vec::new();
    for blk in &tape.blocks {
        for e in 0..graph.n_edges() {
            margin = margin
                .min(clip_distance(blk.a_pre[e]))
                .min(clip_distance(blk.m_pre[e]))
                .min(blk.a[e].abs());
        }
        for c in 0..graph.n_checks() {
            mags.clear();
            // saturated inputs pass no gradient, so ties among them are harmless
            mags.extend(
                graph
                    .check_edges(c)
                    .map(|e| blk.a[e].abs())
                    .filter(|&x| x < MESSAGE_CLIP),
            );
            mags.sort_by(f64::total_cmp);
            for pair in mags.windows(2).take(2) {
                margin = margin.min(pair[1] - pair[0]);
            }
        }
    }
    margin
}

/// Smallest distance to an NBP kink: pre-clip messages near the clip. The
/// artanh guard only binds beyond the message clip, so it needs no margin.
pub fn nbp_margin(graph: &TannerGraph, weights: &NbpWeights, llr: &[f64]) -> f64 {
    let (_, tape) = decode_nbp_taped(llr, graph, weights).expect("shapes checked by caller");
    let mut margin = f64::INFINITY;
    for it in &tape.iterations {
        for e in 0..graph.n_edges() {
            margin = margin
                .min(clip_distance(it.v2c_pre[e]))
                .min(clip_distance(it.c2v_pre[e]));
        }
    }
    margin
}


/// Minimum distance from a kink for a point to count as checkable.
pub const TIE_MARGIN: f64 = 1e-3;

/// Outcome of [`check_random_point`].
#[derive(Debug, Clone, PartialEq)]
pub struct PointCheck {
    pub report: GradCheckReport,
    /// Draws rejected by the margin guard before this one.
    pub rejected: usize,
    pub margin: f64,
}

/// Gradient check at random point `point`: weights uniform in
/// `[0.7, 1.3]`, `samples` random codewords at `snr_db`. Draws whose forward
/// pass comes within [`TIE_MARGIN`] of a kink are redrawn.
pub fn check_random_point<W: Trainable>(
    code: &CodeSpec,
    iterations: usize,
    seed: u64,
    point: u64,
    snr_db: f64,
    samples: usize,
    h: f64,
) -> Option<PointCheck> {
    let sigma = sigma_from_snr(snr_db, code.rate()).ok()?;
    for attempt in 0..10_000u64 {
        let mut rng = stream_rng(seed, &[streams::GRADCHECK, point, attempt]);
        let mut w = W::unit(&code.graph, iterations);
        for x in w.values_mut() {
            *x = rng.random_range(0.7..1.3);
        }
        let batch: Vec<(Vec<f64>, Vec<u8>)> = (0..samples)
            .map(|_| {
                let msg: Vec<u8> = (0..code.k).map(|_| u8::from(rng.random::<bool>())).collect();
                let cw = code.generator.encode(&msg).expect("message length is k");
                let r = transmit(&modulate(&cw), sigma, &mut rng);
                (llr_from_received(&r, sigma), cw)
            })
            .collect();
        let margin = batch
            .iter()
            .map(|(l, _)| w.smoothness_margin(&code.graph, l))
            .fold(f64::INFINITY, f64::min);
        if margin > TIE_MARGIN {
            return Some(PointCheck {
                report: gradient_check(&code.graph, &w, &batch, h),
                rejected: attempt as usize,
                margin,
            });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::construct;
    use crate::decoder::{DrnWeights, NbpWeights};

    #[test]
    fn random_points_on_hamming_pass() {
        let code = CodeSpec::new("hamming_7_4", construct::hamming_7_4(), Some(4)).unwrap();
        for point in 0..3 {
            let d = check_random_point::<DrnWeights>(&code, 3, 1, point, 2.0, 4, 1e-5).unwrap();
            assert!(d.report.rel_error < 1e-4, "{d:?}");
            assert!(d.margin > TIE_MARGIN);
            let n = check_random_point::<NbpWeights>(&code, 3, 1, point, 2.0, 4, 1e-5).unwrap();
            assert!(n.report.rel_error < 1e-4, "{n:?}");
        }
    }
}
