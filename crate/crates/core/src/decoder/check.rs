//! Check-node update kernels.

use super::{ATANH_CLIP_EPS, MESSAGE_CLIP};

/// `sign(x)` with `sign(0) = +1`.
#[inline]
pub fn sign(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

#[inline]
pub(crate) fn clip_atanh_arg(x: f64) -> f64 {
    x.clamp(-1.0 + ATANH_CLIP_EPS, 1.0 - ATANH_CLIP_EPS)
}

/// Sum-product check output from the extrinsic inputs of one edge:
/// `2 artanh(∏ tanh(x/2))`, with the artanh argument clipped away from ±1.
pub fn check_sum_product(inputs: &[f64]) -> f64 {
    let prod: f64 = inputs.iter().map(|&x| (x / 2.0).tanh()).product();
    2.0 * clip_atanh_arg(prod).atanh()
}

/// Weighted min-sum check output: `w · ∏ sign(x) · min |x|`.
///
/// An empty input set behaves as a certain parity constraint and yields
/// `w · C` with `C` the message clip bound.
pub fn check_min_sum(inputs: &[f64], w: f64) -> f64 {
    if inputs.is_empty() {
        return w * MESSAGE_CLIP;
    }
    let sgn: f64 = inputs.iter().map(|&x| sign(x)).product();
    let min = inputs.iter().fold(f64::INFINITY, |m, &x| m.min(x.abs()));
    w * sgn * min
}

/// All leave-one-out sum-product outputs of one check at once.
pub(crate) fn sum_product_extrinsic(inputs: &[f64], out: &mut [f64]) {
    let d = inputs.len();
    let tanhs: Vec<f64> = inputs.iter().map(|&x| (x / 2.0).tanh()).collect();
    // out[i] <- product of tanhs before i, then times product after i
    let mut acc = 1.0;
    for i in 0..d {
        out[i] = acc;
        acc *= tanhs[i];
    }
    acc = 1.0;
    for i in (0..d).rev() {
        out[i] = 2.0 * clip_atanh_arg(out[i] * acc).atanh();
        acc *= tanhs[i];
    }
}

/// Running first and second minimum of `|x|` with their positions; ties go
/// to the earlier position.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TwoMin {
    pub min1: f64,
    pub idx1: usize,
    pub min2: f64,
    pub idx2: usize,
    pub sign: f64,
}

impl TwoMin {
    pub fn scan(inputs: impl Iterator<Item = f64>) -> Self {
        let mut t = TwoMin {
            min1: f64::INFINITY,
            idx1: usize::MAX,
            min2: f64::INFINITY,
            idx2: usize::MAX,
            sign: 1.0,
        };
        for (i, x) in inputs.enumerate() {
            t.sign *= sign(x);
            let m = x.abs();
            if m < t.min1 {
                t.min2 = t.min1;
                t.idx2 = t.idx1;
                t.min1 = m;
                t.idx1 = i;
            } else if m < t.min2 {
                t.min2 = m;
                t.idx2 = i;
            }
        }
        t
    }

    /// `(min over the others, position of that min or None)` for position `i`.
    #[inline]
    pub fn excluding(&self, i: usize) -> (f64, Option<usize>) {
        let (m, idx) = if i == self.idx1 {
            (self.min2, self.idx2)
        } else {
            (self.min1, self.idx1)
        };
        if idx == usize::MAX {
            (MESSAGE_CLIP, None)
        } else {
            (m, Some(idx))
        }
    }
}

/// All leave-one-out min-sum outputs of one check at once.
pub(crate) fn min_sum_extrinsic(inputs: &[f64], w: f64, out: &mut [f64]) {
    let t = TwoMin::scan(inputs.iter().copied());
    for (i, o) in out.iter_mut().enumerate().take(inputs.len()) {
        let (m, _) = t.excluding(i);
        *o = w * t.sign * sign(inputs[i]) * m;
    }
}
