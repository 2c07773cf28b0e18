//! Multi-label binary cross-entropy on soft values.

/// Probabilities are kept inside `[PROB_CLAMP, 1 - PROB_CLAMP]`.
pub const PROB_CLAMP: f64 = 1e-12;

/// Cross-entropy of the final soft values against the transmitted bits.
///
/// The bit-1 probability is `o_v = σ(-s_v)`. Returns the loss summed over
/// bits and its gradient with respect to `s`; a clamped probability
/// contributes zero gradient.
pub fn bce_loss(s_final: &[f64], target_bits: &[u8]) -> (f64, Vec<f64>) {
    assert_eq!(s_final.len(), target_bits.len(), "soft/target length");
    let mut loss = 0.0;
    let mut grad = Vec::with_capacity(s_final.len());
    for (&s, &x) in s_final.iter().zip(target_bits) {
        let raw = 1.0 / (1.0 + s.exp());
        let o = raw.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
        let x = f64::from(x);
        loss -= x * o.ln() + (1.0 - x) * (1.0 - o).ln();
        // d/ds of the unclamped loss is x - o
        grad.push(if o == raw { x - o } else { 0.0 });
    }
    (loss, grad)
}
