//! Parity-check matrices for the standard benchmark code families.
//!
//! These regenerate the registry files shipped under `codes/`: Hamming(7,4),
//! array LDPC codes, narrow-sense binary BCH codes in cyclic form, and polar
//! codes with a Bhattacharyya-bound frozen set.

use crate::gf2::Gf2Matrix;

/// Hamming(7,4) with column `j` equal to the binary expansion of `j + 1`.
pub fn hamming_7_4() -> Gf2Matrix {
    let mut h = Gf2Matrix::zeros(3, 7).expect("nonempty");
    for c in 0..7 {
        for r in 0..3 {
            if (c + 1) >> r & 1 == 1 {
                h.set(r, c, true);
            }
        }
    }
    h
}

/// The (n, n-1) single-parity-check code.
pub fn single_parity_check(n: usize) -> Gf2Matrix {
    let mut h = Gf2Matrix::zeros(1, n).expect("nonempty");
    for c in 0..n {
        h.set(0, c, true);
    }
    h
}

/// Array LDPC code: `j` block rows of `p × p` circulants, block `(i, l)` the
/// cyclic shift by `i·l`. For prime `p` and `j ≤ p` the rank is `j·p - j + 1`.
pub fn array_ldpc(p: usize, j: usize) -> Gf2Matrix {
    let mut h = Gf2Matrix::zeros(j * p, p * p).expect("nonempty");
    for i in 0..j {
        for r in 0..p {
            for l in 0..p {
                let x = (r + i * l) % p;
                h.set(i * p + r, l * p + x, true);
            }
        }
    }
    h
}

/// GF(2^m) with log/antilog tables.
struct Field {
    exp: Vec<usize>,
    log: Vec<usize>,
    order: usize,
}

impl Field {
    fn new(m: u32) -> Self {
        let primitive: usize = match m {
            3 => 0b1011,
            4 => 0b10011,
            5 => 0b100101,
            6 => 0b1000011,
            7 => 0b10001001,
            8 => 0b100011101,
            _ => panic!("unsupported field degree {m}"),
        };
        let order = (1usize << m) - 1;
        let mut exp = vec![0; 2 * order];
        let mut log = vec![0; order + 1];
        let mut x = 1usize;
        for i in 0..order {
            exp[i] = x;
            log[x] = i;
            x <<= 1;
            if x >> m & 1 == 1 {
                x ^= primitive;
            }
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        Self { exp, log, order }
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a] + self.log[b]]
        }
    }
}

/// Polynomials over GF(2) as bit masks (bit i = coefficient of x^i).
fn gf2_poly_mul(a: u128, b: u128) -> u128 {
    let mut out = 0u128;
    for i in 0..128 {
        if b >> i & 1 == 1 {
            out ^= a << i;
        }
    }
    out
}

fn degree(p: u128) -> usize {
    127 - p.leading_zeros() as usize
}

fn gf2_poly_divmod(mut num: u128, den: u128) -> (u128, u128) {
    let dd = degree(den);
    let mut q = 0u128;
    while num != 0 && degree(num) >= dd {
        let shift = degree(num) - dd;
        q |= 1 << shift;
        num ^= den << shift;
    }
    (q, num)
}

/// Minimal polynomial of α^i.
fn minimal_polynomial(field: &Field, i: usize) -> u128 {
    let mut coset = vec![i % field.order];
    let mut x = (2 * i) % field.order;
    while x != coset[0] {
        coset.push(x);
        x = (2 * x) % field.order;
    }
    // product of (x + α^c), coefficients in GF(2^m), lowest degree first
    let mut poly = vec![1usize];
    for &c in &coset {
        let root = field.exp[c];
        let mut next = vec![0usize; poly.len() + 1];
        for (d, &coef) in poly.iter().enumerate() {
            next[d + 1] ^= coef;
            next[d] ^= field.mul(coef, root);
        }
        poly = next;
    }
    poly.iter().enumerate().fold(0u128, |acc, (d, &c)| {
        assert!(c <= 1, "minimal polynomial must have binary coefficients");
        acc | ((c as u128) << d)
    })
}

/// Generator polynomial of the narrow-sense primitive BCH code of length
/// `2^m - 1` and designed distance `2t + 1`.
pub fn bch_generator_polynomial(m: u32, t: usize) -> u128 {
    let field = Field::new(m);
    let mut seen = Vec::new();
    let mut g = 1u128;
    for i in 1..=2 * t {
        let mp = minimal_polynomial(&field, i);
        if !seen.contains(&mp) {
            seen.push(mp);
            g = gf2_poly_mul(g, mp);
        }
    }
    g
}

/// Cyclic-form parity-check matrix of a primitive BCH code: `n - k` shifted
/// copies of the reciprocal check polynomial `x^k h(1/x)`.
pub fn bch(m: u32, t: usize) -> Gf2Matrix {
    let n = (1usize << m) - 1;
    let g = bch_generator_polynomial(m, t);
    let xn1 = (1u128 << n) | 1;
    let (hpoly, rem) = gf2_poly_divmod(xn1, g);
    assert_eq!(rem, 0, "g(x) must divide x^n + 1");
    let k = degree(hpoly);
    let mut h = Gf2Matrix::zeros(n - k, n).expect("nonempty");
    for row in 0..n - k {
        for j in 0..=k {
            if hpoly >> (k - j) & 1 == 1 {
                h.set(row, row + j, true);
            }
        }
    }
    h
}

/// Frozen positions of a length-`n` polar code (`n` a power of two) keeping
/// `k` information bits, ranked by the Bhattacharyya parameter at design
/// Eb/N0 `design_snr_db`. Indices refer to the unpermuted kernel `F^{⊗log n}`.
pub fn polar_frozen_set(n: usize, k: usize, design_snr_db: f64) -> Vec<usize> {
    assert!(n.is_power_of_two() && k < n);
    let rate = k as f64 / n as f64;
    let z0 = (-rate * 10f64.powf(design_snr_db / 10.0)).exp();
    let mut z = vec![z0];
    while z.len() < n {
        let half = z.len();
        let mut next = vec![0.0; 2 * half];
        for i in 0..half {
            next[i] = 2.0 * z[i] - z[i] * z[i];
            next[i + half] = z[i] * z[i];
        }
        z = next;
    }
    let mut order: Vec<usize> = (0..n).collect();
    // least reliable first; index breaks ties
    order.sort_by(|&a, &b| z[b].total_cmp(&z[a]).then(a.cmp(&b)));
    let mut frozen = order[..n - k].to_vec();
    frozen.sort_unstable();
    frozen
}

/// Polar code parity-check matrix: one row per frozen index `f`, equal to
/// column `f` of `F^{⊗log n}` (ones at every `i` whose bits contain `f`).
pub fn polar(n: usize, k: usize, design_snr_db: f64) -> Gf2Matrix {
    let frozen = polar_frozen_set(n, k, design_snr_db);
    let mut h = Gf2Matrix::zeros(frozen.len(), n).expect("nonempty");
    for (row, &f) in frozen.iter().enumerate() {
        for i in 0..n {
            if i & f == f {
                h.set(row, i, true);
            }
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{generator_from_parity, row_reduce};

    #[test]
    fn array_code_dimensions() {
        for (p, j, k) in [(7, 4, 24), (11, 4, 80), (11, 5, 70), (11, 6, 60)] {
            let h = array_ldpc(p, j);
            assert_eq!(h.rows(), j * p);
            assert_eq!(p * p - row_reduce(&h).rank, k, "p={p} j={j}");
            assert_eq!(h.count_ones(), j * p * p);
        }
    }

    #[test]
    fn bch_dimensions() {
        for (m, t, k) in [(5, 3, 16), (6, 5, 36), (6, 3, 45), (6, 2, 51), (4, 1, 11)] {
            let h = bch(m, t);
            let n = (1 << m) - 1;
            assert_eq!(h.rows(), n - k);
            assert_eq!(n - row_reduce(&h).rank, k, "m={m} t={t}");
        }
    }

    #[test]
    fn bch_generator_polynomial_is_a_codeword() {
        let h = bch(6, 5);
        let g = bch_generator_polynomial(6, 5);
        let word: Vec<u8> = (0..63).map(|i| (g >> i & 1) as u8).collect();
        assert!(h.mul_vec(&word).unwrap().iter().all(|&s| s == 0));
        // Hamming(15,11) generator is x^4 + x + 1
        assert_eq!(bch_generator_polynomial(4, 1), 0b10011);
    }

    #[test]
    fn polar_parity_matches_kernel() {
        let h = polar(16, 8, 2.0);
        assert_eq!(h.rows(), 8);
        let g = generator_from_parity(&h).unwrap();
        assert_eq!(g.k, 8);
        let frozen = polar_frozen_set(16, 8, 2.0);
        // every kernel row outside the frozen set is a codeword
        for a in (0..16).filter(|a| !frozen.contains(a)) {
            let row: Vec<u8> = (0..16).map(|j| u8::from(j & a == j)).collect();
            assert!(h.mul_vec(&row).unwrap().iter().all(|&s| s == 0));
        }
    }

    #[test]
    fn polar_frozen_set_prefers_low_weight_indices() {
        let frozen = polar_frozen_set(8, 4, 0.0);
        assert!(frozen.contains(&0));
        assert!(!frozen.contains(&7));
    }
}
