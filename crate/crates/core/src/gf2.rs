//! Dense binary-field linear algebra.
//!
//! Matrices are stored bit-packed, one run of `u64` words per row. All codes
//! handled here are short (a few hundred columns at most), so dense storage
//! is both simpler and faster than a sparse representation.

use std::fmt;

use thiserror::Error;

/// Errors raised by GF(2) operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("degenerate code: parity-check matrix has full column rank {rank}, leaving no information bits")]
    DegenerateCode { rank: usize },
    #[error("matrix must have at least one row and one column (got {rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },
}

const WORD: usize = 64;

/// A dense binary matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self, Gf2Error> {
        if rows == 0 || cols == 0 {
            return Err(Gf2Error::EmptyMatrix { rows, cols });
        }
        let words_per_row = cols.div_ceil(WORD);
        Ok(Self {
            rows,
            cols,
            words_per_row,
            bits: vec![0; rows * words_per_row],
        })
    }

    pub fn identity(size: usize) -> Result<Self, Gf2Error> {
        let mut m = Self::zeros(size, size)?;
        for i in 0..size {
            m.set(i, i, true);
        }
        Ok(m)
    }

    /// Builds a matrix from rows of 0/1 entries. Any nonzero entry counts as 1.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self, Gf2Error> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(n_rows, n_cols)?;
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n_cols {
                return Err(Gf2Error::LengthMismatch {
                    expected: n_cols,
                    got: row.len(),
                });
            }
            for (j, &b) in row.iter().enumerate() {
                if b != 0 {
                    m.set(i, j, true);
                }
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        assert!(row < self.rows && col < self.cols, "index out of range");
        let w = self.bits[row * self.words_per_row + col / WORD];
        ((w >> (col % WORD)) & 1) as u8
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        assert!(row < self.rows && col < self.cols, "index out of range");
        let w = &mut self.bits[row * self.words_per_row + col / WORD];
        let mask = 1u64 << (col % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    fn row_words(&self, row: usize) -> &[u64] {
        &self.bits[row * self.words_per_row..(row + 1) * self.words_per_row]
    }

    /// `row[dst] ^= row[src]`
    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let wpr = self.words_per_row;
        for k in 0..wpr {
            let s = self.bits[src * wpr + k];
            self.bits[dst * wpr + k] ^= s;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let wpr = self.words_per_row;
        for k in 0..wpr {
            self.bits.swap(a * wpr + k, b * wpr + k);
        }
    }

    /// Row `r` as a vector of 0/1 entries.
    pub fn row(&self, r: usize) -> Vec<u8> {
        (0..self.cols).map(|c| self.get(r, c)).collect()
    }

    /// Column indices holding a 1 in row `r`, ascending.
    pub fn row_support(&self, r: usize) -> Vec<usize> {
        (0..self.cols).filter(|&c| self.get(r, c) == 1).collect()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut t = Gf2Matrix::zeros(self.cols, self.rows).expect("nonempty");
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) == 1 {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &Gf2Matrix) -> Result<Gf2Matrix, Gf2Error> {
        if self.cols != other.rows {
            return Err(Gf2Error::LengthMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Gf2Matrix::zeros(self.rows, other.cols)?;
        let wpr = out.words_per_row;
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) == 1 {
                    let src = other.row_words(k);
                    for (w, s) in out.bits[r * wpr..(r + 1) * wpr].iter_mut().zip(src) {
                        *w ^= s;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `self · v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[u8]) -> Result<Vec<u8>, Gf2Error> {
        if v.len() != self.cols {
            return Err(Gf2Error::LengthMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        let packed = pack(v);
        Ok((0..self.rows)
            .map(|r| {
                let ones: u32 = self
                    .row_words(r)
                    .iter()
                    .zip(&packed)
                    .map(|(a, b)| (a & b).count_ones())
                    .sum();
                (ones & 1) as u8
            })
            .collect())
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: String = (0..self.cols)
                .map(|c| if self.get(r, c) == 1 { '1' } else { '0' })
                .collect();
            writeln!(f, "  {line}")?;
        }
        write!(f, "]")
    }
}

fn pack(v: &[u8]) -> Vec<u64> {
    let mut out = vec![0u64; v.len().div_ceil(WORD)];
    for (i, &b) in v.iter().enumerate() {
        if b != 0 {
            out[i / WORD] |= 1 << (i % WORD);
        }
    }
    out
}

/// Output of Gauss-Jordan elimination.
#[derive(Debug, Clone)]
pub struct RowReduction {
    pub reduced: Gf2Matrix,
    pub rank: usize,
    /// Pivot column of each of the first `rank` rows, strictly increasing.
    pub pivot_columns: Vec<usize>,
}

/// Reduced row-echelon form over GF(2).
pub fn row_reduce(m: &Gf2Matrix) -> RowReduction {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..a.cols {
        if rank == a.rows {
            break;
        }
        let Some(p) = (rank..a.rows).find(|&r| a.get(r, col) == 1) else {
            continue;
        };
        a.swap_rows(rank, p);
        for r in 0..a.rows {
            if r != rank && a.get(r, col) == 1 {
                a.xor_row_into(rank, r);
            }
        }
        pivots.push(col);
        rank += 1;
    }
    RowReduction {
        reduced: a,
        rank,
        pivot_columns: pivots,
    }
}

/// Systematic generator matrix derived from a parity-check matrix.
///
/// `column_permutation[j]` is the codeword position that carries permuted
/// position `j`; the first `k` permuted positions are the information bits.
#[derive(Debug, Clone)]
pub struct GeneratorMatrix {
    pub g: Gf2Matrix,
    pub column_permutation: Vec<usize>,
    pub k: usize,
    pub n: usize,
}

impl GeneratorMatrix {
    /// Codeword positions carrying the message, in message order.
    pub fn information_positions(&self) -> &[usize] {
        &self.column_permutation[..self.k]
    }

    /// Reads the message back out of a codeword.
    pub fn extract_message(&self, codeword: &[u8]) -> Result<Vec<u8>, Gf2Error> {
        if codeword.len() != self.n {
            return Err(Gf2Error::LengthMismatch {
                expected: self.n,
                got: codeword.len(),
            });
        }
        Ok(self
            .information_positions()
            .iter()
            .map(|&p| codeword[p])
            .collect())
    }

    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>, Gf2Error> {
        encode(self, message)
    }
}

/// Derives a systematic generator from `h`. Redundant rows of `h` are allowed;
/// the information length is `n - rank(h)`.
pub fn generator_from_parity(h: &Gf2Matrix) -> Result<GeneratorMatrix, Gf2Error> {
    let n = h.cols();
    let rr = row_reduce(h);
    if rr.rank == n {
        return Err(Gf2Error::DegenerateCode { rank: rr.rank });
    }
    let k = n - rr.rank;
    let mut is_pivot = vec![false; n];
    for &p in &rr.pivot_columns {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    debug_assert_eq!(free.len(), k);

    // Each free column f spawns the codeword with x_f = 1, other free bits 0,
    // and pivot bits read off the reduced rows.
    let mut g = Gf2Matrix::zeros(k, n)?;
    for (i, &f) in free.iter().enumerate() {
        g.set(i, f, true);
        for (row, &p) in rr.pivot_columns.iter().enumerate() {
            if rr.reduced.get(row, f) == 1 {
                g.set(i, p, true);
            }
        }
    }

    let mut column_permutation = free;
    column_permutation.extend_from_slice(&rr.pivot_columns);
    Ok(GeneratorMatrix {
        g,
        column_permutation,
        k,
        n,
    })
}

/// `message · G`.
pub fn encode(g: &GeneratorMatrix, message: &[u8]) -> Result<Vec<u8>, Gf2Error> {
    if message.len() != g.k {
        return Err(Gf2Error::LengthMismatch {
            expected: g.k,
            got: message.len(),
        });
    }
    let mut acc = vec![0u64; g.n.div_ceil(WORD)];
    for (i, &m) in message.iter().enumerate() {
        if m != 0 {
            for (a, w) in acc.iter_mut().zip(g.g.row_words(i)) {
                *a ^= w;
            }
        }
    }
    Ok((0..g.n)
        .map(|j| ((acc[j / WORD] >> (j % WORD)) & 1) as u8)
        .collect())
}

/// `H · wordᵀ`.
pub fn syndrome(h: &Gf2Matrix, word: &[u8]) -> Result<Vec<u8>, Gf2Error> {
    h.mul_vec(word)
}
