//! Reader and writer for the alist sparse-matrix format.
//!
//! Layout, one item per line:
//!
//! ```text
//! n m
//! max_col_degree max_row_degree
//! <n column degrees>
//! <m row degrees>
//! <n lines: 1-based row indices of each column>
//! <m lines: 1-based column indices of each row>
//! ```
//!
//! Neighbour lists may be padded with zeros up to the maximum degree.

use thiserror::Error;

use crate::gf2::Gf2Matrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlistError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("row lists disagree with column lists at (row {row}, col {col})")]
    InconsistentAdjacency { row: usize, col: usize },
    #[error("line {line}: index {index} out of range 1..={bound}")]
    IndexOutOfRange {
        line: usize,
        index: usize,
        bound: usize,
    },
}

struct Lines<'a> {
    inner: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate().peekable(),
        }
    }

    /// Next non-blank line as parsed integers, with its 1-based line number.
    fn next_numbers(&mut self, what: &str) -> Result<(usize, Vec<usize>), AlistError> {
        for (idx, line) in self.inner.by_ref() {
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let nums = trimmed
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| AlistError::Parse {
                        line: idx + 1,
                        message: format!("expected non-negative integer in {what}, got {tok:?}"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            return Ok((idx + 1, nums));
        }
        Err(AlistError::Parse {
            line: 0,
            message: format!("unexpected end of file while reading {what}"),
        })
    }
}

fn expect_len(line: usize, nums: &[usize], len: usize, what: &str) -> Result<(), AlistError> {
    if nums.len() != len {
        return Err(AlistError::Parse {
            line,
            message: format!("{what}: expected {len} values, found {}", nums.len()),
        });
    }
    Ok(())
}

fn read_lists(
    lines: &mut Lines<'_>,
    count: usize,
    degrees: &[usize],
    bound: usize,
    what: &str,
) -> Result<Vec<Vec<usize>>, AlistError> {
    let mut out = Vec::with_capacity(count);
    for (i, &deg) in degrees.iter().enumerate().take(count) {
        let (line, nums) = lines.next_numbers(what)?;
        let mut entries = Vec::with_capacity(deg);
        for &x in &nums {
            if x == 0 {
                continue;
            }
            if x > bound {
                return Err(AlistError::IndexOutOfRange {
                    line,
                    index: x,
                    bound,
                });
            }
            entries.push(x - 1);
        }
        if entries.len() != deg {
            return Err(AlistError::Parse {
                line,
                message: format!(
                    "{what} {i}: degree {deg} declared but {} entries listed",
                    entries.len()
                ),
            });
        }
        let mut dedup = entries.clone();
        dedup.sort_unstable();
        dedup.dedup();
        if dedup.len() != entries.len() {
            return Err(AlistError::Parse {
                line,
                message: format!("{what} {i}: repeated index"),
            });
        }
        out.push(entries);
    }
    Ok(out)
}

/// Parses an alist file into an `m × n` parity-check matrix.
pub fn parse_alist(text: &str) -> Result<Gf2Matrix, AlistError> {
    let mut lines = Lines::new(text);
    let (l1, dims) = lines.next_numbers("header")?;
    expect_len(l1, &dims, 2, "header")?;
    let (n, m) = (dims[0], dims[1]);
    if n == 0 || m == 0 {
        return Err(AlistError::Parse {
            line: l1,
            message: "matrix dimensions must be positive".into(),
        });
    }
    let (l2, maxdeg) = lines.next_numbers("max degrees")?;
    expect_len(l2, &maxdeg, 2, "max degrees")?;
    let (l3, col_deg) = lines.next_numbers("column degrees")?;
    expect_len(l3, &col_deg, n, "column degrees")?;
    let (l4, row_deg) = lines.next_numbers("row degrees")?;
    expect_len(l4, &row_deg, m, "row degrees")?;
    if col_deg.iter().any(|&d| d > maxdeg[0]) || row_deg.iter().any(|&d| d > maxdeg[1]) {
        return Err(AlistError::Parse {
            line: l2,
            message: "a degree exceeds the declared maximum".into(),
        });
    }

    let cols = read_lists(&mut lines, n, &col_deg, m, "column")?;
    let rows = read_lists(&mut lines, m, &row_deg, n, "row")?;

    let mut h = Gf2Matrix::zeros(m, n).map_err(|e| AlistError::Parse {
        line: l1,
        message: e.to_string(),
    })?;
    for (c, list) in cols.iter().enumerate() {
        for &r in list {
            h.set(r, c, true);
        }
    }
    let mut from_rows = 0usize;
    for (r, list) in rows.iter().enumerate() {
        for &c in list {
            if h.get(r, c) == 0 {
                return Err(AlistError::InconsistentAdjacency { row: r, col: c });
            }
            from_rows += 1;
        }
    }
    if from_rows != h.count_ones() {
        // some column entry is missing from the row lists
        for (c, list) in cols.iter().enumerate() {
            for &r in list {
                if !rows[r].contains(&c) {
                    return Err(AlistError::InconsistentAdjacency { row: r, col: c });
                }
            }
        }
    }
    Ok(h)
}

/// Serialises `h` in alist layout, zero-padding neighbour lists.
pub fn write_alist(h: &Gf2Matrix) -> String {
    let (m, n) = (h.rows(), h.cols());
    let col_lists: Vec<Vec<usize>> = (0..n)
        .map(|c| (0..m).filter(|&r| h.get(r, c) == 1).collect())
        .collect();
    let row_lists: Vec<Vec<usize>> = (0..m).map(|r| h.row_support(r)).collect();
    let max_col = col_lists.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = row_lists.iter().map(Vec::len).max().unwrap_or(0);

    let join = |v: &mut dyn Iterator<Item = usize>| {
        v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
    };
    let mut out = String::new();
    out.push_str(&format!("{n} {m}\n{max_col} {max_row}\n"));
    out.push_str(&join(&mut col_lists.iter().map(Vec::len)));
    out.push('\n');
    out.push_str(&join(&mut row_lists.iter().map(Vec::len)));
    out.push('\n');
    for (lists, width) in [(&col_lists, max_col), (&row_lists, max_row)] {
        for list in lists {
            // an empty list still needs a line; a lone 0 is padding
            let padded = list
                .iter()
                .map(|&x| x + 1)
                .chain(std::iter::repeat(0))
                .take(width.max(1));
            out.push_str(&join(&mut padded.into_iter()));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::row_reduce;

    const SMALL: &str = "3 2\n2 2\n1 2 1\n2 2\n1\n1 2\n2\n1 2\n2 3\n";

    #[test]
    fn parses_small_matrix() {
        let h = parse_alist(SMALL).unwrap();
        assert_eq!((h.rows(), h.cols()), (2, 3));
        let ones: Vec<(usize, usize)> = (0..2)
            .flat_map(|r| (0..3).map(move |c| (r, c)))
            .filter(|&(r, c)| h.get(r, c) == 1)
            .collect();
        assert_eq!(ones, vec![(0, 0), (0, 1), (1, 1), (1, 2)]);
    }

    #[test]
    fn zero_padding_is_ignored() {
        let padded = "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n2 3\n";
        assert_eq!(parse_alist(padded).unwrap(), parse_alist(SMALL).unwrap());
    }

    #[test]
    fn inconsistent_lists_rejected() {
        // row lists swapped relative to the column lists
        let bad = "3 2\n2 2\n1 2 1\n2 2\n1\n1 2\n2\n2 3\n1 2\n";
        assert!(matches!(
            parse_alist(bad),
            Err(AlistError::InconsistentAdjacency { .. })
        ));
    }

    #[test]
    fn out_of_range_index_rejected() {
        let bad = "3 2\n2 2\n1 2 1\n2 2\n1\n1 3\n2\n1 2\n2 3\n";
        assert!(matches!(
            parse_alist(bad),
            Err(AlistError::IndexOutOfRange { index: 3, .. })
        ));
    }

    #[test]
    fn malformed_counts_rejected() {
        assert!(matches!(parse_alist("3\n"), Err(AlistError::Parse { .. })));
        assert!(matches!(
            parse_alist("3 2\n2 2\n1 2\n2 2\n"),
            Err(AlistError::Parse { .. })
        ));
        assert!(matches!(
            parse_alist("3 2\n2 2\n1 x 1\n"),
            Err(AlistError::Parse { .. })
        ));
        assert!(parse_alist("").is_err());
    }

    #[test]
    fn hamming_alist_has_rank_three() {
        let text = write_alist(&crate::code::construct::hamming_7_4());
        assert_eq!(row_reduce(&parse_alist(&text).unwrap()).rank, 3);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn write_then_parse_round_trips(
                rows in (1usize..6, 1usize..10).prop_flat_map(|(r, c)| {
                    proptest::collection::vec(proptest::collection::vec(0u8..2, c), r)
                })
            ) {
                let h = Gf2Matrix::from_rows(&rows).unwrap();
                prop_assert_eq!(parse_alist(&write_alist(&h)).unwrap(), h);
            }
        }
    }
}
