//! Parity-check codes and their Tanner graphs.

pub mod alist;
pub mod construct;
pub mod registry;

use std::collections::BTreeMap;
use std::ops::Range;

use thiserror::Error;

use crate::gf2::{self, GeneratorMatrix, Gf2Error, Gf2Matrix};

pub use alist::{parse_alist, write_alist, AlistError};

#[derive(Debug, Error)]
pub enum CodeError {
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error(transparent)]
    Alist(#[from] AlistError),
    #[error("declared k = {declared} disagrees with n - rank(H) = {computed}")]
    DimensionMismatch { declared: usize, computed: usize },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("registry error: {0}")]
    Registry(String),
}

/// Structural problems that do not prevent decoding but deserve a mention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructureWarning {
    /// Variable node with no incident check; it never receives a message.
    IsolatedVariable(usize),
    /// Check node with no incident variable.
    EmptyCheck(usize),
}

/// Bipartite graph of a parity-check matrix.
///
/// Edge ids are the lexicographic rank of `(check, var)` among the 1-entries
/// of H, so the edges of one check occupy a contiguous id range.
#[derive(Debug, Clone)]
pub struct TannerGraph {
    n_vars: usize,
    n_checks: usize,
    edges: Vec<(usize, usize)>,
    var_adjacency: Vec<Vec<usize>>,
    check_offsets: Vec<usize>,
}

impl TannerGraph {
    #[inline]
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    #[inline]
    pub fn n_checks(&self) -> usize {
        self.n_checks
    }

    #[inline]
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// `(check, var)` of edge `e`.
    #[inline]
    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    #[inline]
    pub fn edge_var(&self, e: usize) -> usize {
        self.edges[e].1
    }

    #[inline]
    pub fn edge_check(&self, e: usize) -> usize {
        self.edges[e].0
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Edge ids of M(c).
    #[inline]
    pub fn check_edges(&self, c: usize) -> Range<usize> {
        self.check_offsets[c]..self.check_offsets[c + 1]
    }

    /// Edge ids of N(v), ascending.
    #[inline]
    pub fn var_edges(&self, v: usize) -> &[usize] {
        &self.var_adjacency[v]
    }

    pub fn var_degree(&self, v: usize) -> usize {
        self.var_adjacency[v].len()
    }

    pub fn check_degree(&self, c: usize) -> usize {
        self.check_offsets[c + 1] - self.check_offsets[c]
    }

    pub fn max_check_degree(&self) -> usize {
        (0..self.n_checks).map(|c| self.check_degree(c)).max().unwrap_or(0)
    }

    /// True when every check is satisfied by `bits`.
    pub fn is_codeword(&self, bits: &[u8]) -> bool {
        (0..self.n_checks).all(|c| {
            self.check_edges(c)
                .fold(0u8, |acc, e| acc ^ bits[self.edges[e].1])
                == 0
        })
    }

    /// degree -> number of variable nodes with that degree
    pub fn var_degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for v in 0..self.n_vars {
            *h.entry(self.var_degree(v)).or_insert(0) += 1;
        }
        h
    }

    pub fn check_degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for c in 0..self.n_checks {
            *h.entry(self.check_degree(c)).or_insert(0) += 1;
        }
        h
    }
}

/// Builds the Tanner graph of `h`, reporting isolated nodes as warnings.
pub fn build_tanner(h: &Gf2Matrix) -> (TannerGraph, Vec<StructureWarning>) {
    let mut edges = Vec::with_capacity(h.count_ones());
    let mut var_adjacency = vec![Vec::new(); h.cols()];
    let mut check_offsets = Vec::with_capacity(h.rows() + 1);
    for c in 0..h.rows() {
        check_offsets.push(edges.len());
        for v in h.row_support(c) {
            var_adjacency[v].push(edges.len());
            edges.push((c, v));
        }
    }
    check_offsets.push(edges.len());

    let mut warnings = Vec::new();
    for c in 0..h.rows() {
        if check_offsets[c] == check_offsets[c + 1] {
            warnings.push(StructureWarning::EmptyCheck(c));
        }
    }
    for (v, adj) in var_adjacency.iter().enumerate() {
        if adj.is_empty() {
            warnings.push(StructureWarning::IsolatedVariable(v));
        }
    }

    (
        TannerGraph {
            n_vars: h.cols(),
            n_checks: h.rows(),
            edges,
            var_adjacency,
            check_offsets,
        },
        warnings,
    )
}

/// Fraction of 1-entries in `h`.
pub fn density(h: &Gf2Matrix) -> f64 {
    h.count_ones() as f64 / (h.rows() * h.cols()) as f64
}

/// A loaded (n, k) code with everything the decoders and encoder need.
#[derive(Debug, Clone)]
pub struct CodeSpec {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub h: Gf2Matrix,
    pub graph: TannerGraph,
    pub generator: GeneratorMatrix,
    pub warnings: Vec<StructureWarning>,
}

impl CodeSpec {
    /// `declared_k`, when known from metadata, must equal `n - rank(h)`.
    pub fn new(
        name: impl Into<String>,
        h: Gf2Matrix,
        declared_k: Option<usize>,
    ) -> Result<Self, CodeError> {
        let generator = gf2::generator_from_parity(&h)?;
        if let Some(declared) = declared_k {
            if declared != generator.k {
                return Err(CodeError::DimensionMismatch {
                    declared,
                    computed: generator.k,
                });
            }
        }
        let (graph, warnings) = build_tanner(&h);
        Ok(Self {
            name: name.into(),
            n: h.cols(),
            k: generator.k,
            h,
            graph,
            generator,
            warnings,
        })
    }

    pub fn from_alist(
        name: impl Into<String>,
        text: &str,
        declared_k: Option<usize>,
    ) -> Result<Self, CodeError> {
        let h = parse_alist(text)?;
        Self::new(name, h, declared_k)
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn density(&self) -> f64 {
        density(&self.h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_check_graph() {
        let h = Gf2Matrix::from_rows(&[[1, 1, 1]]).unwrap();
        let (g, w) = build_tanner(&h);
        assert!(w.is_empty());
        assert_eq!(g.n_edges(), 3);
        assert_eq!(g.check_edges(0), 0..3);
        for v in 0..3 {
            assert_eq!(g.var_edges(v), &[v]);
        }
    }

    #[test]
    fn identity_graph_has_unit_degrees() {
        let (g, _) = build_tanner(&Gf2Matrix::identity(3).unwrap());
        assert_eq!(g.n_edges(), 3);
        assert!((0..3).all(|i| g.var_degree(i) == 1 && g.check_degree(i) == 1));
    }

    #[test]
    fn isolated_nodes_are_flagged() {
        let h = Gf2Matrix::from_rows(&[[1, 1, 0], [0, 0, 0]]).unwrap();
        let (_, w) = build_tanner(&h);
        assert_eq!(
            w,
            vec![
                StructureWarning::EmptyCheck(1),
                StructureWarning::IsolatedVariable(2)
            ]
        );
    }

    #[test]
    fn edge_views_agree() {
        let h = construct::hamming_7_4();
        let (g, _) = build_tanner(&h);
        assert_eq!(g.n_edges(), h.count_ones());
        let mut seen = vec![0usize; g.n_edges()];
        for c in 0..g.n_checks() {
            for e in g.check_edges(c) {
                assert_eq!(g.edge_check(e), c);
                seen[e] += 1;
            }
        }
        for v in 0..g.n_vars() {
            for &e in g.var_edges(v) {
                assert_eq!(g.edge_var(e), v);
                seen[e] += 1;
            }
        }
        assert!(seen.iter().all(|&s| s == 2));
        let mut sorted = g.edges().to_vec();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, g.edges());
    }

    #[test]
    fn density_examples() {
        assert_eq!(density(&Gf2Matrix::identity(4).unwrap()), 0.25);
        assert_eq!(
            density(&Gf2Matrix::from_rows(&[[1, 1, 1], [1, 1, 1]]).unwrap()),
            1.0
        );
        assert!((density(&construct::hamming_7_4()) - 12.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn declared_dimension_is_checked() {
        let h = construct::hamming_7_4();
        assert!(CodeSpec::new("hamming", h.clone(), Some(4)).is_ok());
        assert!(matches!(
            CodeSpec::new("hamming", h, Some(3)),
            Err(CodeError::DimensionMismatch {
                declared: 3,
                computed: 4
            })
        ));
    }
}
