//! JSON weight checkpoints.
//!
//! ```json
//! {
//!   "format": "neurodec-weights",
//!   "version": 1,
//!   "variant": "drn" | "nbp",
//!   "code": "<code name>",
//!   "iterations": T,
//!   "shape": { "n_vars": n, "n_checks": m, "n_edges": E },
//!   "layout": "<human-readable description of the flat order>",
//!   "values": [ ... ]
//! }
//! ```
//!
//! DRN values are `w[t][c]` row-major (`T·m` entries). NBP values are
//! `w_in[T][n] | w_edge[T][E] | w_out[n] | w_out_edge[E]`. Edge ids follow the
//! lexicographic `(check, var)` order of the Tanner graph.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Decoder, DecoderError, DrnWeights, NbpWeights};
use crate::code::TannerGraph;

pub const FORMAT_TAG: &str = "neurodec-weights";
pub const FORMAT_VERSION: u32 = 1;

pub const DRN_LAYOUT: &str = "w[t][c], t-major";
pub const NBP_LAYOUT: &str = "w_in[t][v] | w_edge[t][e] | w_out[v] | w_out_edge[e]";

#[derive(Debug, Error)]
pub enum WeightFileError {
    #[error("malformed weight file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("not a weight file (format tag {0:?})")]
    BadFormat(String),
    #[error("unsupported weight file version {0}")]
    BadVersion(u32),
    #[error("unknown variant {0:?}")]
    BadVariant(String),
    #[error("weight file shape {file} does not match code {graph}")]
    ShapeMismatch { file: String, graph: String },
    #[error(transparent)]
    Decoder(#[from] DecoderError),
    #[error("non-finite weight at index {0}")]
    NonFinite(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightShape {
    pub n_vars: usize,
    pub n_checks: usize,
    pub n_edges: usize,
}

impl WeightShape {
    pub fn of(graph: &TannerGraph) -> Self {
        Self {
            n_vars: graph.n_vars(),
            n_checks: graph.n_checks(),
            n_edges: graph.n_edges(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightFile {
    pub format: String,
    pub version: u32,
    pub variant: String,
    pub code: String,
    pub iterations: usize,
    pub shape: WeightShape,
    pub layout: String,
    pub values: Vec<f64>,
}

impl WeightFile {
    pub fn from_drn(code: &str, graph: &TannerGraph, w: &DrnWeights) -> Self {
        Self::build("drn", DRN_LAYOUT, code, graph, w.iterations(), w.values())
    }

    pub fn from_nbp(code: &str, graph: &TannerGraph, w: &NbpWeights) -> Self {
        Self::build("nbp", NBP_LAYOUT, code, graph, w.iterations(), w.values())
    }

    fn build(
        variant: &str,
        layout: &str,
        code: &str,
        graph: &TannerGraph,
        iterations: usize,
        values: &[f64],
    ) -> Self {
        Self {
            format: FORMAT_TAG.into(),
            version: FORMAT_VERSION,
            variant: variant.into(),
            code: code.into(),
            iterations,
            shape: WeightShape::of(graph),
            layout: layout.into(),
            values: values.to_vec(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("weight file serialises") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, WeightFileError> {
        let f: WeightFile = serde_json::from_str(text)?;
        if f.format != FORMAT_TAG {
            return Err(WeightFileError::BadFormat(f.format));
        }
        if f.version != FORMAT_VERSION {
            return Err(WeightFileError::BadVersion(f.version));
        }
        if let Some(i) = f.values.iter().position(|x| !x.is_finite()) {
            return Err(WeightFileError::NonFinite(i));
        }
        Ok(f)
    }

    /// Builds the decoder this file describes, validating it against `graph`.
    pub fn into_decoder(self, graph: &TannerGraph) -> Result<Decoder, WeightFileError> {
        let shape = WeightShape::of(graph);
        if shape != self.shape {
            return Err(WeightFileError::ShapeMismatch {
                file: format!("{:?}", self.shape),
                graph: format!("{shape:?}"),
            });
        }
        match self.variant.as_str() {
            "drn" => Ok(Decoder::Drn(DrnWeights::from_values(
                graph,
                self.iterations,
                self.values,
            )?)),
            "nbp" => Ok(Decoder::Nbp(NbpWeights::from_values(
                graph,
                self.iterations,
                self.values,
            )?)),
            other => Err(WeightFileError::BadVariant(other.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{build_tanner, construct};

    #[test]
    fn drn_round_trip() {
        let (g, _) = build_tanner(&construct::hamming_7_4());
        let w = DrnWeights::from_values(&g, 2, vec![0.5, 0.25, 1.0, 0.75, 1.5, 2.0]).unwrap();
        let text = WeightFile::from_drn("hamming_7_4", &g, &w).to_json();
        let back = WeightFile::from_json(&text).unwrap().into_decoder(&g).unwrap();
        assert_eq!(back, Decoder::Drn(w));
    }

    #[test]
    fn nbp_round_trip() {
        let (g, _) = build_tanner(&construct::hamming_7_4());
        let w = NbpWeights::filled(&g, 2, 0.9);
        let text = WeightFile::from_nbp("hamming_7_4", &g, &w).to_json();
        let back = WeightFile::from_json(&text).unwrap().into_decoder(&g).unwrap();
        assert_eq!(back, Decoder::Nbp(w));
    }

    #[test]
    fn rejects_bad_headers_and_shapes() {
        let (g, _) = build_tanner(&construct::hamming_7_4());
        let mut f = WeightFile::from_drn("x", &g, &DrnWeights::ones(&g, 1));
        f.version = 9;
        assert!(matches!(
            WeightFile::from_json(&f.to_json()),
            Err(WeightFileError::BadVersion(9))
        ));
        let mut f = WeightFile::from_drn("x", &g, &DrnWeights::ones(&g, 1));
        f.format = "other".into();
        assert!(WeightFile::from_json(&f.to_json()).is_err());
        let f = WeightFile::from_drn("x", &g, &DrnWeights::ones(&g, 1));
        let (g2, _) = build_tanner(&construct::single_parity_check(7));
        assert!(matches!(
            f.into_decoder(&g2),
            Err(WeightFileError::ShapeMismatch { .. })
        ));
        let mut f = WeightFile::from_drn("x", &g, &DrnWeights::ones(&g, 1));
        f.variant = "hgn".into();
        assert!(matches!(
            f.into_decoder(&g),
            Err(WeightFileError::BadVariant(_))
        ));
    }
}
