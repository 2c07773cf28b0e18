//! Run configuration: defaults, then a JSON file, then command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use neurodec::eval::EvalConfig;
use neurodec::train::TrainConfig;
use serde::{Deserialize, Serialize};

/// Everything a run can be configured with. Every field is optional in the
/// JSON file; `train` and `eval` accept any subset of their fields.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub code: Option<String>,
    pub variant: Option<String>,
    pub variants: Option<Vec<String>>,
    /// Weight files by variant name.
    pub weights: BTreeMap<String, PathBuf>,
    pub iterations: Option<usize>,
    pub snr: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub train: TrainConfig,
    pub eval: EvalConfig,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Pushes the shared top-level fields down into the train/eval blocks.
    pub fn propagate(&mut self) {
        if let Some(seed) = self.seed {
            self.train.seed = seed;
            self.eval.seed = seed;
        }
        if let Some(w) = self.workers {
            self.train.workers = w;
            self.eval.workers = w;
        }
        if let Some(t) = self.iterations {
            self.train.iterations = t;
        }
    }

    pub fn require_code(&self) -> Result<&str> {
        match &self.code {
            Some(c) => Ok(c),
            None => bail!("no code given (use --code or \"code\" in the config file)"),
        }
    }
}

/// Parses `1,2,3` or `start:stop:step` (inclusive) into a list of SNRs.
pub fn parse_snr_list(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.contains(':') {
        let parts: Vec<f64> = text
            .split(':')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .with_context(|| format!("bad SNR range {text:?}"))?;
        let [start, stop, step] = parts[..] else {
            bail!("SNR range must be start:stop:step, got {text:?}");
        };
        if !(step > 0.0) || stop < start {
            bail!("SNR range {text:?} is empty");
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count)
            .map(|i| ((start + i as f64 * step) * 1e6).round() / 1e6)
            .collect());
    }
    let list: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("bad SNR list {text:?}"))?;
    if list.is_empty() || list.iter().any(|s| !s.is_finite()) {
        bail!("SNR list {text:?} is empty or not finite");
    }
    Ok(list)
}

/// Parses `nbp=path,drn=path`.
pub fn parse_weight_map(text: &str) -> Result<BTreeMap<String, PathBuf>> {
    text.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|pair| {
            let (k, v) = pair
                .split_once('=')
                .with_context(|| format!("expected variant=path, got {pair:?}"))?;
            Ok((k.trim().to_string(), PathBuf::from(v.trim())))
        })
        .collect()
}
