//! On-disk code registry: `<dir>/<family>/<n>_<k>.alist` plus a JSON
//! manifest at `<dir>/manifest.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{construct, write_alist, CodeError, CodeSpec};
use crate::gf2::Gf2Matrix;

/// Environment variable naming the default registry directory.
pub const CODES_DIR_ENV: &str = "NEURODEC_CODES_DIR";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ManifestEntry {
    pub name: String,
    pub family: String,
    pub n: usize,
    pub k: usize,
    /// Relative to the registry directory.
    pub path: String,
    pub source: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct Manifest {
    pub codes: Vec<ManifestEntry>,
}

/// `$NEURODEC_CODES_DIR`, or `codes` relative to the working directory.
pub fn default_codes_dir() -> PathBuf {
    std::env::var_os(CODES_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("codes"))
}

fn read(path: &Path) -> Result<String, CodeError> {
    fs::read_to_string(path).map_err(|source| CodeError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Debug, Clone)]
pub struct Registry {
    dir: PathBuf,
    manifest: Manifest,
}

impl Registry {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, CodeError> {
        let dir = dir.as_ref().to_path_buf();
        let text = read(&dir.join("manifest.json"))?;
        let manifest: Manifest = serde_json::from_str(&text)
            .map_err(|e| CodeError::Registry(format!("manifest.json: {e}")))?;
        Ok(Self { dir, manifest })
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.manifest.codes
    }

    pub fn entry(&self, name: &str) -> Option<&ManifestEntry> {
        self.manifest.codes.iter().find(|e| e.name == name)
    }

    pub fn path_of(&self, entry: &ManifestEntry) -> PathBuf {
        self.dir.join(&entry.path)
    }

    pub fn load(&self, name: &str) -> Result<CodeSpec, CodeError> {
        let entry = self
            .entry(name)
            .ok_or_else(|| CodeError::Registry(format!("unknown code {name:?}")))?;
        let text = read(&self.path_of(entry))?;
        let spec = CodeSpec::from_alist(&entry.name, &text, Some(entry.k))?;
        if spec.n != entry.n {
            return Err(CodeError::Registry(format!(
                "{name}: manifest says n = {}, file has {}",
                entry.n, spec.n
            )));
        }
        Ok(spec)
    }
}

/// Parses `<n>_<k>` out of a file stem such as `49_24` or `ldpc_49_24`.
pub fn dimensions_from_stem(stem: &str) -> Option<(usize, usize)> {
    let mut parts = stem.rsplit('_');
    let k = parts.next()?.parse().ok()?;
    let n = parts.next()?.parse().ok()?;
    Some((n, k))
}

/// Loads an alist file directly. `k` is cross-checked when the file stem
/// carries `<n>_<k>`.
pub fn load_alist_file(path: impl AsRef<Path>) -> Result<CodeSpec, CodeError> {
    let path = path.as_ref();
    let text = read(path)?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("code")
        .to_string();
    let declared_k = dimensions_from_stem(&stem).map(|(_, k)| k);
    CodeSpec::from_alist(stem, &text, declared_k)
}

/// Resolves `name_or_path` as a file when it exists, otherwise as a
/// registry name under `dir`.
pub fn resolve(name_or_path: &str, dir: impl AsRef<Path>) -> Result<CodeSpec, CodeError> {
    let p = Path::new(name_or_path);
    if p.is_file() {
        return load_alist_file(p);
    }
    Registry::open(dir)?.load(name_or_path)
}

/// Design Eb/N0 used to rank polar bit-channels for the shipped polar codes.
pub const POLAR_DESIGN_SNR_DB: f64 = 2.0;

/// The standard benchmark set: `(name, family, source, H)`.
pub fn standard_codes() -> Vec<(String, String, String, Gf2Matrix)> {
    let mut out = vec![(
        "hamming_7_4".to_string(),
        "hamming".to_string(),
        "binary-expansion columns".to_string(),
        construct::hamming_7_4(),
    )];
    for (p, j) in [(7, 4), (11, 6), (11, 5), (11, 4)] {
        let h = construct::array_ldpc(p, j);
        let n = p * p;
        let k = n - (j * p - j + 1);
        out.push((
            format!("ldpc_{n}_{k}"),
            "ldpc".into(),
            format!("array code, p = {p}, {j} circulant block rows"),
            h,
        ));
    }
    for (m, t) in [(5u32, 3usize), (6, 5), (6, 3), (6, 2)] {
        let h = construct::bch(m, t);
        let n = h.cols();
        let k = n - h.rows();
        out.push((
            format!("bch_{n}_{k}"),
            "bch".into(),
            format!("narrow-sense primitive BCH, t = {t}, cyclic parity-check form"),
            h,
        ));
    }
    for (n, k) in [(64, 32), (64, 48), (128, 64), (128, 86), (128, 96)] {
        out.push((
            format!("polar_{n}_{k}"),
            "polar".into(),
            format!("polar, Bhattacharyya frozen set at {POLAR_DESIGN_SNR_DB} dB Eb/N0"),
            construct::polar(n, k, POLAR_DESIGN_SNR_DB),
        ));
    }
    out
}

/// Writes the standard set and its manifest into `dir`.
pub fn write_standard_registry(dir: impl AsRef<Path>) -> Result<Manifest, CodeError> {
    let dir = dir.as_ref();
    let mut manifest = Manifest::default();
    for (name, family, source, h) in standard_codes() {
        let spec = CodeSpec::new(&name, h, None)?;
        let rel = format!("{family}/{}_{}.alist", spec.n, spec.k);
        let path = dir.join(&rel);
        let io = |source| CodeError::Io {
            path: path.display().to_string(),
            source,
        };
        fs::create_dir_all(path.parent().expect("has parent")).map_err(io)?;
        fs::write(&path, write_alist(&spec.h)).map_err(io)?;
        manifest.codes.push(ManifestEntry {
            name,
            family,
            n: spec.n,
            k: spec.k,
            path: rel,
            source,
        });
    }
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
    let mpath = dir.join("manifest.json");
    fs::write(&mpath, text + "\n").map_err(|source| CodeError::Io {
        path: mpath.display().to_string(),
        source,
    })?;
    Ok(manifest)
}
