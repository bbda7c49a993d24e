//! Effective configuration: defaults, then the TOML file, then the
//! cache environment variable, then flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use torsion_probe::fields::DEFAULT_CLASS_GROUP_CAP;
use torsion_probe::{Error, Result};

pub const CACHE_ENV: &str = "TORSION_PROBE_CACHE";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Target accuracy of L-function values.
    pub tol: f64,
    /// Zero-scan resolution.
    pub resolution: f64,
    /// Constant in the certified disc radius `C₂θ/φ`.
    pub c2: f64,
    /// Largest `|Δ|` for class group computations.
    pub class_group_cap: u64,
    /// Term cap for Gaussian-weighted sums; unset picks one from `y`.
    pub gaussian_cap: Option<u64>,
    pub cache: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            tol: 1e-12,
            resolution: 1e-3,
            c2: 0.05,
            class_group_cap: DEFAULT_CLASS_GROUP_CAP,
            gaussian_cap: None,
            cache: None,
            format: Format::Csv,
            threads: None,
        }
    }
}

/// Flag values that override the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub resolution: Option<f64>,
    pub c2: Option<f64>,
    pub class_group_cap: Option<u64>,
    pub gaussian_cap: Option<u64>,
    pub cache: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: Option<&Path>, cache_env: Option<PathBuf>, flags: &Overrides) -> Result<Self> {
        let mut c = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
                Self::from_toml(&text)?
            }
            None => Config::default(),
        };
        if let Some(p) = cache_env {
            c.cache = Some(p);
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = flags.$f.clone() { c.$f = v.into(); } )* };
        }
        take!(tol, resolution, c2, class_group_cap, format);
        if flags.gaussian_cap.is_some() {
            c.gaussian_cap = flags.gaussian_cap;
        }
        if flags.cache.is_some() {
            c.cache = flags.cache.clone();
        }
        if flags.threads.is_some() {
            c.threads = flags.threads;
        }
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("tol", self.tol), ("resolution", self.resolution), ("c2", self.c2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the JSON form, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    /// Header lines (without comment markers).
    pub fn header(&self, invocation: &str) -> Vec<String> {
        vec![
            format!("torsion-probe {}", env!("CARGO_PKG_VERSION")),
            format!("config-hash {}", self.hash()),
            format!("config {}", self.to_json()),
            format!("invocation {invocation}"),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_without_file() {
        let c = Config::load(None, None, &Overrides::default()).unwrap();
        assert_eq!(c, Config::default());
        assert_eq!(c.c2, 0.05);
    }

    #[test]
    fn precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "c2 = 0.02\ncache = \"from-file\"\n").unwrap();
        let c = Config::load(Some(&path), None, &Overrides::default()).unwrap();
        assert_eq!(c.c2, 0.02);
        assert_eq!(c.cache, Some(PathBuf::from("from-file")));
        let c = Config::load(Some(&path), Some("from-env".into()), &Overrides::default()).unwrap();
        assert_eq!(c.cache, Some(PathBuf::from("from-env")));
        let flags = Overrides { c2: Some(0.1), cache: Some("from-flag".into()), ..Default::default() };
        let c = Config::load(Some(&path), Some("from-env".into()), &flags).unwrap();
        assert_eq!((c.c2, c.cache), (0.1, Some(PathBuf::from("from-flag"))));
    }

    #[test]
    fn malformed() {
        assert!(matches!(Config::from_toml("c2 = \"x\""), Err(Error::Config(_))));
        assert!(matches!(Config::from_toml("bogus = 1"), Err(Error::Config(_))));
        let flags = Overrides { tol: Some(-1.0), ..Default::default() };
        assert!(Config::load(None, None, &flags).is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = Config::default();
        let b = Config { c2: 0.02, ..Config::default() };
        assert_eq!(a.hash(), Config::default().hash());
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
