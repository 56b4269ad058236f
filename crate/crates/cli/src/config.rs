//! Defaults read from the TOML file named by `ACCENT_CONFIG`; flags override them.

use std::path::{Path, PathBuf};

use serde::Deserialize;

pub const CONFIG_ENV: &str = "ACCENT_CONFIG";

#[derive(Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub lang: Option<String>,
    pub window: Option<usize>,
    pub alpha: Option<f64>,
    /// `[beta, gamma]`
    pub beta_gamma: Option<[f64; 2]>,
    pub prune_cv: Option<bool>,
    pub prune_unused: Option<bool>,
    pub classes: Option<PathBuf>,
    pub tags: Option<PathBuf>,
    pub lemmas: Option<PathBuf>,
    pub classes_spec: Option<PathBuf>,
    pub min_count: Option<u64>,
    pub seed: Option<u64>,
    pub folds: Option<usize>,
}

impl FileConfig {
    pub fn parse(src: &str, source_name: &str) -> Result<Self, String> {
        toml::from_str(src).map_err(|e| format!("{source_name}: {}", e.message()))
    }

    /// Reads the file named by `ACCENT_CONFIG`, or returns empty defaults when unset.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
            _ => Ok(Self::default()),
        }
    }

    fn load(path: &Path) -> Result<Self, String> {
        let src = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let cfg = Self::parse(&src, &path.display().to_string())?;
        // relative lexicon paths are taken from the config file's directory
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: Option<PathBuf>| p.map(|p| if p.is_relative() { base.join(p) } else { p });
        Ok(FileConfig {
            classes: rebase(cfg.classes),
            tags: rebase(cfg.tags),
            lemmas: rebase(cfg.lemmas),
            classes_spec: rebase(cfg.classes_spec),
            ..cfg
        })
    }
}
