//! Run configuration: a `key = value` file, overridden by command-line flags.

use std::path::{Path, PathBuf};

use moodco::mood::TiePolicy;
use moodco::pipeline::{CoherenceUnit, ContagionConfig};
use serde::Deserialize;

use crate::CliError;

pub const CONFIG_ENV: &str = "MOODCO_CONFIG";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// `None` selects the bundled micro-lexicon.
    pub lexicon_path: Option<PathBuf>,
    /// `None` selects the bundled bindings.
    pub bindings_path: Option<PathBuf>,
    pub corpus_path: Option<PathBuf>,
    pub seed: u64,
    pub alpha: f64,
    pub empathy_threshold: f64,
    pub tie_policy: TiePolicy,
    pub coherence_unit: CoherenceUnit,
    pub output_dir: PathBuf,
    pub require_comments: bool,
    pub format: Format,
    pub contagion: ContagionConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            lexicon_path: None,
            bindings_path: None,
            corpus_path: None,
            seed: 42,
            alpha: 0.01,
            empathy_threshold: 4.0,
            tie_policy: TiePolicy::Neutral,
            coherence_unit: CoherenceUnit::Comment,
            output_dir: PathBuf::from("."),
            require_comments: true,
            format: Format::Json,
            contagion: ContagionConfig::default(),
        }
    }
}

impl RunConfig {
    /// Reads `explicit`, else the file named by `MOODCO_CONFIG`, else defaults.
    pub fn load(explicit: Option<&Path>) -> Result<Self, CliError> {
        let path = match explicit {
            Some(p) => Some(p.to_path_buf()),
            None => std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from),
        };
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
        // relative paths in a config file are relative to that file
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.lexicon_path, &mut cfg.bindings_path, &mut cfg.corpus_path] {
            if let Some(inner) = p.as_mut() {
                if inner.is_relative() {
                    *inner = base.join(&*inner);
                }
            }
        }
        if cfg.output_dir.is_relative() && text.lines().any(|l| l.trim_start().starts_with("output_dir")) {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(CliError::Config(format!("alpha must be in (0, 1], got {}", self.alpha)));
        }
        if !(self.empathy_threshold > 0.0 && self.empathy_threshold.is_finite()) {
            return Err(CliError::Config(format!(
                "empathy_threshold must be positive, got {}",
                self.empathy_threshold
            )));
        }
        if let Some(p) = &self.lexicon_path {
            require_readable(p, "lexicon")?;
        }
        if let Some(p) = &self.bindings_path {
            require_readable(p, "bindings")?;
        }
        Ok(())
    }

    pub fn corpus(&self) -> Result<&Path, CliError> {
        let path = self
            .corpus_path
            .as_deref()
            .ok_or_else(|| CliError::Config("no corpus given (--corpus or corpus_path)".into()))?;
        require_readable(path, "corpus")?;
        Ok(path)
    }
}

pub fn require_readable(path: &Path, what: &str) -> Result<(), CliError> {
    std::fs::File::open(path)
        .map(drop)
        .map_err(|e| CliError::Config(format!("cannot read {what} {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_value_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(
            &path,
            "alpha = 0.05\nseed = 7\ntie_policy = \"positive\"\ncoherence_unit = \"post_mean\"\ncorpus_path = \"c.jsonl\"\n\n[contagion]\nn_profiles = 3\n",
        )
        .unwrap();
        let cfg = RunConfig::load(Some(&path)).unwrap();
        assert_eq!(cfg.alpha, 0.05);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.tie_policy, TiePolicy::Positive);
        assert_eq!(cfg.coherence_unit, CoherenceUnit::PostMean);
        assert_eq!(cfg.corpus_path, Some(dir.path().join("c.jsonl")));
        assert_eq!(cfg.contagion.n_profiles, 3);
        assert_eq!(cfg.output_dir, PathBuf::from("."));
    }

    #[test]
    fn unknown_keys_and_bad_values_are_config_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "alpah = 0.05\n").unwrap();
        assert!(matches!(RunConfig::load(Some(&path)), Err(CliError::Config(_))));
        let cfg = RunConfig {
            alpha: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = RunConfig {
            empathy_threshold: -1.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
