//! Run settings merged from flags, the environment and an optional TOML file.
//!
//! Precedence: flag, then `CMQ_ORDER` (order only), then the config file, then
//! the built-in default.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use cmq::verify::lemma3::DEFAULT_ORDER;
use serde::Deserialize;

pub const ORDER_ENV: &str = "CMQ_ORDER";

/// Keys accepted in a config file; all optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n: Option<usize>,
    pub m: Option<String>,
    pub backend: Option<String>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub order: Option<i32>,
    pub g2: Option<String>,
    pub g3: Option<String>,
    pub out: Option<PathBuf>,
    pub json: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Flag values as parsed, before defaults.
#[derive(Clone, Debug, Default)]
pub struct Flags {
    pub n: Option<usize>,
    pub m: Option<String>,
    pub backend: Option<String>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub order: Option<i32>,
    pub g2: Option<String>,
    pub g3: Option<String>,
    pub out: Option<PathBuf>,
    pub json: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub n: usize,
    pub m: Option<String>,
    pub backend: String,
    pub trials: usize,
    pub seed: u64,
    pub order: i32,
    pub g2: Option<String>,
    pub g3: Option<String>,
    pub out: Option<PathBuf>,
    pub json: bool,
}

impl RunConfig {
    pub fn resolve(flags: Flags, file: Option<FileConfig>, env_order: Option<String>) -> Result<Self> {
        let file = file.unwrap_or_default();
        let env_order = match env_order {
            Some(s) => Some(s.trim().parse::<i32>().with_context(|| format!("{ORDER_ENV}={s:?} is not an integer"))?),
            None => None,
        };
        Ok(RunConfig {
            n: flags.n.or(file.n).unwrap_or(3),
            m: flags.m.or(file.m),
            backend: flags.backend.or(file.backend).unwrap_or_else(|| "rational".into()),
            trials: flags.trials.or(file.trials).unwrap_or(5),
            seed: flags.seed.or(file.seed).unwrap_or(1),
            order: flags.order.or(env_order).or(file.order).unwrap_or(DEFAULT_ORDER),
            g2: flags.g2.or(file.g2),
            g3: flags.g3.or(file.g3),
            out: flags.out.or(file.out),
            json: flags.json || file.json.unwrap_or(false),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let file = FileConfig { n: Some(4), order: Some(30), trials: Some(2), ..Default::default() };
        let flags = Flags { n: Some(5), ..Default::default() };
        let c = RunConfig::resolve(flags, Some(file.clone()), Some("20".into())).unwrap();
        assert_eq!((c.n, c.order, c.trials), (5, 20, 2));
        let c = RunConfig::resolve(Flags::default(), Some(file), None).unwrap();
        assert_eq!(c.order, 30);
        let c = RunConfig::resolve(Flags::default(), None, None).unwrap();
        assert_eq!((c.n, c.order, c.backend.as_str()), (3, DEFAULT_ORDER, "rational"));
    }

    #[test]
    fn bad_env_order() {
        assert!(RunConfig::resolve(Flags::default(), None, Some("x".into())).is_err());
    }
}
