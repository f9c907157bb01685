//! `key = value` run configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys use the long
//! flag names with `-` or `_` (`burn_in = 200`, `topics = 4`). A flag
//! given on the command line overrides the same key from the file.
//! Two keys differ from their flags so one file can serve every command:
//! `model_file` for the `--model` path of `assign`/`eval` (`model` is the
//! family for `fit`) and `top_features` for `eval --top-k`. `assign --out`
//! reads `assignments`, the key `eval` takes its input from.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const KNOWN_KEYS: &[&str] = &[
    "actfile",
    "labfile",
    "corpus",
    "threshold",
    "top_k",
    "class_names",
    "vocab_from",
    "out",
    "model",
    "topics",
    "seed",
    "alpha",
    "gamma",
    "smoothing",
    "burn_in",
    "samples",
    "thin",
    "tol",
    "max_iter",
    "chains",
    "out_dir",
    "sweeps",
    "assignments",
    "format",
    "percent",
    "labels",
    "nicknames",
    "model_file",
    "top_features",
];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigFile {
    values: BTreeMap<String, (String, usize)>,
    source: String,
}

impl ConfigFile {
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::format(source, i + 1, "expected key = value"))?;
            let key = k.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::format(source, i + 1, format!("unknown key {key:?}")));
            }
            if values
                .insert(key.clone(), (v.trim().to_string(), i + 1))
                .is_some()
            {
                return Err(Error::format(
                    source,
                    i + 1,
                    format!("duplicate key {key:?}"),
                ));
            }
        }
        Ok(ConfigFile {
            values,
            source: source.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(v, _)| v.as_str())
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some((v, line)) => v.parse().map(Some).map_err(|_| {
                Error::format(&self.source, *line, format!("bad value {v:?} for {key}"))
            }),
        }
    }

    /// `flag`, else the config value, else `None`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}
