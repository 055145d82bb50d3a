//! Flat `key = value` config files.
//!
//! Lines are trimmed; blank lines and `#` comments are skipped. Keys use
//! the same spelling as the long command-line flags (for example
//! `beta-ant`). Values read here sit below explicit flags and above
//! built-in defaults.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use sncut::Error;

pub fn load(path: &Path) -> Result<HashMap<String, String>, Error> {
    let text = fs::read_to_string(path)?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: path.display().to_string(),
            line: lineno + 1,
            msg: format!("expected `key = value`, got {line:?}"),
        })?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line: lineno + 1,
                msg: "empty key or value".to_string(),
            });
        }
        map.insert(key.to_string(), value.to_string());
    }
    Ok(map)
}

/// Typed lookup helpers that surface bad values as parse-style errors.
pub struct Settings {
    map: HashMap<String, String>,
    origin: String,
}

impl Settings {
    pub fn empty() -> Self {
        Settings {
            map: HashMap::new(),
            origin: String::new(),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, Error> {
        Ok(Settings {
            map: load(path)?,
            origin: path.display().to_string(),
        })
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, Error>
    where
        T::Err: std::fmt::Display,
    {
        match self.map.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|e| Error::Parse {
                path: self.origin.clone(),
                line: 0,
                msg: format!("config key {key:?}: bad value {raw:?}: {e}"),
            }),
        }
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, Error> {
        self.parse(key)
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>, Error> {
        self.parse(key)
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>, Error> {
        self.parse(key)
    }

    pub fn string(&self, key: &str) -> Option<String> {
        self.map.get(key).cloned()
    }
}
