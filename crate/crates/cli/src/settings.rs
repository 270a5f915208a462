//! `key = value` configuration: file parsing, flag merging and typed access.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use aniso_core::{Geometry, NeighborhoodSpec};

/// A configuration problem: reported as a usage error (exit 2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub type UsageResult<T> = std::result::Result<T, UsageError>;

fn usage<T>(msg: impl Into<String>) -> UsageResult<T> {
    Err(UsageError(msg.into()))
}

/// Canonical key spelling: lowercase with `-` separators.
pub fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('_', "-")
}

/// Merged settings of one run, keyed by long flag name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Parses `key = value` lines. Blank lines and lines starting with `#`
    /// are skipped; a repeated key is an error.
    pub fn parse(text: &str) -> UsageResult<Self> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return usage(format!("config line {}: expected `key = value`, got {line:?}", n + 1));
            };
            let key = normalize_key(k);
            if key.is_empty() {
                return usage(format!("config line {}: empty key", n + 1));
            }
            if values.insert(key.clone(), v.trim().to_string()).is_some() {
                return usage(format!("config line {}: key {key:?} repeated", n + 1));
            }
        }
        Ok(Self { values })
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(normalize_key(key), value.into());
    }

    pub fn remove(&mut self, key: &str) -> Option<String> {
        self.values.remove(&normalize_key(key))
    }

    /// `other` wins on shared keys.
    pub fn overridden_by(mut self, other: Settings) -> Self {
        self.values.extend(other.values);
        self
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    /// Sorted `key = value` lines, parseable by [`Settings::parse`].
    pub fn to_text(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn get<T: FromStr>(&self, key: &str) -> UsageResult<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.raw(key)
            .map(|v| v.parse::<T>().or_else(|e| usage(format!("{key} = {v:?}: {e}"))))
            .transpose()
    }

    pub fn require<T: FromStr>(&self, key: &str) -> UsageResult<T>
    where
        T::Err: fmt::Display,
    {
        self.get(key)?.map_or_else(|| usage(format!("missing required setting `{key}`")), Ok)
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> UsageResult<T>
    where
        T::Err: fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> UsageResult<Option<Vec<T>>>
    where
        T::Err: fmt::Display,
    {
        let Some(raw) = self.raw(key) else { return Ok(None) };
        raw.split(',')
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<T>().or_else(|e| usage(format!("{key}: bad entry {s:?}: {e}"))))
            .collect::<UsageResult<Vec<T>>>()
            .and_then(|v| if v.is_empty() { usage(format!("{key} is empty")) } else { Ok(Some(v)) })
    }

    pub fn require_list<T: FromStr>(&self, key: &str) -> UsageResult<Vec<T>>
    where
        T::Err: fmt::Display,
    {
        self.list(key)?.map_or_else(|| usage(format!("missing required setting `{key}`")), Ok)
    }

    /// Family from `a` and `r`; `d`, when present, must match `a`.
    pub fn spec(&self) -> UsageResult<NeighborhoodSpec> {
        let a: Vec<usize> = self.require_list("a")?;
        let r: usize = self.require("r")?;
        if let Some(d) = self.get::<usize>("d")? {
            if d != a.len() {
                return usage(format!("d = {d} but a has {} entries", a.len()));
            }
        }
        NeighborhoodSpec::new(a, r).or_else(|e| usage(e.to_string()))
    }

    pub fn geometry(&self) -> UsageResult<Geometry> {
        self.get_or("geometry", Geometry::Cube)
    }

    /// Probabilities strictly inside `(0, 1)`.
    pub fn p_list(&self) -> UsageResult<Vec<f64>> {
        let ps: Vec<f64> = self.require_list("p")?;
        match ps.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
            Some(bad) => usage(format!("p = {bad} outside (0, 1)")),
            None => Ok(ps),
        }
    }

    pub fn positive(&self, key: &str, default: Option<u64>) -> UsageResult<u64> {
        let v = match default {
            Some(d) => self.get_or(key, d)?,
            None => self.require(key)?,
        };
        if v == 0 {
            return usage(format!("{key} must be ≥ 1"));
        }
        Ok(v)
    }

    /// Rejects keys outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> UsageResult<()> {
        match self.keys().find(|k| !allowed.contains(k)) {
            Some(k) => usage(format!("unknown setting `{k}` (allowed: {})", allowed.join(", "))),
            None => Ok(()),
        }
    }
}
