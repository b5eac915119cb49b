//! `key = value` text documents used for fit files and metadata sidecars.

use std::fmt::{self, Display};
use std::path::Path;
use std::str::FromStr;

use crate::error::{GprError, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvDoc {
    entries: Vec<(String, String)>,
}

impl KvDoc {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Display) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| GprError::invalid(format!("missing key `{key}`")))
    }

    pub fn parse_value<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.require(key)?;
        raw.parse()
            .map_err(|_| GprError::invalid(format!("bad value for `{key}`: `{raw}`")))
    }

    pub fn parse_opt<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(_) => self.parse_value(key).map(Some),
        }
    }

    /// Entries whose key starts with `prefix`, prefix stripped, in file order.
    pub fn with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = (&'a str, &'a str)> + 'a {
        self.entries
            .iter()
            .filter_map(move |(k, v)| k.strip_prefix(prefix).map(|rest| (rest, v.as_str())))
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once(" = ").or_else(|| line.split_once('=')).ok_or_else(|| GprError::Parse {
                path: origin.to_string(),
                line: i + 1,
                message: "expected `key = value`".into(),
            })?;
            entries.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(Self { entries })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| GprError::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_string()).map_err(|e| GprError::io(path, e))
    }
}

impl Display for KvDoc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_order_and_floats() {
        let mut doc = KvDoc::new();
        doc.push("b", 0.1 + 0.2);
        doc.push("a", f64::INFINITY);
        doc.push("beta.x", -1.5e-300);
        let back = KvDoc::parse(&doc.to_string(), "mem").unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.parse_value::<f64>("b").unwrap(), 0.1 + 0.2);
        assert_eq!(back.parse_value::<f64>("a").unwrap(), f64::INFINITY);
        let (name, raw) = back.with_prefix("beta.").next().unwrap();
        assert_eq!((name, raw.parse::<f64>().unwrap()), ("x", -1.5e-300));
    }

    #[test]
    fn malformed_line_reports_position() {
        let err = KvDoc::parse("a = 1\n\nnonsense\n", "f.txt").unwrap_err();
        assert!(err.to_string().contains("f.txt:3"), "{err}");
    }
}
