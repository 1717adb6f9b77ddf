//! Plain `key = value` files with `[kind name]` section headers.

use std::cell::RefCell;
use std::collections::BTreeSet;

use crate::error::{ChaosError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub kind: String,
    pub name: Option<String>,
    pub line: usize,
    pub entries: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfigFile {
    pub sections: Vec<Section>,
}

fn config_err(line: usize, message: impl Into<String>) -> ChaosError {
    ChaosError::Config {
        line,
        message: message.into(),
    }
}

fn valid_key(k: &str) -> bool {
    !k.is_empty()
        && k.chars()
            .all(|c| c.is_ascii_alphanumeric() || "_-.[],".contains(c))
}

/// Parse a config file. `#` and `;` start comment lines; values may carry a
/// trailing ` # comment`.
pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with(';') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('[') {
            let inner = rest
                .strip_suffix(']')
                .ok_or_else(|| config_err(line, "unterminated section header"))?;
            let mut words = inner.split_whitespace();
            let kind = words
                .next()
                .ok_or_else(|| config_err(line, "empty section header"))?
                .to_string();
            let name = words.next().map(str::to_string);
            if words.next().is_some() {
                return Err(config_err(line, "section header takes a kind and at most one name"));
            }
            sections.push(Section {
                kind,
                name,
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let (k, v) = trimmed
            .split_once('=')
            .ok_or_else(|| config_err(line, format!("expected `key = value`, got `{trimmed}`")))?;
        let key = k.trim().to_string();
        if !valid_key(&key) {
            return Err(config_err(line, format!("malformed key `{key}`")));
        }
        let value = match v.find(" #") {
            Some(pos) => &v[..pos],
            None => v,
        }
        .trim()
        .to_string();
        let section = sections
            .last_mut()
            .ok_or_else(|| config_err(line, format!("key `{key}` outside any section")))?;
        if section.entries.iter().any(|e| e.key == key) {
            return Err(config_err(line, format!("duplicate key `{key}`")));
        }
        section.entries.push(Entry { key, value, line });
    }
    Ok(ConfigFile { sections })
}

/// Typed access to a section; keys left unread are rejected by [`Params::finish`].
pub struct Params<'a> {
    section: &'a Section,
    used: RefCell<BTreeSet<String>>,
}

impl<'a> Params<'a> {
    pub fn new(section: &'a Section) -> Self {
        Self {
            section,
            used: RefCell::new(BTreeSet::new()),
        }
    }

    pub fn section(&self) -> &Section {
        self.section
    }

    fn entry(&self, key: &str) -> Option<&'a Entry> {
        let e = self.section.entries.iter().find(|e| e.key == key)?;
        self.used.borrow_mut().insert(key.to_string());
        Some(e)
    }

    /// Entries whose key starts with `prefix`, marked as read.
    pub fn prefixed(&self, prefix: &str) -> Vec<&'a Entry> {
        let found: Vec<&Entry> = self
            .section
            .entries
            .iter()
            .filter(|e| e.key.starts_with(prefix))
            .collect();
        let mut used = self.used.borrow_mut();
        for e in &found {
            used.insert(e.key.clone());
        }
        found
    }

    pub fn str_or(&self, key: &str, default: &str) -> String {
        self.entry(key).map(|e| e.value.clone()).unwrap_or_else(|| default.to_string())
    }

    pub fn opt_str(&self, key: &str) -> Option<String> {
        self.entry(key).map(|e| e.value.clone())
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.entry(key) {
            Some(e) => parse_f64(&e.value, e.line),
            None => Ok(default),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.entry(key) {
            Some(e) => e
                .value
                .parse()
                .map_err(|_| config_err(e.line, format!("`{key}` needs a non-negative integer, got `{}`", e.value))),
            None => Ok(default),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.entry(key) {
            Some(e) => e
                .value
                .parse()
                .map_err(|_| config_err(e.line, format!("`{key}` needs a non-negative integer, got `{}`", e.value))),
            None => Ok(default),
        }
    }

    pub fn list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.entry(key) {
            Some(e) => parse_list(&e.value, e.line),
            None => Ok(default.to_vec()),
        }
    }

    /// Reject the first key that no accessor asked for.
    pub fn finish(&self) -> Result<()> {
        let used = self.used.borrow();
        match self.section.entries.iter().find(|e| !used.contains(&e.key)) {
            Some(e) => Err(config_err(
                e.line,
                format!("unknown key `{}` in [{}] section", e.key, self.section.kind),
            )),
            None => Ok(()),
        }
    }
}

pub fn parse_f64(s: &str, line: usize) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| config_err(line, format!("expected a number, got `{}`", s.trim())))?;
    if !v.is_finite() {
        return Err(config_err(line, format!("non-finite number `{}`", s.trim())));
    }
    Ok(v)
}

pub fn parse_list(s: &str, line: usize) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| parse_f64(x, line)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_comments() {
        let cfg = parse_config("# top\n[run]\nseed = 3 # inline\n\n[scenario a]\nk = 1, 2\n").unwrap();
        assert_eq!(cfg.sections.len(), 2);
        assert_eq!(cfg.sections[0].entries[0].value, "3");
        assert_eq!(cfg.sections[1].name.as_deref(), Some("a"));
        let p = Params::new(&cfg.sections[1]);
        assert_eq!(p.list_or("k", &[]).unwrap(), vec![1.0, 2.0]);
        p.finish().unwrap();
    }

    #[test]
    fn unknown_key_has_line() {
        let cfg = parse_config("[scenario a]\nknown = 1\nbogus = 2\n").unwrap();
        let p = Params::new(&cfg.sections[0]);
        p.f64_or("known", 0.0).unwrap();
        match p.finish() {
            Err(ChaosError::Config { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("bogus"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(parse_config("k = 1"), Err(ChaosError::Config { line: 1, .. })));
        assert!(matches!(parse_config("[a]\nnot a pair"), Err(ChaosError::Config { line: 2, .. })));
        assert!(matches!(parse_config("[a]\nk = 1\nk = 2"), Err(ChaosError::Config { line: 3, .. })));
        assert!(matches!(parse_config("[a"), Err(ChaosError::Config { line: 1, .. })));
    }
}
