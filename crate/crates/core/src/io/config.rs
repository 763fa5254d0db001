//! `key = value` configuration files.
//!
//! One assignment per line, `#` starts a comment, keys are unique. Numbers
//! accept a `deg` suffix (converted to radians), `inf` and `-inf`. In boxes
//! `*` stands for an unbounded side. Lists are comma separated; regions are
//! `;`-separated boxes written as `lo1,hi1,lo2,hi2,...`.

use std::f64::consts::PI;

use super::{syntax, FormatError};

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Parsed configuration with typed accessors whose errors name the key and
/// line.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Config {
    entries: Vec<Entry>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let mut entries: Vec<Entry> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let s = raw.split('#').next().unwrap_or("").trim();
            if s.is_empty() {
                continue;
            }
            let (k, v) = s.split_once('=').ok_or_else(|| syntax(line, "expected `key = value`"))?;
            let key = k.trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(syntax(line, format!("bad key `{key}`")));
            }
            if let Some(prev) = entries.iter().find(|e| e.key == key) {
                return Err(syntax(line, format!("key `{key}` already set on line {}", prev.line)));
            }
            entries.push(Entry { key: key.to_string(), value: v.trim().to_string(), line });
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn entry(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entry(key).map(|e| e.value.as_str())
    }

    fn require(&self, key: &str) -> Result<&Entry, FormatError> {
        self.entry(key).ok_or_else(|| FormatError::Missing(key.into()))
    }

    /// Keys starting with `prefix`, with the prefix removed.
    pub fn with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = (&'a str, &'a Entry)> + 'a {
        self.entries.iter().filter_map(move |e| e.key.strip_prefix(prefix).map(|k| (k, e)))
    }

    /// Fails on keys outside `known` (exact names, or prefixes ending in `.`).
    pub fn reject_unknown(&self, known: &[&str]) -> Result<(), FormatError> {
        for e in &self.entries {
            let ok = known.iter().any(|k| if k.ends_with('.') { e.key.starts_with(k) } else { e.key == *k });
            if !ok {
                return Err(key_error(e, "unknown key"));
            }
        }
        Ok(())
    }

    pub fn f64(&self, key: &str) -> Result<f64, FormatError> {
        let e = self.require(key)?;
        number(&e.value).map_err(|m| key_error(e, m))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, FormatError> {
        if self.entry(key).is_some() {
            self.f64(key)
        } else {
            Ok(default)
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize, FormatError> {
        let e = self.require(key)?;
        e.value.parse().map_err(|_| key_error(e, "expected a non-negative integer"))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, FormatError> {
        if self.entry(key).is_some() {
            self.usize(key)
        } else {
            Ok(default)
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, FormatError> {
        match self.entry(key) {
            None => Ok(default),
            Some(e) => match e.value.as_str() {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(key_error(e, "expected true or false")),
            },
        }
    }

    pub fn list(&self, key: &str) -> Result<Vec<f64>, FormatError> {
        let e = self.require(key)?;
        list(&e.value).map_err(|m| key_error(e, m))
    }

    pub fn list_or(&self, key: &str, default: Vec<f64>) -> Result<Vec<f64>, FormatError> {
        if self.entry(key).is_some() {
            self.list(key)
        } else {
            Ok(default)
        }
    }

    pub fn bools(&self, key: &str) -> Result<Vec<bool>, FormatError> {
        let e = self.require(key)?;
        e.value
            .split(',')
            .map(|t| match t.trim() {
                "true" | "1" => Ok(true),
                "false" | "0" => Ok(false),
                other => Err(key_error(e, format!("expected true or false, got `{other}`"))),
            })
            .collect()
    }

    /// Boxes of dimension `dim` given as `;`-separated `lo,hi` pairs.
    pub fn boxes(&self, key: &str, dim: usize) -> Result<Vec<(Vec<f64>, Vec<f64>)>, FormatError> {
        let e = self.require(key)?;
        boxes(&e.value, dim).map_err(|m| key_error(e, m))
    }
}

pub(crate) fn key_error(e: &Entry, msg: impl Into<String>) -> FormatError {
    FormatError::Key { line: e.line, key: e.key.clone(), msg: msg.into() }
}

fn number(tok: &str) -> Result<f64, String> {
    let t = tok.trim();
    let (body, scale) = match t.strip_suffix("deg") {
        Some(b) => (b.trim(), PI / 180.0),
        None => (t, 1.0),
    };
    let v: f64 = match body {
        "inf" | "+inf" => f64::INFINITY,
        "-inf" => f64::NEG_INFINITY,
        _ => body.parse().map_err(|_| format!("bad number `{t}`"))?,
    };
    if v.is_nan() {
        return Err("NaN is not allowed".into());
    }
    Ok(v * scale)
}

fn list(value: &str) -> Result<Vec<f64>, String> {
    if value.trim().is_empty() {
        return Err("empty list".into());
    }
    value.split(',').map(number).collect()
}

fn boxes(value: &str, dim: usize) -> Result<Vec<(Vec<f64>, Vec<f64>)>, String> {
    let mut out = Vec::new();
    for part in value.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let toks: Vec<&str> = part.split(',').map(str::trim).collect();
        if toks.len() != 2 * dim {
            return Err(format!("box `{part}` needs {} numbers", 2 * dim));
        }
        let mut lo = Vec::with_capacity(dim);
        let mut hi = Vec::with_capacity(dim);
        for d in 0..dim {
            let l = if toks[2 * d] == "*" { f64::NEG_INFINITY } else { number(toks[2 * d])? };
            let h = if toks[2 * d + 1] == "*" { f64::INFINITY } else { number(toks[2 * d + 1])? };
            if l > h {
                return Err(format!("box `{part}` has lower bound above upper bound"));
            }
            lo.push(l);
            hi.push(h);
        }
        out.push((lo, hi));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_numbers_units_and_boxes() {
        let c = Config::parse("# demo\ntau = 0.45\nbank = -40deg, 0, 40deg # banks\nzone = 0,1,*,2 ; 3,4,5,*\n").unwrap();
        assert_eq!(c.f64("tau").unwrap(), 0.45);
        let b = c.list("bank").unwrap();
        assert!((b[0] + 40f64.to_radians()).abs() < 1e-15 && b[1] == 0.0);
        let z = c.boxes("zone", 2).unwrap();
        assert_eq!(z[0], (vec![0.0, f64::NEG_INFINITY], vec![1.0, 2.0]));
        assert_eq!(z[1], (vec![3.0, 5.0], vec![4.0, f64::INFINITY]));
    }

    #[test]
    fn errors_name_key_and_line() {
        let c = Config::parse("a = 1\nb = x\n").unwrap();
        assert_eq!(c.f64("b").unwrap_err().to_string(), "line 2: key `b`: bad number `x`");
        assert_eq!(c.f64("c").unwrap_err().to_string(), "missing key `c`");
        assert!(Config::parse("a = 1\na = 2\n").unwrap_err().to_string().contains("line 2"));
        assert!(Config::parse("just words\n").is_err());
        assert!(c.reject_unknown(&["a"]).unwrap_err().to_string().contains("`b`"));
    }
}
