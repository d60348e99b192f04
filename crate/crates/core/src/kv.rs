//! `key = value` text files: one pair per line, `#` starts a comment.

use crate::error::{GfdmError, Result};

/// Parses `text` into ordered `(key, value)` pairs. Keys are lower-cased.
pub fn parse_kv(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| GfdmError::Parse(format!("line {}: expected key = value", lineno + 1)))?;
        let key = k.trim().to_ascii_lowercase();
        if key.is_empty() {
            return Err(GfdmError::Parse(format!("line {}: empty key", lineno + 1)));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

/// Comma or whitespace separated numbers.
pub fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| GfdmError::Parse(format!("{key}: cannot parse '{s}'")))
        })
        .collect()
}

pub fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| GfdmError::Parse(format!("{key}: cannot parse '{value}'")))
}
