use std::path::Path;

use crate::error::{Error, Result};

use super::read_text;

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// pairs keep file order and later keys repeat earlier ones.
pub fn parse_config(text: &str, path: &Path) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: k + 1,
                message: format!("expected key=value, found `{line}`"),
            });
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: k + 1,
                message: "empty key".into(),
            });
        }
        pairs.push((key.to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

pub fn read_config(path: &Path) -> Result<Vec<(String, String)>> {
    parse_config(&read_text(path)?, path)
}
