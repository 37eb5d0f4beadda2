//! `key=value` configuration files.
//!
//! Blank lines and `#` comments are ignored. Keys may use `-` or `_`
//! interchangeably and are stored with `_`.

use std::collections::BTreeMap;
use std::path::Path;

use crate::textio::{self, content_lines};
use crate::{Error, Result};

pub fn parse_config_str(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    let mut line_of: BTreeMap<String, usize> = BTreeMap::new();
    for (line, raw) in content_lines(text) {
        let (key, value) = raw
            .split_once('=')
            .ok_or_else(|| Error::parse(line, "expected `key=value`"))?;
        let key = key.trim().replace('-', "_");
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::parse(line, format!("invalid key `{key}`")));
        }
        if let Some(first) = line_of.insert(key.clone(), line) {
            return Err(Error::parse(line, format!("key `{key}` already set on line {first}")));
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = textio::read_to_string(path)?;
    parse_config_str(&text).map_err(|e| e.in_file(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let c = parse_config_str("# run\nz = 4\nmode=as\n\nworker-count=2\n").unwrap();
        assert_eq!(c["z"], "4");
        assert_eq!(c["mode"], "as");
        assert_eq!(c["worker_count"], "2");
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(parse_config_str("z\n").is_err());
        assert!(parse_config_str("=4\n").is_err());
        assert!(parse_config_str("a b=4\n").is_err());
        assert!(matches!(parse_config_str("z=1\nz=2\n"), Err(Error::Parse { line: 2, .. })));
    }
}
