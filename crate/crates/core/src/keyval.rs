//! Flat `key=value` text blocks used for configs, sidecars and reports.
//!
//! One pair per line, `#` starts a comment line, whitespace around keys and
//! values is ignored. Pose values are seven space-separated numbers
//! `x y z qx qy qz qw`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::geom::Pose;

#[derive(Debug, Error, PartialEq)]
pub enum KeyValError {
    #[error("line {line}: expected key=value, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("duplicate key {0:?}")]
    Duplicate(String),
    #[error("missing key {0:?}")]
    Missing(String),
    #[error("key {key:?}: cannot parse {value:?} as {expected}")]
    BadValue {
        key: String,
        value: String,
        expected: &'static str,
    },
    #[error("unknown key {0:?}")]
    Unknown(String),
}

/// Parsed key/value block, preserving keys in sorted order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self, KeyValError> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| KeyValError::Syntax {
                line: idx + 1,
                text: raw.to_string(),
            })?;
            let k = k.trim();
            if k.is_empty() {
                return Err(KeyValError::Syntax {
                    line: idx + 1,
                    text: raw.to_string(),
                });
            }
            if entries.insert(k.to_string(), v.trim().to_string()).is_some() {
                return Err(KeyValError::Duplicate(k.to_string()));
            }
        }
        Ok(Self { entries })
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Fails on any key outside `allowed`.
    pub fn expect_only(&self, allowed: &[&str]) -> Result<(), KeyValError> {
        match self.keys().find(|k| !allowed.contains(k)) {
            Some(k) => Err(KeyValError::Unknown(k.to_string())),
            None => Ok(()),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str, KeyValError> {
        self.get(key).ok_or_else(|| KeyValError::Missing(key.to_string()))
    }

    pub fn parse_value<V: std::str::FromStr>(
        &self,
        key: &str,
        expected: &'static str,
    ) -> Result<Option<V>, KeyValError> {
        self.get(key)
            .map(|v| {
                v.parse().map_err(|_| KeyValError::BadValue {
                    key: key.to_string(),
                    value: v.to_string(),
                    expected,
                })
            })
            .transpose()
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, KeyValError> {
        self.parse_value(key, "a number")
    }

    pub fn pose(&self, key: &str) -> Result<Option<Pose<f64>>, KeyValError> {
        self.get(key)
            .map(|v| {
                parse_pose_fields(v).ok_or_else(|| KeyValError::BadValue {
                    key: key.to_string(),
                    value: v.to_string(),
                    expected: "seven numbers x y z qx qy qz qw",
                })
            })
            .transpose()
    }
}

/// Parses `x y z qx qy qz qw`; the quaternion is normalized.
pub fn parse_pose_fields(text: &str) -> Option<Pose<f64>> {
    let vals: Vec<f64> = text
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .ok()?;
    let arr: [f64; 7] = vals.try_into().ok()?;
    Pose::from_array(arr)
}

/// Seven pose fields with nine decimals and a canonical quaternion sign.
pub fn format_pose_fields(p: &Pose<f64>) -> String {
    let mut s = String::new();
    for (i, v) in p.canonical().to_array().iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{v:.9}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_whitespace() {
        let kv = KeyValues::parse("# header\n a = 1.5 \n\nb=hello world\n").unwrap();
        assert_eq!(kv.f64("a").unwrap(), Some(1.5));
        assert_eq!(kv.get("b"), Some("hello world"));
        assert_eq!(kv.get("c"), None);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(KeyValues::parse("novalue"), Err(KeyValError::Syntax { line: 1, .. })));
        assert!(matches!(KeyValues::parse("a=1\na=2"), Err(KeyValError::Duplicate(_))));
        let kv = KeyValues::parse("a=x").unwrap();
        assert!(matches!(kv.f64("a"), Err(KeyValError::BadValue { .. })));
        assert_eq!(kv.expect_only(&["b"]), Err(KeyValError::Unknown("a".into())));
    }

    #[test]
    fn pose_fields() {
        let p = parse_pose_fields("1 2 3 0 0 0 2").unwrap();
        assert_eq!(p.to_array(), [1.0, 2.0, 3.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(parse_pose_fields("1 2 3 0 0 0").is_none());
        assert!(parse_pose_fields("1 2 3 0 0 0 0").is_none());
        assert_eq!(
            format_pose_fields(&p),
            "1.000000000 2.000000000 3.000000000 0.000000000 0.000000000 0.000000000 1.000000000"
        );
    }
}
