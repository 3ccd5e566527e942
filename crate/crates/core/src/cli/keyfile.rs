//! Key files: one JSON object, integers as decimal strings.
//!
//! ```text
//! {"scheme":"nk","lambda":35,"p":"22801763489","Q":"15485863","created":"..."}
//! ```

use std::fs;
use std::path::Path;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dghv::DghvSecretKey;
use crate::nk::NkSecretKey;

#[derive(Debug, Error)]
pub enum KeyFileError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("invalid key file: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeyFile {
    pub scheme: String,
    pub lambda: u64,
    pub p: String,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    pub q_pub: Option<String>,
    pub created: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SecretKey {
    Dghv(DghvSecretKey),
    Nk(NkSecretKey),
}

impl KeyFile {
    pub fn from_key(key: &SecretKey, created: String) -> Self {
        match key {
            SecretKey::Dghv(k) => KeyFile {
                scheme: "dghv".into(),
                lambda: k.lambda(),
                p: k.modulus().to_string(),
                q_pub: None,
                created,
            },
            SecretKey::Nk(k) => KeyFile {
                scheme: "nk".into(),
                lambda: k.lambda(),
                p: k.modulus().to_string(),
                q_pub: Some(k.q_pub().to_string()),
                created,
            },
        }
    }

    /// Validates the parsed fields: `p` odd and `lambda` bits long, `Q` prime.
    pub fn to_key(&self) -> Result<SecretKey, KeyFileError> {
        let invalid = |msg: String| KeyFileError::Invalid(msg);
        let p = parse_decimal(&self.p).ok_or_else(|| invalid(format!("p = {:?}", self.p)))?;
        match (self.scheme.as_str(), &self.q_pub) {
            ("dghv", None) => DghvSecretKey::new(p, self.lambda)
                .map(SecretKey::Dghv)
                .map_err(|e| invalid(e.to_string())),
            ("nk", Some(q)) => {
                let q = parse_decimal(q).ok_or_else(|| invalid(format!("Q = {q:?}")))?;
                if p.bits() != self.lambda {
                    return Err(invalid(format!("p is not a {}-bit value", self.lambda)));
                }
                NkSecretKey::from_parts(p, q)
                    .map(SecretKey::Nk)
                    .map_err(|e| invalid(e.to_string()))
            }
            ("dghv", Some(_)) => Err(invalid("dghv keys carry no Q".into())),
            ("nk", None) => Err(invalid("nk keys need Q".into())),
            (other, _) => Err(invalid(format!("unknown scheme {other:?}"))),
        }
    }

    pub fn load(path: &Path) -> Result<SecretKey, KeyFileError> {
        let text = fs::read_to_string(path).map_err(|source| KeyFileError::Read {
            path: path.display().to_string(),
            source,
        })?;
        let file: KeyFile = serde_json::from_str(&text).map_err(|e| KeyFileError::Invalid(e.to_string()))?;
        file.to_key()
    }

    pub fn save(&self, path: &Path) -> Result<(), KeyFileError> {
        let mut text = serde_json::to_string_pretty(self).expect("key file serializes");
        text.push('\n');
        fs::write(path, text).map_err(|source| KeyFileError::Write {
            path: path.display().to_string(),
            source,
        })
    }
}

fn parse_decimal(s: &str) -> Option<BigUint> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}
