//! Provenance records embedded in every output.
//!
//! The record names the tool, its version, the command and a SHA-256 digest
//! of the command's effective inputs. Input files enter the digest by
//! content and output locations are left out, so the same inputs produce
//! byte-identical artifacts wherever they are written.

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const TOOL: &str = "delone";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub command: String,
    pub config_sha256: String,
}

impl Provenance {
    /// Hashes `key=value` lines in the given order.
    pub fn new(command: &str, inputs: &[(&str, String)]) -> Self {
        let mut canonical = format!("command={command}\n");
        for (k, v) in inputs {
            canonical.push_str(&format!("{k}={v}\n"));
        }
        Provenance {
            command: command.to_string(),
            config_sha256: sha256_hex(canonical.as_bytes()),
        }
    }

    /// `#`-prefixed header lines for CSV outputs.
    pub fn csv_header(&self) -> String {
        format!(
            "# tool: {TOOL} {VERSION}\n# command: {}\n# config_sha256: {}\n",
            self.command, self.config_sha256
        )
    }

    pub fn to_value(&self) -> Value {
        json!({
            "tool": TOOL,
            "version": VERSION,
            "command": self.command,
            "config_sha256": self.config_sha256,
        })
    }

    /// An XML comment for SVG outputs.
    pub fn svg_comment(&self) -> String {
        format!(
            "<!-- {TOOL} {VERSION}; command: {}; config_sha256: {} -->\n",
            self.command, self.config_sha256
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn inputs_change_the_digest() {
        let a = Provenance::new("dist", &[("tol", "0.001".into())]);
        let b = Provenance::new("dist", &[("tol", "0.002".into())]);
        assert_ne!(a.config_sha256, b.config_sha256);
        assert_eq!(a, Provenance::new("dist", &[("tol", "0.001".into())]));
        assert!(a.csv_header().lines().all(|l| l.starts_with("# ")));
    }
}
