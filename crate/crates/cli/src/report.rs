//! Report envelope and rendering. Reports carry the tool version and the
//! SHA-256 of every input so a run can be reproduced; nothing time- or
//! path-dependent goes in, so identical inputs give identical bytes.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

/// What a command hands back before wrapping.
pub struct Reply {
    /// Drives the exit code: 0 when true, 1 when false.
    pub affirmative: bool,
    pub body: Value,
    pub text: String,
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    input_sha256: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    affirmative: bool,
    result: &'a Value,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

pub fn render(format: Format, command: &str, inputs: &[String], seed: Option<u64>, reply: &Reply) -> String {
    match format {
        Format::Json => {
            let env = Envelope {
                tool: "dcs",
                version: env!("CARGO_PKG_VERSION"),
                command,
                input_sha256: inputs,
                seed,
                affirmative: reply.affirmative,
                result: &reply.body,
            };
            let mut s = serde_json::to_string_pretty(&env).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = format!("dcs {} {command}", env!("CARGO_PKG_VERSION"));
            if let Some(seed) = seed {
                s.push_str(&format!(" (seed {seed})"));
            }
            s.push('\n');
            for h in inputs {
                s.push_str(&format!("input sha256 {h}\n"));
            }
            s.push_str(&reply.text);
            if !s.ends_with('\n') {
                s.push('\n');
            }
            s
        }
    }
}
