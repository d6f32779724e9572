//! Deterministic CSV and JSON emission. CSV files follow RFC 4180 (CRLF
//! line endings, `.` decimal separator, UTF-8) and start with a metadata
//! comment line carrying the config hash, seed, and version.

use san_core::params::ScenarioConfig;
use std::fs;
use std::io::Write;
use std::path::Path;

/// FNV-1a over the canonical JSON form of the config.
pub fn config_hash(cfg: &ScenarioConfig) -> String {
    let text = serde_json::to_string(cfg).expect("config serializes");
    let mut h: u64 = 0xcbf29ce484222325;
    for b in text.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

pub struct CsvDoc {
    buf: String,
}

impl CsvDoc {
    pub fn new(cfg: &ScenarioConfig, seed: u64, header: &[&str]) -> Self {
        let mut buf = String::new();
        buf.push_str(&format!(
            "# config-hash={}, seed={}, version={}\r\n",
            config_hash(cfg),
            seed,
            env!("CARGO_PKG_VERSION")
        ));
        buf.push_str(&header.join(","));
        buf.push_str("\r\n");
        Self { buf }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buf.push_str(&fields.join(","));
        self.buf.push_str("\r\n");
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        String::from("nan")
    }
}

pub fn write_text(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
        }
    }
}

pub fn write_json<T: serde::Serialize>(path: Option<&Path>, value: &T) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    write_text(path, &text)
}
