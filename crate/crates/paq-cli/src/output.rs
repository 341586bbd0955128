//! Output plumbing: the deterministic JSON envelope (resolved config plus a
//! content hash of the input state) and CSV emission with a fixed numeric
//! format of 17 significant digits.

use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::Value;

use crate::args::{Format, Units};

/// Everything a run emits: the resolved configuration, the input-state
/// content hash, and the command's results. No timestamps, so reruns with
/// the same config and seeds are byte-identical.
#[derive(Debug, Serialize)]
pub struct Envelope {
    pub command: String,
    pub config: Value,
    /// SHA-256 of the input state bytes (file contents, or the canonical
    /// JSON of a bundled fixture); absent for stateless commands.
    pub state_sha256: Option<String>,
    pub units: String,
    pub results: Value,
}

/// Fixed CSV numeric format: 17 significant digits, '.' decimal, no locale.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn units_label(units: Units) -> &'static str {
    match units {
        Units::Nats => "nats",
        Units::Bits => "bits",
    }
}

/// Multiplies a nats-valued quantity into display units.
pub fn to_display(x: f64, units: Units) -> f64 {
    match units {
        Units::Nats => x,
        Units::Bits => x / std::f64::consts::LN_2,
    }
}

/// Parses a rate given in display units back into nats.
pub fn from_display(x: f64, units: Units) -> f64 {
    match units {
        Units::Nats => x,
        Units::Bits => x * std::f64::consts::LN_2,
    }
}

/// A CSV table: header plus stringified rows.
pub struct Csv {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Writes either the JSON envelope or the CSV table to `--out` or stdout.
pub fn emit(
    envelope: &Envelope,
    csv: Option<Csv>,
    format: Format,
    out: &Option<PathBuf>,
) -> std::io::Result<()> {
    let body = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(envelope).expect("serializable");
            s.push('\n');
            s
        }
        Format::Csv => match csv {
            Some(table) => table.render(),
            None => {
                // commands without a tabular form fall back to JSON
                let mut s = serde_json::to_string_pretty(envelope).expect("serializable");
                s.push('\n');
                s
            }
        },
    };
    match out {
        Some(path) => std::fs::write(path, body),
        None => std::io::stdout().write_all(body.as_bytes()),
    }
}
