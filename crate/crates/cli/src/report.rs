//! Report rendering. JSON output goes through `serde_json::Value`, whose
//! maps are ordered, so keys always come out sorted.

use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// A finished report: a JSON body plus its rendered text table.
#[derive(Clone, Debug)]
pub struct Report {
    pub body: Value,
    pub text: String,
}

impl Report {
    /// Wraps a serializable body, adding the `version` and `seed` fields.
    pub fn new(body: impl Serialize, seed: Option<u64>, text: String) -> Self {
        let mut body = serde_json::to_value(body).expect("report bodies serialize");
        if let Value::Object(m) = &mut body {
            m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
            m.insert("seed".into(), json!(seed));
        }
        Self { body, text }
    }

    pub fn empty() -> Self {
        let mut m = Map::new();
        m.insert("windows".into(), json!([]));
        Self::new(Value::Object(m), None, String::new())
    }
}

pub fn emit_report(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.body).expect("json values serialize");
            s.push('\n');
            s
        }
        Format::Text => report.text.clone(),
    }
}

/// Renders rows as a left-aligned table with a header line.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<String>| -> String {
        let padded: Vec<String> =
            cells.iter().zip(&widths).map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count()))).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.iter().map(|h| h.to_string()).collect());
    for r in rows {
        out.push_str(&line(r.clone()));
    }
    out
}
