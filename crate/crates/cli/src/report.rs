use std::time::Instant;

use contexta::gfp::{PrimeConfig, SymplecticVector};
use serde::Serialize;
use serde_json::{json, Value};

use crate::commands::Options;

pub const SCHEMA: &str = "contexta/1";

#[derive(Debug, Clone, Serialize)]
pub struct CommandEcho {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub command: CommandEcho,
    pub cfg: Value,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
    /// Human-readable lines; not part of the JSON.
    #[serde(skip)]
    pub summary: Vec<String>,
}

impl Report {
    pub fn new(
        name: &str,
        args: Vec<String>,
        cfg: PrimeConfig,
        result: Value,
        summary: Vec<String>,
        opts: &Options,
        start: Instant,
    ) -> Self {
        Report {
            schema: SCHEMA,
            tool_version: env!("CARGO_PKG_VERSION"),
            command: CommandEcho { name: name.into(), args },
            cfg: json!({ "p": cfg.p(), "n": cfg.n(), "order": "z|x" }),
            result,
            timing_ms: opts.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
            summary,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }
}

pub fn coords(v: &SymplecticVector) -> Value {
    json!(v.to_u32())
}

/// Rounds to 12 decimals so reports do not carry float noise.
pub fn number(x: f64) -> Value {
    let r = (x * 1e12).round() / 1e12;
    json!(if r == 0.0 { 0.0 } else { r })
}
