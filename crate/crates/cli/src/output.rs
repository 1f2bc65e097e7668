use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use pamd_core::Result;
use serde::Serialize;
use serde_json::json;

use crate::config::ExperimentConfig;

/// `{:.16e}`: 17 significant digits, round-trip exact.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV document whose first line embeds the resolved config.
pub struct Csv {
    text: String,
}

/// `# config: {...}` line heading every CSV output.
pub fn config_line(cfg: &ExperimentConfig) -> String {
    format!("# config: {}\n", cfg.to_json())
}

impl Csv {
    pub fn new(cfg: &ExperimentConfig, header: &str) -> Self {
        Csv {
            text: format!("{}{header}\n", config_line(cfg)),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// `{"config": ..., "result": ..., "metadata": {...}}`; only `metadata` varies between runs.
pub fn json_document<T: Serialize>(cfg: &ExperimentConfig, result: &T) -> Result<String> {
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let doc = json!({
        "config": serde_json::to_value(cfg)?,
        "result": serde_json::to_value(result)?,
        "metadata": {
            "version": env!("CARGO_PKG_VERSION"),
            "unix_time": stamp,
        },
    });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// Writes to `path` or stdout.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// The config embedded in a CSV or JSON output, re-parsed.
#[cfg(test)]
pub fn embedded_config(text: &str) -> Option<ExperimentConfig> {
    if let Some(rest) = text.strip_prefix("# config: ") {
        return ExperimentConfig::parse(rest.lines().next()?).ok();
    }
    let v: serde_json::Value = serde_json::from_str(text).ok()?;
    serde_json::from_value(v.get("config")?.clone()).ok()
}
