use std::fs;
use std::io::{self, Write};
use std::path::Path;

use coupler_core::C64;
use serde::Serialize;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report<C: Serialize, R: Serialize> {
    pub schema: u32,
    pub command: &'static str,
    pub config: C,
    pub results: R,
    pub max_error: f64,
    pub passed: bool,
}

impl<C: Serialize, R: Serialize> Report<C, R> {
    pub fn new(command: &'static str, config: C, results: R, max_error: f64, passed: bool) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            command,
            config,
            results,
            max_error,
            passed,
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut text = serde_json::to_string_pretty(self).map_err(|e| CliError::Output(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }
}

/// `[re, im]`, the wire form of a complex number.
pub fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn to_csv<S: Serialize>(rows: &[S]) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).map_err(|e| CliError::Output(e.to_string()))?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Output(format!("{}: {e}", path.display()))),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Output(e.to_string())),
    }
}
