//! Exit codes, the echoed run configuration and deterministic writers.

use std::fs;
use std::path::Path;

use faso::metric::fmt_real;
use faso::Error;
use serde::Serialize;
use serde_json::Value;

pub const DIGITS: usize = 12;

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

pub type CliResult<T = ()> = Result<T, CliError>;

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self { code: EXIT_VALIDATION, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ResourceCap { .. } => EXIT_RESOURCE,
            Error::Schedule(_)
            | Error::EmptyImage { .. }
            | Error::DiameterBound { .. }
            | Error::EmptyProjection { .. }
            | Error::ImageNotInTarget { .. }
            | Error::NotOrderPreserving { .. } => EXIT_VALIDATION,
            _ => EXIT_USAGE,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::usage(e.to_string())
    }
}

/// Effective settings of a run, echoed into every artifact.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub version: &'static str,
    #[serde(flatten)]
    pub settings: Value,
}

impl RunConfig {
    pub fn new(command: &'static str, settings: impl Serialize) -> Self {
        Self { command, version: env!("CARGO_PKG_VERSION"), settings: serde_json::to_value(settings).expect("settings serialize") }
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("run config serializes")
    }

    pub fn one_line(&self) -> String {
        serde_json::to_string(self).expect("run config serializes")
    }
}

/// Rounds every float in `v` to `DIGITS` significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            if let Some(r) = fmt_real(x, DIGITS).parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Report JSON: `{"run": ..., <fields>}` with floats rounded.
pub fn report(run: &RunConfig, body: impl Serialize) -> Value {
    let mut body = serde_json::to_value(body).expect("report serializes");
    round_floats(&mut body);
    let mut out = serde_json::Map::new();
    out.insert("run".into(), run.to_value());
    match body {
        Value::Object(map) => out.extend(map),
        other => {
            out.insert("report".into(), other);
        }
    }
    Value::Object(out)
}

pub fn write_json(path: &Path, value: &Value) -> CliResult {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(path, &text)
}

pub fn write(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

pub fn ensure_dir(dir: &Path) -> CliResult {
    fs::create_dir_all(dir).map_err(|e| CliError::usage(format!("cannot create {}: {e}", dir.display())))
}

pub fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}
