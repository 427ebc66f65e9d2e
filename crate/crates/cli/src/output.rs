//! Number formatting, run manifests and output files.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sphere_sos::conic::BackendConfig;

use crate::CliError;

/// Significant digits of every printed float.
pub const SIG_DIGITS: usize = 12;

/// `x` rounded to [`SIG_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Like C's `%.12g`.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        trim_zeros(&s).to_string()
    } else {
        let s = format!("{:.*e}", SIG_DIGITS - 1, x);
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        let e: i32 = e.parse().expect("integer exponent");
        format!("{}e{}{:02}", trim_zeros(mantissa), if e < 0 { '-' } else { '+' }, e.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds every non-integer number in `v`. Non-finite floats become strings.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            *v = serde_json::Number::from_f64(round_sig(x)).map(Value::Number).unwrap_or_else(|| Value::String(fmt_sig(x)));
        }
        Value::Array(a) => a.iter_mut().for_each(round_json),
        Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Serializes with non-finite floats kept as strings, then rounds.
pub fn to_rounded_json<T: Serialize>(value: &T, non_finite: &[(&str, f64)]) -> Value {
    let mut v = serde_json::to_value(value).expect("plain data");
    if let Value::Object(o) = &mut v {
        for &(key, x) in non_finite {
            if !x.is_finite() {
                o.insert(key.to_string(), Value::String(fmt_sig(x)));
            }
        }
    }
    round_json(&mut v);
    v
}

#[derive(Debug, Clone, Serialize)]
pub struct BackendIdentity {
    pub name: String,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl BackendIdentity {
    pub fn new(name: &str, config: BackendConfig) -> Self {
        Self { name: name.to_string(), tolerance: config.tolerance, max_iterations: config.max_iterations }
    }
}

/// Everything needed to rerun a command.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub seed: u64,
    pub tool_version: String,
    pub backend: BackendIdentity,
    pub wall_clock_seconds: f64,
}

pub struct Clock(Instant);

impl Clock {
    pub fn start() -> Self {
        Self(Instant::now())
    }

    pub fn manifest(&self, command: &str, seed: u64, backend: BackendIdentity) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            arguments: std::env::args().skip(1).collect(),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            backend,
            wall_clock_seconds: self.0.elapsed().as_secs_f64(),
        }
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// `dir/stem<suffix>` next to `path`, e.g. `run.csv` -> `run.dat`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

/// Prints `{"result": .., "manifest": ..}` and writes it to `out` when given.
pub fn emit_json(result: Value, manifest: &RunManifest, out: Option<&Path>) -> Result<(), CliError> {
    let mut m = serde_json::to_value(manifest).expect("plain data");
    round_json(&mut m);
    let doc = serde_json::json!({ "result": result, "manifest": m });
    let text = serde_json::to_string_pretty(&doc).expect("plain data");
    println!("{text}");
    if let Some(p) = out {
        write_file(p, &format!("{text}\n"))?;
    }
    Ok(())
}
