use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;

use pluripot_core::report::{num, to_json_string, Report};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Failures that end a run with exit code 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(pluripot_core::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<pluripot_core::Error> for CliError {
    fn from(e: pluripot_core::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn usage(m: impl Into<String>) -> CliError {
    CliError::Usage(m.into())
}

/// Shared state of one invocation.
pub struct Ctx {
    pub seed: u64,
    pub dry_run: bool,
    loaded: RefCell<Vec<(String, Vec<u8>)>>,
}

impl Ctx {
    pub fn new(seed: u64, dry_run: bool) -> Self {
        Ctx { seed, dry_run, loaded: RefCell::new(Vec::new()) }
    }

    /// Reads JSON from a file, or inline when the argument starts with `{` or `[`.
    pub fn load_json<T: DeserializeOwned>(&self, what: &str, arg: &str) -> CliResult<T> {
        let t = arg.trim_start();
        let (source, bytes) = if t.starts_with('{') || t.starts_with('[') {
            ("<inline>".to_string(), arg.as_bytes().to_vec())
        } else {
            let b = std::fs::read(arg).map_err(|e| usage(format!("cannot read {what} file {arg}: {e}")))?;
            (arg.to_string(), b)
        };
        let v = serde_json::from_slice(&bytes).map_err(|e| usage(format!("malformed {what} in {source}: {e}")))?;
        self.loaded.borrow_mut().push((source, bytes));
        Ok(v)
    }

    /// SHA-256 over the argument list and every loaded input.
    pub fn config_hash(&self, args: &[String]) -> String {
        let mut h = Sha256::new();
        for a in args {
            h.update(a.as_bytes());
            h.update([0u8]);
        }
        for (src, bytes) in self.loaded.borrow().iter() {
            h.update(src.as_bytes());
            h.update([0u8]);
            h.update(bytes);
        }
        hex::encode(h.finalize())
    }
}

/// A finished command: its report, the verdict of any built-in assertions,
/// and the tolerances they used.
pub struct Outcome {
    pub report: Report,
    pub pass: Option<bool>,
    pub tolerances: BTreeMap<String, f64>,
}

impl Outcome {
    pub fn info(report: Report) -> Self {
        Outcome { report, pass: None, tolerances: BTreeMap::new() }
    }

    pub fn checked(report: Report, pass: bool) -> Self {
        Outcome { report, pass: Some(pass), tolerances: BTreeMap::new() }
    }

    pub fn tol(mut self, name: &str, value: f64) -> Self {
        self.tolerances.insert(name.to_string(), value);
        self
    }

    pub fn dry(command: &str, config: Value) -> Self {
        Outcome::info(Report::new(json!({"command": command, "dry_run": true, "valid": true, "config": config})))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    }
}

/// Serializes a core report. Non-finite floats come out as `null`.
pub fn value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

pub fn error_report(e: &CliError) -> String {
    let v = match e {
        CliError::Usage(m) => json!({"error": "usage", "message": m}),
        CliError::Core(c) => json!({"error": c.code(), "message": c.to_string()}),
    };
    to_json_string(&v)
}

pub struct Manifest<'a> {
    pub args: &'a [String],
    pub config_hash: String,
    pub seed: u64,
    pub wall_time: f64,
    pub outcome: Option<&'a Outcome>,
    pub exit_code: u8,
}

impl Manifest<'_> {
    pub fn to_json(&self) -> String {
        let tolerances: serde_json::Map<String, Value> = self
            .outcome
            .map(|o| o.tolerances.iter().map(|(k, v)| (k.clone(), num(*v))).collect())
            .unwrap_or_default();
        let pass = self.outcome.and_then(|o| o.pass);
        to_json_string(&json!({
            "command_line": self.args,
            "config_hash": self.config_hash,
            "tool_version": env!("CARGO_PKG_VERSION"),
            "wall_time_seconds": num(self.wall_time),
            "seed": self.seed,
            "tolerances": tolerances,
            "pass": pass,
            "exit_code": self.exit_code,
        }))
    }
}
