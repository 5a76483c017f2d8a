use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use serde_json::{json, Value};

pub const SCHEMA: u32 = 1;

pub enum Body {
    Json(Value),
    Csv(String),
}

/// A finished run. `passed` is false when a check breached its tolerance.
pub struct Report {
    pub body: Body,
    pub passed: bool,
}

impl Report {
    /// JSON report; `schema` is added to the top-level object.
    pub fn json(mut v: Value, passed: bool) -> Self {
        if let Value::Object(map) = &mut v {
            map.insert("schema".into(), json!(SCHEMA));
            map.insert("passed".into(), json!(passed));
        }
        Self { body: Body::Json(v), passed }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self { code: 2, kind: "config", message: message.into() }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        Self { code: 1, kind: "numeric", message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self { code: 2, kind: "io", message: message.into() }
    }
}

impl From<hyperfrac::Error> for Failure {
    fn from(e: hyperfrac::Error) -> Self {
        match e {
            hyperfrac::Error::Budget(_) => Self::numeric(e.to_string()),
            _ => Self::config(e.to_string()),
        }
    }
}

pub fn fail(f: &Failure) -> ExitCode {
    let v = json!({
        "schema": SCHEMA,
        "error": { "kind": f.kind, "message": f.message },
    });
    eprintln!("{v}");
    ExitCode::from(f.code)
}

pub fn emit(report: &Report, out: Option<&Path>) -> ExitCode {
    let text = match &report.body {
        Body::Json(v) => serde_json::to_string_pretty(v).expect("report serializes") + "\n",
        Body::Csv(s) => s.clone(),
    };
    let written = match out {
        Some(p) => std::fs::write(p, &text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        return fail(&Failure::io(msg));
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
