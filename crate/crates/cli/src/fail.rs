//! Exit codes and machine-readable error reports.

use std::fmt::Display;
use std::path::Path;

use resil_core::Error;
use serde_json::{json, Value};

pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
pub enum Fail {
    /// Bad flags or unreadable inputs.
    Usage(String),
    /// The request was well-formed but the computation refused it.
    Domain(Error),
}

impl Fail {
    pub fn usage(msg: impl Into<String>) -> Self {
        Fail::Usage(msg.into())
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Fail::Usage(format!("{}: {e}", path.display()))
    }

    pub fn internal(e: impl Display) -> Self {
        Fail::Domain(Error::Parse(e.to_string()))
    }

    pub fn code(&self) -> i32 {
        match self {
            Fail::Usage(_) => EXIT_USAGE,
            Fail::Domain(_) => EXIT_DOMAIN,
        }
    }

    pub fn to_json(&self) -> Value {
        let (kind, detail) = match self {
            Fail::Usage(_) => ("usage", Value::Null),
            Fail::Domain(e) => domain_detail(e),
        };
        json!({
            "error": {
                "kind": kind,
                "exit_code": self.code(),
                "message": self.to_string(),
                "detail": detail,
            }
        })
    }
}

fn domain_detail(e: &Error) -> (&'static str, Value) {
    match e {
        Error::CoverTooLarge {
            predicted,
            log_predicted,
            limit,
        } => (
            "cover_too_large",
            json!({
                "predicted_size": predicted,
                "ln_predicted_size": log_predicted,
                "size_limit": limit,
                "hint": "effective limit is min(--size-limit, 2^26 / b^d); raise eps or lower b",
            }),
        ),
        Error::TensorTooLarge { cells, cap } => {
            ("tensor_too_large", json!({ "cells": cells.to_string(), "cap": cap }))
        }
        Error::AboveCap { what, value, cap } => {
            ("above_cap", json!({ "what": what, "value": value, "cap": cap }))
        }
        Error::ZeroMassSlice { axis, bin } => ("zero_mass_slice", json!({ "axis": axis, "bin": bin })),
        Error::InvalidParameter(_) => ("invalid_parameter", Value::Null),
        Error::InvalidGraph(_) => ("invalid_graph", Value::Null),
        Error::Precondition(_) => ("precondition", Value::Null),
        Error::InvalidDisintegration(_) => ("invalid_certificate", Value::Null),
        Error::ShapeMismatch(_) => ("shape_mismatch", Value::Null),
        Error::DegenerateDiscretization => ("degenerate_discretization", Value::Null),
        Error::Empty(_) => ("empty_input", Value::Null),
        _ => ("internal", Value::Null),
    }
}

impl Display for Fail {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Fail::Usage(m) => f.write_str(m),
            Fail::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Json(_) | Error::Csv(_) | Error::Parse(_) => Fail::Usage(e.to_string()),
            other => Fail::Domain(other),
        }
    }
}
