use qdeform_core::Error;
use serde_json::json;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid value for {flag}: {message}")]
    Usage { flag: String, message: String },
    #[error("numeric failure: {0}")]
    Numeric(Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn usage(flag: &str, message: impl Into<String>) -> Self {
        CliError::Usage {
            flag: flag.to_string(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage { .. } => EXIT_USAGE,
            CliError::Numeric(_) => EXIT_NUMERIC,
            _ => 1,
        }
    }

    /// Machine-readable description of a numeric failure.
    pub fn diagnostic(&self) -> Option<serde_json::Value> {
        let CliError::Numeric(e) = self else { return None };
        let mut n = None;
        let mut inner = e;
        while let Error::AtSize { n: size, source } = inner {
            n = Some(*size);
            inner = source;
        }
        let detail = match inner {
            Error::Bracket { expansions, lo, hi } => {
                json!({"kind": "bracket", "expansions": expansions, "lo": lo, "hi": hi})
            }
            Error::ZeroMass {
                n,
                x,
                largest_k,
                qlog_weight,
            } => json!({"kind": "zero_mass", "n": n, "x": x, "largest_k": largest_k, "qlog_weight": qlog_weight}),
            other => json!({"kind": "other", "detail": other.to_string()}),
        };
        Some(json!({"error": {"message": e.to_string(), "n": n, "detail": detail}}))
    }
}

/// Name of the command-line flag that carries a core parameter.
fn flag_for(name: &str) -> String {
    format!("--{}", name.replace('_', "-"))
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numeric_failure() {
            return CliError::Numeric(e);
        }
        match e {
            Error::Window { .. } => CliError::usage("--window", e.to_string()),
            Error::Degenerate(_) => CliError::Numeric(e),
            Error::InvalidDeformation(q) => CliError::usage("--q", format!("{q} is outside (0, 2)")),
            Error::InvalidParameter { name, value, reason } => {
                CliError::usage(&flag_for(name), format!("{value}: {reason}"))
            }
            Error::AtSize { n, source } => match CliError::from(*source) {
                CliError::Usage { flag, message } => CliError::Usage {
                    flag,
                    message: format!("at n = {n}: {message}"),
                },
                other => other,
            },
            other => CliError::usage("arguments", other.to_string()),
        }
    }
}
