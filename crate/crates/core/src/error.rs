use thiserror::Error;

/// Errors raised by the q-deformed numerics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("deformation parameter q = {0} is outside the supported interval (0, 2)")]
    InvalidDeformation(f64),

    #[error("{function}: argument {value} is outside the domain ({reason})")]
    Domain {
        function: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("index {index} is outside the valid range 0..={max}")]
    Range { index: usize, max: usize },

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: String,
    },

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("support mismatch at component {index}: {reason}")]
    Support { index: usize, reason: &'static str },

    #[error("normalization bracket not found after {expansions} expansions (last bracket [{lo}, {hi}])")]
    Bracket { expansions: usize, lo: f64, hi: f64 },

    #[error(
        "cumulative mass below x = {x} is exactly zero at n = {n} \
         (largest contributing k = {largest_k}, q-log weight {qlog_weight})"
    )]
    ZeroMass {
        n: usize,
        x: f64,
        largest_k: usize,
        qlog_weight: f64,
    },

    #[error("window |x| <= {window} contains {found} grid points, need at least {needed}")]
    Window {
        window: f64,
        found: usize,
        needed: usize,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("at n = {n}: {source}")]
    AtSize {
        n: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for failures of the numerical machinery (bracketing, underflow),
    /// as opposed to invalid input.
    pub fn is_numeric_failure(&self) -> bool {
        match self {
            Error::Bracket { .. } | Error::ZeroMass { .. } => true,
            Error::AtSize { source, .. } => source.is_numeric_failure(),
            _ => false,
        }
    }

    /// Attach the problem size at which the error occurred.
    pub fn at_size(self, n: usize) -> Self {
        Error::AtSize {
            n,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
