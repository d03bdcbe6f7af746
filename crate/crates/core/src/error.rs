use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Game-description file could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A structural invariant of the game tree is violated.
    #[error("invalid game at node {node}: {message}")]
    InvalidGame { node: String, message: String },

    /// The requested construction would exceed the node budget.
    #[error("node budget exceeded: {nodes} nodes over budget {budget}")]
    NodeBudget { nodes: usize, budget: usize },

    /// A policy does not cover, or does not match, an infoset.
    #[error("policy error at infoset {infoset}: {message}")]
    Policy { infoset: String, message: String },

    /// A probability vector is not on the simplex.
    #[error("not a probability distribution: {message}")]
    NotSimplex { message: String },

    /// A sampling policy has a zero (or negative) entry.
    #[error("sampling policy has non-positive probability at infoset {infoset}")]
    ZeroSamplingProbability { infoset: String },

    /// Inverse learning rates must be positive and nondecreasing.
    #[error("rate monotonicity violated: 1/eta {next} < previous {prev}")]
    RateMonotonicity { prev: f64, next: f64 },

    /// A loss or probability is NaN or infinite.
    #[error("non-finite value in {what}")]
    NonFinite { what: String },

    /// The iterative minimizer did not converge within its iteration cap.
    #[error("numerical minimizer did not converge within {cap} iterations")]
    NonConvergence { cap: usize },

    /// A trajectory's recorded probabilities do not match the sampling policy.
    #[error("trajectory does not match the learner's sampling policy at infoset {infoset}")]
    TrajectoryMismatch { infoset: String },

    /// Averaging over zero rounds is undefined.
    #[error("cannot average over zero rounds")]
    EmptyAverage,

    /// Aligned audit sequences have different lengths.
    #[error("length mismatch in audit inputs: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// Grid search over an empty learning-rate grid.
    #[error("learning-rate grid is empty")]
    EmptyGrid,

    /// Configuration value is missing or out of range.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
