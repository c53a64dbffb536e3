use std::path::PathBuf;

/// Errors raised by the simulator.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate element {element}: |r'| = {norm:e} below floor {floor:e}")]
    DegenerateElement { element: usize, norm: f64, floor: f64 },

    #[error("degenerate cohesive normal at interface {interface}: mean tangent vanishes and no normal is cached")]
    DegenerateNormal { interface: usize },

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("Newton step {step} failed after {iterations} iterations (residual {residual:e})")]
    StepFailure { step: usize, iterations: usize, residual: f64 },

    #[error("singular tangent matrix at pivot {pivot}")]
    LinearSolve { pivot: usize },

    #[error("explicit integration diverged at t = {time:e} s (time step too large?)")]
    Divergence { time: f64 },

    #[error("invalid assembly state: {0}")]
    AssemblyState(String),

    #[error("scenario `{0}` has no reference solution")]
    UnsupportedScenario(String),

    #[error("csv error at line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(line: usize, message: impl Into<String>) -> Self {
        Error::Config { line, message: message.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
