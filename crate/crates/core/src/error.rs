use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("velocity eigenstate parameters violate |a|^2 + |b|^2 = 1/2 (got {weight})")]
    BadNormalization { weight: f64 },

    #[error("free Hamiltonian is numerically singular at p = {p}")]
    SingularH { p: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("wavepacket width {sigma} is below 4 grid spacings ({min})")]
    GridTooCoarse { sigma: f64, min: f64 },

    #[error("wavepacket [{lo}, {hi}] does not fit inside the grid")]
    PacketOutsideGrid { lo: f64, hi: f64 },

    #[error("mixing coefficients must satisfy |c+|^2 + |c-|^2 = 1 (got {weight})")]
    BadMix { weight: f64 },

    #[error("dense oracle supports at most 128 grid points (got {n})")]
    TooLarge { n: usize },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("evolution config violates {bound}")]
    Resolution { bound: String },

    #[error("no spectral peak: peak/median ratio {ratio:.3}, amplitude {amplitude:e}")]
    NoPeak { ratio: f64, amplitude: f64 },

    #[error("series is too short or malformed: {0}")]
    BadSeries(String),

    #[error("requested {requested} modes but the grid only has {available}")]
    TooManyModes { requested: usize, available: usize },

    #[error("joint density needs grid.n <= 256 (got {n})")]
    JointTooLarge { n: usize },

    #[error("density has no satellite structure at t = {time}")]
    NoStructure { time: f64 },

    #[error("radius must be positive (got {0})")]
    NonPositiveRadius(f64),

    #[error("Darwin estimate is only defined for s states (got l = {l})")]
    NotSState { l: u32 },

    #[error("invalid quantum numbers: {0}")]
    InvalidQuantumNumbers(String),

    #[error("unit conversion not supported: {0}")]
    UnsupportedDimension(String),

    #[error("checks failed: {0}")]
    ChecksFailed(String),

    #[error("nothing to plot")]
    EmptyData,

    #[error("invalid config at `{path}`: {message}")]
    ConfigInvalid { path: String, message: String },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::ConfigInvalid {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Process exit code: 1 for invalid input, 2 for failures during the run.
    pub fn exit_code(&self) -> i32 {
        if self.is_validation() {
            1
        } else {
            2
        }
    }

    /// True for errors caused by the user's input rather than by the run.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::ConfigInvalid { .. }
            | Error::Resolution { .. }
            | Error::InvalidGrid(_)
            | Error::InvalidPotential(_)
            | Error::BadMix { .. }
            | Error::GridTooCoarse { .. }
            | Error::PacketOutsideGrid { .. }
            | Error::TooManyModes { .. }
            | Error::JointTooLarge { .. }
            | Error::TooLarge { .. }
            | Error::NotHermitian { .. }
            | Error::BadNormalization { .. }
            | Error::NonPositiveRadius(_)
            | Error::NotSState { .. }
            | Error::InvalidQuantumNumbers(_)
            | Error::UnsupportedDimension(_)
            | Error::Json(_) => true,
            Error::Context { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}
