use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("alphabet/truncation mismatch: ({0}, {1}) vs ({2}, {3})")]
    AlphabetMismatch(usize, usize, usize, usize),
    #[error("letter {letter} outside alphabet 1..={alphabet}")]
    LetterOutOfRange { letter: u8, alphabet: usize },
    #[error("word of length {len} exceeds truncation degree {degree}")]
    WordTooLong { len: usize, degree: usize },
    #[error("series is not invertible in the truncated algebra (constant term {0})")]
    NotInvertible(Complex64),
    #[error("path endpoints do not match: {0} vs {1}")]
    EndpointMismatch(Complex64, Complex64),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("point {point} lies within {distance:.3e} of a pole")]
    PoleProximity { point: Complex64, distance: f64 },
    #[error("higher-order pole at {0}")]
    HigherOrderPole(String),
    #[error("invalid form: {0}")]
    InvalidForm(String),
    #[error("point {0} lies on the lattice")]
    OnLattice(Complex64),
    #[error("invalid lattice: Im tau = {0} must be positive")]
    InvalidLattice(f64),
    #[error("tolerance {tol:.3e} not achieved (estimate {achieved:.3e}) within {panels} panels")]
    ToleranceNotAchieved {
        tol: f64,
        achieved: f64,
        panels: usize,
    },
    #[error("regularization failed: {0}")]
    Regularization(String),
    #[error("loop layout invalid: {0}")]
    Layout(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("q-expansion error: {0}")]
    QExpansion(String),
    #[error("scene error at {path}: {message}")]
    Scene { path: String, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
