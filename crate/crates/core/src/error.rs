use std::fmt;

use thiserror::Error;

/// Two vertex pairs at the same distance `h` whose `(i, j)` counts differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularityWitness {
    pub h: usize,
    pub i: usize,
    pub j: usize,
    pub first: (usize, usize, usize),
    pub second: (usize, usize, usize),
}

impl fmt::Display for RegularityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p^{}_{{{},{}}} is {} for pair ({}, {}) but {} for pair ({}, {})",
            self.h,
            self.i,
            self.j,
            self.first.2,
            self.first.0,
            self.first.1,
            self.second.2,
            self.second.0,
            self.second.1
        )
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("graph is disconnected: vertex {0} is unreachable from vertex 0")]
    Disconnected(usize),
    #[error("not distance-regular: {0}")]
    NotDistanceRegular(RegularityWitness),
    #[error("diameter {0} is below 3")]
    DiameterTooSmall(usize),
    #[error("not Q-polynomial: {0}")]
    NotQPolynomial(String),
    #[error("not of q-Racah type: {0}")]
    NotQRacahType(String),
    #[error("irreducible T-module is not thin: {0}")]
    ThinnessViolation(String),
    #[error("excluded parameter locus: {0}")]
    ExcludedLocus(String),
    #[error("numerical failure in {stage}: {detail}")]
    Numerical { stage: &'static str, detail: String },
}

impl Error {
    pub(crate) fn numerical(stage: &'static str, detail: impl Into<String>) -> Self {
        Error::Numerical { stage, detail: detail.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
