use thiserror::Error;

use crate::engine::EngineError;
use crate::frontend::{DimacsError, FormulaError};
use crate::measures::MeasureError;
use crate::pmc::CounterError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Dimacs(#[from] DimacsError),
    #[error(transparent)]
    Counter(#[from] CounterError),
    #[error("{what} has {size} variables, limit is {limit}")]
    LimitExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("invalid contribution weights: {0}")]
    InvalidWeights(String),
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("unknown measure {0:?}")]
    UnknownMeasure(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
