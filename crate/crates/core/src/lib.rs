//! Importance values of variables in Boolean functions.

pub mod cli;
pub mod engine;
pub mod error;
pub mod frontend;
pub mod games;
pub mod measures;
pub mod oracle;
pub mod pmc;
pub mod values;
