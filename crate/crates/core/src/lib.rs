pub mod backtest;
pub mod classify;
pub mod cli;
pub mod emd;
pub mod error;
pub mod hhsa;
pub mod ingest;
pub mod spectral;
pub mod spline;
pub mod states;

pub use error::{Error, Result};
