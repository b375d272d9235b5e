//! Link-level Monte-Carlo simulation of filtered CP-OFDM subbands:
//! scenario files, the TX/RX chains of each filtering configuration, BER,
//! EVM and spectrum measurement, and result emission.

pub mod chain;
pub mod emit;
pub mod error;
pub mod runner;
pub mod scenario;
pub mod tables;
pub mod theory;

pub use error::{Result, SimError};
pub use runner::{run_scenario, ResultRow};
pub use scenario::{load_scenario, Scenario};
