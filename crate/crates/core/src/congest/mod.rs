//! CONGEST(B) round engine.

pub mod config;
pub mod engine;
pub mod log;
pub mod message;

pub use config::{default_bandwidth, CongestionPolicy, SimConfig};
pub use engine::{run, Engine, Exchange, FloodOutcome, FloodSpec, NodeProgram, SimError};
pub use log::{RoundLog, RoundRecord, RunSummary};
pub use message::{bits_for, Encoding, Envelope, Payload};
