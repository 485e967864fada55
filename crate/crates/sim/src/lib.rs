//! Deterministic behavioral simulator of the qubit control digital system.
//!
//! Two clock domains drive a single event loop: the bias clock steps the
//! refresh/ramp controller, the RF clock steps the serial data input, the
//! command input and sequence playback. Hold capacitors droop
//! exponentially through the switch off-resistance between refreshes.
//!
//! ```
//! use cryoctl_core::Scenario;
//! use cryoctl_sim::{run_simulation, Stimulus};
//!
//! let stim = Stimulus::parse("0 write-bias 0 2048\n").unwrap();
//! let out = run_simulation(&Scenario::baseline(), &stim, 20_000.0).unwrap();
//! assert_eq!(out.summary.feedback_events, 1);
//! ```

pub mod controllers;
pub mod engine;
pub mod error;
pub mod memory;
pub mod protocol;
pub mod stimulus;
pub mod trace;

pub use controllers::{BiasController, BiasMode, HoldCaps, RfController};
pub use engine::{run_simulation, SimConfig, SimOutput, SimSummary, Simulator};
pub use error::{Result, SimError};
pub use memory::MemoryBank;
pub use protocol::{
    decode_dataword, encode_dataword, DataWord, Decoder, RfCommandWord, WordFormat, WordKind,
};
pub use stimulus::{Action, Stimulus, StimulusEvent};
pub use trace::{Trace, TraceEvent};
