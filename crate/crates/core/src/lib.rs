//! Area, power, noise and sizing estimates for per-qubit cryogenic
//! control electronics.
//!
//! The crate is organised bottom-up: [`noise`] gives the thermal bounds,
//! [`dac`] and [`analog`] the converter and sample-and-hold models,
//! [`digital`] the memories and managing logic, and [`report`] assembles
//! them into system totals, sweeps and cooling-budget capacity.
//!
//! ```
//! use cryoctl_core::{assemble, qubit_capacity, Scenario};
//!
//! let report = assemble(&Scenario::baseline()).unwrap();
//! assert_eq!(qubit_capacity(&report, 1e-3).unwrap().n_qubits, 5);
//! ```

pub mod analog;
pub mod dac;
pub mod digital;
pub mod error;
pub mod noise;
pub mod params;
pub mod report;
pub mod scenario;

pub use dac::{DacArchitecture, DacDesign, DacModel, DacRegistry};
pub use digital::{DigitalBudget, MemoryArch, MemoryDesign, MemoryModel, MemoryRegistry};
pub use error::{Error, Result};
pub use params::{
    apply_node, AnalogSizing, Node, OperatingPoint, SystemSpec, TechnologyParams, K_B,
};
pub use report::{
    assemble, qubit_capacity, sweep, temperature_adjust, CapacityResult, Estimator, Report,
    SweepParam,
};
pub use scenario::{load_scenario, Scenario};
