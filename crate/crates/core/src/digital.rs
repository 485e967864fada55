//! Memories and the managing component, from gate-level budgets.
//!
//! Switching power follows `σ · f · V_dd² · C`. Flip-flops are counted with
//! an equivalent switched capacitance and area; latches count as a fixed
//! fraction of a flip-flop. The managing-component counts live in a JSON
//! budget (see `data/managing_budget.json`) so they can be recalibrated
//! without touching code.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{OperatingPoint, TechnologyParams};
use crate::scenario::Scenario;

const DEFAULT_BUDGET: &str = include_str!("../data/managing_budget.json");

pub fn switching_power(c_gate: f64, f: f64, v_dd: f64, sigma: f64) -> f64 {
    sigma * f * v_dd * v_dd * c_gate
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemoryArch {
    FlipFlop,
    Sram,
}

impl MemoryArch {
    pub fn name(self) -> &'static str {
        match self {
            Self::FlipFlop => "flip_flop",
            Self::Sram => "sram",
        }
    }
}

impl fmt::Display for MemoryArch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MemoryArch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "flip_flop" | "ff" | "flipflop" => Ok(Self::FlipFlop),
            "sram" | "s" => Ok(Self::Sram),
            other => Err(Error::validation(format!("unknown memory architecture '{other}'"))),
        }
    }
}

/// Bias and RF register files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MemoryDesign {
    pub arch: MemoryArch,
    /// One per bias electrode plus the ramp-target register.
    pub bias_registers: u32,
    pub bias_width: u32,
    pub rf_registers: u32,
    pub rf_width: u32,
    pub rf_read_ports: u32,
}

impl MemoryDesign {
    pub fn from_scenario(s: &Scenario) -> Self {
        Self {
            arch: s.memory_arch,
            bias_registers: s.spec.n_bias_signals + 1,
            bias_width: s.spec.n_bias,
            rf_registers: s.spec.rf_words(),
            rf_width: s.spec.n_rf,
            rf_read_ports: 2,
        }
    }

    pub fn bias_bits(&self) -> u64 {
        self.bias_registers as u64 * self.bias_width as u64
    }

    pub fn rf_bits(&self) -> u64 {
        self.rf_registers as u64 * self.rf_width as u64
    }

    pub fn total_bits(&self) -> u64 {
        self.bias_bits() + self.rf_bits()
    }
}

/// Pass-transistor tree for a selector over `registers` inputs of `width`
/// bits: `(2^(k+1) - 2) · width` with `k = ceil(log2(registers))`.
pub fn selector_transistors(registers: u32, width: u32) -> u64 {
    let k = registers.max(1).next_power_of_two().trailing_zeros();
    ((1u64 << (k + 1)) - 2) * width as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AreaPower {
    pub area_um2: f64,
    pub power_w: f64,
}

/// A memory technology.
pub trait MemoryModel: Send + Sync {
    fn arch(&self) -> MemoryArch;

    /// Switched capacitance per stored bit, F.
    fn c_bit(&self, tech: &TechnologyParams) -> f64;

    /// Storage-cell area per bit, µm².
    fn a_bit(&self, tech: &TechnologyParams) -> f64;

    /// Read/write periphery, in transistors.
    fn periphery_transistors(&self, design: &MemoryDesign, budget: &DigitalBudget) -> u64;

    fn area(&self, design: &MemoryDesign, tech: &TechnologyParams, budget: &DigitalBudget) -> f64 {
        design.total_bits() as f64 * self.a_bit(tech)
            + self.periphery_transistors(design, budget) as f64 * tech.a_mos_eff()
    }

    fn power(&self, design: &MemoryDesign, op: &OperatingPoint, tech: &TechnologyParams) -> f64 {
        let c = self.c_bit(tech);
        switching_power(design.bias_bits() as f64 * c, op.f_clk_bias, op.v_dd, op.sigma_biasmem)
            + switching_power(design.rf_bits() as f64 * c, op.f_clk_rf, op.v_dd, op.sigma_rfmem)
    }
}

/// Shift-register storage with MUX read trees and DEMUX write trees.
pub struct FlipFlopMemory;

impl MemoryModel for FlipFlopMemory {
    fn arch(&self) -> MemoryArch {
        MemoryArch::FlipFlop
    }

    fn c_bit(&self, tech: &TechnologyParams) -> f64 {
        tech.c_ff_eff()
    }

    fn a_bit(&self, tech: &TechnologyParams) -> f64 {
        tech.a_ff_eff()
    }

    fn periphery_transistors(&self, d: &MemoryDesign, _budget: &DigitalBudget) -> u64 {
        // Serial writes need a one-bit-wide DEMUX per memory part.
        selector_transistors(d.bias_registers, d.bias_width)
            + selector_transistors(d.bias_registers, 1)
            + d.rf_read_ports as u64 * selector_transistors(d.rf_registers, d.rf_width)
            + selector_transistors(d.rf_registers, 1)
    }
}

/// Cell array with row decoders and per-column read/write circuitry.
pub struct SramMemory;

impl MemoryModel for SramMemory {
    fn arch(&self) -> MemoryArch {
        MemoryArch::Sram
    }

    fn c_bit(&self, tech: &TechnologyParams) -> f64 {
        tech.c_sram_bit_eff()
    }

    fn a_bit(&self, tech: &TechnologyParams) -> f64 {
        tech.a_sram_cell_eff()
    }

    fn periphery_transistors(&self, d: &MemoryDesign, budget: &DigitalBudget) -> u64 {
        let ports_bias = 2u64;
        let ports_rf = d.rf_read_ports as u64 + 1;
        let decoders = ports_bias * selector_transistors(d.bias_registers, 1)
            + ports_rf * selector_transistors(d.rf_registers, 1);
        let columns = d.bias_width as u64 * ports_bias + d.rf_width as u64 * ports_rf;
        decoders + columns * budget.sram_column_transistors
    }
}

pub struct MemoryRegistry {
    models: BTreeMap<String, Box<dyn MemoryModel>>,
}

impl MemoryRegistry {
    pub fn builtin() -> Self {
        let mut r = Self {
            models: BTreeMap::new(),
        };
        r.register(Box::new(FlipFlopMemory));
        r.register(Box::new(SramMemory));
        r
    }

    pub fn register(&mut self, model: Box<dyn MemoryModel>) {
        self.models.insert(model.arch().name().to_string(), model);
    }

    pub fn get(&self, name: &str) -> Option<&dyn MemoryModel> {
        self.models.get(name).map(|m| m.as_ref())
    }

    pub fn by_arch(&self, arch: MemoryArch) -> &dyn MemoryModel {
        self.get(arch.name())
            .unwrap_or_else(|| panic!("no memory model registered for {arch}"))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.models.keys().map(String::as_str)
    }
}

pub fn builtin_memories() -> &'static MemoryRegistry {
    static REGISTRY: OnceLock<MemoryRegistry> = OnceLock::new();
    REGISTRY.get_or_init(MemoryRegistry::builtin)
}

/// Count that may grow with the configured resolutions.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScaledCount {
    pub fixed: f64,
    pub per_bias_bit: f64,
    pub per_rf_bit: f64,
    pub per_max_bit: f64,
}

impl ScaledCount {
    pub fn eval(&self, n_bias: u32, n_rf: u32) -> f64 {
        self.fixed
            + self.per_bias_bit * n_bias as f64
            + self.per_rf_bit * n_rf as f64
            + self.per_max_bit * n_bias.max(n_rf) as f64
    }

    fn is_valid(&self) -> bool {
        [self.fixed, self.per_bias_bit, self.per_rf_bit, self.per_max_bit]
            .iter()
            .all(|v| v.is_finite() && *v >= 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClockDomain {
    Bias,
    Rf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubunitBudget {
    pub name: String,
    pub clock: ClockDomain,
    /// Whether the subunit toggles during qubit operation.
    #[serde(default = "yes")]
    pub operation_regime: bool,
    /// Present only with this memory architecture.
    #[serde(default)]
    pub memory_arch: Option<MemoryArch>,
    #[serde(default)]
    pub ff: ScaledCount,
    #[serde(default)]
    pub latches: ScaledCount,
    #[serde(default)]
    pub logic: ScaledCount,
}

fn yes() -> bool {
    true
}

/// Gate-level counts for the managing component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DigitalBudget {
    /// Area and capacitance of a latch relative to a flip-flop.
    pub latch_ff_ratio: f64,
    /// Sense/write circuitry per SRAM column and port.
    pub sram_column_transistors: u64,
    pub subunits: Vec<SubunitBudget>,
}

impl Default for DigitalBudget {
    fn default() -> Self {
        Self::from_json_str(DEFAULT_BUDGET).expect("bundled budget is valid")
    }
}

impl DigitalBudget {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let b: Self = serde_json::from_str(text).map_err(Error::from_json)?;
        b.validate()?;
        Ok(b)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.latch_ff_ratio.is_finite() && self.latch_ff_ratio >= 0.0) {
            return Err(Error::validation("latch_ff_ratio must be non-negative"));
        }
        for s in &self.subunits {
            if !(s.ff.is_valid() && s.latches.is_valid() && s.logic.is_valid()) {
                return Err(Error::validation(format!(
                    "budget for {} has a negative count",
                    s.name
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubunitReport {
    pub name: String,
    pub ff_equivalents: f64,
    pub logic_transistors: f64,
    pub f_clk_hz: f64,
    pub area_um2: f64,
    /// Zero when the subunit is excluded from the operation regime.
    pub power_w: f64,
    pub counted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManagingReport {
    pub area_um2: f64,
    pub power_w: f64,
    pub subunits: Vec<SubunitReport>,
}

pub fn memory_report(design: &MemoryDesign, s: &Scenario, budget: &DigitalBudget) -> AreaPower {
    memory_report_with(builtin_memories(), design, s, budget)
}

pub fn memory_report_with(
    registry: &MemoryRegistry,
    design: &MemoryDesign,
    s: &Scenario,
    budget: &DigitalBudget,
) -> AreaPower {
    let model = registry.by_arch(design.arch);
    AreaPower {
        area_um2: model.area(design, &s.tech, budget),
        power_w: model.power(design, &s.op, &s.tech),
    }
}

/// Sums the subunit budgets. The data input control always contributes
/// area but only contributes power when `include_data_input` is set.
pub fn managing_report(s: &Scenario, budget: &DigitalBudget, include_data_input: bool) -> ManagingReport {
    let (n_bias, n_rf) = (s.spec.n_bias, s.spec.n_rf);
    let tech = &s.tech;
    let subunits: Vec<SubunitReport> = budget
        .subunits
        .iter()
        .filter(|u| u.memory_arch.is_none_or(|a| a == s.memory_arch))
        .map(|u| {
            let ff_eq = u.ff.eval(n_bias, n_rf) + budget.latch_ff_ratio * u.latches.eval(n_bias, n_rf);
            let logic = u.logic.eval(n_bias, n_rf);
            let f_clk = match u.clock {
                ClockDomain::Bias => s.op.f_clk_bias,
                ClockDomain::Rf => s.op.f_clk_rf,
            };
            let counted = u.operation_regime || include_data_input;
            let c_gate = ff_eq * tech.c_ff_eff() + logic * tech.c_mos_eff();
            SubunitReport {
                name: u.name.clone(),
                ff_equivalents: ff_eq,
                logic_transistors: logic,
                f_clk_hz: f_clk,
                area_um2: ff_eq * tech.a_ff_eff() + logic * tech.a_mos_eff(),
                power_w: if counted {
                    switching_power(c_gate, f_clk, s.op.v_dd, s.op.sigma_con)
                } else {
                    0.0
                },
                counted,
            }
        })
        .collect();
    ManagingReport {
        area_um2: subunits.iter().map(|u| u.area_um2).sum(),
        power_w: subunits.iter().map(|u| u.power_w).sum(),
        subunits,
    }
}
