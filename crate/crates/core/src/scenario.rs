//! Scenario files: a technology, architecture and operating-point choice.
//!
//! A scenario file is a JSON object. Every section is optional and patches
//! the built-in defaults field by field; unknown keys are rejected.
//!
//! ```json
//! {
//!   "defaults": "paper",
//!   "node": "14nm",
//!   "memory_arch": "sram",
//!   "bias_dac_arch": "cap",
//!   "rf_dac_arch": "cap",
//!   "spec":   { "n_bias": 12 },
//!   "tech":   { "r_off_multiplier": 100 },
//!   "op":     { "v_dd": 0.01 },
//!   "sizing": { "c_hold": 307e-15 }
//! }
//! ```
//!
//! `node` applies the node scale factors to the 65 nm baseline before the
//! `tech` patch, so individual factors can still be overridden.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dac::DacArchitecture;
use crate::digital::MemoryArch;
use crate::error::{Error, Result};
use crate::params::{
    apply_node, AnalogSizing, Node, OperatingPoint, SystemSpec, TechnologyParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub spec: SystemSpec,
    pub tech: TechnologyParams,
    pub op: OperatingPoint,
    pub sizing: AnalogSizing,
    pub memory_arch: MemoryArch,
    pub bias_dac_arch: DacArchitecture,
    pub rf_dac_arch: DacArchitecture,
}

impl Default for Scenario {
    fn default() -> Self {
        Self::baseline()
    }
}

impl Scenario {
    /// 65 nm, flip-flop memory, 1 V supply, Cap DACs, 200 mK.
    pub fn baseline() -> Self {
        Self {
            spec: SystemSpec::baseline(),
            tech: TechnologyParams::baseline(),
            op: OperatingPoint::baseline(),
            sizing: AnalogSizing::baseline(),
            memory_arch: MemoryArch::FlipFlop,
            bias_dac_arch: DacArchitecture::Cap,
            rf_dac_arch: DacArchitecture::Cap,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        self.tech.validate()?;
        self.op.validate()?;
        self.sizing.validate(&self.tech)?;
        Ok(())
    }

    /// Convenience constructor for the Table-style scenario grid.
    pub fn with(node: Node, memory_arch: MemoryArch, v_dd: f64) -> Self {
        let mut s = Self::baseline();
        s.tech = apply_node(s.tech, node);
        s.memory_arch = memory_arch;
        s.op.v_dd = v_dd;
        s
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text).map_err(Error::from_json)?;
        let scenario = file.resolve();
        scenario.validate()?;
        Ok(scenario)
    }

    /// Full, explicit JSON form; reloading it yields an identical scenario.
    pub fn to_json(&self) -> String {
        let file = serde_json::json!({
            "defaults": "paper",
            "spec": self.spec,
            "tech": self.tech,
            "op": self.op,
            "sizing": self.sizing,
            "memory_arch": self.memory_arch,
            "bias_dac_arch": self.bias_dac_arch,
            "rf_dac_arch": self.rf_dac_arch,
        });
        serde_json::to_string_pretty(&file).expect("scenario serializes")
    }
}

/// Reads, patches and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    Scenario::from_json_str(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
enum Defaults {
    #[default]
    #[serde(rename = "paper")]
    Baseline,
}

macro_rules! patch {
    ($patch:ident => $target:ty { $($field:ident: $ty:ty),* $(,)? }) => {
        #[derive(Debug, Default, Deserialize)]
        #[serde(deny_unknown_fields)]
        struct $patch {
            $($field: Option<$ty>,)*
        }

        impl $patch {
            fn apply(self, mut base: $target) -> $target {
                $(if let Some(v) = self.$field { base.$field = v; })*
                base
            }
        }
    };
}

patch!(SpecPatch => SystemSpec {
    n_bias_signals: u32, v_range_bias: f64, dv_bias: f64, n_bias: u32,
    n_rf_signals: u32, v_range_rf: f64, n_rf: u32, dv_rf: f64,
    f_sample_rf: f64, l_pulse: u32, n_pulses: u32,
});

patch!(TechPatch => TechnologyParams {
    rho_r: f64, rho_c: f64, a_mos: f64, c_mos: f64, r_off: f64, r_on: f64,
    r_min: f64, c_min: f64, c_ff_equiv: f64, a_ff: f64, c_sram_bit: f64,
    a_sram_cell: f64, logic_area_scale: f64, sram_area_scale: f64,
    cap_density_scale: f64, digital_cap_scale: f64, r_off_multiplier: f64,
});

patch!(OpPatch => OperatingPoint {
    t_el: f64, v_dd: f64, f_clk_bias: f64, f_clk_rf: f64, b_bias: f64,
    b_rf: f64, sigma_biasmem: f64, sigma_rfmem: f64, sigma_con: f64,
});

patch!(SizingPatch => AnalogSizing {
    c_hold: f64, bias_unit_c: f64, rf_unit_c: f64, kelvin_unit_r: f64,
    ladder_unit_r: f64,
});

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default)]
    #[allow(dead_code)]
    defaults: Defaults,
    node: Option<Node>,
    #[serde(default)]
    spec: SpecPatch,
    #[serde(default)]
    tech: TechPatch,
    #[serde(default)]
    op: OpPatch,
    #[serde(default)]
    sizing: SizingPatch,
    memory_arch: Option<MemoryArch>,
    bias_dac_arch: Option<DacArchitecture>,
    rf_dac_arch: Option<DacArchitecture>,
}

impl ScenarioFile {
    fn resolve(self) -> Scenario {
        let base = Scenario::baseline();
        let tech = match self.node {
            Some(node) => apply_node(base.tech, node),
            None => base.tech,
        };
        Scenario {
            spec: self.spec.apply(base.spec),
            tech: self.tech.apply(tech),
            op: self.op.apply(base.op),
            sizing: self.sizing.apply(base.sizing),
            memory_arch: self.memory_arch.unwrap_or(base.memory_arch),
            bias_dac_arch: self.bias_dac_arch.unwrap_or(base.bias_dac_arch),
            rf_dac_arch: self.rf_dac_arch.unwrap_or(base.rf_dac_arch),
        }
    }
}
