//! Qubit-side requirements, process constants and operating conditions.
//!
//! Every quantity is stored in SI units except areas, which are kept in
//! µm² (and densities per µm²) because that is how process data is quoted.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boltzmann constant in J/K.
pub const K_B: f64 = 1.380649e-23;

/// Largest resolution accepted anywhere in the model.
pub const MAX_RESOLUTION: u32 = 24;

/// Requirements the qubit imposes on its control electronics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    /// Number of DC bias electrodes (N_bias).
    pub n_bias_signals: u32,
    /// Bias voltage range in volts.
    pub v_range_bias: f64,
    /// Allowed RMS fluctuation on a bias electrode, volts.
    pub dv_bias: f64,
    /// Bias resolution in bits.
    pub n_bias: u32,
    /// Number of RF electrodes.
    pub n_rf_signals: u32,
    /// RF amplitude range in volts.
    pub v_range_rf: f64,
    /// RF resolution in bits.
    pub n_rf: u32,
    /// Allowed RMS fluctuation on an RF electrode, volts.
    pub dv_rf: f64,
    /// RF sample rate in hertz.
    pub f_sample_rf: f64,
    /// Samples per stored pulse.
    pub l_pulse: u32,
    /// Number of stored pulses.
    pub n_pulses: u32,
}

impl SystemSpec {
    pub const fn baseline() -> Self {
        Self {
            n_bias_signals: 8,
            v_range_bias: 1.0,
            dv_bias: 3e-6,
            n_bias: 12,
            n_rf_signals: 2,
            v_range_rf: 4e-3,
            n_rf: 10,
            dv_rf: 8e-6,
            f_sample_rf: 300e6,
            l_pulse: 16,
            n_pulses: 16,
        }
    }

    /// Number of RF memory words.
    pub fn rf_words(&self) -> u32 {
        self.l_pulse * self.n_pulses
    }

    pub fn validate(&self) -> Result<()> {
        positive_count("n_bias_signals", self.n_bias_signals)?;
        positive_count("n_rf_signals", self.n_rf_signals)?;
        positive("v_range_bias", self.v_range_bias)?;
        positive("dv_bias", self.dv_bias)?;
        positive("v_range_rf", self.v_range_rf)?;
        positive("dv_rf", self.dv_rf)?;
        positive("f_sample_rf", self.f_sample_rf)?;
        resolution("n_bias", self.n_bias)?;
        resolution("n_rf", self.n_rf)?;
        power_of_two("l_pulse", self.l_pulse)?;
        power_of_two("n_pulses", self.n_pulses)?;
        Ok(())
    }
}

/// Process constants plus node-scaling and calibration factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TechnologyParams {
    /// Effective resistive density, Ω/µm².
    pub rho_r: f64,
    /// Effective capacitive density, F/µm².
    pub rho_c: f64,
    /// Mean transistor area, µm².
    pub a_mos: f64,
    /// Mean transistor gate capacitance, F.
    pub c_mos: f64,
    /// Mean transistor off resistance, Ω.
    pub r_off: f64,
    /// Mean transistor on resistance, Ω.
    pub r_on: f64,
    /// Smallest manufacturable resistor, Ω.
    pub r_min: f64,
    /// Smallest manufacturable capacitor, F.
    pub c_min: f64,
    /// Switched capacitance of one flip-flop, F.
    pub c_ff_equiv: f64,
    /// Flip-flop area, µm².
    pub a_ff: f64,
    /// Switched capacitance of one SRAM bit, F.
    pub c_sram_bit: f64,
    /// SRAM cell area, µm².
    pub a_sram_cell: f64,
    pub logic_area_scale: f64,
    pub sram_area_scale: f64,
    pub cap_density_scale: f64,
    pub digital_cap_scale: f64,
    pub r_off_multiplier: f64,
}

impl TechnologyParams {
    /// 65 nm baseline.
    pub const fn baseline() -> Self {
        Self {
            rho_r: 21.4,
            rho_c: 1.75e-15,
            a_mos: 0.375,
            c_mos: 150e-18,
            r_off: 1e12,
            r_on: 5e3,
            r_min: 15.0,
            c_min: 10e-15,
            c_ff_equiv: 3.0e-15,
            a_ff: 10.0,
            c_sram_bit: 1.25e-15,
            a_sram_cell: 0.5,
            logic_area_scale: 1.0,
            sram_area_scale: 1.0,
            cap_density_scale: 1.0,
            digital_cap_scale: 1.0,
            r_off_multiplier: 1.0,
        }
    }

    pub fn a_mos_eff(&self) -> f64 {
        self.a_mos * self.logic_area_scale
    }

    pub fn a_ff_eff(&self) -> f64 {
        self.a_ff * self.logic_area_scale
    }

    pub fn a_sram_cell_eff(&self) -> f64 {
        self.a_sram_cell * self.sram_area_scale
    }

    pub fn rho_c_eff(&self) -> f64 {
        self.rho_c * self.cap_density_scale
    }

    pub fn c_mos_eff(&self) -> f64 {
        self.c_mos * self.digital_cap_scale
    }

    pub fn c_ff_eff(&self) -> f64 {
        self.c_ff_equiv * self.digital_cap_scale
    }

    pub fn c_sram_bit_eff(&self) -> f64 {
        self.c_sram_bit * self.digital_cap_scale
    }

    pub fn r_off_eff(&self) -> f64 {
        self.r_off * self.r_off_multiplier
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rho_r", self.rho_r),
            ("rho_c", self.rho_c),
            ("a_mos", self.a_mos),
            ("c_mos", self.c_mos),
            ("r_off", self.r_off),
            ("r_on", self.r_on),
            ("r_min", self.r_min),
            ("c_min", self.c_min),
            ("c_ff_equiv", self.c_ff_equiv),
            ("a_ff", self.a_ff),
            ("c_sram_bit", self.c_sram_bit),
            ("a_sram_cell", self.a_sram_cell),
            ("logic_area_scale", self.logic_area_scale),
            ("sram_area_scale", self.sram_area_scale),
            ("cap_density_scale", self.cap_density_scale),
            ("digital_cap_scale", self.digital_cap_scale),
            ("r_off_multiplier", self.r_off_multiplier),
        ];
        fields.iter().try_for_each(|(name, v)| positive(name, *v))
    }
}

/// Temperature, supply, clocks, bandwidths and activity factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatingPoint {
    /// Electronics temperature, K.
    pub t_el: f64,
    /// Digital supply voltage, V.
    pub v_dd: f64,
    pub f_clk_bias: f64,
    pub f_clk_rf: f64,
    /// Effective noise bandwidth of the bias path, Hz.
    pub b_bias: f64,
    /// Effective noise bandwidth of the RF path, Hz.
    pub b_rf: f64,
    pub sigma_biasmem: f64,
    pub sigma_rfmem: f64,
    pub sigma_con: f64,
}

impl OperatingPoint {
    pub const fn baseline() -> Self {
        Self {
            t_el: 0.2,
            v_dd: 1.0,
            f_clk_bias: 2.22e6,
            f_clk_rf: 600e6,
            b_bias: 10e6,
            b_rf: 600e6,
            sigma_biasmem: 0.306,
            sigma_rfmem: 0.026,
            sigma_con: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("t_el", self.t_el)?;
        positive("v_dd", self.v_dd)?;
        positive("f_clk_bias", self.f_clk_bias)?;
        positive("f_clk_rf", self.f_clk_rf)?;
        positive("b_bias", self.b_bias)?;
        positive("b_rf", self.b_rf)?;
        activity("sigma_biasmem", self.sigma_biasmem)?;
        activity("sigma_rfmem", self.sigma_rfmem)?;
        activity("sigma_con", self.sigma_con)?;
        Ok(())
    }
}

/// Chosen sizes of the analog unit elements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalogSizing {
    /// Hold capacitor per bias electrode, F.
    pub c_hold: f64,
    /// Unit capacitor of the bias DAC, F.
    pub bias_unit_c: f64,
    /// Unit capacitor of each RF DAC, F.
    pub rf_unit_c: f64,
    /// Unit resistor of Kelvin dividers, Ω.
    pub kelvin_unit_r: f64,
    /// Unit resistor of R-2R ladders, Ω.
    pub ladder_unit_r: f64,
}

impl AnalogSizing {
    pub const fn baseline() -> Self {
        Self {
            c_hold: 307e-15,
            bias_unit_c: 10e-15,
            rf_unit_c: 10e-15,
            kelvin_unit_r: 15.0,
            ladder_unit_r: 150.0,
        }
    }

    pub fn validate(&self, tech: &TechnologyParams) -> Result<()> {
        positive("c_hold", self.c_hold)?;
        for (name, c) in [("bias_unit_c", self.bias_unit_c), ("rf_unit_c", self.rf_unit_c)] {
            positive(name, c)?;
            if c < tech.c_min * (1.0 - 1e-12) {
                return Err(Error::validation(format!(
                    "{name} = {c:e} F is below the process minimum c_min = {:e} F",
                    tech.c_min
                )));
            }
        }
        for (name, r) in [
            ("kelvin_unit_r", self.kelvin_unit_r),
            ("ladder_unit_r", self.ladder_unit_r),
        ] {
            positive(name, r)?;
            if r < tech.r_min * (1.0 - 1e-12) {
                return Err(Error::validation(format!(
                    "{name} = {r} Ω is below the process minimum r_min = {} Ω",
                    tech.r_min
                )));
            }
        }
        Ok(())
    }
}

/// CMOS technology generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Node {
    #[serde(rename = "65nm")]
    Node65,
    #[serde(rename = "14nm")]
    Node14,
}

/// Scale factors that moving to a smaller node applies to the 65 nm baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeFactors {
    pub logic_area_scale: f64,
    pub sram_area_scale: f64,
    pub cap_density_scale: f64,
    pub digital_cap_scale: f64,
}

impl NodeFactors {
    /// 14 nm: logic ÷24, SRAM cell ÷7, trench capacitors ×200. The digital
    /// capacitance factor is a calibration value fitted to the 14 nm memory
    /// and managing power entries.
    pub const fn node14() -> Self {
        Self {
            logic_area_scale: 1.0 / 24.0,
            sram_area_scale: 1.0 / 7.0,
            cap_density_scale: 200.0,
            digital_cap_scale: 0.75,
        }
    }
}

/// Applies the default scale factors for `node`.
pub fn apply_node(tech: TechnologyParams, node: Node) -> TechnologyParams {
    match node {
        Node::Node65 => tech,
        Node::Node14 => apply_node_factors(tech, &NodeFactors::node14()),
    }
}

pub fn apply_node_factors(tech: TechnologyParams, f: &NodeFactors) -> TechnologyParams {
    TechnologyParams {
        logic_area_scale: f.logic_area_scale,
        sram_area_scale: f.sram_area_scale,
        cap_density_scale: f.cap_density_scale,
        digital_cap_scale: f.digital_cap_scale,
        ..tech
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::validation(format!("{name} must be positive (got {v})")))
    }
}

fn positive_count(name: &str, v: u32) -> Result<()> {
    if v > 0 {
        Ok(())
    } else {
        Err(Error::validation(format!("{name} must be positive")))
    }
}

fn resolution(name: &str, n: u32) -> Result<()> {
    if (1..=MAX_RESOLUTION).contains(&n) {
        Ok(())
    } else {
        Err(Error::validation(format!(
            "{name} must be in [1, {MAX_RESOLUTION}] (got {n})"
        )))
    }
}

fn power_of_two(name: &str, v: u32) -> Result<()> {
    if v.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::validation(format!(
            "{name} must be a power of two (got {v})"
        )))
    }
}

fn activity(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 && v <= 0.5 {
        Ok(())
    } else {
        Err(Error::validation(format!("{name} must be in (0, 0.5] (got {v})")))
    }
}
