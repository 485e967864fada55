//! DAC architectures: component counts, area, power and output noise.
//!
//! Each architecture is a [`DacModel`] registered by name in a
//! [`DacRegistry`]; the free functions dispatch through the built-in
//! registry.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{cap_dac_output_units, johnson_rms, kelvin_output_units, ktc_rms};
use crate::params::{AnalogSizing, TechnologyParams, MAX_RESOLUTION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DacArchitecture {
    Kelvin,
    Ladder,
    Cap,
}

impl DacArchitecture {
    pub const ALL: [DacArchitecture; 3] = [Self::Kelvin, Self::Ladder, Self::Cap];

    pub fn name(self) -> &'static str {
        match self {
            Self::Kelvin => "kelvin",
            Self::Ladder => "ladder",
            Self::Cap => "cap",
        }
    }
}

impl fmt::Display for DacArchitecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DacArchitecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kelvin" => Ok(Self::Kelvin),
            "ladder" | "r2r" | "r-2r" => Ok(Self::Ladder),
            "cap" => Ok(Self::Cap),
            other => Err(Error::validation(format!("unknown DAC architecture '{other}'"))),
        }
    }
}

/// Unit elements and switches of one converter. Cap arrays with odd
/// resolution have a fractional unit count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComponentCounts {
    pub units: f64,
    pub switches: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitValue {
    /// Ohms.
    Resistor(f64),
    /// Farads.
    Capacitor(f64),
}

impl UnitValue {
    pub fn value(self) -> f64 {
        match self {
            UnitValue::Resistor(v) | UnitValue::Capacitor(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DacDesign {
    pub arch: DacArchitecture,
    pub n: u32,
    pub unit: UnitValue,
    pub counts: ComponentCounts,
}

impl DacDesign {
    /// Design with the standard counts, rejecting units below the process
    /// minimums.
    pub fn new(arch: DacArchitecture, n: u32, unit: f64, tech: &TechnologyParams) -> Result<Self> {
        let design = Self::unchecked(arch, n, unit)?;
        let (min, what) = match design.unit {
            UnitValue::Resistor(_) => (tech.r_min, "r_min"),
            UnitValue::Capacitor(_) => (tech.c_min, "c_min"),
        };
        if unit < min * (1.0 - 1e-12) {
            return Err(Error::validation(format!(
                "{arch} unit value {unit:e} is below the process minimum {what} = {min:e}"
            )));
        }
        Ok(design)
    }

    /// Design that skips the process-minimum check.
    pub fn unchecked(arch: DacArchitecture, n: u32, unit: f64) -> Result<Self> {
        if !(unit.is_finite() && unit > 0.0) {
            return Err(Error::validation(format!("{arch} unit value must be positive")));
        }
        let model = builtin().by_arch(arch);
        Ok(Self {
            arch,
            n,
            unit: model.unit(unit),
            counts: model.counts(n)?,
        })
    }

    /// Design using the unit value the scenario assigns to `arch`.
    pub fn from_sizing(
        arch: DacArchitecture,
        n: u32,
        unit_c: f64,
        sizing: &AnalogSizing,
        tech: &TechnologyParams,
    ) -> Result<Self> {
        let unit = match arch {
            DacArchitecture::Kelvin => sizing.kelvin_unit_r,
            DacArchitecture::Ladder => sizing.ladder_unit_r,
            DacArchitecture::Cap => unit_c,
        };
        Self::new(arch, n, unit, tech)
    }

    /// Input capacitance of a Cap DAC (F), zero otherwise.
    pub fn c_in(&self) -> f64 {
        match self.unit {
            UnitValue::Capacitor(c) => self.counts.units * c,
            UnitValue::Resistor(_) => 0.0,
        }
    }
}

/// One converter architecture.
pub trait DacModel: Send + Sync {
    fn arch(&self) -> DacArchitecture;

    fn counts(&self, n: u32) -> Result<ComponentCounts>;

    fn unit(&self, value: f64) -> UnitValue;

    /// Resistance seen by the reference, Ω. `None` for capacitive arrays.
    fn r_in(&self, design: &DacDesign) -> Option<f64>;

    /// Worst-case RMS output noise.
    fn output_noise(&self, design: &DacDesign, t: f64, b: f64) -> Result<f64>;

    fn area(&self, design: &DacDesign, tech: &TechnologyParams) -> f64 {
        let switches = design.counts.switches as f64 * tech.a_mos_eff();
        let units = match design.unit {
            UnitValue::Resistor(r) => design.counts.units * r / tech.rho_r,
            UnitValue::Capacitor(c) => design.counts.units * c / tech.rho_c_eff(),
        };
        units + switches
    }

    /// Static power for resistive converters, dynamic for capacitive ones.
    fn analog_power(&self, design: &DacDesign, v_range: f64, f: f64) -> f64 {
        match self.r_in(design) {
            Some(r_in) => v_range * v_range / r_in,
            None => 0.5 * f * design.c_in() * v_range * v_range,
        }
    }
}

fn check_resolution(n: u32) -> Result<()> {
    if (1..=MAX_RESOLUTION).contains(&n) {
        Ok(())
    } else {
        Err(Error::validation(format!(
            "DAC resolution must be in [1, {MAX_RESOLUTION}] (got {n})"
        )))
    }
}

/// Resistor string tapping 2^n levels.
pub struct Kelvin;

impl DacModel for Kelvin {
    fn arch(&self) -> DacArchitecture {
        DacArchitecture::Kelvin
    }

    fn counts(&self, n: u32) -> Result<ComponentCounts> {
        check_resolution(n)?;
        Ok(ComponentCounts {
            units: (1u64 << n) as f64,
            switches: (1u64 << (n + 1)) - 2,
        })
    }

    fn unit(&self, value: f64) -> UnitValue {
        UnitValue::Resistor(value)
    }

    fn r_in(&self, design: &DacDesign) -> Option<f64> {
        Some(2f64.powi(design.n as i32) * design.unit.value())
    }

    fn output_noise(&self, design: &DacDesign, t: f64, b: f64) -> Result<f64> {
        johnson_rms(kelvin_output_units(design.n) * design.unit.value(), t, b)
    }
}

/// R-2R ladder.
pub struct Ladder;

impl DacModel for Ladder {
    fn arch(&self) -> DacArchitecture {
        DacArchitecture::Ladder
    }

    fn counts(&self, n: u32) -> Result<ComponentCounts> {
        check_resolution(n)?;
        Ok(ComponentCounts {
            units: 3.0 * n as f64,
            switches: 2 * n as u64,
        })
    }

    fn unit(&self, value: f64) -> UnitValue {
        UnitValue::Resistor(value)
    }

    // Driving-point resistance of an R-2R network is R_u.
    fn r_in(&self, design: &DacDesign) -> Option<f64> {
        Some(design.unit.value())
    }

    fn output_noise(&self, design: &DacDesign, t: f64, b: f64) -> Result<f64> {
        johnson_rms(design.unit.value(), t, b)
    }
}

/// Split capacitor array; the attenuation capacitor counts as one unit.
pub struct Cap;

impl DacModel for Cap {
    fn arch(&self) -> DacArchitecture {
        DacArchitecture::Cap
    }

    fn counts(&self, n: u32) -> Result<ComponentCounts> {
        check_resolution(n)?;
        Ok(ComponentCounts {
            units: 2.0 * cap_dac_output_units(n) - 1.0,
            switches: 2 * n as u64,
        })
    }

    fn unit(&self, value: f64) -> UnitValue {
        UnitValue::Capacitor(value)
    }

    fn r_in(&self, _design: &DacDesign) -> Option<f64> {
        None
    }

    fn output_noise(&self, design: &DacDesign, t: f64, _b: f64) -> Result<f64> {
        ktc_rms(cap_dac_output_units(design.n) * design.unit.value(), t)
    }
}

/// Name-keyed set of DAC models.
pub struct DacRegistry {
    models: BTreeMap<String, Box<dyn DacModel>>,
}

impl DacRegistry {
    pub fn empty() -> Self {
        Self {
            models: BTreeMap::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Kelvin));
        r.register(Box::new(Ladder));
        r.register(Box::new(Cap));
        r
    }

    /// Adds or replaces the model for its architecture.
    pub fn register(&mut self, model: Box<dyn DacModel>) {
        self.models.insert(model.arch().name().to_string(), model);
    }

    pub fn get(&self, name: &str) -> Option<&dyn DacModel> {
        self.models.get(&name.to_ascii_lowercase()).map(|m| m.as_ref())
    }

    pub fn by_arch(&self, arch: DacArchitecture) -> &dyn DacModel {
        self.get(arch.name())
            .unwrap_or_else(|| panic!("no DAC model registered for {arch}"))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.models.keys().map(String::as_str)
    }
}

/// The process-wide built-in registry.
pub fn builtin() -> &'static DacRegistry {
    static REGISTRY: OnceLock<DacRegistry> = OnceLock::new();
    REGISTRY.get_or_init(DacRegistry::builtin)
}

pub fn component_counts(arch: DacArchitecture, n: u32) -> Result<ComponentCounts> {
    builtin().by_arch(arch).counts(n)
}

/// Area in µm².
pub fn dac_area(design: &DacDesign, tech: &TechnologyParams) -> f64 {
    builtin().by_arch(design.arch).area(design, tech)
}

pub fn dac_analog_power(design: &DacDesign, v_range: f64, f: f64) -> f64 {
    builtin().by_arch(design.arch).analog_power(design, v_range, f)
}

/// Switching power of the converter's switches.
pub fn dac_switch_power(
    design: &DacDesign,
    v_dd: f64,
    f: f64,
    sigma: f64,
    tech: &TechnologyParams,
) -> f64 {
    sigma * f * v_dd * v_dd * design.counts.switches as f64 * tech.c_mos_eff()
}

pub fn dac_output_noise(design: &DacDesign, t: f64, b: f64) -> Result<f64> {
    builtin().by_arch(design.arch).output_noise(design, t, b)
}

/// One point of an architecture comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DacFigures {
    pub arch: DacArchitecture,
    pub n: u32,
    pub area_um2: f64,
    pub p_analog_w: f64,
    pub p_switch_w: f64,
    pub noise_vrms: f64,
}

impl DacFigures {
    pub fn p_total_w(&self) -> f64 {
        self.p_analog_w + self.p_switch_w
    }
}

/// Conditions a converter is compared under.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DacConditions {
    pub v_range: f64,
    /// Conversion rate, also used as the switch clock.
    pub f: f64,
    pub v_dd: f64,
    pub sigma: f64,
    pub t: f64,
    pub b: f64,
}

/// Evaluates a design under `cond`.
pub fn evaluate(
    design: &DacDesign,
    tech: &TechnologyParams,
    cond: &DacConditions,
) -> Result<DacFigures> {
    Ok(DacFigures {
        arch: design.arch,
        n: design.n,
        area_um2: dac_area(design, tech),
        p_analog_w: dac_analog_power(design, cond.v_range, cond.f),
        p_switch_w: dac_switch_power(design, cond.v_dd, cond.f, cond.sigma, tech),
        noise_vrms: dac_output_noise(design, cond.t, cond.b)?,
    })
}
