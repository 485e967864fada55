//! Thermal-noise formulas and the unit-element bounds they impose.
//!
//! Odd resolutions use the real-valued `2^(n/2)` wherever the capacitor
//! array enters.

use serde::Serialize;

use crate::dac::DacArchitecture;
use crate::error::{Error, Result};
use crate::params::K_B;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    MinCapacitance,
    MaxResistance,
}

/// The requirement a bound was derived from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BindingSpec {
    pub n: u32,
    pub dv: f64,
    pub t: f64,
    /// Only resistive bounds depend on bandwidth.
    pub b: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SizingBound {
    pub kind: BoundKind,
    /// Farads for capacitance bounds, ohms for resistance bounds.
    pub value: f64,
    pub binding: BindingSpec,
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 || v == f64::INFINITY {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive (got {v})")))
    }
}

/// RMS kT/C noise of a capacitance `c` at temperature `t`.
pub fn ktc_rms(c: f64, t: f64) -> Result<f64> {
    require_positive("capacitance", c)?;
    require_positive("temperature", t)?;
    Ok((K_B * t / c).sqrt())
}

/// RMS Johnson-Nyquist noise of resistance `r` over bandwidth `b`.
pub fn johnson_rms(r: f64, t: f64, b: f64) -> Result<f64> {
    require_positive("resistance", r)?;
    require_positive("temperature", t)?;
    require_positive("bandwidth", b)?;
    Ok((4.0 * K_B * t * r * b).sqrt())
}

/// Cap-DAC output capacitance in units of `C_u`.
pub fn cap_dac_output_units(n: u32) -> f64 {
    2f64.powf(n as f64 / 2.0)
}

/// Worst-case Kelvin-divider output resistance in units of `R_u`.
pub fn kelvin_output_units(n: u32) -> f64 {
    2f64.powi(n as i32 - 2)
}

/// Smallest Cap-DAC unit capacitor meeting `dv` at `t`.
pub fn min_unit_cap(n: u32, dv: f64, t: f64) -> Result<SizingBound> {
    require_positive("dv", dv)?;
    require_positive("temperature", t)?;
    let value = K_B * t / (cap_dac_output_units(n) * dv * dv);
    Ok(SizingBound {
        kind: BoundKind::MinCapacitance,
        value,
        binding: BindingSpec { n, dv, t, b: None },
    })
}

/// Largest unit resistor of a resistive DAC meeting `dv` at `t` over `b`.
pub fn max_unit_res(
    arch: DacArchitecture,
    n: u32,
    dv: f64,
    t: f64,
    b: f64,
) -> Result<SizingBound> {
    require_positive("dv", dv)?;
    require_positive("temperature", t)?;
    require_positive("bandwidth", b)?;
    let ladder = dv * dv / (4.0 * K_B * t * b);
    let value = match arch {
        DacArchitecture::Ladder => ladder,
        DacArchitecture::Kelvin => ladder / kelvin_output_units(n),
        DacArchitecture::Cap => {
            return Err(Error::domain(
                "the Cap DAC has no resistive noise bound",
            ))
        }
    };
    Ok(SizingBound {
        kind: BoundKind::MaxResistance,
        value,
        binding: BindingSpec { n, dv, t, b: Some(b) },
    })
}

/// Smallest hold capacitor such that the pooled s&h noise meets `dv`.
pub fn min_hold_cap(n_bias: u32, dv: f64, t: f64) -> Result<SizingBound> {
    if n_bias == 0 {
        return Err(Error::domain("n_bias must be at least 1"));
    }
    require_positive("dv", dv)?;
    require_positive("temperature", t)?;
    Ok(SizingBound {
        kind: BoundKind::MinCapacitance,
        value: K_B * t / (n_bias as f64 * dv * dv),
        binding: BindingSpec {
            n: n_bias,
            dv,
            t,
            b: None,
        },
    })
}
