//! Sample-and-hold sizing, refresh rate, and the bias/RF generation units.

use serde::Serialize;

use crate::dac::{dac_analog_power, dac_area, dac_switch_power, DacDesign};
use crate::error::{Error, Result};
use crate::noise::min_hold_cap;
use crate::params::TechnologyParams;
use crate::scenario::Scenario;

/// Activity of a plain analog switch.
pub const SWITCH_ACTIVITY: f64 = 0.5;

/// Hold capacitors plus one switch per bias electrode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleHoldDesign {
    pub n_channels: u32,
    pub c_h: f64,
    pub r_off: f64,
    pub r_on: f64,
}

impl SampleHoldDesign {
    /// Checks `c_h` against the pooled kT/C bound at `t` and `dv`.
    pub fn new(n_channels: u32, c_h: f64, r_off: f64, r_on: f64, t: f64, dv: f64) -> Result<Self> {
        if n_channels == 0 {
            return Err(Error::validation("sample-and-hold needs at least one channel"));
        }
        let bound = min_hold_cap(n_channels, dv, t)?.value;
        if c_h < bound * (1.0 - 1e-12) {
            return Err(Error::validation(format!(
                "hold capacitor {c_h:e} F is below the noise minimum {bound:e} F at {t} K"
            )));
        }
        Ok(Self {
            n_channels,
            c_h,
            r_off,
            r_on,
        })
    }

    pub fn from_scenario(s: &Scenario) -> Result<Self> {
        Self::new(
            s.spec.n_bias_signals,
            s.sizing.c_hold,
            s.tech.r_off_eff(),
            s.tech.r_on,
            s.op.t_el,
            s.spec.dv_bias,
        )
    }

    /// Total hold capacitance, F.
    pub fn c_total(&self) -> f64 {
        self.n_channels as f64 * self.c_h
    }

    /// Droop time constant of one hold capacitor, s.
    pub fn tau(&self) -> f64 {
        self.r_off * self.c_h
    }
}

/// DAC update rate that keeps leakage through `r_off` within the pooled
/// charge budget `dv · c_out`.
pub fn refresh_rate(v_range: f64, r_off: f64, n_bias: u32, dv: f64, c_out: f64) -> f64 {
    (v_range / r_off * n_bias as f64) / (dv * c_out)
}

/// Hold capacitors and their switches, µm².
pub fn sh_area(design: &SampleHoldDesign, tech: &TechnologyParams) -> f64 {
    let n = design.n_channels as f64;
    n * design.c_h / tech.rho_c_eff() + n * tech.a_mos_eff()
}

/// Power of the periodically recharged DAC input and hold capacitors.
pub fn bias_power_exact(f_refresh: f64, c_in_dac: f64, v_range: f64, c_sh_total: f64, dv: f64) -> f64 {
    f_refresh / 2.0 * (c_in_dac * v_range * v_range + c_sh_total * dv * dv)
}

/// [`bias_power_exact`] with the refresh rate substituted and the hold
/// capacitor term dropped.
pub fn bias_power_approx(
    n_bias: u32,
    c_in_dac: f64,
    v_range: f64,
    r_off: f64,
    dv: f64,
    c_sh_total: f64,
) -> f64 {
    n_bias as f64 * c_in_dac * v_range.powi(3) / (2.0 * r_off * dv * c_sh_total)
}

/// Area and power of one generation unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenReport {
    pub area_um2: f64,
    pub p_analog_w: f64,
    pub p_digital_w: f64,
    /// Conversion rate of the unit's DACs, Hz.
    pub f_conv_hz: f64,
    /// Clock of the unit's digital parts, Hz.
    pub f_clk_hz: f64,
}

impl GenReport {
    pub fn power_w(&self) -> f64 {
        self.p_analog_w + self.p_digital_w
    }
}

pub fn bias_dac(s: &Scenario) -> Result<DacDesign> {
    DacDesign::from_sizing(s.bias_dac_arch, s.spec.n_bias, s.sizing.bias_unit_c, &s.sizing, &s.tech)
}

pub fn rf_dac(s: &Scenario) -> Result<DacDesign> {
    DacDesign::from_sizing(s.rf_dac_arch, s.spec.n_rf, s.sizing.rf_unit_c, &s.sizing, &s.tech)
}

/// Refresh rate of the scenario's bias generation unit.
pub fn scenario_refresh_rate(s: &Scenario) -> f64 {
    let n = s.spec.n_bias_signals;
    refresh_rate(
        s.spec.v_range_bias,
        s.tech.r_off_eff(),
        n,
        s.spec.dv_bias,
        n as f64 * s.sizing.c_hold,
    )
}

/// One DAC multiplexed onto the hold capacitors.
pub fn bias_gen_report(s: &Scenario) -> Result<GenReport> {
    let dac = bias_dac(s)?;
    let sh = SampleHoldDesign::from_scenario(s)?;
    let v = s.spec.v_range_bias;
    let dv = s.spec.dv_bias;
    let f_refresh = refresh_rate(v, sh.r_off, sh.n_channels, dv, sh.c_total());

    // For the Cap DAC this is bias_power_exact; resistive DACs add static power.
    let p_analog = dac_analog_power(&dac, v, f_refresh) + f_refresh / 2.0 * sh.c_total() * dv * dv;

    let f_clk = s.op.f_clk_bias;
    let switches = dac.counts.switches as f64 + sh.n_channels as f64;
    let p_digital = SWITCH_ACTIVITY * f_clk * s.op.v_dd.powi(2) * switches * s.tech.c_mos_eff();

    Ok(GenReport {
        area_um2: dac_area(&dac, &s.tech) + sh_area(&sh, &s.tech),
        p_analog_w: p_analog,
        p_digital_w: p_digital,
        f_conv_hz: f_refresh,
        f_clk_hz: f_clk,
    })
}

/// One DAC per RF electrode, converting at the sample rate.
pub fn rf_gen_report(s: &Scenario) -> Result<GenReport> {
    let dac = rf_dac(s)?;
    let count = s.spec.n_rf_signals as f64;
    let f_sample = s.spec.f_sample_rf;
    let f_clk = s.op.f_clk_rf;
    Ok(GenReport {
        area_um2: count * dac_area(&dac, &s.tech),
        p_analog_w: count * dac_analog_power(&dac, s.spec.v_range_rf, f_sample),
        p_digital_w: count * dac_switch_power(&dac, s.op.v_dd, f_clk, SWITCH_ACTIVITY, &s.tech),
        f_conv_hz: f_sample,
        f_clk_hz: f_clk,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{apply_node, Node};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const C_SH: f64 = 8.0 * 307e-15;

    #[test]
    fn refresh_rate_examples() {
        let f = refresh_rate(1.0, 1e12, 8, 3e-6, C_SH);
        assert_relative_eq!(f, 1.086e6, max_relative = 1e-3);
        assert_relative_eq!(refresh_rate(1.0, 2e12, 8, 3e-6, C_SH), f / 2.0, max_relative = 1e-12);
        assert_relative_eq!(refresh_rate(1.0, 100e12, 8, 3e-6, C_SH), 10.86e3, max_relative = 1e-3);
    }

    #[test]
    fn sh_area_examples() {
        let t65 = TechnologyParams::baseline();
        let sh = SampleHoldDesign::new(8, 307e-15, 1e12, 5e3, 0.2, 3e-6).unwrap();
        assert_relative_eq!(sh_area(&sh, &t65), C_SH / 1.75e-15 + 3.0, max_relative = 1e-12);
        let empty = SampleHoldDesign { n_channels: 0, ..sh };
        assert_eq!(sh_area(&empty, &t65), 0.0);
        let t14 = apply_node(t65, Node::Node14);
        assert_relative_eq!(sh_area(&sh, &t14), 7.017 + 0.125, max_relative = 1e-3);
    }

    #[test]
    fn hold_cap_below_bound_is_rejected() {
        assert!(SampleHoldDesign::new(8, 30e-15, 1e12, 5e3, 0.2, 3e-6).is_err());
        assert!(SampleHoldDesign::new(8, 307e-15, 1e12, 5e3, 1.8, 3e-6).is_err());
        assert!(SampleHoldDesign::new(0, 307e-15, 1e12, 5e3, 0.2, 3e-6).is_err());
    }

    #[test]
    fn bias_power_examples() {
        let f = refresh_rate(1.0, 1e12, 8, 3e-6, C_SH);
        let exact = bias_power_exact(f, 1.27e-12, 1.0, C_SH, 3e-6);
        assert_relative_eq!(exact, 6.90e-7, max_relative = 2e-3);
        assert_relative_eq!(
            bias_power_exact(f, 0.0, 1.0, C_SH, 3e-6),
            f / 2.0 * C_SH * 9e-12,
            max_relative = 1e-12
        );
        let approx = bias_power_approx(8, 1.27e-12, 1.0, 1e12, 3e-6, C_SH);
        assert_relative_eq!(approx, 6.89e-7, max_relative = 2e-3);
        assert!((exact - approx) / approx < 1e-4);
        let half = bias_power_approx(8, 1.27e-12, 0.5, 1e12, 3e-6, C_SH);
        assert_relative_eq!(approx / half, 8.0, max_relative = 1e-12);
    }

    #[test]
    fn bias_gen_defaults() {
        let s = Scenario::baseline();
        let r = bias_gen_report(&s).unwrap();
        assert_relative_eq!(r.area_um2, 2141.0, max_relative = 1e-3);
        assert_relative_eq!(r.power_w(), 7.0e-7, max_relative = 0.02);
        assert_eq!(r.f_clk_hz, 2.22e6);
        let mut low = s;
        low.op.v_dd = 0.01;
        let r_low = bias_gen_report(&low).unwrap();
        assert!((r.power_w() - r_low.power_w()) / r.power_w() < 0.02);
        assert_eq!(r.p_analog_w, r_low.p_analog_w);
    }

    #[test]
    fn rf_gen_supply_points() {
        let s = Scenario::baseline();
        let r = rf_gen_report(&s).unwrap();
        assert_relative_eq!(r.area_um2, 735.0, max_relative = 1e-3);
        assert!(r.power_w() > 1.5e-6 && r.power_w() < 1.85e-6);
        let mut s10 = s;
        s10.op.v_dd = 0.01;
        let p10 = rf_gen_report(&s10).unwrap().power_w();
        assert!(p10 > 3.0e-9 && p10 < 3.25e-9, "{p10}");
        let mut s100 = s;
        s100.op.v_dd = 0.1;
        let p100 = rf_gen_report(&s100).unwrap().power_w();
        assert_relative_eq!(p100, 1.8e-8, max_relative = 0.25);
    }

    proptest! {
        #[test]
        fn exact_bounds_approx(
            n in 1u32..32, c_in in 1e-14f64..1e-10, v in 0.01f64..5.0,
            r_off in 1e9f64..1e15, dv in 1e-7f64..1e-3, c_h in 1e-14f64..1e-10,
        ) {
            let c_sh = n as f64 * c_h;
            let f = refresh_rate(v, r_off, n, dv, c_sh);
            let exact = bias_power_exact(f, c_in, v, c_sh, dv);
            let approx = bias_power_approx(n, c_in, v, r_off, dv, c_sh);
            prop_assert!(exact >= approx * (1.0 - 1e-12));
            if c_sh * dv * dv <= 1e-3 * c_in * v * v {
                prop_assert!((exact - approx) / approx < 1e-3);
            }
        }

        #[test]
        fn refresh_rate_does_not_depend_on_channel_count(
            n in 1u32..64, m in 1u32..64, v in 0.01f64..5.0,
            r_off in 1e9f64..1e15, dv in 1e-7f64..1e-3, c_h in 1e-14f64..1e-10,
        ) {
            let a = refresh_rate(v, r_off, n, dv, n as f64 * c_h);
            let b = refresh_rate(v, r_off, m, dv, m as f64 * c_h);
            prop_assert!(((a - b) / a).abs() < 1e-12);
        }

        #[test]
        fn bias_analog_power_ignores_supply(v_dd in 0.001f64..2.0) {
            let mut s = Scenario::baseline();
            let base = bias_gen_report(&s).unwrap().p_analog_w;
            s.op.v_dd = v_dd;
            prop_assert_eq!(bias_gen_report(&s).unwrap().p_analog_w, base);
        }
    }
}
