//! System totals, parameter sweeps, cooling-budget capacity and
//! temperature re-sizing.

use rayon::prelude::*;
use serde::Serialize;

use crate::analog::{bias_gen_report, rf_gen_report, scenario_refresh_rate, GenReport};
use crate::dac::{self, DacArchitecture, DacConditions, DacDesign, DacFigures};
use crate::digital::{
    managing_report, memory_report_with, AreaPower, DigitalBudget, ManagingReport, MemoryDesign,
    MemoryRegistry,
};
use crate::error::{Error, Result};
use crate::noise::min_unit_cap;
use crate::params::OperatingPoint;
use crate::scenario::Scenario;

/// A generation unit with its total power spelled out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenSummary {
    pub area_um2: f64,
    pub power_w: f64,
    #[serde(flatten)]
    pub detail: GenReport,
}

impl From<GenReport> for GenSummary {
    fn from(detail: GenReport) -> Self {
        Self {
            area_um2: detail.area_um2,
            power_w: detail.power_w(),
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub scenario: Scenario,
    pub include_data_input: bool,
    pub bias_gen: GenSummary,
    pub rf_gen: GenSummary,
    pub memory: AreaPower,
    pub managing: ManagingReport,
    pub totals: AreaPower,
    pub notes: Vec<String>,
}

impl Report {
    /// `(unit, power)` pairs in report order.
    pub fn unit_powers(&self) -> [(&'static str, f64); 4] {
        [
            ("bias_gen", self.bias_gen.power_w),
            ("rf_gen", self.rf_gen.power_w),
            ("memory", self.memory.power_w),
            ("managing", self.managing.power_w),
        ]
    }

    pub fn unit_areas(&self) -> [(&'static str, f64); 4] {
        [
            ("bias_gen", self.bias_gen.area_um2),
            ("rf_gen", self.rf_gen.area_um2),
            ("memory", self.memory.area_um2),
            ("managing", self.managing.area_um2),
        ]
    }

    /// The unit dissipating the most power.
    pub fn top_power_consumer(&self) -> &'static str {
        self.unit_powers()
            .into_iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(name, _)| name)
            .unwrap_or("bias_gen")
    }

    /// Share of total power drawn by the digital parts.
    pub fn digital_power_fraction(&self) -> f64 {
        let digital = self.bias_gen.detail.p_digital_w
            + self.rf_gen.detail.p_digital_w
            + self.memory.power_w
            + self.managing.power_w;
        digital / self.totals.power_w
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{:<10} {:>12} {:>12}\n", "unit", "area_um2", "power_w"));
        for ((name, a), (_, p)) in self.unit_areas().into_iter().zip(self.unit_powers()) {
            out.push_str(&format!("{name:<10} {a:>12.4e} {p:>12.4e}\n"));
        }
        out.push_str(&format!(
            "{:<10} {:>12.4e} {:>12.4e}\n",
            "total", self.totals.area_um2, self.totals.power_w
        ));
        for note in &self.notes {
            out.push_str(&format!("# {note}\n"));
        }
        out
    }

    /// `unit,area_um2,power_w` rows including the totals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("unit,area_um2,power_w\n");
        for ((name, a), (_, p)) in self.unit_areas().into_iter().zip(self.unit_powers()) {
            out.push_str(&format!("{name},{a:e},{p:e}\n"));
        }
        out.push_str(&format!("total,{:e},{:e}\n", self.totals.area_um2, self.totals.power_w));
        out
    }
}

/// Holds the digital budget and the memory models used for assembly.
pub struct Estimator {
    pub budget: DigitalBudget,
    pub memories: MemoryRegistry,
}

impl Default for Estimator {
    fn default() -> Self {
        Self::new(DigitalBudget::default())
    }
}

impl Estimator {
    pub fn new(budget: DigitalBudget) -> Self {
        Self {
            budget,
            memories: MemoryRegistry::builtin(),
        }
    }

    /// Operation-regime report unless `include_data_input` is set.
    pub fn assemble_with(&self, s: &Scenario, include_data_input: bool) -> Result<Report> {
        s.validate()?;
        let bias_gen = GenSummary::from(bias_gen_report(s)?);
        let rf_gen = GenSummary::from(rf_gen_report(s)?);
        let design = MemoryDesign::from_scenario(s);
        let memory = memory_report_with(&self.memories, &design, s, &self.budget);
        let managing = managing_report(s, &self.budget, include_data_input);
        let totals = AreaPower {
            area_um2: bias_gen.area_um2 + rf_gen.area_um2 + memory.area_um2 + managing.area_um2,
            power_w: bias_gen.power_w + rf_gen.power_w + memory.power_w + managing.power_w,
        };
        let mut notes = vec![
            "memory and managing budgets are calibrated; compare against reference totals at about 20%"
                .to_string(),
        ];
        if !include_data_input {
            notes.push("data input control power excluded (operation regime)".to_string());
        }
        Ok(Report {
            scenario: *s,
            include_data_input,
            bias_gen,
            rf_gen,
            memory,
            managing,
            totals,
            notes,
        })
    }

    pub fn assemble(&self, s: &Scenario) -> Result<Report> {
        self.assemble_with(s, false)
    }
}

/// [`Estimator::assemble`] with the bundled budget.
pub fn assemble(s: &Scenario) -> Result<Report> {
    Estimator::default().assemble(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    NBias,
    NRf,
    VDd,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            Self::NBias => "n_bias",
            Self::NRf => "n_rf",
            Self::VDd => "v_dd",
        }
    }

    pub fn apply(self, s: &Scenario, value: f64) -> Result<Scenario> {
        let mut s = *s;
        match self {
            Self::VDd => s.op.v_dd = value,
            Self::NBias | Self::NRf => {
                if value.fract() != 0.0 || !(1.0..=u32::MAX as f64).contains(&value) {
                    return Err(Error::validation(format!(
                        "{} must be a positive integer (got {value})",
                        self.name()
                    )));
                }
                if self == Self::NBias {
                    s.spec.n_bias = value as u32;
                } else {
                    s.spec.n_rf = value as u32;
                }
            }
        }
        Ok(s)
    }
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n_bias" => Ok(Self::NBias),
            "n_rf" => Ok(Self::NRf),
            "v_dd" => Ok(Self::VDd),
            other => Err(Error::validation(format!(
                "unknown sweep parameter '{other}' (expected n_bias, n_rf or v_dd)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub result: std::result::Result<Report, String>,
}

pub const SWEEP_CSV_HEADER: &str = "param,value,valid,bias_gen_area_um2,bias_gen_power_w,\
rf_gen_area_um2,rf_gen_power_w,memory_area_um2,memory_power_w,managing_area_um2,\
managing_power_w,total_area_um2,total_power_w,error";

impl Estimator {
    /// One row per value, ordered by value. Invalid points are kept and
    /// carry their error message.
    pub fn sweep(&self, s: &Scenario, param: SweepParam, values: &[f64]) -> Vec<SweepRow> {
        let mut rows: Vec<SweepRow> = values
            .par_iter()
            .map(|&value| SweepRow {
                value,
                result: param
                    .apply(s, value)
                    .and_then(|s| self.assemble(&s))
                    .map_err(|e| e.to_string()),
            })
            .collect();
        rows.sort_by(|a, b| a.value.total_cmp(&b.value));
        rows
    }
}

pub fn sweep(s: &Scenario, param: SweepParam, values: &[f64]) -> Vec<SweepRow> {
    Estimator::default().sweep(s, param, values)
}

pub fn sweep_csv(param: SweepParam, rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        match &row.result {
            Ok(r) => {
                out.push_str(&format!("{},{},true", param.name(), row.value));
                for (a, p) in [
                    (r.bias_gen.area_um2, r.bias_gen.power_w),
                    (r.rf_gen.area_um2, r.rf_gen.power_w),
                    (r.memory.area_um2, r.memory.power_w),
                    (r.managing.area_um2, r.managing.power_w),
                    (r.totals.area_um2, r.totals.power_w),
                ] {
                    out.push_str(&format!(",{a:e},{p:e}"));
                }
                out.push_str(",\n");
            }
            Err(e) => {
                out.push_str(&format!(
                    "{},{},false,,,,,,,,,,,\"{}\"\n",
                    param.name(),
                    row.value,
                    e.replace('"', "'")
                ));
            }
        }
    }
    out
}

/// DAC comparison conditions for bias duty: the bias range at the refresh
/// rate, bandwidth `b_bias`, switch activity 0.5.
pub fn bias_dac_conditions(s: &Scenario) -> DacConditions {
    DacConditions {
        v_range: s.spec.v_range_bias,
        f: scenario_refresh_rate(s),
        v_dd: s.op.v_dd,
        sigma: 0.5,
        t: s.op.t_el,
        b: s.op.b_bias,
    }
}

/// DAC comparison conditions for RF duty: the RF range at the sample rate.
pub fn rf_dac_conditions(s: &Scenario) -> DacConditions {
    DacConditions {
        v_range: s.spec.v_range_rf,
        f: s.spec.f_sample_rf,
        v_dd: s.op.v_dd,
        sigma: 0.5,
        t: s.op.t_el,
        b: s.op.b_rf,
    }
}

pub const DAC_CSV_HEADER: &str = "arch,n,area_um2,p_analog_w,p_switch_w,noise_vrms";

/// Every registered architecture at every resolution in `ns`, with the
/// scenario's unit values, ordered by architecture then resolution.
pub fn dac_sweep(s: &Scenario, cond: &DacConditions, ns: &[u32]) -> Result<Vec<DacFigures>> {
    let mut out = Vec::new();
    for arch in DacArchitecture::ALL {
        for &n in ns {
            let design = DacDesign::from_sizing(arch, n, s.sizing.bias_unit_c, &s.sizing, &s.tech)?;
            out.push(dac::evaluate(&design, &s.tech, cond)?);
        }
    }
    Ok(out)
}

pub fn dac_csv(rows: &[DacFigures]) -> String {
    let mut out = String::from(DAC_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{:e},{:e},{:e},{:e}\n",
            r.arch, r.n, r.area_um2, r.p_analog_w, r.p_switch_w, r.noise_vrms
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityResult {
    pub budget_w: f64,
    pub per_qubit_w: f64,
    pub n_qubits: u64,
}

/// Qubits a cooling budget supports, rounded down.
pub fn qubit_capacity(report: &Report, budget_w: f64) -> Result<CapacityResult> {
    capacity_for_power(report.totals.power_w, budget_w)
}

pub fn capacity_for_power(per_qubit_w: f64, budget_w: f64) -> Result<CapacityResult> {
    if !(budget_w.is_finite() && budget_w > 0.0) {
        return Err(Error::validation(format!("budget must be positive (got {budget_w})")));
    }
    if !(per_qubit_w.is_finite() && per_qubit_w > 0.0) {
        return Err(Error::domain(format!(
            "per-qubit power must be positive (got {per_qubit_w})"
        )));
    }
    Ok(CapacityResult {
        budget_w,
        per_qubit_w,
        n_qubits: (budget_w / per_qubit_w).floor() as u64,
    })
}

/// Re-sizes the analog parts for operation at `t_el`.
///
/// The hold capacitor and the bias unit capacitor scale with temperature,
/// which keeps their margin over the kT/C bound. The bias clock follows
/// the resulting refresh rate. The RF unit capacitor is only raised to its
/// bound when it would fall below it. Resistor units are left as they are.
pub fn temperature_adjust(s: &Scenario, t_el: f64) -> Result<Scenario> {
    if !(t_el.is_finite() && t_el > 0.0) {
        return Err(Error::validation(format!("t_el must be positive (got {t_el})")));
    }
    let ratio = t_el / s.op.t_el;
    if ratio == 1.0 {
        return Ok(*s);
    }
    let mut out = *s;
    let f_before = scenario_refresh_rate(s);
    out.op = OperatingPoint { t_el, ..s.op };
    out.sizing.c_hold *= ratio;
    out.sizing.bias_unit_c *= ratio;
    let rf_min = min_unit_cap(s.spec.n_rf, s.spec.dv_rf, t_el)?.value;
    out.sizing.rf_unit_c = s.sizing.rf_unit_c.max(rf_min);
    out.op.f_clk_bias *= scenario_refresh_rate(&out) / f_before;
    Ok(out)
}

/// Supply voltage below which the bias generation unit draws the most
/// power, found by bisection on `[lo, hi]`. `None` if the ordering does not
/// change inside the interval.
pub fn bias_crossover_vdd(est: &Estimator, s: &Scenario, lo: f64, hi: f64) -> Result<Option<f64>> {
    let bias_on_top = |v: f64| -> Result<bool> {
        let mut sv = *s;
        sv.op.v_dd = v;
        Ok(est.assemble(&sv)?.top_power_consumer() == "bias_gen")
    };
    let (mut lo, mut hi) = (lo, hi);
    if !bias_on_top(lo)? || bias_on_top(hi)? {
        return Ok(None);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if bias_on_top(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digital::MemoryArch;
    use crate::params::Node;
    use approx::assert_relative_eq;

    #[test]
    fn totals_are_additive() {
        let r = assemble(&Scenario::baseline()).unwrap();
        let sum: f64 = r.unit_powers().iter().map(|(_, p)| p).sum();
        assert_relative_eq!(r.totals.power_w, sum, max_relative = 1e-12);
        let sum: f64 = r.unit_areas().iter().map(|(_, a)| a).sum();
        assert_relative_eq!(r.totals.area_um2, sum, max_relative = 1e-12);
    }

    #[test]
    fn sweep_orders_and_marks_invalid_rows() {
        let rows = sweep(&Scenario::baseline(), SweepParam::VDd, &[1.0, 0.01, -1.0, 0.1]);
        let values: Vec<f64> = rows.iter().map(|r| r.value).collect();
        assert_eq!(values, vec![-1.0, 0.01, 0.1, 1.0]);
        assert!(rows[0].result.is_err());
        assert!(rows[1..].iter().all(|r| r.result.is_ok()));
        let csv = sweep_csv(SweepParam::VDd, &rows);
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.lines().nth(1).unwrap().contains(",false,"));
        let rows = sweep(&Scenario::baseline(), SweepParam::NBias, &[8.5]);
        assert!(rows[0].result.is_err());
    }

    #[test]
    fn digital_power_scales_with_supply_squared() {
        let est = Estimator::default();
        let at = |v: f64| {
            let mut s = Scenario::baseline();
            s.op.v_dd = v;
            est.assemble(&s).unwrap()
        };
        let (a, b) = (at(1.0), at(0.3));
        assert_relative_eq!(a.memory.power_w / b.memory.power_w, 1.0 / 0.09, max_relative = 1e-12);
        assert_relative_eq!(a.managing.power_w / b.managing.power_w, 1.0 / 0.09, max_relative = 1e-12);
        assert_eq!(a.bias_gen.detail.p_analog_w, b.bias_gen.detail.p_analog_w);
    }

    #[test]
    fn capacity_floors_and_rejects_zero_power() {
        assert_eq!(capacity_for_power(1.9e-4, 1e-3).unwrap().n_qubits, 5);
        assert_eq!(capacity_for_power(7.0e-7, 1e-3).unwrap().n_qubits, 1428);
        assert!(capacity_for_power(0.0, 1e-3).is_err());
        assert!(capacity_for_power(1e-6, -1.0).is_err());
    }

    #[test]
    fn temperature_adjust_policy() {
        let s = Scenario::baseline();
        assert_eq!(temperature_adjust(&s, 0.2).unwrap(), s);
        let hot = temperature_adjust(&s, 1.8).unwrap();
        assert_relative_eq!(hot.sizing.c_hold, 2.763e-12, max_relative = 1e-12);
        assert_relative_eq!(
            scenario_refresh_rate(&hot),
            scenario_refresh_rate(&s) / 9.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(hot.op.f_clk_bias, s.op.f_clk_bias / 9.0, max_relative = 1e-12);
        assert_relative_eq!(
            hot.sizing.rf_unit_c,
            min_unit_cap(10, 8e-6, 1.8).unwrap().value,
            max_relative = 1e-12
        );
        let warm = temperature_adjust(&s, 1.0).unwrap();
        assert_eq!(warm.sizing.rf_unit_c, s.sizing.rf_unit_c);
        hot.validate().unwrap();
        assert!(assemble(&hot).is_ok());
        assert!(temperature_adjust(&s, 0.0).is_err());
    }

    #[test]
    fn crossover_lies_below_a_hundred_millivolts() {
        let s = Scenario::baseline();
        let v = bias_crossover_vdd(&Estimator::default(), &s, 1e-3, 1.0).unwrap().unwrap();
        assert!(v > 0.05 && v < 0.09, "{v}");
    }

    #[test]
    fn dac_sweep_covers_every_architecture() {
        let s = Scenario::baseline();
        let rows = dac_sweep(&s, &bias_dac_conditions(&s), &[8, 12]).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(dac_csv(&rows).starts_with(DAC_CSV_HEADER));
    }

    #[test]
    fn fourteen_nm_total_area() {
        let s = Scenario::with(Node::Node14, MemoryArch::Sram, 0.01);
        let r = assemble(&s).unwrap();
        assert_relative_eq!(r.totals.area_um2, 3.0e2, max_relative = 0.2);
        assert_eq!(r.top_power_consumer(), "bias_gen");
    }
}
