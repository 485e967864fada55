use std::fs;

use approx::assert_relative_eq;
use cryoctl_core::digital::{managing_report, memory_report, MemoryDesign};
use cryoctl_core::{
    assemble, load_scenario, qubit_capacity, sweep, temperature_adjust, DigitalBudget, Error,
    Estimator, MemoryArch, Node, Scenario, SweepParam,
};
use proptest::prelude::*;

fn scenarios_dir() -> std::path::PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "..", "..", "scenarios"].iter().collect()
}

#[test]
fn flip_flop_column_at_one_volt() {
    let r = assemble(&Scenario::with(Node::Node65, MemoryArch::FlipFlop, 1.0)).unwrap();
    assert_relative_eq!(r.bias_gen.area_um2, 2.2e3, max_relative = 0.10);
    assert_relative_eq!(r.bias_gen.power_w, 7.0e-7, max_relative = 0.10);
    assert_relative_eq!(r.memory.area_um2, 2.9e4, max_relative = 0.15);
    assert_relative_eq!(r.memory.power_w, 1.3e-4, max_relative = 0.15);
    assert_relative_eq!(r.totals.power_w, 1.9e-4, max_relative = 0.20);
}

#[test]
fn sram_columns_scale_with_supply_squared_in_digital_parts() {
    let hi = assemble(&Scenario::with(Node::Node65, MemoryArch::Sram, 1.0)).unwrap();
    let lo = assemble(&Scenario::with(Node::Node65, MemoryArch::Sram, 0.1)).unwrap();
    assert_relative_eq!(lo.memory.power_w / hi.memory.power_w, 0.01, max_relative = 1e-9);
    assert_relative_eq!(lo.managing.power_w / hi.managing.power_w, 0.01, max_relative = 1e-9);
    assert_relative_eq!(lo.bias_gen.detail.p_analog_w, hi.bias_gen.detail.p_analog_w);
    assert_eq!(lo.totals.area_um2, hi.totals.area_um2);
}

#[test]
fn totals_are_unit_sums() {
    for arch in [MemoryArch::FlipFlop, MemoryArch::Sram] {
        for node in [Node::Node65, Node::Node14] {
            let r = assemble(&Scenario::with(node, arch, 0.3)).unwrap();
            let p: f64 = r.unit_powers().iter().map(|u| u.1).sum();
            let a: f64 = r.unit_areas().iter().map(|u| u.1).sum();
            assert_relative_eq!(p, r.totals.power_w, max_relative = 1e-12);
            assert_relative_eq!(a, r.totals.area_um2, max_relative = 1e-12);
        }
    }
}

#[test]
fn digital_dominates_at_one_volt() {
    for arch in [MemoryArch::FlipFlop, MemoryArch::Sram] {
        let r = assemble(&Scenario::with(Node::Node65, arch, 1.0)).unwrap();
        assert!(r.digital_power_fraction() > 0.95, "{arch:?}: {}", r.digital_power_fraction());
        assert_ne!(r.top_power_consumer(), "bias_gen");
    }
}

#[test]
fn bias_generation_dominates_at_ten_millivolts() {
    let r = assemble(&Scenario::with(Node::Node14, MemoryArch::Sram, 0.01)).unwrap();
    assert_eq!(r.top_power_consumer(), "bias_gen");
    assert!(r.bias_gen.power_w / r.totals.power_w > 0.98);
}

#[test]
fn bias_resolution_barely_moves_total_power() {
    let rows = sweep(
        &Scenario::baseline(),
        SweepParam::NBias,
        &(8..=16).map(f64::from).collect::<Vec<_>>(),
    );
    let p: Vec<f64> = rows.iter().map(|r| r.result.as_ref().unwrap().totals.power_w).collect();
    let (lo, hi) = p.iter().fold((f64::MAX, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    assert!(hi / lo - 1.0 < 0.05, "{lo} .. {hi}");
}

#[test]
fn memory_is_the_largest_area_over_bias_resolutions() {
    for n in 8..=16 {
        let mut s = Scenario::baseline();
        s.spec.n_bias = n;
        let r = assemble(&s).unwrap();
        let largest = r
            .unit_areas()
            .into_iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
            .0;
        assert_eq!(largest, "memory", "n_bias = {n}");
    }
}

#[test]
fn sweep_keeps_order_and_invalid_rows() {
    let rows = sweep(&Scenario::baseline(), SweepParam::NRf, &[12.0, 0.0, 8.0, 2.5]);
    let values: Vec<f64> = rows.iter().map(|r| r.value).collect();
    assert_eq!(values, vec![0.0, 2.5, 8.0, 12.0]);
    assert!(rows[0].result.is_err() && rows[1].result.is_err());
    assert!(rows[2].result.is_ok() && rows[3].result.is_ok());
}

#[test]
fn more_memory_bits_cost_more() {
    let budget = DigitalBudget::default();
    let base = Scenario::baseline();
    let mut wide = base;
    wide.spec.n_rf += 2;
    let a = memory_report(&MemoryDesign::from_scenario(&base), &base, &budget);
    let b = memory_report(&MemoryDesign::from_scenario(&wide), &wide, &budget);
    assert!(b.area_um2 > a.area_um2 && b.power_w > a.power_w);
}

#[test]
fn data_input_is_present_but_not_counted_by_default() {
    let budget = DigitalBudget::default();
    let s = Scenario::baseline();
    let off = managing_report(&s, &budget, false);
    let on = managing_report(&s, &budget, true);
    let find = |r: &cryoctl_core::digital::ManagingReport| {
        r.subunits.iter().find(|u| u.name == "data_input_control").cloned().unwrap()
    };
    let (idle, live) = (find(&off), find(&on));
    assert!(!idle.counted && live.counted);
    assert_eq!(idle.power_w, 0.0);
    assert!(idle.area_um2 > 0.0);
    assert_eq!(off.area_um2, on.area_um2);
    assert_relative_eq!(on.power_w - off.power_w, live.power_w, max_relative = 1e-9);
}

#[test]
fn budget_override_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("budget.json");
    let mut budget = DigitalBudget::default();
    for u in &mut budget.subunits {
        u.logic.fixed *= 2.0;
    }
    fs::write(&path, serde_json::to_string(&budget).unwrap()).unwrap();
    let loaded = DigitalBudget::load(&path).unwrap();
    assert_eq!(loaded, budget);

    let s = Scenario::baseline();
    let base = Estimator::default().assemble(&s).unwrap();
    let doubled = Estimator::new(loaded).assemble(&s).unwrap();
    assert!(doubled.managing.area_um2 > base.managing.area_um2);
    assert_eq!(doubled.memory, base.memory);
}

#[test]
fn malformed_budget_is_rejected() {
    let err = DigitalBudget::from_json_str(r#"{"latch_ff_ratio": -1, "sram_column_transistors": 1, "subunits": []}"#)
        .unwrap_err();
    assert!(err.is_validation());
    let err = DigitalBudget::from_json_str("{ \"bogus\": 1 }").unwrap_err();
    assert!(err.is_validation());
}

#[test]
fn shipped_scenarios_load() {
    let s = load_scenario(scenarios_dir().join("baseline.json")).unwrap();
    assert_eq!(s, Scenario::baseline());
    let s = load_scenario(scenarios_dir().join("14nm-10mv.json")).unwrap();
    assert_eq!(s, Scenario::with(Node::Node14, MemoryArch::Sram, 0.01));
    let s = load_scenario(scenarios_dir().join("14nm-10mv-roff100.json")).unwrap();
    assert_eq!(s.tech.r_off_multiplier, 100.0);
}

#[test]
fn scenario_round_trips_through_json() {
    let s = Scenario::with(Node::Node14, MemoryArch::Sram, 0.1);
    assert_eq!(Scenario::from_json_str(&s.to_json()).unwrap(), s);
}

#[test]
fn missing_scenario_is_an_io_error() {
    let err = load_scenario("/nonexistent/s.json").unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
}

#[test]
fn invalid_operating_point_is_rejected() {
    let err = Scenario::from_json_str(r#"{"op": {"v_dd": -0.1}}"#).unwrap_err();
    assert!(err.is_validation());
}

#[test]
fn warmer_electronics_lower_capacity_per_watt() {
    let s = Scenario::with(Node::Node14, MemoryArch::Sram, 0.01);
    let cold = qubit_capacity(&assemble(&s).unwrap(), 1.0).unwrap();
    let warm = qubit_capacity(&assemble(&temperature_adjust(&s, 1.8).unwrap()).unwrap(), 1.0).unwrap();
    assert!(warm.per_qubit_w > cold.per_qubit_w);
}

#[test]
fn capacity_is_floor_of_budget_over_power() {
    let r = assemble(&Scenario::baseline()).unwrap();
    let c = qubit_capacity(&r, 1e-3).unwrap();
    assert_eq!(c.n_qubits, (1e-3 / r.totals.power_w).floor() as u64);
    assert!(qubit_capacity(&r, -1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn digital_power_scales_with_supply_squared(v in 0.005f64..1.2, k in 0.1f64..4.0) {
        let est = Estimator::default();
        let mut a = Scenario::baseline();
        a.op.v_dd = v;
        let mut b = a;
        b.op.v_dd = v * k;
        let ra = est.assemble(&a).unwrap();
        let rb = est.assemble(&b).unwrap();
        let ratio = k * k;
        prop_assert!((rb.memory.power_w / ra.memory.power_w / ratio - 1.0).abs() < 1e-9);
        prop_assert!((rb.managing.power_w / ra.managing.power_w / ratio - 1.0).abs() < 1e-9);
        prop_assert!((rb.rf_gen.detail.p_digital_w / ra.rf_gen.detail.p_digital_w / ratio - 1.0).abs() < 1e-9);
        prop_assert_eq!(ra.bias_gen.detail.p_analog_w, rb.bias_gen.detail.p_analog_w);
    }

    #[test]
    fn total_power_is_monotone_in_supply(v in 0.005f64..1.0) {
        let est = Estimator::default();
        let mut a = Scenario::baseline();
        a.op.v_dd = v;
        let mut b = a;
        b.op.v_dd = v * 1.1;
        prop_assert!(est.assemble(&b).unwrap().totals.power_w > est.assemble(&a).unwrap().totals.power_w);
    }
}
