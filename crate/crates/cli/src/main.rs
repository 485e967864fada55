use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cryoctl_core::dac::DacArchitecture;
use cryoctl_core::noise::{max_unit_res, min_hold_cap, min_unit_cap, SizingBound};
use cryoctl_core::report::{
    bias_dac_conditions, dac_csv, dac_sweep, rf_dac_conditions, sweep_csv, SweepRow,
};
use cryoctl_core::{
    load_scenario, qubit_capacity, temperature_adjust, DigitalBudget, Estimator, Scenario,
    SweepParam,
};
use cryoctl_sim::{Simulator, Stimulus};

#[derive(Parser)]
#[command(name = "cryoctl", version, about = "Cryogenic qubit control electronics estimator and simulator")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Thermal-noise bounds on the unit elements.
    Bounds(BoundsArgs),
    /// Area and power report for one scenario.
    Estimate(EstimateArgs),
    /// Reports over a range of one parameter, or a DAC comparison.
    Sweep(SweepArgs),
    /// Qubits supported by a cooling budget.
    Capacity(CapacityArgs),
    /// Behavioral simulation of the digital control system.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct Common {
    /// Scenario JSON file; the built-in defaults when omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Write the output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    common: Common,
    /// Count the data input control toward power.
    #[arg(long)]
    include_data_input: bool,
    /// Managing-component budget JSON replacing the bundled one.
    #[arg(long)]
    digital_budget: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepUnit {
    System,
    Dac,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DacDuty {
    Bias,
    Rf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// What to sweep: whole-system reports or the DAC comparison.
    #[arg(long, value_enum, default_value = "system")]
    unit: SweepUnit,
    /// Swept parameter: n_bias, n_rf or v_dd.
    #[arg(long, required_if_eq("unit", "system"))]
    param: Option<String>,
    /// Comma-separated values, or resolutions for `--unit dac`.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    points: Vec<f64>,
    /// Write CSV to this file.
    #[arg(long, conflicts_with = "out")]
    csv: Option<PathBuf>,
    /// Operating conditions of the DAC comparison.
    #[arg(long, value_enum, default_value = "bias")]
    duty: DacDuty,
    #[arg(long)]
    digital_budget: Option<PathBuf>,
}

#[derive(Args)]
struct CapacityArgs {
    #[command(flatten)]
    common: Common,
    /// Cooling power available, W.
    #[arg(long)]
    budget: f64,
    /// Re-size the analog parts for this electronics temperature, K.
    #[arg(long)]
    t_el: Option<f64>,
    #[arg(long)]
    digital_budget: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    stimulus: Option<PathBuf>,
    /// Simulated time, e.g. 200us, 1ms, 5000ns (bare numbers are ns).
    #[arg(long, default_value = "200us")]
    until: String,
    /// CSV trace output.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Value-change dump output.
    #[arg(long)]
    vcd: Option<PathBuf>,
    /// Record every clock edge.
    #[arg(long)]
    trace_clocks: bool,
    /// Summary format on standard output.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

/// An error with the exit status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn invalid(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 1,
        error: error.into(),
    }
}

fn runtime(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 2,
        error: error.into(),
    }
}

fn core_err(e: cryoctl_core::Error) -> Failure {
    // Bad input files and bad values are the user's to fix.
    match e {
        cryoctl_core::Error::Io { .. } => invalid(e),
        e if e.is_validation() => invalid(e),
        e => runtime(e),
    }
}

type Outcome = Result<(), Failure>;

fn scenario(path: &Option<PathBuf>) -> Result<Scenario, Failure> {
    match path {
        Some(p) => load_scenario(p).map_err(core_err),
        None => Ok(Scenario::baseline()),
    }
}

fn estimator(path: &Option<PathBuf>) -> Result<Estimator, Failure> {
    let budget = match path {
        Some(p) => DigitalBudget::load(p).map_err(core_err)?,
        None => DigitalBudget::default(),
    };
    Ok(Estimator::new(budget))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Outcome {
    match out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(runtime)
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn bounds(args: &BoundsArgs) -> Outcome {
    let s = scenario(&args.common.scenario)?;
    let (sp, op) = (&s.spec, &s.op);
    let rows: Vec<(&str, SizingBound)> = vec![
        ("bias_unit_c_min", min_unit_cap(sp.n_bias, sp.dv_bias, op.t_el)),
        ("hold_c_min", min_hold_cap(sp.n_bias_signals, sp.dv_bias, op.t_el)),
        ("rf_unit_c_min", min_unit_cap(sp.n_rf, sp.dv_rf, op.t_el)),
        (
            "bias_ladder_r_max",
            max_unit_res(DacArchitecture::Ladder, sp.n_bias, sp.dv_bias, op.t_el, op.b_bias),
        ),
        (
            "bias_kelvin_r_max",
            max_unit_res(DacArchitecture::Kelvin, sp.n_bias, sp.dv_bias, op.t_el, op.b_bias),
        ),
        (
            "rf_ladder_r_max",
            max_unit_res(DacArchitecture::Ladder, sp.n_rf, sp.dv_rf, op.t_el, op.b_rf),
        ),
        (
            "rf_kelvin_r_max",
            max_unit_res(DacArchitecture::Kelvin, sp.n_rf, sp.dv_rf, op.t_el, op.b_rf),
        ),
    ]
    .into_iter()
    .map(|(name, b)| b.map(|b| (name, b)))
    .collect::<Result<_, _>>()
    .map_err(core_err)?;

    let text = match args.common.format.unwrap_or(Format::Text) {
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = rows
                .iter()
                .map(|(n, b)| (n.to_string(), serde_json::to_value(b).expect("bound serializes")))
                .collect();
            json(&map)
        }
        Format::Csv => {
            let mut s = String::from("bound,kind,value,n,dv,t,b\n");
            for (name, b) in &rows {
                let kind = serde_json::to_value(b.kind).expect("kind serializes");
                s.push_str(&format!(
                    "{name},{},{:e},{},{:e},{},{}\n",
                    kind.as_str().unwrap_or_default(),
                    b.value,
                    b.binding.n,
                    b.binding.dv,
                    b.binding.t,
                    b.binding.b.map(|b| format!("{b:e}")).unwrap_or_default()
                ));
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for (name, b) in &rows {
                let unit = if name.ends_with("_c_min") { "F" } else { "ohm" };
                s.push_str(&format!("{name:<20} {:>12.4e} {unit}\n", b.value));
            }
            s
        }
    };
    emit(&args.common.out, &text)
}

fn estimate(args: &EstimateArgs) -> Outcome {
    let s = scenario(&args.common.scenario)?;
    let report = estimator(&args.digital_budget)?
        .assemble_with(&s, args.include_data_input)
        .map_err(core_err)?;
    let text = match args.common.format.unwrap_or(Format::Json) {
        Format::Json => json(&report),
        Format::Csv => report.to_csv(),
        Format::Text => report.to_text(),
    };
    emit(&args.common.out, &text)
}

fn sweep(args: &SweepArgs) -> Outcome {
    let s = scenario(&args.common.scenario)?;
    if args.points.is_empty() {
        return Err(invalid(anyhow!("--points needs at least one value")));
    }
    let format = args.common.format.unwrap_or(Format::Csv);
    let out = args.csv.clone().or_else(|| args.common.out.clone());
    match args.unit {
        SweepUnit::Dac => {
            let ns = args
                .points
                .iter()
                .map(|&v| {
                    if v.fract() == 0.0 && (1.0..=24.0).contains(&v) {
                        Ok(v as u32)
                    } else {
                        Err(invalid(anyhow!("DAC resolution must be an integer in 1..=24 (got {v})")))
                    }
                })
                .collect::<Result<Vec<u32>, _>>()?;
            let cond = match args.duty {
                DacDuty::Bias => bias_dac_conditions(&s),
                DacDuty::Rf => rf_dac_conditions(&s),
            };
            let rows = dac_sweep(&s, &cond, &ns).map_err(core_err)?;
            let text = match format {
                Format::Json => json(&rows),
                _ => dac_csv(&rows),
            };
            emit(&out, &text)
        }
        SweepUnit::System => {
            let param: SweepParam = args
                .param
                .as_deref()
                .unwrap_or_default()
                .parse()
                .map_err(core_err)?;
            let rows = estimator(&args.digital_budget)?.sweep(&s, param, &args.points);
            let text = match format {
                Format::Json => json(&sweep_json(param, &rows)),
                _ => sweep_csv(param, &rows),
            };
            emit(&out, &text)
        }
    }
}

fn sweep_json(param: SweepParam, rows: &[SweepRow]) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = rows
        .iter()
        .map(|r| match &r.result {
            Ok(report) => serde_json::json!({
                "param": param.name(), "value": r.value, "valid": true, "report": report,
            }),
            Err(e) => serde_json::json!({
                "param": param.name(), "value": r.value, "valid": false, "error": e,
            }),
        })
        .collect();
    serde_json::Value::Array(rows)
}

fn capacity(args: &CapacityArgs) -> Outcome {
    let mut s = scenario(&args.common.scenario)?;
    if let Some(t) = args.t_el {
        s = temperature_adjust(&s, t).map_err(core_err)?;
    }
    let report = estimator(&args.digital_budget)?.assemble(&s).map_err(core_err)?;
    let cap = qubit_capacity(&report, args.budget).map_err(core_err)?;
    let text = match args.common.format.unwrap_or(Format::Text) {
        Format::Json => json(&cap),
        Format::Csv => format!(
            "budget_w,per_qubit_w,n_qubits\n{:e},{:e},{}\n",
            cap.budget_w, cap.per_qubit_w, cap.n_qubits
        ),
        Format::Text => format!(
            "n_qubits {}\nper_qubit_w {:e}\nbudget_w {:e}\n",
            cap.n_qubits, cap.per_qubit_w, cap.budget_w
        ),
    };
    emit(&args.common.out, &text)
}

/// Parses `200us`, `1ms`, `5000ns`, `0.2s` or a bare number of ns.
fn parse_duration_ns(text: &str) -> anyhow::Result<f64> {
    let text = text.trim();
    let split = text
        .find(|c: char| c.is_ascii_alphabetic())
        .unwrap_or(text.len());
    let (num, unit) = text.split_at(split);
    let value: f64 = num
        .parse()
        .with_context(|| format!("invalid duration '{text}'"))?;
    let scale = match unit {
        "" | "ns" => 1.0,
        "us" => 1e3,
        "ms" => 1e6,
        "s" => 1e9,
        other => return Err(anyhow!("unknown time unit '{other}' (use ns, us, ms or s)")),
    };
    let ns = value * scale;
    if !(ns.is_finite() && ns > 0.0) {
        return Err(anyhow!("duration must be positive (got '{text}')"));
    }
    Ok(ns)
}

fn simulate(args: &SimulateArgs) -> Outcome {
    let s = scenario(&args.scenario)?;
    let t_end = parse_duration_ns(&args.until).map_err(invalid)?;
    let stim = match &args.stimulus {
        Some(p) => Stimulus::load(p).map_err(invalid)?,
        None => Stimulus::default(),
    };
    let mut cfg = cryoctl_sim::SimConfig::from_scenario(&s).map_err(invalid)?;
    cfg.trace_clocks = args.trace_clocks;
    let mut sim = Simulator::new(cfg).map_err(invalid)?;
    sim.load_stimulus(&stim).map_err(invalid)?;
    sim.run_until(t_end);
    let summary = sim.summary();
    if let Some(p) = &args.trace {
        write_file(p, &sim.trace().to_csv())?;
    }
    if let Some(p) = &args.vcd {
        write_file(p, &sim.trace().to_vcd())?;
    }
    let text = match args.format {
        Format::Json => json(&serde_json::json!({
            "t_end_ns": summary.t_end_ns,
            "bias_conversions": summary.bias_conversions,
            "refreshes": summary.refreshes,
            "max_deviation_v": summary.max_deviation_v,
            "worst_deviation_v": summary.worst_deviation_v(),
            "words_received": summary.words_received,
            "feedback_events": summary.feedback_events,
            "protocol_errors": summary.protocol_errors,
            "rf_samples": summary.rf_samples,
            "sequences_played": summary.sequences_played,
            "backpressure_events": summary.backpressure_events,
        })),
        Format::Csv => sim.trace().to_csv(),
        Format::Text => summary.to_text(),
    };
    print!("{text}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Bounds(a) => bounds(a),
        Command::Estimate(a) => estimate(a),
        Command::Sweep(a) => sweep(a),
        Command::Capacity(a) => capacity(a),
        Command::Simulate(a) => simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
