//! The two-clock event loop tying the controllers together.

use std::collections::VecDeque;

use cryoctl_core::Scenario;

use crate::controllers::{BiasController, BiasMode, HoldCaps, RfController};
use crate::error::{Result, SimError};
use crate::memory::MemoryBank;
use crate::protocol::{
    encode_dataword, DataWord, Decoder, RfCommandWord, WordFormat, WordKind, COMMAND_BITS,
};
use crate::stimulus::{Action, Stimulus, StimulusEvent};
use crate::trace::Trace;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub n_bias_signals: u32,
    pub n_bias: u32,
    pub n_rf: u32,
    pub v_range_bias: f64,
    pub v_range_rf: f64,
    pub f_clk_bias: f64,
    pub f_clk_rf: f64,
    pub r_off: f64,
    pub c_hold: f64,
    pub l_pulse: u32,
    pub n_pulses: u32,
    /// Record every clock edge in the trace.
    pub trace_clocks: bool,
}

impl SimConfig {
    pub fn from_scenario(s: &Scenario) -> Result<Self> {
        let cfg = Self {
            n_bias_signals: s.spec.n_bias_signals,
            n_bias: s.spec.n_bias,
            n_rf: s.spec.n_rf,
            v_range_bias: s.spec.v_range_bias,
            v_range_rf: s.spec.v_range_rf,
            f_clk_bias: s.op.f_clk_bias,
            f_clk_rf: s.op.f_clk_rf,
            r_off: s.tech.r_off_eff(),
            c_hold: s.sizing.c_hold,
            l_pulse: s.spec.l_pulse,
            n_pulses: s.spec.n_pulses,
            trace_clocks: false,
        };
        cfg.format()?;
        Ok(cfg)
    }

    pub fn format(&self) -> Result<WordFormat> {
        if self.n_pulses > 16 {
            return Err(SimError::Config(format!(
                "{} pulses cannot be selected by 4-bit sequence IDs",
                self.n_pulses
            )));
        }
        for (name, f) in [("f_clk_bias", self.f_clk_bias), ("f_clk_rf", self.f_clk_rf)] {
            if !(f.is_finite() && f > 0.0) {
                return Err(SimError::Config(format!("{name} must be positive")));
            }
        }
        WordFormat::new(
            self.n_bias,
            self.n_rf,
            self.n_bias_signals + 1,
            self.l_pulse * self.n_pulses,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimSummary {
    pub t_end_ns: f64,
    pub bias_conversions: u64,
    pub refreshes: Vec<u64>,
    /// Largest droop below the refreshed value seen on each electrode, V.
    pub max_deviation_v: Vec<f64>,
    pub words_received: u64,
    pub feedback_events: u64,
    pub protocol_errors: u64,
    pub rf_samples: u64,
    pub sequences_played: u64,
    pub backpressure_events: u64,
}

impl SimSummary {
    pub fn worst_deviation_v(&self) -> f64 {
        self.max_deviation_v.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "t_end_ns {}\nbias_conversions {}\nwords_received {}\nfeedback_events {}\n\
             protocol_errors {}\nrf_samples {}\nsequences_played {}\nbackpressure_events {}\n\
             worst_deviation_v {:e}\n",
            self.t_end_ns,
            self.bias_conversions,
            self.words_received,
            self.feedback_events,
            self.protocol_errors,
            self.rf_samples,
            self.sequences_played,
            self.backpressure_events,
            self.worst_deviation_v()
        );
        for (e, (n, d)) in self.refreshes.iter().zip(&self.max_deviation_v).enumerate() {
            s.push_str(&format!("e{e} refreshes {n} max_deviation_v {d:e}\n"));
        }
        s
    }
}

#[derive(Debug, Clone)]
struct WriteJob {
    word: DataWord,
    width: u32,
    shifted: u32,
}

pub struct Simulator {
    cfg: SimConfig,
    fmt: WordFormat,
    mem: MemoryBank,
    decoder: Decoder,
    host: VecDeque<DataWord>,
    line: VecDeque<bool>,
    awaiting_ack: bool,
    write: Option<WriteJob>,
    cmd_host: VecDeque<RfCommandWord>,
    cmd_line: VecDeque<bool>,
    cmd_rx: Vec<bool>,
    bias: BiasController,
    rf: RfController,
    caps: HoldCaps,
    trace: Trace,
    stimulus: Vec<StimulusEvent>,
    next_stim: usize,
    bias_cycle: u64,
    rf_cycle: u64,
    now_ns: f64,
    words_received: u64,
    feedback_events: u64,
    protocol_errors: u64,
}

impl Simulator {
    pub fn new(cfg: SimConfig) -> Result<Self> {
        let fmt = cfg.format()?;
        let n = cfg.n_bias_signals as usize;
        let mut trace = Trace::default();
        for e in 0..n {
            trace.initial_level(&format!("bias.e{e}"), 0.0);
        }
        trace.initial_level("bias.ramp_mode", 0.0);
        Ok(Self {
            cfg,
            fmt,
            mem: MemoryBank::new(fmt.bias_registers, cfg.n_bias, fmt.rf_registers, cfg.n_rf),
            decoder: Decoder::new(fmt),
            host: VecDeque::new(),
            line: VecDeque::new(),
            awaiting_ack: false,
            write: None,
            cmd_host: VecDeque::new(),
            cmd_line: VecDeque::new(),
            cmd_rx: Vec::new(),
            bias: BiasController::new(n, cfg.n_bias, cfg.v_range_bias),
            rf: RfController::new(cfg.l_pulse, cfg.n_rf, cfg.v_range_rf),
            caps: HoldCaps::new(n, cfg.r_off, cfg.c_hold),
            trace,
            stimulus: Vec::new(),
            next_stim: 0,
            bias_cycle: 0,
            rf_cycle: 0,
            now_ns: 0.0,
            words_received: 0,
            feedback_events: 0,
            protocol_errors: 0,
        })
    }

    pub fn from_scenario(s: &Scenario) -> Result<Self> {
        Self::new(SimConfig::from_scenario(s)?)
    }

    pub fn format(&self) -> &WordFormat {
        &self.fmt
    }

    /// Checks the stimulus against the configuration and schedules it.
    pub fn load_stimulus(&mut self, stim: &Stimulus) -> Result<()> {
        for ev in &stim.events {
            let word = match ev.action {
                Action::WriteBias { reg, code } => Some(DataWord {
                    kind: WordKind::Bias,
                    address: reg,
                    payload: code,
                }),
                Action::WriteRf { addr, code } => Some(DataWord {
                    kind: WordKind::Rf,
                    address: addr,
                    payload: code,
                }),
                Action::Play { ids } => {
                    if let Some(bad) = ids.iter().find(|&&id| id as u32 >= self.cfg.n_pulses) {
                        return Err(SimError::Stimulus {
                            line: ev.line,
                            message: format!("sequence id {bad} has no stored pulse"),
                        });
                    }
                    None
                }
                Action::RampMode(_) => None,
            };
            if let Some(w) = word {
                self.fmt.check(&w).map_err(|e| SimError::Stimulus {
                    line: ev.line,
                    message: e.to_string(),
                })?;
            }
        }
        self.stimulus.extend(stim.events.iter().copied());
        self.stimulus.sort_by(|a, b| a.t_ns.total_cmp(&b.t_ns));
        Ok(())
    }

    pub fn queue_word(&mut self, w: DataWord) -> Result<()> {
        self.fmt.check(&w)?;
        self.host.push_back(w);
        Ok(())
    }

    pub fn queue_command(&mut self, cmd: RfCommandWord) {
        self.cmd_host.push_back(cmd);
    }

    pub fn set_ramp_mode(&mut self, on: bool) {
        self.bias.mode = if on { BiasMode::Ramp } else { BiasMode::Refresh };
    }

    pub fn memory(&self) -> &MemoryBank {
        &self.mem
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn into_trace(self) -> Trace {
        self.trace
    }

    pub fn bias_controller(&self) -> &BiasController {
        &self.bias
    }

    pub fn rf_controller(&self) -> &RfController {
        &self.rf
    }

    pub fn hold_caps(&self) -> &HoldCaps {
        &self.caps
    }

    pub fn now_ns(&self) -> f64 {
        self.now_ns
    }

    /// No words or commands are pending or in flight.
    pub fn is_quiescent(&self) -> bool {
        self.host.is_empty()
            && self.line.is_empty()
            && !self.awaiting_ack
            && self.write.is_none()
            && self.decoder.is_idle()
            && self.cmd_host.is_empty()
            && self.cmd_line.is_empty()
            && self.next_stim == self.stimulus.len()
    }

    fn bias_edge_ns(&self) -> f64 {
        self.bias_cycle as f64 * 1e9 / self.cfg.f_clk_bias
    }

    fn rf_edge_ns(&self) -> f64 {
        self.rf_cycle as f64 * 1e9 / self.cfg.f_clk_rf
    }

    fn apply_stimulus(&mut self, t_ns: f64) {
        while let Some(ev) = self.stimulus.get(self.next_stim) {
            if ev.t_ns > t_ns {
                break;
            }
            match ev.action {
                Action::WriteBias { reg, code } => self.host.push_back(DataWord {
                    kind: WordKind::Bias,
                    address: reg,
                    payload: code,
                }),
                Action::WriteRf { addr, code } => self.host.push_back(DataWord {
                    kind: WordKind::Rf,
                    address: addr,
                    payload: code,
                }),
                Action::Play { ids } => self.cmd_host.push_back(RfCommandWord {
                    set1: [ids[0], ids[1]],
                    set2: [ids[2], ids[3]],
                }),
                Action::RampMode(on) => {
                    self.set_ramp_mode(on);
                    self.trace.level(t_ns, "bias.ramp_mode", on as u8 as f64);
                }
            }
            self.next_stim += 1;
        }
    }

    /// Processes every clock edge up to and including `t_end_ns`.
    pub fn run_until(&mut self, t_end_ns: f64) {
        loop {
            let (tb, tr) = (self.bias_edge_ns(), self.rf_edge_ns());
            // Equal times go to the bias domain first.
            let t = tb.min(tr);
            if t > t_end_ns {
                break;
            }
            self.now_ns = t;
            self.apply_stimulus(t);
            if tb <= tr {
                self.bias_edge(t);
                self.bias_cycle += 1;
            } else {
                self.rf_edge(t);
                self.rf_cycle += 1;
            }
        }
        self.now_ns = t_end_ns;
        self.caps.settle(t_end_ns);
    }

    /// Runs until no traffic is pending, or `limit_ns` is reached.
    pub fn run_until_quiescent(&mut self, limit_ns: f64) -> bool {
        let step = 2.0 * 1e9 / self.cfg.f_clk_rf;
        while !self.is_quiescent() {
            if self.now_ns >= limit_ns {
                return false;
            }
            let next = (self.rf_edge_ns() + step).min(limit_ns);
            self.run_until(next);
        }
        true
    }

    fn bias_edge(&mut self, t: f64) {
        if self.cfg.trace_clocks {
            self.trace.sample(t, "clk.bias", 1.0);
        }
        self.bias.clock(t, &self.mem, &mut self.caps, &mut self.trace);
    }

    fn rf_edge(&mut self, t: f64) {
        if self.cfg.trace_clocks {
            self.trace.sample(t, "clk.rf", 1.0);
        }
        self.data_input_edge(t);
        self.command_edge(t);
        self.rf.clock(t, &self.mem, &mut self.trace);
    }

    fn data_input_edge(&mut self, t: f64) {
        // Write phase of a previously received word.
        if let Some(job) = &mut self.write {
            let bit = job.word.payload >> (job.width - 1 - job.shifted) & 1 == 1;
            self.mem.shift_in(job.word.kind, job.word.address, bit);
            job.shifted += 1;
            if job.shifted == job.width {
                self.write = None;
                self.awaiting_ack = false;
                self.feedback_events += 1;
                self.trace.sample(t, "data_in.feedback", 1.0);
            }
            return;
        }
        if self.line.is_empty() && !self.awaiting_ack && self.decoder.is_idle() {
            if let Some(w) = self.host.pop_front() {
                let bits = encode_dataword(&self.fmt, &w).expect("queued words are checked");
                self.line.extend(bits);
                self.awaiting_ack = true;
            }
        }
        let bit = self.line.pop_front().unwrap_or(false);
        match self.decoder.clock(Some(bit)) {
            Some(Ok(word)) => {
                self.words_received += 1;
                self.write = Some(WriteJob {
                    word,
                    width: self.fmt.width(word.kind),
                    shifted: 0,
                });
            }
            Some(Err(_)) => {
                self.protocol_errors += 1;
                self.awaiting_ack = false;
                self.trace.sample(t, "data_in.error", 1.0);
            }
            None => {}
        }
    }

    fn command_edge(&mut self, t: f64) {
        if self.cmd_line.is_empty() && self.cmd_rx.is_empty() {
            if let Some(cmd) = self.cmd_host.pop_front() {
                self.cmd_line.extend(cmd.encode());
            }
        }
        let bit = self.cmd_line.pop_front().unwrap_or(false);
        if self.cmd_rx.is_empty() && !bit {
            return;
        }
        self.cmd_rx.push(bit);
        if self.cmd_rx.len() == COMMAND_BITS {
            let bits = std::mem::take(&mut self.cmd_rx);
            match RfCommandWord::decode(&bits) {
                Ok(cmd) => {
                    self.rf.receive(cmd, t, &mut self.trace);
                }
                Err(_) => {
                    self.protocol_errors += 1;
                    self.trace.sample(t, "rf.command_error", 1.0);
                }
            }
        }
    }

    pub fn summary(&self) -> SimSummary {
        SimSummary {
            t_end_ns: self.now_ns,
            bias_conversions: self.bias.conversions,
            refreshes: self.caps.refreshes().to_vec(),
            max_deviation_v: self.caps.max_deviation().to_vec(),
            words_received: self.words_received,
            feedback_events: self.feedback_events,
            protocol_errors: self.protocol_errors,
            rf_samples: self.rf.samples,
            sequences_played: self.rf.sequences,
            backpressure_events: self.rf.backpressure,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimOutput {
    pub trace: Trace,
    pub summary: SimSummary,
}

/// Simulates `stimulus` on the scenario's system up to `t_end_ns`.
pub fn run_simulation(s: &Scenario, stimulus: &Stimulus, t_end_ns: f64) -> Result<SimOutput> {
    if !(t_end_ns.is_finite() && t_end_ns > 0.0) {
        return Err(SimError::Config("end time must be positive".into()));
    }
    let mut sim = Simulator::from_scenario(s)?;
    sim.load_stimulus(stimulus)?;
    sim.run_until(t_end_ns);
    let summary = sim.summary();
    Ok(SimOutput {
        trace: sim.into_trace(),
        summary,
    })
}
