//! Bias refresh/ramp control, RF playback control and the hold capacitors.

use crate::memory::MemoryBank;
use crate::protocol::RfCommandWord;
use crate::trace::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiasMode {
    Refresh,
    Ramp,
}

/// Hold-capacitor voltages with exponential droop through the switch.
#[derive(Debug, Clone, PartialEq)]
pub struct HoldCaps {
    tau_s: f64,
    v: Vec<f64>,
    t_set_ns: Vec<f64>,
    refreshes: Vec<u64>,
    max_dev: Vec<f64>,
}

impl HoldCaps {
    pub fn new(n: usize, r_off: f64, c_h: f64) -> Self {
        Self {
            tau_s: r_off * c_h,
            v: vec![0.0; n],
            t_set_ns: vec![0.0; n],
            refreshes: vec![0; n],
            max_dev: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn voltage(&self, e: usize, t_ns: f64) -> f64 {
        self.v[e] * (-(t_ns - self.t_set_ns[e]) * 1e-9 / self.tau_s).exp()
    }

    /// Recharges `e` to `target`. When the target is unchanged, the droop
    /// accumulated since the previous refresh counts toward the deviation.
    pub fn refresh(&mut self, e: usize, target: f64, t_ns: f64) {
        if self.refreshes[e] > 0 && self.v[e] == target {
            let dev = (self.voltage(e, t_ns) - target).abs();
            self.max_dev[e] = self.max_dev[e].max(dev);
        }
        self.v[e] = target;
        self.t_set_ns[e] = t_ns;
        self.refreshes[e] += 1;
    }

    /// Includes the droop pending at `t_ns` in the deviation statistics.
    pub fn settle(&mut self, t_ns: f64) {
        for e in 0..self.v.len() {
            if self.refreshes[e] > 0 {
                let dev = (self.voltage(e, t_ns) - self.v[e]).abs();
                self.max_dev[e] = self.max_dev[e].max(dev);
            }
        }
    }

    pub fn refreshes(&self) -> &[u64] {
        &self.refreshes
    }

    pub fn max_deviation(&self) -> &[f64] {
        &self.max_dev
    }
}

/// Converts on every second bias clock.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasController {
    pub mode: BiasMode,
    pub electrode_counter: usize,
    pub ramp_counter: u32,
    n_electrodes: usize,
    n_bits: u32,
    v_range: f64,
    phase: bool,
    pub conversions: u64,
}

impl BiasController {
    pub fn new(n_electrodes: usize, n_bits: u32, v_range: f64) -> Self {
        Self {
            mode: BiasMode::Refresh,
            electrode_counter: 0,
            ramp_counter: 0,
            n_electrodes,
            n_bits,
            v_range,
            phase: false,
            conversions: 0,
        }
    }

    /// Ideal straight-binary unipolar conversion.
    pub fn code_voltage(&self, code: u32) -> f64 {
        code as f64 / (1u64 << self.n_bits) as f64 * self.v_range
    }

    pub fn clock(&mut self, t_ns: f64, mem: &MemoryBank, caps: &mut HoldCaps, trace: &mut Trace) {
        self.phase = !self.phase;
        if self.phase {
            return;
        }
        self.conversions += 1;
        match self.mode {
            BiasMode::Refresh => {
                let e = self.electrode_counter;
                let v = self.code_voltage(mem.read_bias(e));
                caps.refresh(e, v, t_ns);
                trace.level(t_ns, &format!("bias.e{e}"), v);
                self.electrode_counter = (e + 1) % self.n_electrodes;
            }
            BiasMode::Ramp => {
                let target = mem.read_bias(self.n_electrodes) as usize;
                let code = self.ramp_counter;
                trace.sample(t_ns, "bias.ramp_code", code as f64);
                if target < self.n_electrodes {
                    let v = self.code_voltage(code);
                    caps.refresh(target, v, t_ns);
                    trace.level(t_ns, &format!("bias.e{target}"), v);
                }
                self.ramp_counter = (code + 1) & (((1u64 << self.n_bits) - 1) as u32);
            }
        }
    }
}

/// Double-buffered sequence playback on every second RF clock.
#[derive(Debug, Clone, PartialEq)]
pub struct RfController {
    /// Command held in flip-flops, waiting for the latches.
    pub staging: Option<RfCommandWord>,
    /// Command in the latch array being played.
    pub active: Option<RfCommandWord>,
    pub set_index: usize,
    pub sample_counter: u32,
    l_pulse: u32,
    n_bits: u32,
    v_range: f64,
    phase: bool,
    pub samples: u64,
    pub sequences: u64,
    pub backpressure: u64,
}

impl RfController {
    pub fn new(l_pulse: u32, n_bits: u32, v_range: f64) -> Self {
        Self {
            staging: None,
            active: None,
            set_index: 0,
            sample_counter: 0,
            l_pulse,
            n_bits,
            v_range,
            phase: false,
            samples: 0,
            sequences: 0,
            backpressure: 0,
        }
    }

    pub fn code_voltage(&self, code: u32) -> f64 {
        code as f64 / (1u64 << self.n_bits) as f64 * self.v_range
    }

    /// A fully received command word. Returns false when it was dropped
    /// because both buffers are occupied.
    pub fn receive(&mut self, cmd: RfCommandWord, t_ns: f64, trace: &mut Trace) -> bool {
        if self.active.is_none() && self.staging.is_some() {
            self.load_latches();
        }
        if self.staging.is_some() {
            self.backpressure += 1;
            trace.sample(t_ns, "rf.backpressure", 1.0);
            return false;
        }
        self.staging = Some(cmd);
        true
    }

    fn load_latches(&mut self) {
        self.active = self.staging.take();
        self.set_index = 0;
        self.sample_counter = 0;
    }

    pub fn clock(&mut self, t_ns: f64, mem: &MemoryBank, trace: &mut Trace) {
        self.phase = !self.phase;
        if self.phase {
            return;
        }
        if self.active.is_none() {
            // Idle latches are transparent to the staged command.
            self.load_latches();
        }
        let Some(cmd) = self.active else {
            return;
        };
        let ids = cmd.sets()[self.set_index];
        let base = |id: u8| id as usize * self.l_pulse as usize + self.sample_counter as usize;
        let (c1, c2) = mem.read_rf_pair(base(ids[0]), base(ids[1]));
        trace.sample(t_ns, "rf.out1", self.code_voltage(c1));
        trace.sample(t_ns, "rf.out2", self.code_voltage(c2));
        self.samples += 1;
        self.sample_counter += 1;
        if self.sample_counter == self.l_pulse {
            self.sample_counter = 0;
            if self.set_index == 0 {
                self.set_index = 1;
            } else {
                self.set_index = 0;
                self.sequences += 1;
                trace.sample(t_ns, "rf.end_sequ", 1.0);
                self.load_latches();
            }
        }
    }
}
