//! Timestamped signal events and their text dumps.

use std::collections::BTreeMap;
use std::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent {
    pub t_ns: f64,
    pub signal: String,
    pub value: f64,
}

/// Ordered event list. Levels are stored on change only; samples and
/// pulses are stored every time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    events: Vec<TraceEvent>,
    last: BTreeMap<String, f64>,
}

impl Trace {
    pub fn level(&mut self, t_ns: f64, signal: &str, value: f64) {
        if self.last.get(signal) == Some(&value) {
            return;
        }
        self.last.insert(signal.to_string(), value);
        self.push(t_ns, signal, value);
    }

    /// Declares the value a level starts at without recording an event.
    pub fn initial_level(&mut self, signal: &str, value: f64) {
        self.last.insert(signal.to_string(), value);
    }

    pub fn sample(&mut self, t_ns: f64, signal: &str, value: f64) {
        self.last.insert(signal.to_string(), value);
        self.push(t_ns, signal, value);
    }

    fn push(&mut self, t_ns: f64, signal: &str, value: f64) {
        debug_assert!(self.events.last().is_none_or(|e| e.t_ns <= t_ns));
        self.events.push(TraceEvent {
            t_ns,
            signal: signal.to_string(),
            value,
        });
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    /// Events of one signal, in time order.
    pub fn signal<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a TraceEvent> + 'a {
        self.events.iter().filter(move |e| e.signal == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_ns,signal,value\n");
        for e in &self.events {
            let _ = writeln!(out, "{},{},{}", e.t_ns, e.signal, e.value);
        }
        out
    }

    /// Value-change dump with real-valued variables and a 1 ps timescale.
    pub fn to_vcd(&self) -> String {
        let names: Vec<&str> = {
            let mut v: Vec<&str> = self.events.iter().map(|e| e.signal.as_str()).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let id = |name: &str| format!("s{}", names.binary_search(&name).unwrap_or(0));
        let mut out = String::from("$timescale 1ps $end\n$scope module cryoctl $end\n");
        for name in &names {
            let _ = writeln!(out, "$var real 64 {} {} $end", id(name), name);
        }
        out.push_str("$upscope $end\n$enddefinitions $end\n");
        let mut last_ps = None;
        for e in &self.events {
            let ps = (e.t_ns * 1e3).round() as u64;
            if last_ps != Some(ps) {
                let _ = writeln!(out, "#{ps}");
                last_ps = Some(ps);
            }
            let _ = writeln!(out, "r{} {}", e.value, id(&e.signal));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levels_are_stored_on_change() {
        let mut t = Trace::default();
        t.level(0.0, "a", 1.0);
        t.level(1.0, "a", 1.0);
        t.level(2.0, "a", 0.5);
        t.sample(3.0, "b", 2.0);
        t.sample(4.0, "b", 2.0);
        assert_eq!(t.len(), 4);
        assert_eq!(t.to_csv().lines().nth(1), Some("0,a,1"));
        let vcd = t.to_vcd();
        assert!(vcd.contains("$var real 64 s0 a $end"));
        assert!(vcd.contains("#3000\nr2 s1"));
    }
}
