//! Line-based stimulus files.
//!
//! ```text
//! # time_ns command args
//! 0     write-bias 0 2048
//! 100   write-rf 16 512
//! 5000  play 1 1 2 2
//! 9000  ramp-mode on
//! ```

use crate::error::{Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    WriteBias { reg: u8, code: u32 },
    WriteRf { addr: u8, code: u32 },
    Play { ids: [u8; 4] },
    RampMode(bool),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StimulusEvent {
    pub t_ns: f64,
    pub action: Action,
    /// 1-based source line.
    pub line: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Stimulus {
    pub events: Vec<StimulusEvent>,
}

fn int<T: std::str::FromStr>(line: usize, what: &str, s: Option<&str>) -> Result<T> {
    let s = s.ok_or_else(|| SimError::Stimulus {
        line,
        message: format!("missing {what}"),
    })?;
    s.parse().map_err(|_| SimError::Stimulus {
        line,
        message: format!("invalid {what} '{s}'"),
    })
}

impl Stimulus {
    /// Parses the text form. Events keep file order among equal times.
    pub fn parse(text: &str) -> Result<Self> {
        let mut events = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut it = content.split_whitespace();
            let t_ns: f64 = int(line, "time", it.next())?;
            if !(t_ns.is_finite() && t_ns >= 0.0) {
                return Err(SimError::Stimulus {
                    line,
                    message: "time must be non-negative".into(),
                });
            }
            let cmd = it.next().ok_or_else(|| SimError::Stimulus {
                line,
                message: "missing command".into(),
            })?;
            let action = match cmd {
                "write-bias" => Action::WriteBias {
                    reg: int(line, "register", it.next())?,
                    code: int(line, "code", it.next())?,
                },
                "write-rf" => Action::WriteRf {
                    addr: int(line, "address", it.next())?,
                    code: int(line, "code", it.next())?,
                },
                "play" => {
                    let mut ids = [0u8; 4];
                    for id in &mut ids {
                        *id = int(line, "sequence id", it.next())?;
                        if *id > 15 {
                            return Err(SimError::Stimulus {
                                line,
                                message: format!("sequence id {id} exceeds 15"),
                            });
                        }
                    }
                    Action::Play { ids }
                }
                "ramp-mode" => match it.next() {
                    Some("on") => Action::RampMode(true),
                    Some("off") => Action::RampMode(false),
                    other => {
                        return Err(SimError::Stimulus {
                            line,
                            message: format!("ramp-mode expects on|off, got {other:?}"),
                        })
                    }
                },
                other => {
                    return Err(SimError::Stimulus {
                        line,
                        message: format!("unknown command '{other}'"),
                    })
                }
            };
            if let Some(extra) = it.next() {
                return Err(SimError::Stimulus {
                    line,
                    message: format!("unexpected argument '{extra}'"),
                });
            }
            events.push(StimulusEvent { t_ns, action, line });
        }
        events.sort_by(|a, b| a.t_ns.total_cmp(&b.t_ns));
        Ok(Self { events })
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| SimError::Stimulus {
            line: 0,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }
}
