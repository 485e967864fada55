//! Serial wire formats and the streaming data-word receiver.
//!
//! A data word is `1 | type | address[8] | payload[n]`, all fields
//! MSB-first, with type 0 for bias and 1 for RF. The idle line is 0.
//! An RF command word is `1 | set1.e1[4] | set1.e2[4] | set2.e1[4] | set2.e2[4]`.

use crate::error::{Result, SimError};

/// Header, type and address bits preceding the payload.
pub const WORD_OVERHEAD: u32 = 10;
/// Width of the reception counter.
pub const COUNTER_BITS: u32 = 5;
/// Longest payload the reception counter can time.
pub const MAX_PAYLOAD_BITS: u32 = (1 << COUNTER_BITS) - 1 - WORD_OVERHEAD;
pub const COMMAND_BITS: usize = 17;
/// Undriven clocks tolerated in the middle of a word.
pub const GAP_TIMEOUT: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WordKind {
    Bias,
    Rf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DataWord {
    pub kind: WordKind,
    pub address: u8,
    pub payload: u32,
}

/// Field widths and address ranges of a configured system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordFormat {
    pub n_bias: u32,
    pub n_rf: u32,
    pub bias_registers: u32,
    pub rf_registers: u32,
}

impl WordFormat {
    pub fn new(n_bias: u32, n_rf: u32, bias_registers: u32, rf_registers: u32) -> Result<Self> {
        for (name, n) in [("n_bias", n_bias), ("n_rf", n_rf)] {
            if n == 0 || n > MAX_PAYLOAD_BITS {
                return Err(SimError::Config(format!(
                    "{name} = {n} cannot be received by a {COUNTER_BITS}-bit counter (1..={MAX_PAYLOAD_BITS})"
                )));
            }
        }
        for (name, r) in [("bias registers", bias_registers), ("rf registers", rf_registers)] {
            if r == 0 || r > 256 {
                return Err(SimError::Config(format!("{name} = {r} not addressable with 8 bits")));
            }
        }
        Ok(Self {
            n_bias,
            n_rf,
            bias_registers,
            rf_registers,
        })
    }

    pub fn width(&self, kind: WordKind) -> u32 {
        match kind {
            WordKind::Bias => self.n_bias,
            WordKind::Rf => self.n_rf,
        }
    }

    pub fn registers(&self, kind: WordKind) -> u32 {
        match kind {
            WordKind::Bias => self.bias_registers,
            WordKind::Rf => self.rf_registers,
        }
    }

    pub fn word_len(&self, kind: WordKind) -> usize {
        (WORD_OVERHEAD + self.width(kind)) as usize
    }

    pub fn check(&self, w: &DataWord) -> Result<()> {
        if w.address as u32 >= self.registers(w.kind) {
            return Err(SimError::Protocol(format!(
                "address {} out of range for {:?} words",
                w.address, w.kind
            )));
        }
        if w.payload >> self.width(w.kind) != 0 {
            return Err(SimError::Protocol(format!(
                "payload {} does not fit in {} bits",
                w.payload,
                self.width(w.kind)
            )));
        }
        Ok(())
    }
}

fn push_bits(out: &mut Vec<bool>, value: u32, width: u32) {
    out.extend((0..width).rev().map(|i| value >> i & 1 == 1));
}

fn read_bits(bits: &[bool]) -> u32 {
    bits.iter().fold(0, |acc, &b| acc << 1 | b as u32)
}

pub fn encode_dataword(fmt: &WordFormat, w: &DataWord) -> Result<Vec<bool>> {
    fmt.check(w)?;
    let mut out = Vec::with_capacity(fmt.word_len(w.kind));
    out.push(true);
    out.push(w.kind == WordKind::Rf);
    push_bits(&mut out, w.address as u32, 8);
    push_bits(&mut out, w.payload, fmt.width(w.kind));
    Ok(out)
}

pub fn decode_dataword(fmt: &WordFormat, bits: &[bool]) -> Result<DataWord> {
    if bits.len() < 2 || !bits[0] {
        return Err(SimError::Protocol("word does not start with a header bit".into()));
    }
    let kind = if bits[1] { WordKind::Rf } else { WordKind::Bias };
    if bits.len() != fmt.word_len(kind) {
        return Err(SimError::Protocol(format!(
            "{:?} word has {} bits, expected {}",
            kind,
            bits.len(),
            fmt.word_len(kind)
        )));
    }
    let w = DataWord {
        kind,
        address: read_bits(&bits[2..10]) as u8,
        payload: read_bits(&bits[10..]),
    };
    fmt.check(&w)?;
    Ok(w)
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Two pairs of sequence IDs, played set 1 then set 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RfCommandWord {
    pub set1: [u8; 2],
    pub set2: [u8; 2],
}

impl RfCommandWord {
    pub fn new(set1: [u8; 2], set2: [u8; 2]) -> Result<Self> {
        if set1.iter().chain(&set2).any(|&id| id > 15) {
            return Err(SimError::Protocol("sequence IDs must be in 0..=15".into()));
        }
        Ok(Self { set1, set2 })
    }

    pub fn sets(&self) -> [[u8; 2]; 2] {
        [self.set1, self.set2]
    }

    pub fn encode(&self) -> Vec<bool> {
        let mut out = vec![true];
        for id in self.set1.iter().chain(&self.set2) {
            push_bits(&mut out, *id as u32, 4);
        }
        out
    }

    pub fn decode(bits: &[bool]) -> Result<Self> {
        if bits.len() != COMMAND_BITS || !bits[0] {
            return Err(SimError::Protocol(format!(
                "command word must be {COMMAND_BITS} bits starting with 1"
            )));
        }
        let id = |i: usize| read_bits(&bits[1 + 4 * i..5 + 4 * i]) as u8;
        Self::new([id(0), id(1)], [id(2), id(3)])
    }
}

#[derive(Debug, Clone, PartialEq)]
enum RxState {
    Idle,
    Receiving { bits: Vec<bool>, counter: u32, gap: u32 },
}

/// Bit-serial receiver clocked once per line sample.
///
/// `None` models an undriven line. A word that stalls for more than
/// [`GAP_TIMEOUT`] clocks is dropped with an error.
#[derive(Debug, Clone)]
pub struct Decoder {
    fmt: WordFormat,
    state: RxState,
}

impl Decoder {
    pub fn new(fmt: WordFormat) -> Self {
        Self {
            fmt,
            state: RxState::Idle,
        }
    }

    pub fn is_idle(&self) -> bool {
        self.state == RxState::Idle
    }

    pub fn clock(&mut self, line: Option<bool>) -> Option<Result<DataWord>> {
        match &mut self.state {
            RxState::Idle => {
                if line == Some(true) {
                    self.state = RxState::Receiving {
                        bits: vec![true],
                        counter: 1,
                        gap: 0,
                    };
                }
                None
            }
            RxState::Receiving { bits, counter, gap } => {
                let Some(bit) = line else {
                    *gap += 1;
                    if *gap > GAP_TIMEOUT {
                        let got = bits.len();
                        self.state = RxState::Idle;
                        return Some(Err(SimError::Protocol(format!(
                            "line idle for {GAP_TIMEOUT} clocks after {got} bits"
                        ))));
                    }
                    return None;
                };
                *gap = 0;
                bits.push(bit);
                *counter = (*counter + 1) & ((1 << COUNTER_BITS) - 1);
                let kind = if bits[1] { WordKind::Rf } else { WordKind::Bias };
                if bits.len() >= 2 && *counter as usize == self.fmt.word_len(kind) {
                    let bits = std::mem::take(bits);
                    self.state = RxState::Idle;
                    return Some(decode_dataword(&self.fmt, &bits));
                }
                None
            }
        }
    }
}
