//! Bias and RF register files with serial write and parallel read.

use crate::protocol::WordKind;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemoryBank {
    bias_width: u32,
    rf_width: u32,
    bias: Vec<u32>,
    rf: Vec<u32>,
}

impl MemoryBank {
    pub fn new(bias_registers: u32, bias_width: u32, rf_registers: u32, rf_width: u32) -> Self {
        Self {
            bias_width,
            rf_width,
            bias: vec![0; bias_registers as usize],
            rf: vec![0; rf_registers as usize],
        }
    }

    fn mask(width: u32) -> u32 {
        ((1u64 << width) - 1) as u32
    }

    fn part(&mut self, kind: WordKind) -> (&mut Vec<u32>, u32) {
        match kind {
            WordKind::Bias => (&mut self.bias, self.bias_width),
            WordKind::Rf => (&mut self.rf, self.rf_width),
        }
    }

    /// One write clock: shifts `bit` into the addressed register.
    pub fn shift_in(&mut self, kind: WordKind, address: u8, bit: bool) {
        let (regs, width) = self.part(kind);
        let r = &mut regs[address as usize];
        *r = (*r << 1 | bit as u32) & Self::mask(width);
    }

    /// A full serial write: `width` shift clocks, MSB first.
    pub fn write_serial(&mut self, kind: WordKind, address: u8, payload: u32) {
        let width = self.part(kind).1;
        for i in (0..width).rev() {
            self.shift_in(kind, address, payload >> i & 1 == 1);
        }
    }

    pub fn read_bias(&self, reg: usize) -> u32 {
        self.bias[reg]
    }

    pub fn read_rf(&self, address: usize) -> u32 {
        self.rf[address]
    }

    /// Both read ports in the same cycle.
    pub fn read_rf_pair(&self, a: usize, b: usize) -> (u32, u32) {
        (self.rf[a], self.rf[b])
    }

    pub fn bias_registers(&self) -> usize {
        self.bias.len()
    }

    pub fn rf_registers(&self) -> usize {
        self.rf.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serial_write_fills_one_register() {
        let mut m = MemoryBank::new(9, 12, 256, 10);
        m.write_serial(WordKind::Bias, 4, 0xabc);
        assert_eq!(m.read_bias(4), 0xabc);
        assert!((0..9).filter(|&r| r != 4).all(|r| m.read_bias(r) == 0));
        m.write_serial(WordKind::Bias, 4, 0x001);
        assert_eq!(m.read_bias(4), 1);
        m.write_serial(WordKind::Rf, 200, 0x3ff);
        m.write_serial(WordKind::Rf, 7, 0x155);
        assert_eq!(m.read_rf_pair(200, 7), (0x3ff, 0x155));
        assert_eq!(m.read_rf_pair(7, 7), (0x155, 0x155));
    }
}
