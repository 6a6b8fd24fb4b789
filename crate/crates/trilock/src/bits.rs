//! Fixed-width bit sequences indexed by clock cycle.
//!
//! Input and key sequences are streams of `cycle_width` bits per clock
//! cycle. Cycle indices are 1-based throughout the crate, and the
//! unsigned interpretation of a sequence is big-endian: the earliest
//! cycle holds the most significant bits.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BitSequenceError {
    #[error("bit count {bits} is not a multiple of cycle width {width}")]
    LengthMismatch { bits: usize, width: usize },
    #[error("cycle width must be at least 1")]
    ZeroWidth,
    #[error("cycle range {lo}..={hi} out of bounds for {cycles} cycles")]
    RangeOutOfBounds { lo: usize, hi: usize, cycles: usize },
    #[error("invalid bit character {0:?}")]
    InvalidBitChar(char),
    #[error("value {value} does not fit in {bits} bits")]
    ValueTooWide { value: u128, bits: usize },
}

/// A bit stream carrying `cycle_width` bits per clock cycle.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitSequence {
    bits: Vec<bool>,
    cycle_width: usize,
}

impl BitSequence {
    pub fn new(bits: Vec<bool>, cycle_width: usize) -> Result<Self, BitSequenceError> {
        if cycle_width == 0 {
            return Err(BitSequenceError::ZeroWidth);
        }
        if !bits.len().is_multiple_of(cycle_width) {
            return Err(BitSequenceError::LengthMismatch {
                bits: bits.len(),
                width: cycle_width,
            });
        }
        Ok(Self { bits, cycle_width })
    }

    pub fn zeros(cycles: usize, cycle_width: usize) -> Self {
        assert!(cycle_width > 0);
        Self {
            bits: vec![false; cycles * cycle_width],
            cycle_width,
        }
    }

    /// Parses a string of `0`/`1` characters; separators (space, `.`, `,`,
    /// `_`) are ignored so keys can be written grouped per cycle.
    pub fn from_bit_str(s: &str, cycle_width: usize) -> Result<Self, BitSequenceError> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                ' ' | '.' | ',' | '_' => {}
                other => return Err(BitSequenceError::InvalidBitChar(other)),
            }
        }
        Self::new(bits, cycle_width)
    }

    /// Big-endian unsigned decode of `value` into `cycles * cycle_width`
    /// bits: the earliest cycle carries the most significant bits.
    pub fn from_unsigned(
        value: u128,
        cycles: usize,
        cycle_width: usize,
    ) -> Result<Self, BitSequenceError> {
        let nbits = cycles * cycle_width;
        if nbits < 128 && value >> nbits != 0 {
            return Err(BitSequenceError::ValueTooWide { value, bits: nbits });
        }
        let mut bits = vec![false; nbits];
        for (i, bit) in bits.iter_mut().enumerate() {
            *bit = (value >> (nbits - 1 - i)) & 1 == 1;
        }
        Self::new(bits, cycle_width)
    }

    /// Big-endian unsigned value of the whole sequence. Panics if the
    /// sequence is wider than 128 bits.
    pub fn to_unsigned(&self) -> u128 {
        assert!(self.bits.len() <= 128, "sequence too wide for u128");
        self.bits
            .iter()
            .fold(0u128, |acc, &b| (acc << 1) | u128::from(b))
    }

    pub fn cycle_width(&self) -> usize {
        self.cycle_width
    }

    pub fn cycles(&self) -> usize {
        self.bits.len() / self.cycle_width
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    /// The sub-sequence of cycle `n` (1-based).
    pub fn cycle(&self, n: usize) -> &[bool] {
        assert!(n >= 1 && n <= self.cycles(), "cycle {n} out of range");
        &self.bits[(n - 1) * self.cycle_width..n * self.cycle_width]
    }

    /// The sub-sequence covering cycles `lo..=hi` (1-based, inclusive).
    pub fn range(&self, lo: usize, hi: usize) -> Result<BitSequence, BitSequenceError> {
        if lo < 1 || hi < lo || hi > self.cycles() {
            return Err(BitSequenceError::RangeOutOfBounds {
                lo,
                hi,
                cycles: self.cycles(),
            });
        }
        Ok(Self {
            bits: self.bits[(lo - 1) * self.cycle_width..hi * self.cycle_width].to_vec(),
            cycle_width: self.cycle_width,
        })
    }

    /// Concatenation in time: `self` cycles first, then `other`.
    /// Both operands must share the cycle width.
    pub fn concat(&self, other: &BitSequence) -> BitSequence {
        assert_eq!(self.cycle_width, other.cycle_width);
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        Self {
            bits,
            cycle_width: self.cycle_width,
        }
    }

    /// Renders the bits grouped per cycle, e.g. `10 01 01`.
    pub fn to_grouped_string(&self) -> String {
        (1..=self.cycles())
            .map(|n| {
                self.cycle(n)
                    .iter()
                    .map(|&b| if b { '1' } else { '0' })
                    .collect::<String>()
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Debug for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSequence[{}]", self.to_grouped_string())
    }
}

impl fmt::Display for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_grouped_string())
    }
}
