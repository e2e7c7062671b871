use crate::bitcore::BitString;
use crate::{Error, Result};

/// A party's private random bits, consumed front to back.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tape {
    bits: BitString,
    pos: usize,
}

impl Tape {
    pub fn new(bits: BitString) -> Self {
        Tape { bits, pos: 0 }
    }

    pub fn random(len: usize, rng: &mut impl rand::Rng) -> Self {
        Tape::new(BitString::from_bits((0..len).map(|_| rng.gen::<bool>())))
    }

    pub fn take(&mut self, n: usize) -> Result<BitString> {
        if self.pos + n > self.bits.len() {
            return Err(Error::Randomness { needed: self.pos + n - self.bits.len() });
        }
        let out = self.bits.slice(self.pos, self.pos + n)?;
        self.pos += n;
        Ok(out)
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }
}
