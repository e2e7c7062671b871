use serde::{Deserialize, Serialize};

use crate::bitcore::BitString;
use crate::ratio::{self, Rational};
use crate::{Error, Result};

/// Levenshtein distance over bits: single-bit insertions, deletions and
/// substitutions.
pub fn edit_distance(a: &BitString, b: &BitString) -> usize {
    let (a, b): (Vec<bool>, Vec<bool>) = (a.iter().collect(), b.iter().collect());
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for i in 1..=a.len() {
        cur[0] = i;
        for j in 1..=b.len() {
            let sub = prev[j - 1] + usize::from(a[i - 1] != b[j - 1]);
            cur[j] = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Repetition-and-marker code: each message bit b becomes b repeated
/// `repeat` times followed by the marker `01`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditCode {
    pub repeat: usize,
    pub msg_len: usize,
}

impl EditCode {
    pub fn new(repeat: usize, msg_len: usize) -> Result<Self> {
        if repeat == 0 || msg_len == 0 {
            return Err(Error::invalid("edit code needs positive repeat and message length"));
        }
        Ok(EditCode { repeat, msg_len })
    }

    pub fn block_len(&self) -> usize {
        self.repeat + 2
    }

    pub fn codeword_len(&self) -> usize {
        self.msg_len * self.block_len()
    }

    pub fn rate(&self) -> Rational {
        ratio::from_u128(1, self.block_len() as u128)
    }

    pub fn encode(&self, m: &BitString) -> Result<BitString> {
        if m.len() != self.msg_len {
            return Err(Error::DomainMismatch(self.msg_len, m.len()));
        }
        let mut out = BitString::empty();
        for bit in m.iter() {
            for _ in 0..self.repeat {
                out.push(bit);
            }
            out.push(false);
            out.push(true);
        }
        Ok(out)
    }

    /// Codeword positions carrying message bit `j`.
    pub fn positions_of(&self, j: usize) -> std::ops::Range<usize> {
        let start = j * self.block_len();
        start..start + self.repeat
    }

    /// Minimum edit distance between codewords of distinct messages,
    /// by exhaustion.
    pub fn min_distance(&self) -> Result<usize> {
        if self.msg_len > 10 {
            return Err(Error::TooLarge(format!("{}-bit messages", self.msg_len)));
        }
        let words: Vec<BitString> =
            BitString::all(self.msg_len).map(|m| self.encode(&m)).collect::<Result<_>>()?;
        let mut best = usize::MAX;
        for i in 0..words.len() {
            for j in i + 1..words.len() {
                best = best.min(edit_distance(&words[i], &words[j]));
            }
        }
        Ok(best)
    }

    /// Certified relative distance e = min distance / codeword length.
    pub fn certify(&self) -> Result<Rational> {
        Ok(ratio::from_u128(self.min_distance()? as u128, self.codeword_len() as u128))
    }
}
