//! Bit strings and small binary fields.
//!
//! Bit 0 is the leftmost bit as written. Storage packs bits MSB-first into
//! 64-bit words; unused low-order positions of the last word are always zero,
//! so derived equality and hashing agree with bitwise equality.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

use crate::{Error, Result};

type Words = SmallVec<[u64; 2]>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitString {
    len: usize,
    words: Words,
}

fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        let mut words = Words::new();
        words.resize(words_for(len), 0);
        BitString { len, words }
    }

    pub fn ones(len: usize) -> Self {
        let mut b = Self::zeros(len);
        for w in b.words.iter_mut() {
            *w = u64::MAX;
        }
        b.clear_tail();
        b
    }

    pub fn empty() -> Self {
        Self::zeros(0)
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut b = Self::empty();
        for bit in bits {
            b.push(bit);
        }
        b
    }

    /// The low `len` bits of `value`, most significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        let mut b = Self::zeros(len);
        for i in 0..len {
            let shift = len - 1 - i;
            if shift < 64 && (value >> shift) & 1 == 1 {
                b.set(i, true);
            }
        }
        b
    }

    /// Reads the string as an unsigned integer, leftmost bit most significant.
    /// Only meaningful for strings of at most 64 bits.
    pub fn to_u64(&self) -> u64 {
        debug_assert!(self.len <= 64);
        if self.len == 0 {
            0
        } else {
            self.words[0] >> (64 - self.len)
        }
    }

    /// Parses a string of `0`/`1` characters; `_` and spaces are ignored.
    pub fn parse(s: &str) -> Result<Self> {
        let mut b = Self::empty();
        for c in s.chars() {
            match c {
                '0' => b.push(false),
                '1' => b.push(true),
                '_' | ' ' => {}
                _ => return Err(Error::invalid(format!("bad bit character {c:?}"))),
            }
        }
        Ok(b)
    }

    /// Every string of the given length, in increasing numeric order.
    pub fn all(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < 64, "enumeration of {len}-bit strings");
        (0..(1u64 << len)).map(move |v| BitString::from_u64(v, len))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} of a {}-bit string", self.len);
        (self.words[i / 64] >> (63 - i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < self.len, "bit {i} of a {}-bit string", self.len);
        let mask = 1u64 << (63 - i % 64);
        if v {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        let b = self.bit(i);
        self.set(i, !b);
    }

    pub fn push(&mut self, v: bool) {
        if self.len % 64 == 0 {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, v);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.bit(i))
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Bits `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> Result<BitString> {
        if start > end || end > self.len {
            return Err(Error::OutOfRange { start, end, len: self.len });
        }
        let mut out = Self::zeros(end - start);
        for i in start..end {
            if self.bit(i) {
                out.set(i - start, true);
            }
        }
        Ok(out)
    }

    /// The first `n` bits, or an error if the string is shorter.
    pub fn prefix(&self, n: usize) -> Result<BitString> {
        self.slice(0, n)
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.extend(other);
        out
    }

    pub fn extend(&mut self, other: &BitString) {
        for b in other.iter() {
            self.push(b);
        }
    }

    pub fn concat_all<'a, I: IntoIterator<Item = &'a BitString>>(parts: I) -> BitString {
        let mut out = Self::empty();
        for p in parts {
            out.extend(p);
        }
        out
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        if self.len != other.len {
            return Err(Error::UnequalLengths(self.len, other.len));
        }
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect();
        Ok(BitString { len: self.len, words })
    }

    /// Truncates or zero-pads on the right to `len` bits.
    pub fn resized(&self, len: usize) -> BitString {
        let mut out = Self::zeros(len);
        for i in 0..len.min(self.len) {
            if self.bit(i) {
                out.set(i, true);
            }
        }
        out
    }

    /// Consecutive pieces of `width` bits; the last one may be shorter.
    pub fn chunks(&self, width: usize) -> Vec<BitString> {
        assert!(width > 0);
        (0..self.len)
            .step_by(width)
            .map(|s| self.slice(s, (s + width).min(self.len)).expect("in range"))
            .collect()
    }

    /// MSB-first bytes, final byte zero-padded in its low positions.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for i in 0..self.len {
            if self.bit(i) {
                out[i / 8] |= 0x80 >> (i % 8);
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<BitString> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::invalid(format!(
                "{} bytes cannot hold exactly {len} bits",
                bytes.len()
            )));
        }
        let mut out = Self::zeros(len);
        for i in 0..bytes.len() * 8 {
            let v = bytes[i / 8] & (0x80 >> (i % 8)) != 0;
            if i < len {
                out.set(i, v);
            } else if v {
                return Err(Error::invalid("nonzero padding bits"));
            }
        }
        Ok(out)
    }

    pub fn to_hex(&self) -> String {
        self.to_bytes().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(hex: &str, len: usize) -> Result<BitString> {
        if hex.len() % 2 != 0 {
            return Err(Error::invalid("odd-length hex string"));
        }
        let bytes = (0..hex.len())
            .step_by(2)
            .map(|i| {
                u8::from_str_radix(&hex[i..i + 2], 16)
                    .map_err(|_| Error::invalid(format!("bad hex {hex:?}")))
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_bytes(&bytes, len)
    }

    fn clear_tail(&mut self) {
        let used = self.len % 64;
        if used != 0 {
            let last = self.words.len() - 1;
            self.words[last] &= u64::MAX << (64 - used);
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 64 {
            write!(f, "b\"{self}\"")
        } else {
            write!(f, "BitString({}:{})", self.len, self.to_hex())
        }
    }
}

#[derive(Serialize, Deserialize)]
struct HexForm {
    len: usize,
    hex: String,
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HexForm { len: self.len, hex: self.to_hex() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let h = HexForm::deserialize(d)?;
        BitString::from_hex(&h.hex, h.len).map_err(serde::de::Error::custom)
    }
}

/// GF(2) inner product.
pub fn ip(x: &BitString, y: &BitString) -> Result<bool> {
    if x.len != y.len {
        return Err(Error::UnequalLengths(x.len, y.len));
    }
    let ones: u32 = x.words.iter().zip(&y.words).map(|(a, b)| (a & b).count_ones()).sum();
    Ok(ones % 2 == 1)
}

pub const MAX_WIDTH: usize = 16;

/// Irreducible modulus for GF(2^w), including the leading x^w term. Index w-1.
pub const MODULI: [u32; MAX_WIDTH] = [
    0b11,
    0b111,
    0b1011,
    0b10011,
    0b100101,
    0b1000011,
    0b10000011,
    0x11B,
    0x211,
    0x409,
    0x805,
    0x1009,
    0x201B,
    0x402B,
    0x8003,
    0x1002B,
];

pub fn modulus(width: usize) -> Result<u32> {
    if width == 0 || width > MAX_WIDTH {
        return Err(Error::UnsupportedWidth(width));
    }
    Ok(MODULI[width - 1])
}

/// Product of two w-bit polynomials modulo the fixed modulus for w.
/// Callers guarantee `1 <= width <= 16` and operands below 2^w.
pub fn mul_raw(a: u32, b: u32, width: usize) -> u32 {
    let m = MODULI[width - 1];
    let top = 1u32 << width;
    let (mut a, mut b, mut acc) = (a, b, 0u32);
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= m;
        }
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldElem {
    value: u32,
    width: u8,
}

impl FieldElem {
    pub fn new(value: u32, width: usize) -> Result<Self> {
        modulus(width)?;
        if value >> width != 0 {
            return Err(Error::invalid(format!("{value} does not fit in {width} bits")));
        }
        Ok(FieldElem { value, width: width as u8 })
    }

    /// Reads a bit string as a field element of the same width.
    pub fn from_bits(b: &BitString) -> Result<Self> {
        Self::new(b.to_u64() as u32, b.len())
    }

    pub fn to_bits(self) -> BitString {
        BitString::from_u64(self.value as u64, self.width as usize)
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn width(self) -> usize {
        self.width as usize
    }

    pub fn zero(width: usize) -> Result<Self> {
        Self::new(0, width)
    }

    pub fn one(width: usize) -> Result<Self> {
        Self::new(1, width)
    }

    pub fn add(self, other: FieldElem) -> Result<FieldElem> {
        self.check(other)?;
        Ok(FieldElem { value: self.value ^ other.value, width: self.width })
    }

    pub fn mul(self, other: FieldElem) -> Result<FieldElem> {
        gf_mul(self, other)
    }

    fn check(self, other: FieldElem) -> Result<()> {
        if self.width != other.width {
            return Err(Error::WidthMismatch(self.width as usize, other.width as usize));
        }
        Ok(())
    }
}

pub fn gf_mul(a: FieldElem, b: FieldElem) -> Result<FieldElem> {
    a.check(b)?;
    Ok(FieldElem { value: mul_raw(a.value, b.value, a.width()), width: a.width })
}
