use crate::bitcore::{mul_raw, BitString, MAX_WIDTH};
use crate::{Error, Result};

/// Σ x_i y_i over GF(2^m) for equal-length inputs split into m-bit blocks.
pub fn block_ip(x: &BitString, y: &BitString, m: usize) -> Result<BitString> {
    if x.len() != y.len() {
        return Err(Error::UnequalLengths(x.len(), y.len()));
    }
    if m == 0 {
        return Ok(BitString::empty());
    }
    if x.len() % m != 0 {
        return Err(Error::Indivisible { len: x.len(), width: m });
    }
    if m > MAX_WIDTH {
        return Err(Error::UnsupportedWidth(m));
    }
    let mut acc = 0u32;
    for (a, b) in x.chunks(m).iter().zip(y.chunks(m)) {
        acc ^= mul_raw(a.to_u64() as u32, b.to_u64() as u32, m);
    }
    Ok(BitString::from_u64(acc as u64, m))
}

/// Two-source extractor: y is truncated or zero-padded to |x|, then the
/// block inner product over GF(2^m) is taken.
pub fn two_source_ip(x: &BitString, y: &BitString, m: usize) -> Result<BitString> {
    block_ip(x, &y.resized(x.len()), m)
}
