use crate::bitcore::{mul_raw, BitString, MAX_WIDTH};
use crate::{Error, Result};

pub fn toeplitz_seed_len(n: usize, m: usize) -> usize {
    (n + m).saturating_sub(1)
}

/// Toeplitz hashing: output bit i is the inner product of x with the row
/// T[i][j] = seed[i - j + n - 1]. The seed has n + m - 1 bits.
pub fn ext_hash(x: &BitString, seed: &BitString, m: usize) -> Result<BitString> {
    let n = x.len();
    if m > n {
        return Err(Error::OutputExceedsSource { output: m, source_len: n });
    }
    if m == 0 {
        return Ok(BitString::empty());
    }
    if seed.len() != toeplitz_seed_len(n, m) {
        return Err(Error::invalid(format!(
            "Toeplitz seed for n={n}, m={m} has {} bits, got {}",
            toeplitz_seed_len(n, m),
            seed.len()
        )));
    }
    let mut out = BitString::zeros(m);
    for i in 0..m {
        let mut acc = false;
        for j in 0..n {
            acc ^= x.bit(j) & seed.bit(i + n - 1 - j);
        }
        out.set(i, acc);
    }
    Ok(out)
}

/// Polynomial hashing over GF(2^w), w = max(|seed|, m).
///
/// The seed, zero-padded on the right to w bits, is the evaluation point a.
/// x is zero-padded to whole w-bit blocks x_1..x_b and hashed to
/// Σ x_i a^(b - i + 1) (Horner order). The output is the first m bits.
/// With a single block this is a universal family.
pub fn poly_hash(x: &BitString, seed: &BitString, m: usize) -> Result<BitString> {
    let n = x.len();
    if m > n {
        return Err(Error::OutputExceedsSource { output: m, source_len: n });
    }
    let w = seed.len().max(m);
    if w == 0 {
        return Ok(BitString::empty());
    }
    if w > MAX_WIDTH {
        return Err(Error::UnsupportedWidth(w));
    }
    let a = seed.resized(w).to_u64() as u32;
    let blocks = x.resized(n.div_ceil(w) * w);
    let mut acc = 0u32;
    for chunk in blocks.chunks(w) {
        acc = mul_raw(acc ^ chunk.to_u64() as u32, a, w);
    }
    BitString::from_u64(acc as u64, w).prefix(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distoracle::{verify_strong_extractor, FlatFamily, SourceSpec};
    use crate::ratio::rat;

    fn b(s: &str) -> BitString {
        BitString::parse(s).unwrap()
    }

    #[test]
    fn toeplitz_examples() {
        assert_eq!(ext_hash(&b("1011"), &b("101"), 0).unwrap(), BitString::empty());
        for seed in BitString::all(5) {
            assert_eq!(ext_hash(&BitString::zeros(4), &seed, 2).unwrap(), b("00"));
        }
        assert!(matches!(
            ext_hash(&b("10"), &b("1111"), 3),
            Err(Error::OutputExceedsSource { output: 3, source_len: 2 })
        ));
        assert!(ext_hash(&b("1011"), &b("10"), 2).is_err());
    }

    #[test]
    fn toeplitz_rows_match_the_matrix_definition() {
        // n=3, m=2, seed s0..s3: T = [[s2 s1 s0], [s3 s2 s1]].
        let seed = b("0110");
        let t = [[1, 1, 0], [0, 1, 1]];
        for x in BitString::all(3) {
            let out = ext_hash(&x, &seed, 2).unwrap();
            for (i, row) in t.iter().enumerate() {
                let want = (0..3).fold(0, |acc, j| acc ^ (row[j] & x.bit(j) as i32));
                assert_eq!(out.bit(i), want == 1);
            }
        }
    }

    #[test]
    fn toeplitz_meets_leftover_hash_bound_on_small_sources() {
        let ext = |x: &BitString, y: &BitString| ext_hash(x, y, 1).unwrap();
        let sources: Vec<SourceSpec> = FlatFamily::exhaustive(4, 3).sources().collect();
        let rep = verify_strong_extractor(&ext, 4, 4, 1, 3, &sources).unwrap();
        // 2^((m - k)/2 - 1) = 1/4 for n=4, k=3, m=1.
        assert!(rep.worst_distance <= rat(1, 4));
    }

    #[test]
    fn poly_hash_single_block_is_a_field_product() {
        for x in BitString::all(3) {
            for a in BitString::all(3) {
                let want = mul_raw(x.to_u64() as u32, a.to_u64() as u32, 3);
                assert_eq!(poly_hash(&x, &a, 3).unwrap(), BitString::from_u64(want as u64, 3));
                assert_eq!(poly_hash(&x, &a, 1).unwrap(), BitString::from_u64(want as u64 >> 2, 1));
            }
        }
    }

    #[test]
    fn poly_hash_uses_horner_order() {
        let a = 0b11u32;
        let x = b("0110");
        let h = mul_raw(mul_raw(0b01, a, 2) ^ 0b10, a, 2);
        assert_eq!(poly_hash(&x, &b("11"), 2).unwrap(), BitString::from_u64(h as u64, 2));
        // Short seeds are padded, short sources padded to whole blocks.
        assert_eq!(poly_hash(&b("1"), &b("1"), 1).unwrap(), b("1"));
        assert!(poly_hash(&b("1"), &b("1"), 2).is_err());
        assert!(poly_hash(&BitString::zeros(40), &BitString::zeros(17), 2).is_err());
    }

    #[test]
    fn poly_hash_is_pairwise_universal_on_one_block() {
        // For x != x', Pr_a[h(x) = h(x')] = 2^-m exactly.
        let (w, m) = (4usize, 2usize);
        for x in BitString::all(w) {
            for x2 in BitString::all(w) {
                if x == x2 {
                    continue;
                }
                let hits = BitString::all(w)
                    .filter(|a| poly_hash(&x, a, m).unwrap() == poly_hash(&x2, a, m).unwrap())
                    .count();
                assert_eq!(hits, 1 << (w - m));
            }
        }
    }
}
