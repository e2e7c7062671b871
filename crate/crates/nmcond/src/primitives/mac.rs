use num::bigint::BigInt;
use num::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitcore::{mul_raw, BitString, MAX_WIDTH};
use crate::distoracle::JointDist;
use crate::ratio::{self, Rational};
use crate::{Error, Result};

/// One-time MAC over GF(2^v): key = (k1, k2), message zero-padded to v-bit
/// chunks m_1..m_b, tag = k2 + Σ_i m_i k1^i.
pub fn mac_tag(key: &BitString, msg: &BitString, v: usize) -> Result<BitString> {
    if key.len() != 2 * v {
        return Err(Error::invalid(format!("MAC key has {} bits, expected {}", key.len(), 2 * v)));
    }
    if v == 0 || v > MAX_WIDTH {
        return Err(Error::UnsupportedWidth(v));
    }
    let k1 = key.slice(0, v)?.to_u64() as u32;
    let k2 = key.slice(v, 2 * v)?.to_u64() as u32;
    Ok(BitString::from_u64(tag_raw(k1, k2, &chunks(msg, v), v) as u64, v))
}

fn chunks(msg: &BitString, v: usize) -> Vec<u32> {
    msg.resized(msg.len().div_ceil(v) * v)
        .chunks(v)
        .iter()
        .map(|c| c.to_u64() as u32)
        .collect()
}

fn tag_raw(k1: u32, k2: u32, chunks: &[u32], v: usize) -> u32 {
    let mut acc = k2;
    let mut pow = k1;
    for &m in chunks {
        acc ^= mul_raw(m, pow, v);
        pow = mul_raw(pow, k1, v);
    }
    acc
}

/// Largest M^2 K the exhaustive forgery search will take on.
const FORGERY_BUDGET: u128 = 1 << 33;

/// Keys grouped by Eve's side information: (weights per key, one group per e).
fn key_groups(v: usize, keys: Option<&JointDist>) -> Result<(Vec<Vec<u128>>, u128)> {
    let key_space = 1usize << (2 * v);
    let Some(j) = keys else {
        return Ok((vec![vec![1; key_space]], key_space as u128));
    };
    let lens = j.lens();
    if lens.is_empty() || lens[0] != 2 * v {
        return Err(Error::invalid("key distribution must have 2v-bit keys first"));
    }
    let den = j.support().iter().fold(BigInt::from(1), |acc, (_, p)| {
        num::integer::lcm(acc, p.denom().clone())
    });
    let total = den.to_u128().ok_or_else(|| Error::TooLarge("key weights".into()))?;
    let mut groups: std::collections::BTreeMap<Vec<BitString>, Vec<u128>> = Default::default();
    for (t, p) in j.support() {
        let w = (p.numer() * (&den / p.denom()))
            .to_u128()
            .ok_or_else(|| Error::TooLarge("key weights".into()))?;
        let side = t[1..].to_vec();
        groups.entry(side).or_insert_with(|| vec![0; key_space])[t[0].to_u64() as usize] += w;
    }
    Ok((groups.into_values().collect(), total))
}

/// Best forgery probability for `v`-bit tags on messages of `num_chunks`
/// chunks. The forger knows the side information e (second component of the
/// optional key joint), sees the tag of a message w chosen with knowledge of
/// e, and submits any (w', t') with w' != w:
///
/// Σ_e max_w Σ_t max_{w' != w, t'} Pr[E = e, tag_R(w) = t, tag_R(w') = t'].
///
/// With `keys = None` the key is uniform and independent of everything.
pub fn mac_forgery_advantage(v: usize, num_chunks: usize, keys: Option<&JointDist>) -> Result<Rational> {
    if v == 0 || v > 8 {
        return Err(Error::TooLarge(format!("v = {v} for exhaustive forgery search")));
    }
    let msgs = 1u128 << (v * num_chunks);
    let key_space = 1u128 << (2 * v);
    if msgs * msgs * key_space > FORGERY_BUDGET {
        return Err(Error::TooLarge(format!(
            "{msgs}^2 message pairs times {key_space} keys"
        )));
    }
    let (groups, total) = key_groups(v, keys)?;
    let messages: Vec<u64> = (0..msgs as u64).collect();
    let best = forgery_over(v, num_chunks, &groups, &messages, &messages);
    Ok(ratio::from_u128(best, total))
}

/// Forgery advantage restricted to a seeded sample of target and forged
/// messages; keys are still enumerated exhaustively. A lower bound on
/// [`mac_forgery_advantage`].
pub fn mac_forgery_sampled(v: usize, num_chunks: usize, samples: usize, seed: u64) -> Result<Rational> {
    if v == 0 || v > 8 {
        return Err(Error::UnsupportedWidth(v));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bits = v * num_chunks;
    let mut draw = |count: usize| -> Vec<u64> {
        let mut out: Vec<u64> = (0..count)
            .map(|_| if bits >= 64 { rng.gen() } else { rng.gen_range(0..1u64 << bits) })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    };
    let targets = draw(samples);
    let forged = draw(samples);
    let (groups, total) = key_groups(v, None)?;
    Ok(ratio::from_u128(forgery_over(v, num_chunks, &groups, &targets, &forged), total))
}

fn forgery_over(v: usize, num_chunks: usize, groups: &[Vec<u128>], targets: &[u64], forged: &[u64]) -> u128 {
    let tags_of = |msg: u64| -> Vec<u8> {
        let bits = BitString::from_u64(msg, v * num_chunks);
        let ch = chunks(&bits, v);
        let mut out = Vec::with_capacity(1 << (2 * v));
        for key in 0..1u32 << (2 * v) {
            out.push(tag_raw(key >> v, key & ((1 << v) - 1), &ch, v) as u8);
        }
        out
    };
    let target_tags: Vec<Vec<u8>> = targets.iter().map(|&m| tags_of(m)).collect();
    let forged_tags: Vec<Vec<u8>> = forged.iter().map(|&m| tags_of(m)).collect();
    let tags = 1usize << v;
    let mut counts = vec![0u128; tags * tags];
    let mut total = 0u128;
    for weights in groups {
        let keys: Vec<(usize, u128)> =
            weights.iter().enumerate().filter(|(_, &w)| w > 0).map(|(k, &w)| (k, w)).collect();
        let mut best_w = 0u128;
        for (ti, tw) in targets.iter().zip(&target_tags) {
            let mut best_t = vec![0u128; tags];
            for (fi, fw) in forged.iter().zip(&forged_tags) {
                if fi == ti {
                    continue;
                }
                counts.iter_mut().for_each(|c| *c = 0);
                for &(k, w) in &keys {
                    counts[tw[k] as usize * tags + fw[k] as usize] += w;
                }
                for (t, best) in best_t.iter_mut().enumerate() {
                    let row = counts[t * tags..(t + 1) * tags].iter().max().copied().unwrap_or(0);
                    *best = (*best).max(row);
                }
            }
            best_w = best_w.max(best_t.iter().sum());
        }
        total += best_w;
    }
    total
}
