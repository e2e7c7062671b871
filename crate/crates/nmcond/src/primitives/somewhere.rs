use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::bitcore::BitString;
use crate::distoracle::FlatFamily;
use crate::{Error, Result};

/// A somewhere condenser: maps an n-bit string to C rows, at least one of
/// which keeps high min-entropy for every source in the certified class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SomewhereCond {
    Identity { n: usize },
    /// Consecutive blocks of n / rows bits.
    BlockSplit { n: usize, rows: usize },
    /// Each row lists the source coordinates it copies, in order.
    Projection { n: usize, rows: Vec<Vec<usize>> },
}

impl SomewhereCond {
    pub fn input_len(&self) -> usize {
        match self {
            SomewhereCond::Identity { n }
            | SomewhereCond::BlockSplit { n, .. }
            | SomewhereCond::Projection { n, .. } => *n,
        }
    }

    pub fn rows(&self) -> usize {
        match self {
            SomewhereCond::Identity { .. } => 1,
            SomewhereCond::BlockSplit { rows, .. } => *rows,
            SomewhereCond::Projection { rows, .. } => rows.len(),
        }
    }

    /// Length of every row.
    pub fn row_len(&self) -> usize {
        match self {
            SomewhereCond::Identity { n } => *n,
            SomewhereCond::BlockSplit { n, rows } => n / rows,
            SomewhereCond::Projection { rows, .. } => rows.first().map_or(0, Vec::len),
        }
    }

    pub fn check(&self) -> Result<()> {
        match self {
            SomewhereCond::Identity { .. } => Ok(()),
            SomewhereCond::BlockSplit { n, rows } => {
                if *rows == 0 || n % rows != 0 {
                    return Err(Error::Indivisible { len: *n, width: *rows });
                }
                Ok(())
            }
            SomewhereCond::Projection { n, rows } => {
                if rows.is_empty() {
                    return Err(Error::invalid("projection condenser without rows"));
                }
                let len = rows[0].len();
                for r in rows {
                    if r.len() != len || r.iter().any(|&c| c >= *n) {
                        return Err(Error::invalid(format!("bad projection row {r:?}")));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn condense(&self, x: &BitString) -> Result<Vec<BitString>> {
        self.check()?;
        if x.len() != self.input_len() {
            return Err(Error::DomainMismatch(self.input_len(), x.len()));
        }
        Ok(match self {
            SomewhereCond::Identity { .. } => vec![x.clone()],
            SomewhereCond::BlockSplit { .. } => x.chunks(self.row_len()),
            SomewhereCond::Projection { rows, .. } => rows
                .iter()
                .map(|r| BitString::from_bits(r.iter().map(|&c| x.bit(c))))
                .collect(),
        })
    }
}

/// Somewhere-entropy certificate: for every flat source of min-entropy `k`
/// on `n` bits, some row has min-entropy at least `row_entropy`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SomewhereCert {
    pub n: usize,
    pub k: usize,
    /// The largest fiber size f* the worst source can force on every row;
    /// row entropy is log2(2^k / f*).
    pub worst_fiber: usize,
    pub row_entropy: f64,
    pub sources_checked: u128,
}

/// Exhaustive certificate: enumerates every flat 2^k-point source and, for
/// each, the best row's largest fiber.
pub fn verify_somewhere(cond: &SomewhereCond, k: usize) -> Result<SomewhereCert> {
    let n = cond.input_len();
    let size = 1usize << k;
    let images: Vec<Vec<u64>> = (0..1u64 << n)
        .map(|x| {
            cond.condense(&BitString::from_u64(x, n))
                .map(|rows| rows.iter().map(BitString::to_u64).collect())
        })
        .collect::<Result<_>>()?;
    let fam = FlatFamily::exhaustive(n, k);
    let mut worst = 0usize;
    let mut checked = 0u128;
    let mut counts: Vec<usize> = vec![0; 1 << cond.row_len()];
    for s in fam.subsets() {
        checked += 1;
        let mut best_row = usize::MAX;
        for r in 0..cond.rows() {
            counts.iter_mut().for_each(|c| *c = 0);
            for &x in &s {
                counts[images[x as usize][r] as usize] += 1;
            }
            best_row = best_row.min(*counts.iter().max().unwrap());
        }
        worst = worst.max(best_row);
    }
    Ok(SomewhereCert {
        n,
        k,
        worst_fiber: worst,
        row_entropy: (size as f64 / worst as f64).log2(),
        sources_checked: checked,
    })
}

/// Largest f such that some 2^k-point set puts at least f points in one
/// fiber of each projection. A fiber of a projection onto c of n coordinates
/// has 2^(n - c) points; fibers A and B of two projections meet in `shared`
/// points when consistent. Taking x11 points from A ∩ B and equally many
/// from each of A \ B and B \ A is optimal.
fn pair_worst_fiber(n: usize, rows: [&[usize]; 2], size: usize) -> usize {
    let (a, b) = (rows[0], rows[1]);
    let union: std::collections::BTreeSet<usize> = a.iter().chain(b).copied().collect();
    let shared = 1usize << (n - union.len());
    let fa = 1usize << (n - a.len());
    let fb = 1usize << (n - b.len());
    (0..=shared.min(size))
        .map(|x11| x11 + (fa - shared).min(fb - shared).min((size - x11) / 2))
        .max()
        .unwrap_or(0)
}

/// Searches all ordered pairs of c-of-n coordinate projections for the one
/// whose worst fiber over flat 2^k-point sources is smallest; ties go to the
/// first pair in lexicographic order. Returns the condenser and its
/// certificate, re-verified by exhaustive enumeration.
pub fn search_projection_pair(n: usize, c: usize, k: usize) -> Result<(SomewhereCond, SomewhereCert, usize)> {
    let size = 1usize << k;
    let subsets: Vec<Vec<usize>> = (0..n).combinations(c).collect();
    let mut best: Option<(usize, Vec<usize>, Vec<usize>)> = None;
    let mut candidates = 0usize;
    for a in &subsets {
        for b in &subsets {
            candidates += 1;
            let f = pair_worst_fiber(n, [a, b], size);
            if best.as_ref().is_none_or(|x| f < x.0) {
                best = Some((f, a.clone(), b.clone()));
            }
        }
    }
    let (f, a, b) = best.ok_or_else(|| Error::invalid("no candidate projections"))?;
    let cond = SomewhereCond::Projection { n, rows: vec![a, b] };
    let cert = verify_somewhere(&cond, k)?;
    if cert.worst_fiber != f {
        return Err(Error::invalid(format!(
            "fiber optimizer predicted {f}, enumeration found {}",
            cert.worst_fiber
        )));
    }
    Ok((cond, cert, candidates))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> BitString {
        BitString::parse(s).unwrap()
    }

    #[test]
    fn examples() {
        let x = b("1011");
        assert_eq!(SomewhereCond::Identity { n: 4 }.condense(&x).unwrap(), vec![x.clone()]);
        assert_eq!(
            SomewhereCond::BlockSplit { n: 4, rows: 2 }.condense(&x).unwrap(),
            vec![b("10"), b("11")]
        );
        assert!(SomewhereCond::BlockSplit { n: 4, rows: 3 }.condense(&x).is_err());
        let p = SomewhereCond::Projection { n: 4, rows: vec![vec![3, 0], vec![1, 2]] };
        assert_eq!(p.condense(&x).unwrap(), vec![b("11"), b("01")]);
    }

    #[test]
    fn fiber_optimizer_agrees_with_enumeration_on_small_pairs() {
        for (n, c, k) in [(4, 2, 1), (4, 2, 2), (5, 2, 2), (4, 3, 2)] {
            let subsets: Vec<Vec<usize>> = (0..n).combinations(c).collect();
            for a in &subsets {
                for bb in &subsets {
                    let cond = SomewhereCond::Projection { n, rows: vec![a.clone(), bb.clone()] };
                    let cert = verify_somewhere(&cond, k).unwrap();
                    assert_eq!(pair_worst_fiber(n, [a, bb], 1 << k), cert.worst_fiber, "{a:?} {bb:?}");
                }
            }
        }
    }

    #[test]
    fn block_split_certificate_at_four_bits() {
        let cert = verify_somewhere(&SomewhereCond::BlockSplit { n: 4, rows: 2 }, 2).unwrap();
        assert_eq!(cert.sources_checked, 1820);
        assert_eq!(cert.worst_fiber, 2);
        assert_eq!(cert.row_entropy, 1.0);
    }
}
