use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num::bigint::BigInt;
use num::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dist::Dist;
use crate::bitcore::BitString;
use crate::ratio;
use crate::{Error, Result};

/// JSON form: `{"kind": "flat", "n", "subset"}`, `{"kind": "uniform", "n"}`
/// or `{"kind": "explicit", "n", "probs": {"0110": "1/4", ...}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SourceRepr", into = "SourceRepr")]
pub enum SourceSpec {
    Explicit(Dist),
    /// Uniform over the listed distinct `n`-bit values.
    Flat { n: usize, subset: Vec<u64> },
    Uniform { n: usize },
}

impl SourceSpec {
    pub fn domain_len(&self) -> usize {
        match self {
            SourceSpec::Explicit(d) => d.domain_len(),
            SourceSpec::Flat { n, .. } | SourceSpec::Uniform { n } => *n,
        }
    }

    pub fn to_dist(&self) -> Result<Dist> {
        match self {
            SourceSpec::Explicit(d) => Ok(d.clone()),
            SourceSpec::Flat { n, subset } => {
                Dist::flat(*n, subset.iter().map(|&v| BitString::from_u64(v, *n)))
            }
            SourceSpec::Uniform { n } => Ok(Dist::uniform(*n)),
        }
    }

    /// Draws one value without tabulating the source.
    pub fn sample(&self, rng: &mut impl rand::Rng) -> Result<u64> {
        match self {
            SourceSpec::Uniform { n } if *n <= 64 => {
                Ok(if *n == 64 { rng.gen() } else { rng.gen_range(0..1u64 << n) })
            }
            SourceSpec::Uniform { n } => Err(Error::TooLarge(format!("{n}-bit values"))),
            SourceSpec::Flat { subset, .. } if !subset.is_empty() => Ok(subset[rng.gen_range(0..subset.len())]),
            _ => {
                let ws = self.weighted()?;
                let mut pick = rng.gen_range(0..ws.total);
                for &(v, w) in &ws.points {
                    if pick < w {
                        return Ok(v);
                    }
                    pick -= w;
                }
                Err(Error::EmptySupport)
            }
        }
    }

    pub fn weighted(&self) -> Result<WeightedSource> {
        match self {
            SourceSpec::Flat { n, subset } => {
                let distinct: BTreeSet<_> = subset.iter().collect();
                if distinct.len() != subset.len() {
                    return Err(Error::invalid("flat source lists a value twice"));
                }
                if subset.is_empty() {
                    return Err(Error::EmptySupport);
                }
                Ok(WeightedSource {
                    n: *n,
                    points: subset.iter().map(|&v| (v, 1)).collect(),
                    total: subset.len() as u128,
                })
            }
            SourceSpec::Uniform { n } if *n > 32 => Err(Error::TooLarge(format!("uniform source on {n} bits"))),
            SourceSpec::Uniform { n } => Ok(WeightedSource {
                n: *n,
                points: (0..1u64 << n).map(|v| (v, 1)).collect(),
                total: 1u128 << n,
            }),
            SourceSpec::Explicit(d) => {
                let (den, w) = d.weights();
                let to_u128 = |b: &BigInt| {
                    b.to_u128().ok_or_else(|| Error::TooLarge("weights beyond 128 bits".into()))
                };
                Ok(WeightedSource {
                    n: d.domain_len(),
                    points: w
                        .iter()
                        .map(|(v, w)| Ok((v.to_u64(), to_u128(w)?)))
                        .collect::<Result<_>>()?,
                    total: to_u128(&den)?,
                })
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum SourceRepr {
    Flat { n: usize, subset: Vec<u64> },
    Uniform { n: usize },
    Explicit { n: usize, probs: BTreeMap<String, String> },
}

impl From<SourceSpec> for SourceRepr {
    fn from(s: SourceSpec) -> Self {
        match s {
            SourceSpec::Flat { n, subset } => SourceRepr::Flat { n, subset },
            SourceSpec::Uniform { n } => SourceRepr::Uniform { n },
            SourceSpec::Explicit(d) => SourceRepr::Explicit {
                n: d.domain_len(),
                probs: d.support().iter().map(|(v, p)| (v.to_string(), ratio::to_text(p))).collect(),
            },
        }
    }
}

impl TryFrom<SourceRepr> for SourceSpec {
    type Error = Error;

    fn try_from(r: SourceRepr) -> Result<Self> {
        Ok(match r {
            SourceRepr::Flat { n, subset } => SourceSpec::Flat { n, subset },
            SourceRepr::Uniform { n } => SourceSpec::Uniform { n },
            SourceRepr::Explicit { n, probs } => SourceSpec::Explicit(Dist::new(
                n,
                probs
                    .iter()
                    .map(|(v, p)| Ok((BitString::parse(v)?, ratio::parse(p)?)))
                    .collect::<Result<_>>()?,
            )?),
        })
    }
}

/// A source as integer weights over a common denominator `total`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedSource {
    pub n: usize,
    pub points: Vec<(u64, u128)>,
    pub total: u128,
}

impl WeightedSource {
    pub fn max_weight(&self) -> u128 {
        self.points.iter().map(|p| p.1).max().unwrap_or(0)
    }

    /// Whether every point probability is at most 2^-k.
    pub fn has_min_entropy(&self, k: u32) -> bool {
        (self.max_weight() << k) <= self.total
    }

    pub fn require_min_entropy(&self, k: u32, label: &str) -> Result<()> {
        if self.has_min_entropy(k) {
            Ok(())
        } else {
            Err(Error::SourceBelowEntropy {
                required: k,
                detail: format!("{label}: max weight {} of {}", self.max_weight(), self.total),
            })
        }
    }
}

/// C(n, k), or None when an intermediate product leaves u128.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    (0..k).try_fold(1u128, |acc, i| Some(acc.checked_mul((n - i) as u128)? / (i + 1) as u128))
}

/// Flat sources of size 2^k on n bits, in lexicographic order of their sorted
/// supports. When the family is larger than `cap`, the first `cap` members are
/// followed by `extra` members drawn pseudorandomly from the whole family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatFamily {
    pub n: usize,
    pub k: usize,
    pub cap: u64,
    #[serde(default)]
    pub extra: u64,
    #[serde(default)]
    pub seed: u64,
}

impl FlatFamily {
    pub fn exhaustive(n: usize, k: usize) -> Self {
        FlatFamily { n, k, cap: u64::MAX, extra: 0, seed: 0 }
    }

    /// Family size; None when it does not fit in u128.
    pub fn count(&self) -> Option<u128> {
        binomial(1 << self.n, 1 << self.k)
    }

    pub fn is_exhaustive(&self) -> bool {
        self.count().is_some_and(|c| c <= self.cap as u128)
    }

    pub fn subsets(&self) -> Box<dyn Iterator<Item = Vec<u64>>> {
        assert!(self.k <= self.n && self.n < 32, "flat family ({}, {})", self.n, self.k);
        let size = 1usize << self.k;
        let lex = (0..1u64 << self.n).combinations(size).take(self.cap.min(usize::MAX as u64) as usize);
        if self.is_exhaustive() || self.extra == 0 {
            return Box::new(lex);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let domain = 1usize << self.n;
        let extra = (0..self.extra).map(move |_| {
            let mut s: Vec<u64> = rand::seq::index::sample(&mut rng, domain, size)
                .into_iter()
                .map(|v| v as u64)
                .collect();
            s.sort_unstable();
            s
        });
        Box::new(lex.chain(extra))
    }

    pub fn sources(&self) -> impl Iterator<Item = SourceSpec> {
        let n = self.n;
        self.subsets().map(move |subset| SourceSpec::Flat { n, subset })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distoracle::min_entropy;

    #[test]
    fn source_specs_round_trip_through_json() {
        let specs = [
            SourceSpec::Flat { n: 4, subset: vec![1, 5, 9] },
            SourceSpec::Uniform { n: 3 },
            SourceSpec::Explicit(
                Dist::new(2, vec![(BitString::parse("01").unwrap(), crate::ratio::rat(1, 3)), (BitString::parse("10").unwrap(), crate::ratio::rat(2, 3))]).unwrap(),
            ),
        ];
        for s in specs {
            let text = serde_json::to_string(&s).unwrap();
            assert_eq!(serde_json::from_str::<SourceSpec>(&text).unwrap(), s);
        }
        let bad = r#"{"kind":"explicit","n":2,"probs":{"01":"1/2"}}"#;
        assert!(serde_json::from_str::<SourceSpec>(bad).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(16, 8), Some(12870));
        assert_eq!(binomial(64, 4), Some(635_376));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(binomial(256, 64), None);
    }

    #[test]
    fn flat_family_enumerates_in_order_with_exact_entropy() {
        let fam = FlatFamily::exhaustive(3, 1);
        let all: Vec<_> = fam.subsets().collect();
        assert_eq!(Some(all.len() as u128), fam.count());
        assert_eq!(all[0], [0, 1]);
        assert_eq!(all[1], [0, 2]);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        for src in fam.sources() {
            assert_eq!(min_entropy(&src.to_dist().unwrap()).unwrap(), 1.0);
            assert!(src.weighted().unwrap().has_min_entropy(1));
            assert!(!src.weighted().unwrap().has_min_entropy(2));
        }
    }

    #[test]
    fn capped_family_is_deterministic() {
        let fam = FlatFamily { n: 4, k: 2, cap: 10, extra: 5, seed: 7 };
        assert!(!fam.is_exhaustive());
        let a: Vec<_> = fam.subsets().collect();
        let b: Vec<_> = fam.subsets().collect();
        assert_eq!(a, b);
        assert_eq!(a.len(), 15);
        assert!(a[10..].iter().all(|s| s.len() == 4 && s.windows(2).all(|w| w[0] < w[1])));
    }

    #[test]
    fn explicit_source_weights() {
        use crate::ratio::rat;
        let d = Dist::new(
            2,
            vec![(BitString::from_u64(0, 2), rat(1, 2)), (BitString::from_u64(3, 2), rat(1, 2))],
        )
        .unwrap();
        let w = SourceSpec::Explicit(d).weighted().unwrap();
        assert_eq!(w.points, [(0, 1), (3, 1)]);
        assert_eq!(w.total, 2);
    }
}
