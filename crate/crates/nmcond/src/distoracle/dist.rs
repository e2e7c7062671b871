use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};

use crate::bitcore::BitString;
use crate::ratio::{self, Rational};
use crate::{Error, Result};

/// A distribution on `domain_len`-bit strings. Support entries are sorted by
/// value and carry strictly positive probability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dist {
    domain_len: usize,
    support: Vec<(BitString, Rational)>,
}

impl Dist {
    pub fn new(domain_len: usize, entries: Vec<(BitString, Rational)>) -> Result<Self> {
        let mut merged: BTreeMap<BitString, Rational> = BTreeMap::new();
        for (v, p) in entries {
            if v.len() != domain_len {
                return Err(Error::DomainMismatch(domain_len, v.len()));
            }
            if p.is_negative() {
                return Err(Error::invalid("negative probability"));
            }
            *merged.entry(v).or_insert_with(Rational::zero) += p;
        }
        let support: Vec<_> = merged.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        let total: Rational = support.iter().map(|(_, p)| p).sum();
        if !total.is_one() {
            return Err(Error::invalid(format!(
                "probabilities sum to {}",
                ratio::to_text(&total)
            )));
        }
        Ok(Dist { domain_len, support })
    }

    /// Normalizes nonnegative integer weights.
    pub fn from_weights(domain_len: usize, weights: Vec<(BitString, u128)>) -> Result<Self> {
        let total: u128 = weights.iter().map(|(_, w)| w).sum();
        if total == 0 {
            return Err(Error::EmptySupport);
        }
        let entries = weights.into_iter().map(|(v, w)| (v, ratio::from_u128(w, total))).collect();
        Self::new(domain_len, entries)
    }

    pub fn uniform(n: usize) -> Self {
        Self::flat(n, BitString::all(n)).expect("nonempty")
    }

    pub fn point(x: BitString) -> Self {
        Dist { domain_len: x.len(), support: vec![(x, Rational::one())] }
    }

    /// Uniform over the given distinct values.
    pub fn flat<I: IntoIterator<Item = BitString>>(n: usize, values: I) -> Result<Self> {
        Self::from_weights(n, values.into_iter().map(|v| (v, 1)).collect())
    }

    pub fn domain_len(&self) -> usize {
        self.domain_len
    }

    pub fn support(&self) -> &[(BitString, Rational)] {
        &self.support
    }

    pub fn prob(&self, x: &BitString) -> Rational {
        match self.support.binary_search_by(|(v, _)| v.cmp(x)) {
            Ok(i) => self.support[i].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn max_prob(&self) -> Rational {
        self.support.iter().map(|(_, p)| p).max().cloned().unwrap_or_else(Rational::zero)
    }

    /// Pushes the distribution forward through `f`.
    pub fn map<F: Fn(&BitString) -> BitString>(&self, out_len: usize, f: F) -> Result<Dist> {
        Dist::new(out_len, self.support.iter().map(|(v, p)| (f(v), p.clone())).collect())
    }

    /// Smallest common denominator and the integer weights over it.
    pub fn weights(&self) -> (BigInt, Vec<(BitString, BigInt)>) {
        let den = self.support.iter().fold(BigInt::one(), |acc, (_, p)| acc.lcm(p.denom()));
        let w = self
            .support
            .iter()
            .map(|(v, p)| (v.clone(), p.numer() * (&den / p.denom())))
            .collect();
        (den, w)
    }
}

/// A distribution on tuples of bit strings with fixed component lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointDist {
    lens: Vec<usize>,
    support: Vec<(Vec<BitString>, Rational)>,
}

impl JointDist {
    pub fn new(lens: Vec<usize>, entries: Vec<(Vec<BitString>, Rational)>) -> Result<Self> {
        let mut merged: BTreeMap<Vec<BitString>, Rational> = BTreeMap::new();
        for (t, p) in entries {
            if t.len() != lens.len() {
                return Err(Error::invalid(format!(
                    "tuple of arity {} in a joint of arity {}",
                    t.len(),
                    lens.len()
                )));
            }
            for (c, &l) in t.iter().zip(&lens) {
                if c.len() != l {
                    return Err(Error::DomainMismatch(l, c.len()));
                }
            }
            if p.is_negative() {
                return Err(Error::invalid("negative probability"));
            }
            *merged.entry(t).or_insert_with(Rational::zero) += p;
        }
        let support: Vec<_> = merged.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        let total: Rational = support.iter().map(|(_, p)| p).sum();
        if !total.is_one() {
            return Err(Error::invalid(format!(
                "probabilities sum to {}",
                ratio::to_text(&total)
            )));
        }
        Ok(JointDist { lens, support })
    }

    pub fn from_weights(lens: Vec<usize>, weights: Vec<(Vec<BitString>, u128)>) -> Result<Self> {
        let total: u128 = weights.iter().map(|(_, w)| w).sum();
        if total == 0 {
            return Err(Error::EmptySupport);
        }
        let entries = weights.into_iter().map(|(t, w)| (t, ratio::from_u128(w, total))).collect();
        Self::new(lens, entries)
    }

    /// Pushes `d` through a tuple-valued map.
    pub fn from_dist<F>(d: &Dist, lens: Vec<usize>, f: F) -> Result<Self>
    where
        F: Fn(&BitString) -> Vec<BitString>,
    {
        Self::new(lens, d.support().iter().map(|(v, p)| (f(v), p.clone())).collect())
    }

    /// Independent product.
    pub fn product(parts: &[&Dist]) -> Result<Self> {
        let mut entries: Vec<(Vec<BitString>, Rational)> = vec![(vec![], Rational::one())];
        for d in parts {
            let mut next = Vec::with_capacity(entries.len() * d.support.len());
            for (t, p) in &entries {
                for (v, q) in &d.support {
                    let mut t = t.clone();
                    t.push(v.clone());
                    next.push((t, p * q));
                }
            }
            entries = next;
        }
        Self::new(parts.iter().map(|d| d.domain_len).collect(), entries)
    }

    pub fn arity(&self) -> usize {
        self.lens.len()
    }

    pub fn lens(&self) -> &[usize] {
        &self.lens
    }

    pub fn support(&self) -> &[(Vec<BitString>, Rational)] {
        &self.support
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.arity() {
            return Err(Error::invalid(format!(
                "component {index} of a joint of arity {}",
                self.arity()
            )));
        }
        Ok(())
    }

    pub fn marginal(&self, index: usize) -> Result<Dist> {
        self.check_index(index)?;
        Dist::new(
            self.lens[index],
            self.support.iter().map(|(t, p)| (t[index].clone(), p.clone())).collect(),
        )
    }

    /// Marginal on the listed components, in the listed order.
    pub fn project(&self, indices: &[usize]) -> Result<JointDist> {
        for &i in indices {
            self.check_index(i)?;
        }
        JointDist::new(
            indices.iter().map(|&i| self.lens[i]).collect(),
            self.support
                .iter()
                .map(|(t, p)| (indices.iter().map(|&i| t[i].clone()).collect(), p.clone()))
                .collect(),
        )
    }

    /// The remaining components given that component `index` equals `value`.
    pub fn condition(&self, index: usize, value: &BitString) -> Result<JointDist> {
        self.check_index(index)?;
        let rows: Vec<_> = self.support.iter().filter(|(t, _)| &t[index] == value).collect();
        let mass: Rational = rows.iter().map(|(_, p)| p).sum();
        if mass.is_zero() {
            return Err(Error::ZeroProbability);
        }
        let mut lens = self.lens.clone();
        lens.remove(index);
        let entries = rows
            .into_iter()
            .map(|(t, p)| {
                let mut t = t.clone();
                t.remove(index);
                (t, p / &mass)
            })
            .collect();
        JointDist::new(lens, entries)
    }

    /// Collapses the tuple into one string by concatenation.
    pub fn flatten(&self) -> Dist {
        let n = self.lens.iter().sum();
        Dist::new(
            n,
            self.support.iter().map(|(t, p)| (BitString::concat_all(t), p.clone())).collect(),
        )
        .expect("flattening preserves a valid distribution")
    }
}

/// Half the L1 distance.
pub fn stat_distance(a: &Dist, b: &Dist) -> Result<Rational> {
    if a.domain_len != b.domain_len {
        return Err(Error::DomainMismatch(a.domain_len, b.domain_len));
    }
    let mut diff: BTreeMap<&BitString, Rational> = BTreeMap::new();
    for (v, p) in &a.support {
        *diff.entry(v).or_insert_with(Rational::zero) += p;
    }
    for (v, p) in &b.support {
        *diff.entry(v).or_insert_with(Rational::zero) -= p;
    }
    let total: Rational = diff.values().map(|d| d.abs()).sum();
    Ok(total / Rational::from_integer(2.into()))
}

/// Exact `-log2` of a positive rational, rounded to the nearest double.
fn neg_log2(p: &Rational) -> f64 {
    // Splitting off powers of two keeps big numerators and denominators inside
    // the double range before taking the logarithm.
    let nb = p.numer().bits() as i64;
    let db = p.denom().bits() as i64;
    let shift = nb - db;
    let scaled = p / ratio::pow2(shift);
    -(shift as f64 + ratio::to_f64(&scaled).log2())
}

pub fn min_entropy(d: &Dist) -> Result<f64> {
    if d.support.is_empty() {
        return Err(Error::EmptySupport);
    }
    Ok(neg_log2(&d.max_prob()))
}

/// E_w[max_x Pr[X=x | W=w]] = Σ_w max_x Pr[X=x, W=w], for the joint (X, W).
pub fn avg_guess_prob(j: &JointDist) -> Result<Rational> {
    if j.arity() != 2 {
        return Err(Error::invalid(format!("expected a pair, got arity {}", j.arity())));
    }
    let mut best: BTreeMap<&BitString, &Rational> = BTreeMap::new();
    for (t, p) in &j.support {
        let e = best.entry(&t[1]).or_insert(p);
        if p > *e {
            *e = p;
        }
    }
    Ok(best.values().copied().sum())
}

pub fn avg_cond_min_entropy(j: &JointDist) -> Result<f64> {
    Ok(neg_log2(&avg_guess_prob(j)?))
}

/// The other component of a pair given that component `index` equals `value`.
pub fn condition(j: &JointDist, index: usize, value: &BitString) -> Result<Dist> {
    Ok(j.condition(index, value)?.flatten())
}

/// Distance from `d` to the closest distribution whose point probabilities are
/// all at most `cap`. Needs `cap * 2^domain_len >= 1`.
pub fn distance_to_min_entropy(d: &Dist, cap: &Rational) -> Result<Rational> {
    if cap * ratio::pow2(d.domain_len as i64) < Rational::one() {
        return Err(Error::invalid("target min-entropy exceeds the domain length"));
    }
    Ok(d.support
        .iter()
        .filter(|(_, p)| p > cap)
        .map(|(_, p)| p - cap)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;
    use proptest::prelude::*;

    fn b(s: &str) -> BitString {
        BitString::parse(s).unwrap()
    }

    #[test]
    fn stat_distance_examples() {
        let u1 = Dist::uniform(1);
        assert_eq!(stat_distance(&u1, &Dist::point(b("0"))).unwrap(), rat(1, 2));
        assert_eq!(stat_distance(&u1, &u1).unwrap(), rat(0, 1));
        let flat = Dist::flat(2, [b("00"), b("01")]).unwrap();
        assert_eq!(stat_distance(&Dist::uniform(2), &flat).unwrap(), rat(1, 2));
        assert_eq!(stat_distance(&u1, &flat), Err(Error::DomainMismatch(1, 2)));
    }

    #[test]
    fn min_entropy_examples() {
        assert_eq!(min_entropy(&Dist::uniform(2)).unwrap(), 2.0);
        assert_eq!(min_entropy(&Dist::point(b("101"))).unwrap(), 0.0);
        let skew = Dist::new(1, vec![(b("0"), rat(3, 4)), (b("1"), rat(1, 4))]).unwrap();
        assert!((min_entropy(&skew).unwrap() - (4.0f64 / 3.0).log2()).abs() < 1e-15);
        assert!(Dist::new(1, vec![]).is_err());
    }

    #[test]
    fn avg_cond_min_entropy_examples() {
        let u2 = Dist::uniform(2);
        let first_bit = JointDist::from_dist(&u2, vec![2, 1], |x| {
            vec![x.clone(), x.slice(0, 1).unwrap()]
        })
        .unwrap();
        assert_eq!(avg_cond_min_entropy(&first_bit).unwrap(), 1.0);

        let skew = Dist::new(2, vec![(b("00"), rat(1, 2)), (b("01"), rat(1, 4)), (b("11"), rat(1, 4))])
            .unwrap();
        let indep = JointDist::product(&[&skew, &Dist::uniform(2)]).unwrap();
        assert_eq!(avg_cond_min_entropy(&indep).unwrap(), min_entropy(&skew).unwrap());

        let same = JointDist::from_dist(&Dist::uniform(3), vec![3, 3], |x| vec![x.clone(), x.clone()])
            .unwrap();
        assert_eq!(avg_cond_min_entropy(&same).unwrap(), 0.0);

        let triple = JointDist::product(&[&u2, &u2, &u2]).unwrap();
        assert!(avg_cond_min_entropy(&triple).is_err());
    }

    #[test]
    fn condition_examples() {
        let u = Dist::uniform(2);
        let pair = JointDist::product(&[&u, &u]).unwrap();
        assert_eq!(condition(&pair, 1, &b("00")).unwrap(), u);
        let same = JointDist::from_dist(&u, vec![2, 2], |x| vec![x.clone(), x.clone()]).unwrap();
        assert_eq!(condition(&same, 1, &b("10")).unwrap(), Dist::point(b("10")));
        let half = JointDist::product(&[&Dist::point(b("0")), &u]).unwrap();
        assert_eq!(half.condition(0, &b("1")), Err(Error::ZeroProbability));
    }

    #[test]
    fn distance_to_min_entropy_caps_excess_mass() {
        let d = Dist::new(2, vec![(b("00"), rat(1, 2)), (b("01"), rat(1, 2))]).unwrap();
        assert_eq!(distance_to_min_entropy(&d, &rat(1, 4)).unwrap(), rat(1, 2));
        assert_eq!(distance_to_min_entropy(&d, &rat(1, 2)).unwrap(), rat(0, 1));
        assert!(distance_to_min_entropy(&d, &rat(1, 8)).is_err());
    }

    #[test]
    fn weights_share_a_denominator() {
        let d = Dist::new(2, vec![(b("00"), rat(1, 2)), (b("01"), rat(1, 3)), (b("10"), rat(1, 6))])
            .unwrap();
        let (den, w) = d.weights();
        assert_eq!(den, BigInt::from(6));
        let ws: Vec<_> = w.into_iter().map(|(_, w)| w).collect();
        assert_eq!(ws, [BigInt::from(3), BigInt::from(2), BigInt::from(1)]);
    }

    fn arb_dist() -> impl Strategy<Value = Dist> {
        prop::collection::vec(0u128..5, 8).prop_filter_map("all zero", |ws| {
            let entries = ws.into_iter().enumerate().map(|(i, w)| (BitString::from_u64(i as u64, 3), w));
            Dist::from_weights(3, entries.collect()).ok()
        })
    }

    proptest! {
        #[test]
        fn stat_distance_is_a_metric(a in arb_dist(), b in arb_dist(), c in arb_dist()) {
            let ab = stat_distance(&a, &b).unwrap();
            prop_assert_eq!(&ab, &stat_distance(&b, &a).unwrap());
            prop_assert_eq!(ab.is_zero(), a == b);
            let bc = stat_distance(&b, &c).unwrap();
            let ac = stat_distance(&a, &c).unwrap();
            prop_assert!(ac <= ab + bc);
        }

        #[test]
        fn min_entropy_is_at_most_domain_length(a in arb_dist()) {
            let h = min_entropy(&a).unwrap();
            prop_assert!((0.0..=3.0).contains(&h));
        }
    }
}
