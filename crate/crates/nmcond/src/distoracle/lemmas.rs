//! Exhaustive checks of four conditioning lemmas on small explicit joints.
//! Every comparison is exact; the half-integer loss is handled by squaring.

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dist::{avg_guess_prob, distance_to_min_entropy, Dist, JointDist};
use crate::bitcore::BitString;
use crate::ratio::{self, Rational};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub instances: usize,
    pub violations: usize,
}

/// Entropy loss allowed when conditioning: an integer number of bits or half a bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Loss {
    Bits(u32),
    Half,
}

/// Deterministic small joints (X, W): seeded random weights plus a handful of
/// structured cases.
pub fn tiny_joints(count: usize, seed: u64) -> Vec<JointDist> {
    let u2 = Dist::uniform(2);
    let mut out = vec![
        JointDist::product(&[&u2, &Dist::uniform(1)]).unwrap(),
        JointDist::from_dist(&u2, vec![2, 2], |x| vec![x.clone(), x.clone()]).unwrap(),
        JointDist::from_dist(&Dist::uniform(3), vec![3, 1], |x| {
            vec![x.clone(), x.slice(0, 1).unwrap()]
        })
        .unwrap(),
        JointDist::product(&[&Dist::point(BitString::zeros(2)), &u2]).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < count {
        let xl = rng.gen_range(1..=3);
        let wl = rng.gen_range(1..=2);
        let sparse = rng.gen_bool(0.4);
        let mut weights = Vec::new();
        for x in BitString::all(xl) {
            for w in BitString::all(wl) {
                let c: u128 = if sparse && rng.gen_bool(0.5) { 0 } else { rng.gen_range(0..6) };
                weights.push((vec![x.clone(), w], c));
            }
        }
        if let Ok(j) = JointDist::from_weights(vec![xl, wl], weights) {
            out.push(j);
        }
    }
    out.truncate(count);
    out
}

fn pair_parts(j: &JointDist) -> Result<(Dist, Dist)> {
    Ok((j.marginal(0)?, j.marginal(1)?))
}

/// max_x Pr[X = x, W = w] for each w in the support of W.
fn column_maxima(j: &JointDist) -> Vec<(BitString, Rational, Rational)> {
    let w = j.marginal(1).expect("pair");
    w.support()
        .iter()
        .map(|(wv, pw)| {
            let top = j
                .support()
                .iter()
                .filter(|(t, _)| &t[1] == wv)
                .map(|(_, p)| p.clone())
                .max()
                .unwrap_or_else(Rational::zero);
            (wv.clone(), pw.clone(), top)
        })
        .collect()
}

/// Pr_w[H(X|W=w) >= H~(X|W) - s] >= 1 - 2^-s.
pub fn entropies_holds(j: &JointDist, loss: Loss) -> Result<bool> {
    let g = avg_guess_prob(j)?;
    let two = Rational::from_integer(2.into());
    let mut good = Rational::zero();
    for (_, pw, top) in column_maxima(j) {
        // H(X|W=w) >= H~ - s  <=>  top/pw <= g 2^s.
        let cond_max = &top / &pw;
        let ok = match loss {
            Loss::Bits(s) => cond_max <= &g * ratio::pow2(s as i64),
            Loss::Half => &cond_max * &cond_max <= &g * &g * &two,
        };
        if ok {
            good += pw;
        }
    }
    Ok(match loss {
        Loss::Bits(s) => good >= Rational::one() - ratio::pow2(-(s as i64)),
        // good >= 1 - 2^-1/2  <=>  (1 - good)^2 <= 1/2.
        Loss::Half => {
            let miss = Rational::one() - good;
            &miss * &miss <= ratio::rat(1, 2)
        }
    })
}

/// If W has at most 2^l values then H~(X|W) >= H(X) - l.
pub fn amentropy_holds(j: &JointDist) -> Result<bool> {
    let (x, w) = pair_parts(j)?;
    let values = w.support().len() as u64;
    let l = 64 - (values - 1).leading_zeros() as i64;
    Ok(avg_guess_prob(j)? <= x.max_prob() * ratio::pow2(l))
}

/// Pr_y[H(X|Y=y) >= H(X) - log|Y| - log(1/eps)] >= 1 - eps.
pub fn condition_holds(j: &JointDist, eps: &Rational) -> Result<bool> {
    let (x, y) = pair_parts(j)?;
    let range = Rational::from_integer(y.support().len().into());
    let cap = x.max_prob() * range / eps;
    let good: Rational = column_maxima(j)
        .into_iter()
        .filter(|(_, py, top)| top / py <= cap)
        .map(|(_, py, _)| py)
        .sum();
    Ok(good >= Rational::one() - eps)
}

/// With X eps-close to min-entropy k, where eps is computed exactly:
/// Pr_y[X|Y=y is eps'-close to min-entropy k - log|Y| - log(1/eps')]
/// >= 1 - eps' - eps/eps'.
pub fn econdition_holds(j: &JointDist, k: u32, eps_prime: &Rational) -> Result<bool> {
    let (x, y) = pair_parts(j)?;
    let eps = distance_to_min_entropy(&x, &ratio::pow2(-(k as i64)))?;
    let range = Rational::from_integer(y.support().len().into());
    let cap = ratio::pow2(-(k as i64)) * range / eps_prime;
    // The target cap is at least 2^-k >= 2^-n, so a qualifying source exists.
    let cap = std::cmp::min(cap, Rational::one());
    let mut good = Rational::zero();
    for (yv, py) in y.support() {
        let cond = j.condition(1, yv)?.flatten();
        if distance_to_min_entropy(&cond, &cap)? <= *eps_prime {
            good += py;
        }
    }
    Ok(good >= Rational::one() - eps_prime - eps / eps_prime)
}

/// Runs every lemma over the given joints at a fixed grid of parameters.
pub fn check_all(joints: &[JointDist]) -> Result<Vec<LemmaReport>> {
    let mut reports = Vec::new();
    let mut tally = |lemma: &str, results: Vec<bool>| {
        reports.push(LemmaReport {
            lemma: lemma.into(),
            instances: results.len(),
            violations: results.iter().filter(|ok| !**ok).count(),
        });
    };
    let losses = [Loss::Half, Loss::Bits(1), Loss::Bits(2), Loss::Bits(3)];
    let epsilons = [ratio::rat(1, 2), ratio::rat(1, 4), ratio::rat(1, 8)];

    let mut r = Vec::new();
    for j in joints {
        for &l in &losses {
            r.push(entropies_holds(j, l)?);
        }
    }
    tally("entropies", r);

    tally("amentropy", joints.iter().map(amentropy_holds).collect::<Result<_>>()?);

    let mut r = Vec::new();
    for j in joints {
        for e in &epsilons {
            r.push(condition_holds(j, e)?);
        }
    }
    tally("condition", r);

    let mut r = Vec::new();
    for j in joints {
        let n = j.lens()[0] as u32;
        for k in 0..=n {
            for e in &epsilons {
                r.push(econdition_holds(j, k, e)?);
            }
        }
    }
    tally("econdition", r);
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn joints_are_deterministic_and_varied() {
        let a = tiny_joints(200, 11);
        assert_eq!(a, tiny_joints(200, 11));
        assert_eq!(a.len(), 200);
        assert!(a.iter().any(|j| j.lens() == [3, 2]));
    }

    #[test]
    fn all_lemmas_hold_on_two_hundred_joints() {
        let reports = check_all(&tiny_joints(200, 11)).unwrap();
        assert_eq!(reports.len(), 4);
        for r in &reports {
            assert_eq!(r.violations, 0, "{r:?}");
            assert!(r.instances >= 200);
        }
    }
}
