//! Alternating extraction, the look-ahead extractor, top-heavy sets and the
//! look-ahead MAC.
//!
//! Roles: the opening row is R_0 = Raz(S_0, X) with the block inner-product
//! two-source extractor; Ext_q and Ext_w (and Ext_v for V rows) are the
//! polynomial hash with the previous row as seed.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::bitcore::BitString;
use crate::distoracle::{SourceSpec, WeightedSource};
use crate::primitives::{poly_hash, two_source_ip};
use crate::ratio::{self, Rational};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AltExtTrace {
    pub t: usize,
    /// S_0..S_t.
    pub s_rows: Vec<BitString>,
    /// R_0..R_t.
    pub r_rows: Vec<BitString>,
    /// V_1..V_t; empty for plain alternating extraction.
    pub v_rows: Vec<BitString>,
    /// Zero bits appended to q to reach Ext_q's declared input length.
    pub q_padding: usize,
}

impl AltExtTrace {
    /// R_i for 1 <= i <= t.
    pub fn r(&self, i: usize) -> &BitString {
        &self.r_rows[i]
    }

    /// R_1..R_t.
    pub fn la_rows(&self) -> &[BitString] {
        &self.r_rows[1..]
    }
}

/// Lengths fixed by a profile for one alternating-extraction run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AltExtShape {
    /// Row length of every S_i and R_i.
    pub d: usize,
    pub t: usize,
    /// Declared input length of Ext_q; shorter q is zero-padded.
    pub q_input: usize,
}

fn pad_q(q: &BitString, q_input: usize) -> Result<(BitString, usize)> {
    if q.len() > q_input {
        return Err(Error::invalid(format!(
            "q has {} bits, Ext_q accepts {q_input}",
            q.len()
        )));
    }
    Ok((q.resized(q_input), q_input - q.len()))
}

/// S_0 = s0, R_0 = Raz(S_0, x), then S_i = Ext_q(q, R_{i-1}) and
/// R_i = Ext_w(x, S_i) for i = 1..t.
pub fn alt_extract(x: &BitString, q: &BitString, s0: &BitString, shape: AltExtShape) -> Result<AltExtTrace> {
    let AltExtShape { d, t, q_input } = shape;
    if s0.len() > q.len() || q.prefix(s0.len())? != *s0 {
        return Err(Error::invalid("s0 must be a prefix of q"));
    }
    let (qp, q_padding) = pad_q(q, q_input)?;
    let mut s_rows = vec![s0.clone()];
    let mut r_rows = vec![two_source_ip(s0, x, d)?];
    for i in 1..=t {
        let s = poly_hash(&qp, &r_rows[i - 1], d)?;
        let r = poly_hash(x, &s, d)?;
        s_rows.push(s);
        r_rows.push(r);
    }
    Ok(AltExtTrace { t, s_rows, r_rows, v_rows: vec![], q_padding })
}

/// Alternating extraction that also emits V_i = Ext_v(xbar_i, S_i) with
/// 2^(t-i) s bits.
pub fn alt_extract_v(
    x: &BitString,
    xbar: &[BitString],
    q: &BitString,
    s0: &BitString,
    shape: AltExtShape,
    s: usize,
) -> Result<AltExtTrace> {
    if xbar.len() != shape.t {
        return Err(Error::invalid(format!(
            "{} side sources for {} steps",
            xbar.len(),
            shape.t
        )));
    }
    let mut trace = alt_extract(x, q, s0, shape)?;
    for i in 1..=shape.t {
        let len = v_row_len(shape.t, i, s);
        trace.v_rows.push(poly_hash(&xbar[i - 1], &trace.s_rows[i], len)?);
    }
    Ok(trace)
}

/// Length of V_i: 2^(t-i) s.
pub fn v_row_len(t: usize, i: usize, s: usize) -> usize {
    (1usize << (t - i)) * s
}

/// laExt(x, (q, s0)) = R_1..R_t.
pub fn la_ext(x: &BitString, q: &BitString, s0: &BitString, shape: AltExtShape) -> Result<Vec<BitString>> {
    Ok(alt_extract(x, q, s0, shape)?.la_rows().to_vec())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopHeavySet {
    /// 1-based indices in increasing order.
    pub elems: BTreeSet<usize>,
    pub source_message: BitString,
}

/// f(b_1..b_m) = {4i-3+b_i, 4i-b_i : i = 1..m}.
pub fn topheavy_map(mu: &BitString) -> Result<TopHeavySet> {
    if mu.is_empty() {
        return Err(Error::invalid("empty message"));
    }
    let mut elems = BTreeSet::new();
    for (idx, b) in mu.iter().enumerate() {
        let i = idx + 1;
        let b = usize::from(b);
        elems.insert(4 * i - 3 + b);
        elems.insert(4 * i - b);
    }
    Ok(TopHeavySet { elems, source_message: mu.clone() })
}

/// The smallest j in 1..=t with |S1 ∩ [j, t]| > |S2 ∩ [j, t]|, if any.
pub fn is_top_heavy(s1: &BTreeSet<usize>, s2: &BTreeSet<usize>, t: usize) -> Option<usize> {
    (1..=t).find(|&j| s1.range(j..=t).count() > s2.range(j..=t).count())
}

/// The rows r_i for i in f(mu), increasing; `rows` holds r_1..r_{4|mu|}.
pub fn la_mac(rows: &[BitString], mu: &BitString) -> Result<Vec<BitString>> {
    if rows.len() != 4 * mu.len() {
        return Err(Error::invalid(format!(
            "{} rows for a {}-bit message, expected {}",
            rows.len(),
            mu.len(),
            4 * mu.len()
        )));
    }
    Ok(topheavy_map(mu)?.elems.iter().map(|&i| rows[i - 1].clone()).collect())
}

/// Exact distance of R_i from uniform given the honest and tampered earlier
/// rows and q, for one step, and the bound it is compared with.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepMargin {
    pub step: usize,
    #[serde(with = "ratio::text")]
    pub worst_distance: Rational,
    /// min(1, (2i + 2) ε).
    #[serde(with = "ratio::text")]
    pub bound: Rational,
    pub witness_source: usize,
    /// Table of q' = A(q), indexed by q.
    pub witness_tamper: Vec<u64>,
}

/// For every source and every function A on q-values (with the tampered
/// S_0' being the prefix of A(q)), measures
/// Δ((R_i, R_1..R_{i-1}, R'_1..R'_{i-1}, Q), (U_d, R_1..R_{i-1}, R'_1..R'_{i-1}, Q))
/// exactly, with Q uniform and independent of X.
pub fn lookahead_margins(
    n: usize,
    q_len: usize,
    s0_len: usize,
    shape: AltExtShape,
    sources: &[SourceSpec],
    eps: &Rational,
) -> Result<Vec<StepMargin>> {
    let qs = 1usize << q_len;
    if qs > 8 {
        return Err(Error::TooLarge(format!("{qs}^{qs} tamper functions")));
    }
    let ws: Vec<WeightedSource> = sources.iter().map(|s| s.weighted()).collect::<Result<_>>()?;
    let d = shape.d;
    let xs: BTreeSet<u64> = ws.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
    // rows[(x, q)] = R_1..R_t as integers.
    let mut rows: HashMap<(u64, usize), Vec<u64>> = HashMap::new();
    for &x in &xs {
        let xb = BitString::from_u64(x, n);
        for q in 0..qs {
            let qb = BitString::from_u64(q as u64, q_len);
            let tr = alt_extract(&xb, &qb, &qb.prefix(s0_len)?, shape)?;
            rows.insert((x, q), tr.la_rows().iter().map(BitString::to_u64).collect());
        }
    }
    let tampers: Vec<Vec<u64>> = (0..qs.pow(qs as u32))
        .map(|mut code| {
            (0..qs)
                .map(|_| {
                    let v = (code % qs) as u64;
                    code /= qs;
                    v
                })
                .collect()
        })
        .collect();
    let width = 1u128 << d;
    let mut out = Vec::new();
    for step in 1..=shape.t {
        let mut worst: Option<(Rational, usize, usize)> = None;
        for (si, src) in ws.iter().enumerate() {
            for (ti, a) in tampers.iter().enumerate() {
                // context (earlier rows, tampered earlier rows, q) -> counts of R_i.
                let mut ctx: HashMap<(Vec<u64>, Vec<u64>, usize), Vec<u128>> = HashMap::new();
                for &(x, w) in &src.points {
                    for q in 0..qs {
                        let honest = &rows[&(x, q)];
                        let tampered = &rows[&(x, a[q] as usize)];
                        let key = (honest[..step - 1].to_vec(), tampered[..step - 1].to_vec(), q);
                        ctx.entry(key).or_insert_with(|| vec![0; 1 << d])[honest[step - 1] as usize] += w;
                    }
                }
                let num: u128 = ctx
                    .values()
                    .map(|c| {
                        let tot: u128 = c.iter().sum();
                        c.iter().map(|&r| (r * width).abs_diff(tot)).sum::<u128>()
                    })
                    .sum();
                let dist = ratio::from_u128(num, 2 * width * src.total * qs as u128);
                if worst.as_ref().is_none_or(|w| dist > w.0) {
                    worst = Some((dist, si, ti));
                }
            }
        }
        let (worst_distance, witness_source, ti) = worst.ok_or(Error::EmptySupport)?;
        let bound = std::cmp::min(ratio::one(), Rational::from_integer((2 * step as i64 + 2).into()) * eps);
        out.push(StepMargin {
            step,
            worst_distance,
            bound,
            witness_source,
            witness_tamper: tampers[ti].clone(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(s: &str) -> BitString {
        BitString::parse(s).unwrap()
    }

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    const SHAPE: AltExtShape = AltExtShape { d: 2, t: 4, q_input: 4 };

    #[test]
    fn topheavy_examples() {
        assert_eq!(topheavy_map(&b("0")).unwrap().elems, set(&[1, 4]));
        assert_eq!(topheavy_map(&b("1")).unwrap().elems, set(&[2, 3]));
        assert_eq!(topheavy_map(&b("10")).unwrap().elems, set(&[2, 3, 5, 8]));
        assert!(topheavy_map(&BitString::empty()).is_err());
        assert_eq!(is_top_heavy(&set(&[2, 3]), &set(&[1, 4]), 4), Some(2));
        assert_eq!(is_top_heavy(&set(&[1, 4]), &set(&[1, 4]), 4), None);
    }

    #[test]
    fn distinct_images_are_pairwise_top_heavy_for_small_m() {
        for m in 1..=5 {
            let images: Vec<_> = BitString::all(m).map(|mu| topheavy_map(&mu).unwrap()).collect();
            for a in &images {
                assert_eq!(a.elems.len(), 2 * m);
                assert!(a.elems.iter().all(|&e| (1..=4 * m).contains(&e)));
                for c in &images {
                    if a != c {
                        assert!(is_top_heavy(&a.elems, &c.elems, 4 * m).is_some());
                    }
                }
            }
        }
    }

    #[test]
    fn la_mac_examples() {
        let rows: Vec<_> = ["00", "01", "10", "11"].iter().map(|s| b(s)).collect();
        assert_eq!(la_mac(&rows, &b("0")).unwrap(), vec![b("00"), b("11")]);
        assert_eq!(la_mac(&rows, &b("1")).unwrap(), vec![b("01"), b("10")]);
        assert!(la_mac(&rows, &b("01")).is_err());
    }

    #[test]
    fn zero_steps_and_determinism() {
        let x = b("10110010");
        let q = b("0110");
        let s0 = b("01");
        let tr = alt_extract(&x, &q, &s0, AltExtShape { t: 0, ..SHAPE }).unwrap();
        assert_eq!(tr.s_rows, vec![s0.clone()]);
        assert_eq!(tr.r_rows, vec![two_source_ip(&s0, &x, 2).unwrap()]);
        let a = alt_extract(&x, &q, &s0, SHAPE).unwrap();
        assert_eq!(a, alt_extract(&x, &q, &s0, SHAPE).unwrap());
        assert_eq!(a.s_rows.len(), 5);
        assert!(a.r_rows.iter().all(|r| r.len() == 2));
        assert_eq!(la_ext(&x, &q, &s0, SHAPE).unwrap().len(), 4);
        assert_eq!(la_ext(&x, &q, &s0, AltExtShape { t: 1, ..SHAPE }).unwrap().len(), 1);
    }

    #[test]
    fn rows_follow_the_recurrence() {
        let x = b("11010011");
        let q = b("101");
        let s0 = b("10");
        let tr = alt_extract(&x, &q, &s0, SHAPE).unwrap();
        assert_eq!(tr.q_padding, 1);
        let qp = b("1010");
        for i in 1..=4 {
            assert_eq!(tr.s_rows[i], poly_hash(&qp, &tr.r_rows[i - 1], 2).unwrap());
            assert_eq!(tr.r_rows[i], poly_hash(&x, &tr.s_rows[i], 2).unwrap());
        }
        assert!(alt_extract(&x, &q, &b("01"), SHAPE).is_err());
    }

    #[test]
    fn v_rows_halve_in_length() {
        let x = b("1101001110100101");
        let xbar = vec![b("11010011"), b("00110101")];
        let q = b("1001");
        let tr = alt_extract_v(&x, &xbar, &q, &b("10"), AltExtShape { d: 2, t: 2, q_input: 4 }, 2).unwrap();
        let lens: Vec<_> = tr.v_rows.iter().map(BitString::len).collect();
        assert_eq!(lens, [4, 2]);
        let one = alt_extract_v(&x, &xbar[..1], &q, &b("10"), AltExtShape { d: 2, t: 1, q_input: 4 }, 3)
            .unwrap();
        assert_eq!(one.v_rows[0].len(), 3);
        assert!(alt_extract_v(&x, &xbar, &q, &b("10"), SHAPE, 1).is_err());
    }

    #[test]
    fn margins_at_micro_scale() {
        use crate::distoracle::FlatFamily;
        let shape = AltExtShape { d: 1, t: 4, q_input: 2 };
        let mut sources: Vec<SourceSpec> = vec![SourceSpec::Uniform { n: 4 }];
        sources.extend(FlatFamily { n: 4, k: 3, cap: 8, extra: 0, seed: 0 }.sources());
        let margins = lookahead_margins(4, 2, 1, shape, &sources, &ratio::rat(1, 8)).unwrap();
        assert_eq!(margins.len(), 4);
        for m in &margins {
            assert!(m.worst_distance <= ratio::one());
            assert_eq!(m.witness_tamper.len(), 4);
        }
        assert_eq!(margins[0].bound, ratio::rat(1, 2));
        assert_eq!(margins[3].bound, ratio::one());
    }

    proptest! {
        #[test]
        fn rows_before_the_first_changed_seed_agree(x in 0u64..256, q in 0u64..16, q2 in 0u64..16) {
            let xb = BitString::from_u64(x, 8);
            let qa = BitString::from_u64(q, 4);
            let qb = BitString::from_u64(q2, 4);
            let a = alt_extract(&xb, &qa, &qa.prefix(2).unwrap(), SHAPE).unwrap();
            let c = alt_extract(&xb, &qb, &qb.prefix(2).unwrap(), SHAPE).unwrap();
            let first = (0..=4).find(|&i| a.s_rows[i] != c.s_rows[i]).unwrap_or(5);
            for j in 0..first {
                prop_assert_eq!(&a.r_rows[j], &c.r_rows[j]);
            }
        }
    }
}
