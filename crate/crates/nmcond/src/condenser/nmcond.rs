use serde::{Deserialize, Serialize};

use super::profile::{Mode, NmCondLinearParams, NmCondParams, Violation};
use crate::bitcore::BitString;
use crate::distoracle::{inner_error_matrix, verify_nm_condenser, NmCondReport, SourceSpec};
use crate::lookahead::{alt_extract, alt_extract_v, la_mac, AltExtShape, AltExtTrace};
use crate::primitives::{nm_ip, poly_hash};
use crate::ratio::{self, Rational};
use crate::{Error, Result};

/// z = v1 ∥ v2 together with the intermediate values that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CondenserOutput {
    pub v1: BitString,
    /// laMAC rows for nm_cond, V_1..V_C for nm_cond_linear.
    pub v2: Vec<BitString>,
    pub z: BitString,
    pub w: BitString,
    pub trace: AltExtTrace,
}

fn first_violation(v: Vec<Violation>) -> Result<()> {
    match v.into_iter().next() {
        Some(v) => Err(Error::Profile(v.to_string())),
        None => Ok(()),
    }
}

fn split_seed(x: &BitString, y: &BitString, n: usize, y1: usize, y2: usize) -> Result<(BitString, BitString)> {
    if x.len() != n {
        return Err(Error::DomainMismatch(n, x.len()));
    }
    if y.len() != y1 + y2 {
        return Err(Error::DomainMismatch(y1 + y2, y.len()));
    }
    Ok((y.prefix(y1)?, y.slice(y1, y1 + y2)?))
}

/// w = Ext(x, y1), R = laExt(x, (y2, s0)), z = (nmExt(w, y2), laMAC_R(y1)).
///
/// Runs the desk instantiations, so the desk-mode clauses must hold.
pub fn nm_cond(x: &BitString, y: &BitString, p: &NmCondParams) -> Result<CondenserOutput> {
    first_violation(p.violations(Mode::Desk))?;
    nm_cond_checked(x, y, p)
}

fn nm_cond_checked(x: &BitString, y: &BitString, p: &NmCondParams) -> Result<CondenserOutput> {
    let (y1, y2) = split_seed(x, y, p.n, p.y1_len, p.y2_len)?;
    let w = poly_hash(x, &y1, p.w_len)?;
    let shape = AltExtShape { d: p.row_len, t: p.t, q_input: p.y2_len };
    let trace = alt_extract(x, &y2, &y2.prefix(p.s0_len)?, shape)?;
    let v1 = nm_ip(&w, &y2, p.v1_len)?;
    let v2 = la_mac(trace.la_rows(), &y1)?;
    let z = v1.concat(&BitString::concat_all(&v2));
    Ok(CondenserOutput { v1, v2, z, w, trace })
}

/// (x_1..x_C) = Cond(x), xbar_i = nmExt(x_i, y1), w = Ext(x, y1),
/// V = alternating extraction over (x, xbar) with q = y2,
/// z = (nmExt(w, y2), V_1..V_C).
pub fn nm_cond_linear(x: &BitString, y: &BitString, p: &NmCondLinearParams) -> Result<CondenserOutput> {
    first_violation(p.violations(Mode::Desk))?;
    let (y1, y2) = split_seed(x, y, p.n, p.y1_len, p.y2_len)?;
    let cond = p.cond.as_ref().ok_or_else(|| Error::Profile("somewhere condenser present".into()))?;
    let xbar = cond
        .condense(x)?
        .iter()
        .map(|xi| nm_ip(xi, &y1, p.nm_out))
        .collect::<Result<Vec<_>>>()?;
    let w = poly_hash(x, &y1, p.w_len)?;
    let shape = AltExtShape { d: p.row_len, t: p.rows, q_input: p.y2_len };
    let trace = alt_extract_v(x, &xbar, &y2, &y2.prefix(p.s0_len)?, shape, p.v_unit)?;
    let v1 = nm_ip(&w, &y2, p.nm2_len)?;
    let v2 = trace.v_rows.clone();
    let z = v1.concat(&BitString::concat_all(&v2));
    Ok(CondenserOutput { v1, v2, z, w, trace })
}

/// Worst inner error over one tampering case. Case 1 keeps y1 and changes
/// y2; case 2 changes y1. `v1` and `v2` measure only that part of Cond(X, y)
/// while conditioning on the full tampered output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseMargin {
    pub case: u8,
    pub pairs: usize,
    #[serde(with = "ratio::text")]
    pub full: Rational,
    #[serde(with = "ratio::text")]
    pub v1: Rational,
    #[serde(with = "ratio::text")]
    pub v2: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NmCondAnalysis {
    pub report: NmCondReport,
    pub cases: Vec<CaseMargin>,
}

/// Exact nested-condition report for nm_cond plus per-case margins.
pub fn analyze_nm_cond(
    p: &NmCondParams,
    k: u32,
    k_prime: u32,
    sources: &[SourceSpec],
    literal_cap: u64,
) -> Result<NmCondAnalysis> {
    first_violation(p.violations(Mode::Desk))?;
    let (n, d, m) = (p.n, p.seed_len(), p.output_len());
    let table: Vec<Vec<BitString>> = BitString::all(n)
        .map(|x| BitString::all(d).map(|y| Ok(nm_cond_checked(&x, &y, p)?.z)).collect())
        .collect::<Result<_>>()?;
    let full = |x: &BitString, y: &BitString| table[x.to_u64() as usize][y.to_u64() as usize].clone();
    let mut report = verify_nm_condenser(&full, n, d, m, k, k_prime, sources, literal_cap)?;
    report.primitive = "nm_cond".into();

    let m1 = p.v1_len;
    let part1 = |x: &BitString, y: &BitString| full(x, y).prefix(m1).expect("v1 prefix");
    let part2 = |x: &BitString, y: &BitString| full(x, y).slice(m1, m).expect("v2 suffix");
    let seeds = 1usize << d;
    let y1_of = |y: usize| y >> p.y2_len;
    let mut cases: Vec<CaseMargin> = (1..=2)
        .map(|case| CaseMargin { case, pairs: 0, full: Rational::from_integer(0.into()), v1: Rational::from_integer(0.into()), v2: Rational::from_integer(0.into()) })
        .collect();
    for y in 0..seeds {
        for y2 in (0..seeds).filter(|&y2| y2 != y) {
            cases[usize::from(y1_of(y) != y1_of(y2))].pairs += 1;
        }
    }
    for src in sources {
        let ef = inner_error_matrix(&full, &full, n, d, m, m, k_prime, src)?;
        let e1 = inner_error_matrix(&part1, &full, n, d, m1, m, k_prime.min(m1 as u32), src)?;
        let e2 = inner_error_matrix(&part2, &full, n, d, m - m1, m, k_prime.min((m - m1) as u32), src)?;
        for y in 0..seeds {
            for y2 in (0..seeds).filter(|&y2| y2 != y) {
                let c = &mut cases[usize::from(y1_of(y) != y1_of(y2))];
                for (slot, e) in [(&mut c.full, &ef), (&mut c.v1, &e1), (&mut c.v2, &e2)] {
                    let v = e[y][y2].clone().expect("off-diagonal");
                    if v > *slot {
                        *slot = v;
                    }
                }
            }
        }
    }
    Ok(NmCondAnalysis { report, cases })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condenser::{desk, micro, nm_cond_layout, nm_cond_linear_layout, paper};
    use crate::distoracle::FlatFamily;
    use crate::primitives::SomewhereCond;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_bits(rng: &mut ChaCha8Rng, len: usize) -> BitString {
        BitString::from_bits((0..len).map(|_| rng.gen::<bool>()))
    }

    #[test]
    fn output_matches_layout() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for prof in [desk(), micro()] {
            let p = &prof.nm_cond;
            let layout = nm_cond_layout(p);
            for _ in 0..20 {
                let x = random_bits(&mut rng, p.n);
                let y = random_bits(&mut rng, p.seed_len());
                let out = nm_cond(&x, &y, p).unwrap();
                assert_eq!(out.z.len(), layout.total());
                assert_eq!(out.v2.len(), 2 * p.y1_len);
                let f = layout.field("v2.1").unwrap();
                assert_eq!(out.z.slice(f.offset, f.offset + f.len).unwrap(), out.v2[0]);
            }
            let p = &prof.nm_cond_linear;
            let layout = nm_cond_linear_layout(p);
            let x = random_bits(&mut rng, p.n);
            let y = random_bits(&mut rng, p.seed_len());
            let out = nm_cond_linear(&x, &y, p).unwrap();
            assert_eq!(out.z.len(), layout.total());
            assert_eq!(out.v2.iter().map(BitString::len).collect::<Vec<_>>(), p.v_row_lens());
        }
    }

    #[test]
    fn paper_shape_is_declared_by_layout() {
        let p = paper().nm_cond;
        let d = p.d;
        let layout = nm_cond_layout(&p);
        assert_eq!(layout.field("v1").unwrap().len, 8 * d * d);
        assert_eq!(layout.fields.len() - 1, 2 * d);
        assert!(layout.fields[1..].iter().all(|f| f.len == d));
        // The desk instantiations cannot run at paper widths.
        let err = nm_cond(&BitString::zeros(p.n), &BitString::zeros(p.seed_len()), &p).unwrap_err();
        assert!(matches!(err, Error::Profile(_)));
    }

    #[test]
    fn v2_rows_follow_the_top_heavy_set_of_y1() {
        let p = desk().nm_cond;
        let x = BitString::from_u64(0xbeef, 16);
        let y = BitString::from_u64(0b10_1100_1010_0110, 14);
        let out = nm_cond(&x, &y, &p).unwrap();
        // y1 = 10: f = {2, 3, 5, 8}.
        let rows = out.trace.la_rows();
        assert_eq!(out.v2, vec![rows[1].clone(), rows[2].clone(), rows[4].clone(), rows[7].clone()]);
        assert_eq!(out.v1, nm_ip(&out.w, &y.slice(2, 14).unwrap(), 12).unwrap());
    }

    #[test]
    fn wrong_lengths_are_rejected() {
        let p = micro().nm_cond;
        assert!(nm_cond(&BitString::zeros(5), &BitString::zeros(3), &p).is_err());
        assert!(nm_cond(&BitString::zeros(4), &BitString::zeros(2), &p).is_err());
        let mut bad = p.clone();
        bad.t = 3;
        let err = nm_cond(&BitString::zeros(4), &BitString::zeros(3), &bad).unwrap_err();
        assert!(err.to_string().contains("t = 4*|y1|"));
    }

    #[test]
    fn linear_uses_condensed_rows() {
        let mut p = micro().nm_cond_linear;
        let x = BitString::parse("1001").unwrap();
        let y = BitString::parse("1101").unwrap();
        let a = nm_cond_linear(&x, &y, &p).unwrap();
        // Swapping rows of a symmetric split changes which block feeds V_1.
        p.cond = Some(SomewhereCond::Projection { n: 4, rows: vec![vec![2, 3], vec![0, 1]] });
        let b = nm_cond_linear(&x, &y, &p).unwrap();
        assert_eq!(a.v1, b.v1);
        assert_eq!(a.trace.s_rows, b.trace.s_rows);
    }

    /// Seed space of two bits: 81 fixed-point-free adversaries, checked literally.
    #[test]
    fn tiny_seed_space_is_cross_checked_literally() {
        let mut p = micro().nm_cond;
        p.y2_len = 1;
        p.w_len = 1;
        p.v1_len = 1;
        let sources: Vec<_> = FlatFamily::exhaustive(4, 3).sources().collect();
        let a = analyze_nm_cond(&p, 3, 1, &sources, 81).unwrap();
        assert!(a.report.literal_checked);
        assert_eq!(a.report.adversaries_covered, "81");
        assert_eq!(a.cases[0].pairs + a.cases[1].pairs, 12);
        assert_eq!(a.cases[0].pairs, 4);
    }
}
