//! Parameter profiles for both condensers and both protocols, with
//! mode-dependent validation.

use serde::{Deserialize, Serialize};

use crate::primitives::{EditCode, SomewhereCond};
use crate::ratio::{self, Rational};
use crate::{Error, Result};

pub const PROFILE_SCHEMA: &str = "nmcond.profile/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Enforces the stated magnitude inequalities; shape checks only.
    Paper,
    /// Structural relations plus the constraints of the desk instantiations.
    Desk,
}

/// Lengths for the seeded condenser built from Ext, the look-ahead MAC and an
/// inner-product nmExt.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NmCondParams {
    pub n: usize,
    pub k: u64,
    pub ell: u64,
    /// Seed-length parameter of the construction.
    pub d: usize,
    pub y1_len: usize,
    pub y2_len: usize,
    /// Length of each look-ahead row.
    pub row_len: usize,
    pub t: usize,
    pub s0_len: usize,
    /// Output length of Ext(x, y1).
    pub w_len: usize,
    /// Output length of nmExt(w, y2).
    pub v1_len: usize,
}

/// Lengths for the condenser built from a somewhere condenser and V rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NmCondLinearParams {
    pub n: usize,
    pub k: u64,
    pub ell: u64,
    pub d: usize,
    pub rows: usize,
    /// Somewhere condenser used in desk mode; paper mode only records `sub_len`.
    pub cond: Option<SomewhereCond>,
    pub sub_len: usize,
    /// Output length of nmExt(x_i, y1).
    pub nm_out: usize,
    pub y1_len: usize,
    pub y2_len: usize,
    pub w_len: usize,
    pub nm2_len: usize,
    pub s0_len: usize,
    pub row_len: usize,
    /// The s of the V rows: V_i has 2^(C-i) v_unit bits.
    pub v_unit: usize,
}

/// Lengths for the two-round protocol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AkaParams {
    pub n: usize,
    pub k: u64,
    pub s: u64,
    pub d: usize,
    pub y1_len: usize,
    pub y2_len: usize,
    pub y3_len: usize,
    pub row_len: usize,
    pub t: usize,
    pub s0_len: usize,
    pub r1_len: usize,
    pub t1_len: usize,
    pub tag_len: usize,
    pub w_len: usize,
    pub key_len: usize,
}

/// Lengths for the multi-round protocol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Aka2Params {
    pub n: usize,
    pub k: u64,
    pub s: u64,
    pub ell: u64,
    pub d1: usize,
    /// Repetition factor of the edit code; each message bit takes repeat + 2 bits.
    pub repeat: usize,
    pub lambda_c: usize,
    #[serde(with = "ratio::text")]
    pub rho: Rational,
    #[serde(with = "ratio::text")]
    pub e: Rational,
    pub d2: usize,
    pub phases: usize,
    pub y2_len: usize,
    pub y3_len: usize,
    pub row_len: usize,
    pub t: usize,
    pub s0_len: usize,
    pub t_len: usize,
    pub v_len: usize,
    pub tag_len: usize,
    pub r_len: usize,
    pub w_len: usize,
    pub key_len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterProfile {
    pub schema: String,
    pub name: String,
    pub mode: Mode,
    pub nm_cond: NmCondParams,
    pub nm_cond_linear: NmCondLinearParams,
    pub aka: AkaParams,
    pub aka2: Aka2Params,
}

/// One failed clause, named by the relation it checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub section: String,
    pub clause: String,
    pub detail: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {} ({})", self.section, self.clause, self.detail)
    }
}

struct Checker {
    section: &'static str,
    out: Vec<Violation>,
}

impl Checker {
    fn new(section: &'static str) -> Self {
        Checker { section, out: Vec::new() }
    }

    fn check(&mut self, ok: bool, clause: &str, detail: String) {
        if !ok {
            self.out.push(Violation { section: self.section.into(), clause: clause.into(), detail });
        }
    }
}

fn sq(x: usize) -> u64 {
    (x as u64) * (x as u64)
}

impl NmCondParams {
    /// Rows of laMAC: two per bit of y1.
    pub fn v2_rows(&self) -> usize {
        2 * self.y1_len
    }

    pub fn output_len(&self) -> usize {
        self.v1_len + self.v2_rows() * self.row_len
    }

    pub fn seed_len(&self) -> usize {
        self.y1_len + self.y2_len
    }

    pub fn violations(&self, mode: Mode) -> Vec<Violation> {
        let mut c = Checker::new("nm_cond");
        let p = self;
        c.check(p.t == 4 * p.y1_len, "t = 4*|y1|", format!("t={}, |y1|={}", p.t, p.y1_len));
        c.check(p.s0_len <= p.y2_len, "|s0| <= |y2|", format!("{} > {}", p.s0_len, p.y2_len));
        c.check(p.row_len > 0 && p.y1_len > 0, "rows and y1 nonempty", String::new());
        match mode {
            Mode::Paper => {
                let d = p.d;
                c.check(p.k >= 60 * sq(d), "k >= 60*d^2", format!("k={}, 60d^2={}", p.k, 60 * sq(d)));
                c.check(p.y1_len == d, "|y1| = d", format!("|y1|={}", p.y1_len));
                c.check(p.row_len == d, "row = d", format!("row={}", p.row_len));
                c.check(d as u64 > 5 * p.ell, "d > 5*ell", format!("d={d}, ell={}", p.ell));
                c.check(p.y2_len as u64 == 12 * sq(d), "|y2| = 12*d^2", format!("|y2|={}", p.y2_len));
                c.check(p.w_len as u64 == 20 * sq(d), "|w| = 20*d^2", format!("|w|={}", p.w_len));
                c.check(p.v1_len as u64 == 8 * sq(d), "|v1| = 8*d^2", format!("|v1|={}", p.v1_len));
                c.check(p.s0_len == 40 * d, "|s0| = 40*d", format!("|s0|={}", p.s0_len));
                let v2 = p.v2_rows() * p.row_len;
                c.check(
                    p.v1_len as u64 >= v2 as u64 + p.ell,
                    "|v1| >= |v2| + s",
                    format!("|v1|={}, |v2|={v2}", p.v1_len),
                );
            }
            Mode::Desk => {
                c.check(p.w_len == p.y2_len, "|w| = |y2| (inner-product nmExt)", format!("{} vs {}", p.w_len, p.y2_len));
                c.check(p.v1_len > 0 && p.w_len % p.v1_len == 0, "|v1| divides |w|", format!("{} / {}", p.w_len, p.v1_len));
                c.check(p.w_len <= p.n, "|w| <= n", format!("{} > {}", p.w_len, p.n));
                c.check(p.w_len.max(p.y1_len) <= 16 && p.v1_len <= 16, "field widths <= 16", String::new());
                c.check(p.s0_len % p.row_len == 0, "row divides |s0|", format!("{} / {}", p.s0_len, p.row_len));
                c.check(p.row_len <= 16 && p.row_len <= p.y2_len, "row <= min(16, |y2|)", String::new());
            }
        }
        c.out
    }
}

impl NmCondLinearParams {
    pub fn v_row_lens(&self) -> Vec<usize> {
        (1..=self.rows).map(|i| crate::lookahead::v_row_len(self.rows, i, self.v_unit)).collect()
    }

    pub fn v_total(&self) -> usize {
        self.v_row_lens().iter().sum()
    }

    pub fn output_len(&self) -> usize {
        self.nm2_len + self.v_total()
    }

    pub fn seed_len(&self) -> usize {
        self.y1_len + self.y2_len
    }

    pub fn violations(&self, mode: Mode) -> Vec<Violation> {
        let mut c = Checker::new("nm_cond_linear");
        let p = self;
        c.check(p.rows >= 1, "C >= 1", String::new());
        c.check(p.s0_len <= p.y2_len, "|s0| <= |y2|", format!("{} > {}", p.s0_len, p.y2_len));
        c.check(p.y1_len == p.d, "|y1| = d", format!("|y1|={}", p.y1_len));
        let c2 = 1u64 << p.rows.min(62);
        match mode {
            Mode::Paper => {
                let (d, ell, cc) = (p.d as u64, p.ell, p.rows as u64);
                c.check(p.y2_len as u64 == 4 * cc * d + 61 * d + 14 * ell, "d' = 4*C*d + 61*d + 14*ell", format!("d'={}", p.y2_len));
                c.check(p.nm_out as u64 == 6 * c2 * ell, "m' = 6*2^C*ell", format!("m'={}", p.nm_out));
                c.check(p.w_len as u64 == c2 * 10 * ell, "|w| = 2^C*10*ell", format!("|w|={}", p.w_len));
                c.check(p.nm2_len as u64 == c2 * 4 * ell, "|nm2| = 2^C*4*ell", format!("|nm2|={}", p.nm2_len));
                c.check(p.s0_len as u64 == 30 * d + 6 * ell, "|s0| = 30*d + 6*ell", format!("|s0|={}", p.s0_len));
                c.check(p.v_unit as u64 == 2 * ell, "s = 2*ell", format!("s={}", p.v_unit));
                c.check(p.row_len == p.d, "row = d", format!("row={}", p.row_len));
            }
            Mode::Desk => {
                match &p.cond {
                    Some(cond) => {
                        c.check(cond.input_len() == p.n, "Cond input = n", String::new());
                        c.check(cond.rows() == p.rows, "Cond rows = C", String::new());
                        c.check(cond.row_len() == p.sub_len, "Cond row = n'", String::new());
                    }
                    None => c.check(false, "somewhere condenser present", String::new()),
                }
                c.check(p.sub_len == p.y1_len, "n' = |y1| (inner-product nmExt)", format!("{} vs {}", p.sub_len, p.y1_len));
                c.check(p.nm_out > 0 && p.sub_len % p.nm_out == 0, "m' divides n'", String::new());
                c.check(p.w_len == p.y2_len, "|w| = |y2| (inner-product nmExt)", format!("{} vs {}", p.w_len, p.y2_len));
                c.check(p.nm2_len > 0 && p.w_len % p.nm2_len == 0, "|nm2| divides |w|", String::new());
                c.check(p.w_len <= p.n, "|w| <= n", String::new());
                c.check(p.v_row_lens().iter().all(|&l| l <= p.nm_out), "V rows <= m'", String::new());
                c.check(p.s0_len % p.row_len == 0, "row divides |s0|", String::new());
                c.check(
                    [p.w_len, p.y1_len, p.nm_out, p.nm2_len, p.row_len].iter().all(|&w| w <= 16)
                        && p.v_row_lens().iter().all(|&l| l <= 16),
                    "field widths <= 16",
                    String::new(),
                );
            }
        }
        c.out
    }
}

impl AkaParams {
    /// X-dependent transcript bits: R1 (the MAC key), T1 and the tag T2.
    pub fn leakage(&self) -> u64 {
        (self.r1_len + self.t1_len + self.tag_len) as u64
    }

    pub fn violations(&self, mode: Mode) -> Vec<Violation> {
        let mut c = Checker::new("aka");
        let p = self;
        c.check(p.t == 4 * p.y1_len, "t = 4*|y1|", format!("t={}, |y1|={}", p.t, p.y1_len));
        c.check(p.s0_len <= p.y2_len, "|s0| <= |y2|", String::new());
        c.check(p.r1_len == 2 * p.tag_len, "key = 2*tag", format!("key={}, tag={}", p.r1_len, p.tag_len));
        c.check(p.leakage() == 7 * p.s, "leakage = 4s + s + 2s", format!("{} vs s={}", p.leakage(), p.s));
        match mode {
            Mode::Paper => {
                let (d, s) = (p.d as u64, p.s);
                c.check(d > 202 * s, "d > 202*s", format!("d={d}"));
                c.check(p.k >= 15 * d * d, "k >= 15*d^2", format!("k={}", p.k));
                c.check(p.y1_len as u64 == d, "|Y1| = d", String::new());
                c.check(p.row_len as u64 == d, "row = d", String::new());
                c.check(p.y2_len as u64 == 12 * d * d, "|Y2| = 12*d^2", format!("|Y2|={}", p.y2_len));
                c.check(p.y3_len as u64 == 50 * d * d, "|Y3| = 50*d^2", format!("|Y3|={}", p.y3_len));
                c.check(p.s0_len as u64 == 40 * d, "|s0| = 40*d", String::new());
                c.check(p.r1_len as u64 == 4 * s, "|R1| = 4s", format!("|R1|={}", p.r1_len));
                c.check(p.t1_len as u64 == s, "|T1| = s", format!("|T1|={}", p.t1_len));
                c.check(p.tag_len as u64 == 2 * s, "v = 2s", format!("v={}", p.tag_len));
                c.check(p.w_len as u64 == d, "|W| = d", String::new());
            }
            Mode::Desk => {
                c.check(p.r1_len <= p.n && p.key_len <= p.n, "Ext outputs <= n", String::new());
                c.check(p.y1_len.max(p.r1_len) <= 16 && p.w_len.max(p.key_len) <= 16, "field widths <= 16", String::new());
                c.check(p.t1_len > 0 && p.y3_len % p.t1_len == 0, "|T1| divides |Y3|", String::new());
                c.check(p.s0_len % p.row_len == 0, "row divides |s0|", String::new());
                c.check(p.row_len <= 16 && p.row_len <= p.y2_len, "row <= min(16, |Y2|)", String::new());
                c.check(p.tag_len <= 8, "tag <= 8", String::new());
            }
        }
        c.out
    }
}

impl Aka2Params {
    pub fn lambda_m(&self) -> usize {
        self.d1
    }

    /// V, V', T and T' of every phase, plus the final MAC key R.
    pub fn leakage(&self) -> u64 {
        (self.phases * (2 * self.v_len + 2 * self.t_len) + self.r_len) as u64
    }

    /// 5 λ_c, the allowance for X-dependent transcript bits.
    pub fn leakage_allowance(&self) -> u64 {
        5 * self.lambda_c as u64
    }

    pub fn violations(&self, mode: Mode) -> Vec<Violation> {
        let mut c = Checker::new("aka2");
        let p = self;
        let lc = Rational::from_integer((p.lambda_c as i64).into());
        c.check(
            p.rho.clone() * lc == Rational::from_integer((p.d1 as i64).into()),
            "lambda_c = lambda_m / rho",
            format!("lambda_c={}, d1={}, rho={}", p.lambda_c, p.d1, ratio::to_text(&p.rho)),
        );
        c.check(p.phases * p.d2 == p.lambda_c, "L*d2 = lambda_c", format!("L={}, d2={}", p.phases, p.d2));
        c.check(p.t == 4 * p.d2, "t = 4*d2", format!("t={}", p.t));
        c.check(p.r_len == 2 * p.tag_len, "key = 2*tag", format!("R={}, tag={}", p.r_len, p.tag_len));
        c.check(p.s0_len <= p.y2_len, "|s0| <= |Y_i2|", String::new());
        c.check(p.w_len == p.d1, "|W| = d1", String::new());
        c.check(
            p.leakage() <= p.leakage_allowance(),
            "leakage <= 5*d1/rho",
            format!("{} > {}", p.leakage(), p.leakage_allowance()),
        );
        match mode {
            Mode::Paper => {
                let (d1, d2, s, ell) = (p.d1 as u64, p.d2 as u64, p.s, p.ell);
                let lc = p.lambda_c as u64;
                c.check(d1 > 2 * s, "d1 > 2s", format!("d1={d1}"));
                c.check(d2 > 404 * ell, "d2 > 404*ell", format!("d2={d2}"));
                c.check(p.k >= lc + 2 * s + 15 * d2 * d2, "k >= d1/rho + 2s + 15*d2^2", format!("k={}", p.k));
                c.check(p.tag_len as u64 == 2 * lc, "v = 2*d1/rho", format!("v={}", p.tag_len));
                c.check(p.r_len as u64 == 4 * lc, "|R| = 4*d1/rho", format!("|R|={}", p.r_len));
                c.check(p.y2_len as u64 == 12 * d2 * d2, "|Y_i2| = 12*d2^2", String::new());
                c.check(p.y3_len as u64 == 50 * d2 * d2, "|Y_i3| = 50*d2^2", String::new());
                c.check(p.s0_len as u64 == 40 * d2, "|s0| = 40*d2", String::new());
                c.check(p.t_len as u64 == 2 * ell && p.v_len as u64 == 2 * ell, "|T_i| = |V_i| = 2*ell", String::new());
                c.check(p.row_len == p.d2, "row = d2", String::new());
            }
            Mode::Desk => {
                c.check(p.lambda_c == p.d1 * (p.repeat + 2), "lambda_c = d1*(repeat+2)", String::new());
                if p.repeat > 0 && p.d1 <= 10 {
                    let certified = EditCode::new(p.repeat, p.d1).and_then(|c| c.certify());
                    c.check(
                        certified.as_ref() == Ok(&p.e),
                        "e = certified edit-code distance",
                        format!("e={}, certified {:?}", ratio::to_text(&p.e), certified.map(|e| ratio::to_text(&e))),
                    );
                }
                c.check(p.r_len <= p.n && p.key_len <= p.n && p.v_len <= p.n, "Ext outputs <= n", String::new());
                c.check(
                    p.r_len.max(p.d1) <= 16 && p.v_len.max(p.d2) <= 16 && p.key_len.max(p.w_len) <= 16,
                    "field widths <= 16",
                    String::new(),
                );
                c.check(p.t_len > 0 && p.y3_len % p.t_len == 0, "|T_i| divides |Y_i3|", String::new());
                c.check(p.s0_len % p.row_len == 0, "row divides |s0|", String::new());
                c.check(p.row_len <= 16 && p.row_len <= p.y2_len, "row <= min(16, |Y_i2|)", String::new());
                c.check(p.tag_len <= 8, "tag <= 8", String::new());
            }
        }
        c.out
    }
}

/// Every violated clause for the profile's mode. Empty means valid.
pub fn validate_profile(p: &ParameterProfile) -> Vec<Violation> {
    let mut out = Vec::new();
    if p.schema != PROFILE_SCHEMA {
        out.push(Violation {
            section: "profile".into(),
            clause: "schema".into(),
            detail: format!("unknown schema {:?}", p.schema),
        });
    }
    out.extend(p.nm_cond.violations(p.mode));
    out.extend(p.nm_cond_linear.violations(p.mode));
    out.extend(p.aka.violations(p.mode));
    out.extend(p.aka2.violations(p.mode));
    out
}

/// Errors with the first violated clause, if any.
pub fn require_valid(p: &ParameterProfile) -> Result<()> {
    match validate_profile(p).into_iter().next() {
        Some(v) => Err(Error::Profile(v.to_string())),
        None => Ok(()),
    }
}

/// Named fields of a concatenated output, in order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub fields: Vec<LayoutField>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutField {
    pub name: String,
    pub offset: usize,
    pub len: usize,
}

impl Layout {
    fn build(parts: Vec<(String, usize)>) -> Self {
        let mut offset = 0;
        let fields = parts
            .into_iter()
            .map(|(name, len)| {
                let f = LayoutField { name, offset, len };
                offset += len;
                f
            })
            .collect();
        Layout { fields }
    }

    pub fn total(&self) -> usize {
        self.fields.last().map_or(0, |f| f.offset + f.len)
    }

    pub fn field(&self, name: &str) -> Option<&LayoutField> {
        self.fields.iter().find(|f| f.name == name)
    }
}

/// v1 first, then the laMAC rows in increasing index order.
pub fn nm_cond_layout(p: &NmCondParams) -> Layout {
    let mut parts = vec![("v1".to_string(), p.v1_len)];
    parts.extend((1..=p.v2_rows()).map(|i| (format!("v2.{i}"), p.row_len)));
    Layout::build(parts)
}

/// nm2(w, y2) first, then V_1..V_C.
pub fn nm_cond_linear_layout(p: &NmCondLinearParams) -> Layout {
    let mut parts = vec![("nm2".to_string(), p.nm2_len)];
    parts.extend(p.v_row_lens().into_iter().enumerate().map(|(i, l)| (format!("v.{}", i + 1), l)));
    Layout::build(parts)
}

/// Seed split y = (y1, y2).
pub fn seed_layout(y1: usize, y2: usize) -> Layout {
    Layout::build(vec![("y1".into(), y1), ("y2".into(), y2)])
}

impl ParameterProfile {
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "paper" => Ok(paper()),
            "desk" => Ok(desk()),
            "micro" => Ok(micro()),
            _ => Err(Error::invalid(format!("unknown profile {name:?}"))),
        }
    }
}

/// k minus the leakage minus 2s, at least one bit.
pub fn default_key_len(k: u64, leakage: u64, s: u64) -> usize {
    k.saturating_sub(leakage + 2 * s).max(1) as usize
}

/// Paper-mode shapes at s = ell = 1 with the smallest d meeting each
/// construction's inequalities.
pub fn paper() -> ParameterProfile {
    let d = 6usize;
    let nm_cond = NmCondParams {
        n: 4320,
        k: 60 * sq(d),
        ell: 1,
        d,
        y1_len: d,
        y2_len: 12 * d * d,
        row_len: d,
        t: 4 * d,
        s0_len: 40 * d,
        w_len: 20 * d * d,
        v1_len: 8 * d * d,
    };
    let nm_cond_linear = NmCondLinearParams {
        n: 4096,
        k: 3277,
        ell: 1,
        d,
        rows: 2,
        cond: None,
        sub_len: 428,
        nm_out: 24,
        y1_len: d,
        y2_len: 4 * 2 * d + 61 * d + 14,
        w_len: 40,
        nm2_len: 16,
        s0_len: 30 * d + 6,
        row_len: d,
        v_unit: 2,
    };
    let da = 203usize;
    let aka = AkaParams {
        n: 1 << 20,
        k: 15 * sq(da),
        s: 1,
        d: da,
        y1_len: da,
        y2_len: 12 * da * da,
        y3_len: 50 * da * da,
        row_len: da,
        t: 4 * da,
        s0_len: 40 * da,
        r1_len: 4,
        t1_len: 1,
        tag_len: 2,
        w_len: da,
        key_len: 0, // set from the leakage below
    };
    let aka = AkaParams { key_len: default_key_len(aka.k, aka.leakage(), aka.s), ..aka };
    let (d1, d2) = (810usize, 405usize);
    let lambda_c = 2 * d1;
    let aka2 = Aka2Params {
        n: 1 << 22,
        k: lambda_c as u64 + 2 * 8 + 15 * sq(d2),
        s: 8,
        ell: 1,
        d1,
        repeat: 0,
        lambda_c,
        rho: ratio::rat(1, 2),
        e: ratio::rat(1, 4),
        d2,
        phases: 4,
        y2_len: 12 * d2 * d2,
        y3_len: 50 * d2 * d2,
        row_len: d2,
        t: 4 * d2,
        s0_len: 40 * d2,
        t_len: 2,
        v_len: 2,
        tag_len: 2 * lambda_c,
        r_len: 4 * lambda_c,
        w_len: d1,
        key_len: 0, // set from the leakage below
    };
    let aka2 = Aka2Params { key_len: default_key_len(aka2.k, aka2.leakage(), aka2.s), ..aka2 };
    ParameterProfile {
        schema: PROFILE_SCHEMA.into(),
        name: "paper".into(),
        mode: Mode::Paper,
        nm_cond,
        nm_cond_linear,
        aka,
        aka2,
    }
}

/// Desk-scale profile used for seeded honest runs and golden traces.
pub fn desk() -> ParameterProfile {
    ParameterProfile {
        schema: PROFILE_SCHEMA.into(),
        name: "desk".into(),
        mode: Mode::Desk,
        nm_cond: NmCondParams {
            n: 16,
            k: 12,
            ell: 1,
            d: 2,
            y1_len: 2,
            y2_len: 12,
            row_len: 2,
            t: 8,
            s0_len: 4,
            w_len: 12,
            v1_len: 12,
        },
        nm_cond_linear: NmCondLinearParams {
            n: 8,
            k: 6,
            ell: 1,
            d: 4,
            rows: 2,
            cond: Some(SomewhereCond::BlockSplit { n: 8, rows: 2 }),
            sub_len: 4,
            nm_out: 4,
            y1_len: 4,
            y2_len: 8,
            w_len: 8,
            nm2_len: 8,
            s0_len: 4,
            row_len: 2,
            v_unit: 2,
        },
        aka: AkaParams {
            n: 64,
            k: 48,
            s: 2,
            d: 4,
            y1_len: 4,
            y2_len: 16,
            y3_len: 16,
            row_len: 4,
            t: 16,
            s0_len: 8,
            r1_len: 8,
            t1_len: 2,
            tag_len: 4,
            w_len: 4,
            key_len: 8,
        },
        aka2: Aka2Params {
            n: 64,
            k: 48,
            s: 2,
            ell: 1,
            d1: 4,
            repeat: 2,
            lambda_c: 16,
            rho: ratio::rat(1, 4),
            e: ratio::rat(1, 8),
            d2: 4,
            phases: 4,
            y2_len: 16,
            y3_len: 16,
            row_len: 4,
            t: 16,
            s0_len: 8,
            t_len: 2,
            v_len: 2,
            tag_len: 8,
            r_len: 16,
            w_len: 4,
            key_len: 8,
        },
    }
}

/// The smallest desk profile: every randomness space is enumerable.
pub fn micro() -> ParameterProfile {
    ParameterProfile {
        schema: PROFILE_SCHEMA.into(),
        name: "micro".into(),
        mode: Mode::Desk,
        nm_cond: NmCondParams {
            n: 4,
            k: 3,
            ell: 1,
            d: 1,
            y1_len: 1,
            y2_len: 2,
            row_len: 1,
            t: 4,
            s0_len: 1,
            w_len: 2,
            v1_len: 2,
        },
        nm_cond_linear: NmCondLinearParams {
            n: 4,
            k: 3,
            ell: 1,
            d: 2,
            rows: 2,
            cond: Some(SomewhereCond::BlockSplit { n: 4, rows: 2 }),
            sub_len: 2,
            nm_out: 2,
            y1_len: 2,
            y2_len: 2,
            w_len: 2,
            nm2_len: 1,
            s0_len: 1,
            row_len: 1,
            v_unit: 1,
        },
        aka: AkaParams {
            n: 4,
            k: 3,
            s: 1,
            d: 1,
            y1_len: 1,
            y2_len: 2,
            y3_len: 2,
            row_len: 2,
            t: 4,
            s0_len: 2,
            r1_len: 4,
            t1_len: 1,
            tag_len: 2,
            w_len: 1,
            key_len: 1,
        },
        aka2: Aka2Params {
            n: 4,
            k: 3,
            s: 1,
            ell: 1,
            d1: 1,
            repeat: 2,
            lambda_c: 4,
            rho: ratio::rat(1, 4),
            e: ratio::rat(1, 2),
            d2: 2,
            phases: 2,
            y2_len: 2,
            y3_len: 2,
            row_len: 2,
            t: 8,
            s0_len: 2,
            t_len: 1,
            v_len: 1,
            tag_len: 1,
            r_len: 2,
            w_len: 1,
            key_len: 1,
        },
    }
}
