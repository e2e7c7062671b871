use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use num::bigint::BigInt;
use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::family::{FlatFamily, SourceSpec, WeightedSource};
use crate::bitcore::BitString;
use crate::ratio::{self, Rational};
use crate::{Error, Result};

type Func<'a> = &'a dyn Fn(&BitString, &BitString) -> BitString;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub primitive: String,
    pub profile: String,
    #[serde(with = "ratio::text")]
    pub worst_distance: Rational,
    pub witness_source: Option<usize>,
    pub witness_adversary: Option<Vec<u64>>,
    pub sources_checked: usize,
}

/// Lazily tabulated outputs of a two-argument function, keyed by the first
/// argument, one entry per second argument.
struct Table<'a> {
    f: Func<'a>,
    n: usize,
    d: usize,
    m: usize,
    rows: HashMap<u64, Vec<u32>>,
}

impl<'a> Table<'a> {
    fn new(f: Func<'a>, n: usize, d: usize, m: usize) -> Self {
        assert!(m <= 24 && d < 24, "table of {d}-bit seeds and {m}-bit outputs");
        Table { f, n, d, m, rows: HashMap::new() }
    }

    fn row(&mut self, x: u64) -> Result<&[u32]> {
        if !self.rows.contains_key(&x) {
            let xb = BitString::from_u64(x, self.n);
            let mut row = Vec::with_capacity(1 << self.d);
            for y in BitString::all(self.d) {
                let z = (self.f)(&xb, &y);
                if z.len() != self.m {
                    return Err(Error::DomainMismatch(self.m, z.len()));
                }
                row.push(z.to_u64() as u32);
            }
            self.rows.insert(x, row);
        }
        Ok(&self.rows[&x])
    }
}

fn check_sources(sources: &[WeightedSource], n: usize, k: u32) -> Result<()> {
    for (i, s) in sources.iter().enumerate() {
        if s.n != n {
            return Err(Error::DomainMismatch(n, s.n));
        }
        s.require_min_entropy(k, &format!("source {i}"))?;
    }
    Ok(())
}

/// Worst distance of (Ext(X, Y), Y) from (U_m, Y) over the given sources,
/// with Y uniform on d bits.
pub fn verify_strong_extractor(
    ext: Func<'_>,
    n: usize,
    d: usize,
    m: usize,
    k: u32,
    sources: &[SourceSpec],
) -> Result<VerifyReport> {
    let ws: Vec<WeightedSource> = sources.iter().map(|s| s.weighted()).collect::<Result<_>>()?;
    check_sources(&ws, n, k)?;
    let mut table = Table::new(ext, n, d, m);
    let mut worst = Rational::zero();
    let mut witness = None;
    let width = 1u128 << m;
    let mut counts = vec![0u128; 1 << m];
    for (i, src) in ws.iter().enumerate() {
        for &(x, _) in &src.points {
            table.row(x)?;
        }
        let mut num = 0u128;
        for y in 0..1usize << d {
            counts.iter_mut().for_each(|c| *c = 0);
            for &(x, w) in &src.points {
                counts[table.rows[&x][y] as usize] += w;
            }
            num += counts.iter().map(|&c| (c * width).abs_diff(src.total)).sum::<u128>();
        }
        let dist = ratio::from_u128(num, 2 * (1u128 << d) * src.total * width);
        if witness.is_none() || dist > worst {
            worst = dist;
            witness = Some(i);
        }
    }
    Ok(VerifyReport {
        primitive: "strong_ext".into(),
        profile: String::new(),
        worst_distance: worst,
        witness_source: witness,
        witness_adversary: None,
        sources_checked: ws.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoSourceReport {
    /// Worst distance of (Ext(X, Y), Y) from (U, Y).
    #[serde(with = "ratio::text")]
    pub strong_in_y: Rational,
    /// Worst distance of (Ext(X, Y), X) from (U, X).
    #[serde(with = "ratio::text")]
    pub strong_in_x: Rational,
    #[serde(with = "ratio::text")]
    pub worst: Rational,
    pub witness_x: Vec<u64>,
    pub witness_y: Vec<u64>,
}

/// Sum of the `take` largest entries and their indices.
fn top_sum(values: &[u128], take: usize) -> (u128, Vec<u64>) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].cmp(&values[a]).then(a.cmp(&b)));
    idx.truncate(take);
    let sum = idx.iter().map(|&i| values[i]).sum();
    let mut chosen: Vec<u64> = idx.into_iter().map(|i| i as u64).collect();
    chosen.sort_unstable();
    (sum, chosen)
}

/// Exhaustive worst case over all independent pairs of flat sources with
/// min-entropies `k1` on `n1` bits and `k2` on `n2` bits.
///
/// For a fixed X, the strong-in-Y distance is the average over y of the
/// distance of Ext(X, y) from uniform, so the worst flat Y takes the `2^k2`
/// largest per-seed distances. The strong-in-X side is symmetric.
pub fn verify_two_source(
    ext: Func<'_>,
    n1: usize,
    n2: usize,
    m: usize,
    k1: usize,
    k2: usize,
) -> Result<TwoSourceReport> {
    let (size1, size2) = (1usize << k1, 1usize << k2);
    let width = 1u128 << m;
    let mut table = Table::new(ext, n1, n2, m);
    for x in 0..1u64 << n1 {
        table.row(x)?;
    }
    let out = |x: u64, y: usize| table.rows[&x][y] as usize;
    let mut counts = vec![0u128; 1 << m];

    let mut best_y: Option<(Rational, Vec<u64>, Vec<u64>)> = None;
    for xs in FlatFamily::exhaustive(n1, k1).subsets() {
        let per_seed: Vec<u128> = (0..1usize << n2)
            .map(|y| {
                counts.iter_mut().for_each(|c| *c = 0);
                for &x in &xs {
                    counts[out(x, y)] += 1;
                }
                counts.iter().map(|&c| (c * width).abs_diff(size1 as u128)).sum()
            })
            .collect();
        let (sum, ys) = top_sum(&per_seed, size2);
        let dist = ratio::from_u128(sum, 2 * (size1 * size2) as u128 * width);
        if best_y.as_ref().is_none_or(|b| dist > b.0) {
            best_y = Some((dist, xs, ys));
        }
    }

    let mut best_x: Option<(Rational, Vec<u64>, Vec<u64>)> = None;
    for ys in FlatFamily::exhaustive(n2, k2).subsets() {
        let per_source: Vec<u128> = (0..1u64 << n1)
            .map(|x| {
                counts.iter_mut().for_each(|c| *c = 0);
                for &y in &ys {
                    counts[out(x, y as usize)] += 1;
                }
                counts.iter().map(|&c| (c * width).abs_diff(size2 as u128)).sum()
            })
            .collect();
        let (sum, xs) = top_sum(&per_source, size1);
        let dist = ratio::from_u128(sum, 2 * (size1 * size2) as u128 * width);
        if best_x.as_ref().is_none_or(|b| dist > b.0) {
            best_x = Some((dist, xs, ys));
        }
    }

    let (dy, xy, yy) = best_y.ok_or(Error::EmptySupport)?;
    let (dx, xx, yx) = best_x.ok_or(Error::EmptySupport)?;
    let (worst, witness_x, witness_y) =
        if dy >= dx { (dy.clone(), xy, yy) } else { (dx.clone(), xx, yx) };
    Ok(TwoSourceReport { strong_in_y: dy, strong_in_x: dx, worst, witness_x, witness_y })
}

/// Which tampering functions A (with A(y) != y) a verifier ranges over.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdversarySet {
    /// Every fixed-point-free table in lexicographic order, truncated at
    /// `cap`, then `extra` tables drawn with a seeded generator.
    All { cap: u64, extra: u64, seed: u64 },
    Explicit(Vec<Vec<u64>>),
}

impl AdversarySet {
    pub fn exhaustive() -> Self {
        AdversarySet::All { cap: u64::MAX, extra: 0, seed: 0 }
    }

    /// Tables of A over d-bit seeds, validated.
    pub fn tables(&self, d: usize) -> Result<(Vec<Vec<u64>>, bool)> {
        let size = 1u64 << d;
        match self {
            AdversarySet::Explicit(tables) => {
                for t in tables {
                    if t.len() as u64 != size {
                        return Err(Error::invalid(format!(
                            "adversary table has {} entries, expected {size}",
                            t.len()
                        )));
                    }
                    for (y, &a) in t.iter().enumerate() {
                        if a >= size {
                            return Err(Error::invalid(format!("adversary output {a} out of range")));
                        }
                        if a == y as u64 {
                            return Err(Error::FixedPoint(BitString::from_u64(a, d).to_string()));
                        }
                    }
                }
                Ok((tables.clone(), false))
            }
            AdversarySet::All { cap, extra, seed } => {
                let total = adversary_count(d);
                let exhaustive = total.as_ref().is_some_and(|t| *t <= *cap as u128);
                let mut out = Vec::new();
                let mut digits = vec![0u64; size as usize];
                let decode = |digits: &[u64]| -> Vec<u64> {
                    digits
                        .iter()
                        .enumerate()
                        .map(|(y, &j)| if j < y as u64 { j } else { j + 1 })
                        .collect()
                };
                loop {
                    if out.len() as u64 >= *cap {
                        break;
                    }
                    out.push(decode(&digits));
                    // Mixed-radix increment, last seed varying fastest.
                    let mut pos = digits.len();
                    loop {
                        if pos == 0 {
                            return Ok((out, exhaustive));
                        }
                        pos -= 1;
                        digits[pos] += 1;
                        if digits[pos] < size - 1 {
                            break;
                        }
                        digits[pos] = 0;
                    }
                }
                if !exhaustive {
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    for _ in 0..*extra {
                        let digits: Vec<u64> =
                            (0..size).map(|_| rng.gen_range(0..size - 1)).collect();
                        out.push(decode(&digits));
                    }
                }
                Ok((out, exhaustive))
            }
        }
    }
}

/// (2^d - 1)^(2^d), when it fits.
pub fn adversary_count(d: usize) -> Option<u128> {
    let size = 1u128 << d;
    (size - 1).checked_pow(size as u32)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NmExtReport {
    #[serde(flatten)]
    pub report: VerifyReport,
    /// max over sources of Σ_y max_{y' != y}, which is the worst case over
    /// every fixed-point-free adversary.
    #[serde(with = "ratio::text")]
    pub decomposed_worst: Rational,
    pub adversaries_checked: usize,
    pub exhaustive: bool,
}

/// Worst distance of (nmExt(X, Y), nmExt(X, A(Y)), Y) from
/// (U_m, nmExt(X, A(Y)), Y) over sources and adversaries, Y uniform on d bits.
pub fn verify_nm_extractor(
    nmext: Func<'_>,
    n: usize,
    d: usize,
    m: usize,
    k: u32,
    sources: &[SourceSpec],
    adversaries: &AdversarySet,
) -> Result<NmExtReport> {
    let (tables, exhaustive) = adversaries.tables(d)?;
    let ws: Vec<WeightedSource> = sources.iter().map(|s| s.weighted()).collect::<Result<_>>()?;
    check_sources(&ws, n, k)?;
    let seeds = 1usize << d;
    let width = 1u128 << m;
    let mut table = Table::new(nmext, n, d, m);
    let mut worst: Option<(Rational, usize, Vec<u64>)> = None;
    let mut decomposed = Rational::zero();
    let mut joint = vec![0u128; 1 << (2 * m)];
    let mut side = vec![0u128; 1 << m];
    for (i, src) in ws.iter().enumerate() {
        for &(x, _) in &src.points {
            table.row(x)?;
        }
        // num[y][y'] = Σ_{v, v'} |c[v][v'] 2^m - c'[v']| for the pair (y, y').
        let mut num = vec![0u128; seeds * seeds];
        for y in 0..seeds {
            for y2 in 0..seeds {
                if y == y2 {
                    continue;
                }
                joint.iter_mut().for_each(|c| *c = 0);
                side.iter_mut().for_each(|c| *c = 0);
                for &(x, w) in &src.points {
                    let row = &table.rows[&x];
                    let (v, v2) = (row[y] as usize, row[y2] as usize);
                    joint[(v << m) | v2] += w;
                    side[v2] += w;
                }
                num[y * seeds + y2] = joint
                    .iter()
                    .enumerate()
                    .map(|(idx, &c)| (c * width).abs_diff(side[idx & ((1 << m) - 1)]))
                    .sum();
            }
        }
        let den = 2 * src.total * width * seeds as u128;
        let mut best: Option<(u128, usize)> = None;
        for (t, tab) in tables.iter().enumerate() {
            let total: u128 = tab.iter().enumerate().map(|(y, &a)| num[y * seeds + a as usize]).sum();
            if best.is_none_or(|b| total > b.0) {
                best = Some((total, t));
            }
        }
        if let Some((total, t)) = best {
            let dist = ratio::from_u128(total, den);
            if worst.as_ref().is_none_or(|w| dist > w.0) {
                worst = Some((dist, i, tables[t].clone()));
            }
        }
        let decomp: u128 = (0..seeds)
            .map(|y| (0..seeds).filter(|&y2| y2 != y).map(|y2| num[y * seeds + y2]).max().unwrap_or(0))
            .sum();
        let decomp = ratio::from_u128(decomp, den);
        if decomp > decomposed {
            decomposed = decomp;
        }
    }
    let (worst_distance, witness_source, witness_adversary) = match worst {
        Some((d, i, a)) => (d, Some(i), Some(a)),
        None => (Rational::zero(), None, None),
    };
    Ok(NmExtReport {
        report: VerifyReport {
            primitive: "nm_ext".into(),
            profile: String::new(),
            worst_distance,
            witness_source,
            witness_adversary,
            sources_checked: ws.len(),
        },
        decomposed_worst: decomposed,
        adversaries_checked: tables.len(),
        exhaustive,
    })
}

/// Nonnegative fraction with small integer parts, compared by cross
/// multiplication.
#[derive(Clone, Copy, Debug)]
struct Frac {
    num: u128,
    den: u128,
}

impl Frac {
    fn new(num: u128, den: u128) -> Self {
        debug_assert!(den > 0);
        Frac { num, den }
    }

    fn to_rational(self) -> Rational {
        ratio::from_u128(self.num, self.den)
    }
}

impl PartialEq for Frac {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Frac {}
impl PartialOrd for Frac {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Frac {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.num * o.den).cmp(&(o.num * self.den))
    }
}

/// Distance from the distribution with the given integer weights (over
/// `total`) to the nearest source on `m` bits with min-entropy `k_prime`.
pub fn closest_source_distance(weights: &[u128], total: u128, k_prime: u32) -> Rational {
    let scale = 1u128 << k_prime;
    let excess: u128 = weights.iter().map(|&c| (c * scale).saturating_sub(total)).sum();
    ratio::from_u128(excess, total * scale)
}

/// Smallest ε with Pr[δ <= ε] >= 1 - ε, for a distribution over δ values
/// given as (probability, δ) pairs.
pub fn inner_error(points: &[(Rational, Rational)]) -> Rational {
    let mut pts: Vec<_> = points.to_vec();
    pts.sort_by(|a, b| a.1.cmp(&b.1));
    let mut best = Rational::one();
    let mut mass = Rational::zero();
    for i in 0..pts.len() {
        mass += &pts[i].0;
        if i + 1 < pts.len() && pts[i + 1].1 == pts[i].1 {
            continue;
        }
        let cand = std::cmp::max(pts[i].1.clone(), Rational::one() - &mass);
        let fits = i + 1 == pts.len() || cand < pts[i + 1].1;
        if fits && cand < best {
            best = cand;
        }
    }
    best
}

/// Integer-weight version of [`inner_error`]: `points` holds
/// (weight out of `total`, δ).
fn inner_error_frac(points: &mut [(u128, Frac)], total: u128) -> Frac {
    points.sort_by(|a, b| a.1.cmp(&b.1));
    let mut best = Frac::new(1, 1);
    let mut mass = 0u128;
    for i in 0..points.len() {
        mass += points[i].0;
        if i + 1 < points.len() && points[i + 1].1 == points[i].1 {
            continue;
        }
        let rest = Frac::new(total - mass, total);
        let cand = std::cmp::max(points[i].1, rest);
        let fits = i + 1 == points.len() || cand < points[i + 1].1;
        if fits && cand < best {
            best = cand;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedPoint {
    #[serde(with = "ratio::text")]
    pub eps_seed: Rational,
    #[serde(with = "ratio::text")]
    pub eps_inner: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NmCondReport {
    pub primitive: String,
    pub profile: String,
    pub k: u32,
    pub k_prime: u32,
    pub sources_checked: usize,
    /// (2^d - 1)^(2^d) in decimal.
    pub adversaries_covered: String,
    /// Pairs (ε_seed, ε_inner) with no other pair smaller in both.
    pub frontier: Vec<SeedPoint>,
    /// The frontier pair minimizing max(ε_seed, ε_inner).
    pub balanced: SeedPoint,
    pub witness_source: Option<usize>,
    /// The witness source's inner error e(y, y') for every ordered pair of
    /// distinct seeds, row y, column y'.
    #[serde(skip)]
    pub witness_errors: Vec<Vec<Option<Rational>>>,
    /// Whether every fixed-point-free table was also enumerated literally and
    /// agreed with the per-seed decomposition at every frontier point.
    pub literal_checked: bool,
}

/// Inner errors e(y, y') of one source for all seed pairs; None on the
/// diagonal. The measured output comes from `main`, the conditioning output
/// from `tampered`.
fn inner_errors(
    src: &WeightedSource,
    main: &Table<'_>,
    tampered: &Table<'_>,
    k_prime: u32,
) -> Vec<Vec<Option<Frac>>> {
    let seeds = 1usize << main.d;
    let (m, m2) = (main.m, tampered.m);
    let scale = 1u128 << k_prime;
    let mut joint = vec![0u128; 1 << (m + m2)];
    let mut side = vec![0u128; 1 << m2];
    let mut out = vec![vec![None; seeds]; seeds];
    for y in 0..seeds {
        for y2 in 0..seeds {
            if y == y2 {
                continue;
            }
            joint.iter_mut().for_each(|c| *c = 0);
            side.iter_mut().for_each(|c| *c = 0);
            for &(x, w) in &src.points {
                let z = main.rows[&x][y] as usize;
                let z2 = tampered.rows[&x][y2] as usize;
                joint[(z2 << m) | z] += w;
                side[z2] += w;
            }
            let mut points = Vec::new();
            for (z2, &c2) in side.iter().enumerate() {
                if c2 == 0 {
                    continue;
                }
                let row = &joint[z2 << m..(z2 + 1) << m];
                let excess: u128 = row.iter().map(|&c| (c * scale).saturating_sub(c2)).sum();
                points.push((c2, Frac::new(excess, c2 * scale)));
            }
            out[y][y2] = Some(inner_error_frac(&mut points, src.total));
        }
    }
    out
}

/// e(y, y') for one source where the measured output is `main` (m bits) and
/// the adversary's view is `tampered` (m2 bits) at the tampered seed.
#[allow(clippy::too_many_arguments)]
pub fn inner_error_matrix(
    main: Func<'_>,
    tampered: Func<'_>,
    n: usize,
    d: usize,
    m: usize,
    m2: usize,
    k_prime: u32,
    src: &SourceSpec,
) -> Result<Vec<Vec<Option<Rational>>>> {
    if k_prime as usize > m {
        return Err(Error::invalid(format!("k' = {k_prime} exceeds output length {m}")));
    }
    let ws = src.weighted()?;
    check_sources(std::slice::from_ref(&ws), n, 0)?;
    let mut a = Table::new(main, n, d, m);
    let mut b = Table::new(tampered, n, d, m2);
    for &(x, _) in &ws.points {
        a.row(x)?;
        b.row(x)?;
    }
    Ok(inner_errors(&ws, &a, &b, k_prime)
        .into_iter()
        .map(|row| row.into_iter().map(|e| e.map(Frac::to_rational)).collect())
        .collect())
}

/// Evaluates the nested non-malleable condenser condition exactly.
///
/// For seed y and tampered seed y', e(y, y') is the smallest ε such that,
/// with probability at least 1 - ε over z' = Cond(X, y'), the distribution of
/// Cond(X, y) given z' is ε-close to an (m, k')-source. An adversary picks y'
/// per seed, so the worst adversary meets e*(y) = max_{y' != y} e(y, y'), and
/// ε_seed(v) = max over sources of Pr_y[e*(y) > v].
pub fn verify_nm_condenser(
    cond: Func<'_>,
    n: usize,
    d: usize,
    m: usize,
    k: u32,
    k_prime: u32,
    sources: &[SourceSpec],
    literal_cap: u64,
) -> Result<NmCondReport> {
    if k_prime as usize > m {
        return Err(Error::invalid(format!("k' = {k_prime} exceeds output length {m}")));
    }
    let ws: Vec<WeightedSource> = sources.iter().map(|s| s.weighted()).collect::<Result<_>>()?;
    check_sources(&ws, n, k)?;
    if ws.is_empty() {
        return Err(Error::EmptySupport);
    }
    let seeds = 1usize << d;
    let mut table = Table::new(cond, n, d, m);
    let mut profiles: Vec<Vec<Frac>> = Vec::with_capacity(ws.len());
    let mut matrices = Vec::with_capacity(ws.len());
    for src in &ws {
        for &(x, _) in &src.points {
            table.row(x)?;
        }
        let e = inner_errors(src, &table, &table, k_prime);
        let mut star: Vec<Frac> = e
            .iter()
            .map(|row| row.iter().flatten().copied().max().unwrap_or(Frac::new(0, 1)))
            .collect();
        star.sort();
        profiles.push(star);
        matrices.push(e);
    }

    let mut thresholds: Vec<Frac> = vec![Frac::new(0, 1)];
    thresholds.extend(profiles.iter().flatten().copied());
    thresholds.sort();
    thresholds.dedup();
    // Many sources share a profile; only distinct ones matter for the max.
    let distinct: BTreeSet<Vec<(u128, u128)>> = profiles
        .iter()
        .map(|p| p.iter().map(|f| (f.num, f.den)).collect())
        .collect();
    let distinct: Vec<Vec<Frac>> = distinct
        .into_iter()
        .map(|p| p.into_iter().map(|(a, b)| Frac::new(a, b)).collect())
        .collect();
    let bad_count = |v: Frac| -> usize {
        distinct
            .iter()
            .map(|p| p.len() - p.partition_point(|e| *e <= v))
            .max()
            .unwrap_or(0)
    };

    let mut frontier: Vec<(Frac, usize)> = Vec::new();
    for &v in &thresholds {
        let bad = bad_count(v);
        if frontier.last().is_none_or(|&(_, b)| bad < b) {
            frontier.push((v, bad));
        }
    }
    let as_point = |(v, bad): (Frac, usize)| SeedPoint {
        eps_seed: ratio::from_u128(bad as u128, seeds as u128),
        eps_inner: v.to_rational(),
    };
    let points: Vec<SeedPoint> = frontier.iter().map(|&f| as_point(f)).collect();
    let balanced = points
        .iter()
        .min_by(|a, b| {
            let ma = std::cmp::max(&a.eps_seed, &a.eps_inner);
            let mb = std::cmp::max(&b.eps_seed, &b.eps_inner);
            ma.cmp(mb).then(a.eps_seed.cmp(&b.eps_seed))
        })
        .cloned()
        .expect("threshold 0 is always present");

    let balanced_v = frontier
        .iter()
        .find(|f| f.0.to_rational() == balanced.eps_inner)
        .map(|f| f.0)
        .expect("balanced point is on the frontier");
    let witness = profiles
        .iter()
        .position(|p| p.len() - p.partition_point(|e| *e <= balanced_v) == bad_count(balanced_v));

    let mut literal_checked = false;
    if adversary_count(d).is_some_and(|c| c <= literal_cap as u128) {
        let (tables, _) = AdversarySet::exhaustive().tables(d)?;
        for &(v, bad) in &frontier {
            let mut literal = 0usize;
            for e in &matrices {
                for t in &tables {
                    let count = t
                        .iter()
                        .enumerate()
                        .filter(|&(y, &a)| e[y][a as usize].expect("off-diagonal") > v)
                        .count();
                    literal = literal.max(count);
                }
            }
            if literal != bad {
                return Err(Error::invalid(format!(
                    "literal adversary enumeration found {literal} bad seeds, decomposition {bad}"
                )));
            }
        }
        literal_checked = true;
    }

    let witness_errors = witness
        .map(|w| {
            matrices[w]
                .iter()
                .map(|row| row.iter().map(|e| e.map(Frac::to_rational)).collect())
                .collect()
        })
        .unwrap_or_default();
    let covered = BigInt::from(seeds as u64 - 1).pow(seeds as u32);
    Ok(NmCondReport {
        primitive: "nm_cond".into(),
        profile: String::new(),
        k,
        k_prime,
        sources_checked: ws.len(),
        adversaries_covered: covered.to_string(),
        frontier: points,
        balanced,
        witness_source: witness,
        witness_errors,
        literal_checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcore::ip;
    use crate::distoracle::{stat_distance, Dist, JointDist};
    use crate::ratio::rat;

    fn flat(n: usize, k: usize) -> Vec<SourceSpec> {
        FlatFamily::exhaustive(n, k).sources().collect()
    }

    /// Builds (f(X, Y), Y) and (U_m, Y) as explicit joints and measures them.
    fn literal_strong_distance(
        f: Func<'_>,
        src: &SourceSpec,
        d: usize,
        m: usize,
    ) -> Rational {
        let x = src.to_dist().unwrap();
        let y = Dist::uniform(d);
        let xy = JointDist::product(&[&x, &y]).unwrap();
        let real = JointDist::new(
            vec![m, d],
            xy.support()
                .iter()
                .map(|(t, p)| (vec![f(&t[0], &t[1]), t[1].clone()], p.clone()))
                .collect(),
        )
        .unwrap();
        let ideal = JointDist::product(&[&Dist::uniform(m), &y]).unwrap();
        stat_distance(&real.flatten(), &ideal.flatten()).unwrap()
    }

    fn ip1(x: &BitString, y: &BitString) -> BitString {
        BitString::from_bits([ip(x, y).unwrap()])
    }

    #[test]
    fn strong_extractor_matches_literal_joint() {
        let sources = flat(3, 2);
        let rep = verify_strong_extractor(&ip1, 3, 3, 1, 2, &sources).unwrap();
        let literal = sources
            .iter()
            .map(|s| literal_strong_distance(&ip1, s, 3, 1))
            .max()
            .unwrap();
        assert_eq!(rep.worst_distance, literal);
        assert_eq!(rep.sources_checked, 70);
    }

    #[test]
    fn constant_extractor_is_far_and_empty_output_is_exact() {
        let konst = |_: &BitString, _: &BitString| BitString::zeros(2);
        let rep = verify_strong_extractor(&konst, 3, 1, 2, 2, &flat(3, 2)).unwrap();
        assert_eq!(rep.worst_distance, rat(3, 4));
        let empty = |_: &BitString, _: &BitString| BitString::empty();
        let rep = verify_strong_extractor(&empty, 3, 1, 0, 2, &flat(3, 2)).unwrap();
        assert_eq!(rep.worst_distance, rat(0, 1));
    }

    #[test]
    fn low_entropy_source_is_rejected() {
        let err = verify_strong_extractor(&ip1, 3, 3, 1, 3, &flat(3, 2)).unwrap_err();
        assert!(matches!(err, Error::SourceBelowEntropy { required: 3, .. }));
    }

    #[test]
    fn adversary_enumeration_counts_and_order() {
        let (one, ex) = AdversarySet::exhaustive().tables(1).unwrap();
        assert!(ex);
        assert_eq!(one, [vec![1, 0]]);
        let (two, _) = AdversarySet::exhaustive().tables(2).unwrap();
        assert_eq!(two.len(), 81);
        assert_eq!(two[0], [1, 0, 0, 0]);
        assert_eq!(two[1], [1, 0, 0, 1]);
        assert!(two.windows(2).all(|w| w[0] < w[1]));
        assert!(two.iter().all(|t| t.iter().enumerate().all(|(y, &a)| a != y as u64)));
        let bad = AdversarySet::Explicit(vec![vec![1, 1]]);
        assert_eq!(bad.tables(1).unwrap_err().to_string(), "adversary has a fixed point: A(1) = 1");
    }

    #[test]
    fn nm_extractor_matches_literal_joint_per_adversary() {
        let sources = flat(2, 1);
        let rep =
            verify_nm_extractor(&ip1, 2, 2, 1, 1, &sources, &AdversarySet::exhaustive()).unwrap();
        assert_eq!(rep.adversaries_checked, 81);
        assert_eq!(rep.report.worst_distance, rep.decomposed_worst);
        // Independent route: explicit triples for every source and adversary.
        let mut literal = Rational::zero();
        let (tables, _) = AdversarySet::exhaustive().tables(2).unwrap();
        for src in &sources {
            let x = src.to_dist().unwrap();
            let xy = JointDist::product(&[&x, &Dist::uniform(2)]).unwrap();
            for t in &tables {
                let a = |y: &BitString| BitString::from_u64(t[y.to_u64() as usize], 2);
                let real = JointDist::new(
                    vec![1, 1, 2],
                    xy.support()
                        .iter()
                        .map(|(v, p)| {
                            (vec![ip1(&v[0], &v[1]), ip1(&v[0], &a(&v[1])), v[1].clone()], p.clone())
                        })
                        .collect(),
                )
                .unwrap();
                let tail = real.project(&[1, 2]).unwrap();
                let ideal = JointDist::new(
                    vec![1, 1, 2],
                    tail.support()
                        .iter()
                        .flat_map(|(v, p)| {
                            BitString::all(1).map(move |u| {
                                (vec![u, v[0].clone(), v[1].clone()], p / Rational::from_integer(2.into()))
                            })
                        })
                        .collect(),
                )
                .unwrap();
                literal = literal.max(stat_distance(&real.flatten(), &ideal.flatten()).unwrap());
            }
        }
        assert_eq!(rep.report.worst_distance, literal);
    }

    #[test]
    fn inner_error_routes_agree() {
        let cases: Vec<Vec<(u128, u128, u128)>> = vec![
            vec![(1, 0, 1)],
            vec![(1, 1, 1)],
            vec![(3, 0, 1), (1, 1, 2)],
            vec![(1, 1, 8), (1, 1, 4), (2, 0, 1)],
            vec![(5, 3, 7), (2, 1, 9), (1, 2, 3)],
        ];
        for case in cases {
            let total: u128 = case.iter().map(|c| c.0).sum();
            let rats: Vec<_> = case
                .iter()
                .map(|&(w, a, b)| (ratio::from_u128(w, total), ratio::from_u128(a, b)))
                .collect();
            let mut fr: Vec<_> = case.iter().map(|&(w, a, b)| (w, Frac::new(a, b))).collect();
            let exact = inner_error(&rats);
            assert_eq!(inner_error_frac(&mut fr, total).to_rational(), exact);
            // Brute force over a fine grid of candidates including every breakpoint.
            let mut cands: Vec<Rational> = rats.iter().map(|r| r.1.clone()).collect();
            cands.push(Rational::one());
            for i in 0..=256 {
                cands.push(rat(i, 256));
            }
            for r in &rats {
                cands.push(Rational::one() - &r.0);
            }
            let mut masses = vec![Rational::zero()];
            for r in &rats {
                let m = masses.last().unwrap() + &r.0;
                masses.push(m.clone());
                cands.push(Rational::one() - m);
            }
            let feasible = |e: &Rational| {
                let mass: Rational = rats.iter().filter(|r| &r.1 <= e).map(|r| r.0.clone()).sum();
                mass >= Rational::one() - e
            };
            let best = cands.into_iter().filter(|c| *c >= Rational::zero() && feasible(c)).min().unwrap();
            assert!(feasible(&exact));
            assert!(exact <= best);
        }
        assert_eq!(inner_error(&[(rat(1, 1), rat(0, 1))]), rat(0, 1));
        assert_eq!(inner_error(&[(rat(1, 2), rat(0, 1)), (rat(1, 2), rat(1, 1))]), rat(1, 2));
    }

    #[test]
    fn constant_condenser_fails_and_identity_passes() {
        let konst = |_: &BitString, _: &BitString| BitString::zeros(3);
        let rep = verify_nm_condenser(&konst, 3, 1, 3, 2, 1, &flat(3, 2), 100).unwrap();
        // Point mass with cap 1/2 is 1/2-far, so every seed needs ε_inner >= 1/2.
        assert_eq!(rep.balanced, SeedPoint { eps_seed: rat(0, 1), eps_inner: rat(1, 2) });

        let ident = |x: &BitString, _: &BitString| x.clone();
        let rep = verify_nm_condenser(&ident, 3, 1, 3, 2, 1, &flat(3, 2), 100).unwrap();
        assert!(rep.literal_checked);
        // The tampered output reveals x, so Z given Z' is a point mass.
        assert_eq!(rep.balanced.eps_inner, rat(1, 2));

        let xor_seed = |x: &BitString, y: &BitString| {
            x.slice(0, 2).unwrap().concat(&x.slice(2, 3).unwrap().xor(y).unwrap())
        };
        let rep = verify_nm_condenser(&xor_seed, 3, 1, 3, 3, 2, &[SourceSpec::Uniform { n: 3 }], 100)
            .unwrap();
        assert_eq!(rep.adversaries_covered, "1");
        assert!(rep.frontier.iter().all(|p| p.eps_seed <= rat(1, 1)));
    }

    #[test]
    fn closest_source_distance_matches_dist_route() {
        let w = [3u128, 1, 0, 4];
        let d = Dist::from_weights(
            2,
            w.iter().enumerate().map(|(i, &c)| (BitString::from_u64(i as u64, 2), c)).collect(),
        )
        .unwrap();
        for kp in 0..=2u32 {
            let cap = ratio::pow2(-(kp as i64));
            assert_eq!(
                closest_source_distance(&w, 8, kp),
                crate::distoracle::distance_to_min_entropy(&d, &cap).unwrap()
            );
        }
    }
}
