use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::channel::{best_answers, merge_counts, run_script, GuessCounts, GuessTable, Guesser, RunRecord};
use super::schedule::{classify_schedule, OpKind, ScheduleClass};
use super::script::AdversaryScript;
use crate::bitcore::BitString;
use crate::condenser::{require_valid, ParameterProfile};
use crate::distoracle::SourceSpec;
use crate::protocol::{ProtocolId, Role, Tape};
use crate::ratio::{self, Rational};
use crate::seedtree::SeedTree;
use crate::{Error, Result};

/// Largest number of (x, Alice tape, Bob tape) tuples exact mode enumerates.
pub const EXACT_LIMIT: u128 = 1 << 22;

pub const SUCCESS_EVENT: &str = "R_A != R_B and R_A != reject and R_B != reject";

#[derive(Clone, Debug)]
pub enum EstimateMode {
    Exact,
    Sampling { trials: u64, seed: SeedTree },
}

/// Pr[H_j | E_{j-1}] for the j-th challenge, where E_j is the event that
/// the first j challenges ran and passed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub index: usize,
    pub action: usize,
    pub party: Role,
    pub phase: usize,
    pub check: String,
    pub op: Option<OpKind>,
    pub forced: bool,
    /// Pr[E_{j-1}].
    #[serde(with = "ratio::text")]
    pub reached: Rational,
    /// Pr[E_j].
    #[serde(with = "ratio::text")]
    pub passed: Rational,
    #[serde(with = "ratio::text_opt")]
    pub conditional: Option<Rational>,
    pub approximate: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackReport {
    pub strategy: String,
    pub protocol: ProtocolId,
    pub profile: String,
    pub exact: bool,
    pub trials: Option<u64>,
    /// Tuples enumerated (exact) or trials run (sampling).
    pub runs: u64,
    pub success_event: String,
    #[serde(with = "ratio::text")]
    pub success: Rational,
    #[serde(with = "ratio::text")]
    pub alice_accept: Rational,
    #[serde(with = "ratio::text")]
    pub bob_accept: Rational,
    #[serde(with = "ratio::text")]
    pub agree: Rational,
    /// Pr[every challenge ran and passed].
    #[serde(with = "ratio::text")]
    pub all_challenges_passed: Rational,
    /// Product of the ledger's conditionals.
    #[serde(with = "ratio::text")]
    pub ledger_product: Rational,
    /// Reject rate of each honest check, keyed "party/phase/check".
    pub check_failures: BTreeMap<String, String>,
    pub schedule: Option<ScheduleClass>,
    pub ledger: Vec<LedgerEntry>,
}

impl AttackReport {
    pub fn product_bound_holds(&self) -> bool {
        self.ledger_product == self.all_challenges_passed
    }
}

/// Per-challenge table of a report; entries of a sampling report are flagged
/// approximate.
pub fn challenge_ledger(report: &AttackReport) -> Vec<LedgerEntry> {
    report.ledger.iter().cloned().map(|mut e| {
        e.approximate = !report.exact;
        e
    }).collect()
}

type CheckKey = (usize, usize);

#[derive(Default)]
struct Tally {
    total: u128,
    success: u128,
    alice: u128,
    bob: u128,
    agree: u128,
    labels: BTreeMap<CheckKey, (Role, usize, String)>,
    /// Each run's challenge checks with its weight.
    runs: Vec<(u128, Vec<(CheckKey, bool)>)>,
    failures: BTreeMap<String, (u128, u128)>,
}

impl Tally {
    fn add(&mut self, w: u128, rec: &RunRecord, first_tamper: Option<usize>) {
        let t = &rec.transcript;
        self.total += w;
        self.success += w * u128::from(t.violated());
        self.alice += w * u128::from(!t.alice.is_reject());
        self.bob += w * u128::from(!t.bob.is_reject());
        self.agree += w * u128::from(t.agree());
        let mut mine = Vec::new();
        for c in &rec.checks {
            let name = format!("{:?}/{}/{}", c.check.party, c.check.phase, c.check.check).to_lowercase();
            let f = self.failures.entry(name).or_default();
            f.0 += w * u128::from(!c.check.passed);
            f.1 += w;
            if first_tamper.is_some_and(|ft| c.action >= ft) {
                let key = (c.action, c.sub);
                self.labels.entry(key).or_insert((c.check.party, c.check.phase, c.check.check.clone()));
                mine.push((key, c.check.passed));
            }
        }
        self.runs.push((w, mine));
    }

    fn merge(&mut self, other: Tally) {
        self.total += other.total;
        self.success += other.success;
        self.alice += other.alice;
        self.bob += other.bob;
        self.agree += other.agree;
        for (k, v) in other.labels {
            self.labels.entry(k).or_insert(v);
        }
        self.runs.extend(other.runs);
        for (k, (bad, all)) in other.failures {
            let f = self.failures.entry(k).or_default();
            f.0 += bad;
            f.1 += all;
        }
    }
}

/// Applies `f` to every source point on scoped worker threads and returns
/// the results in point order.
fn enumerate_points<T: Send>(
    points: &[(u64, u128)],
    f: impl Fn(u64, u128) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(points.len().max(1));
    let chunk = points.len().div_ceil(workers).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = points
            .chunks(chunk)
            .map(|part| {
                let f = &f;
                scope.spawn(move || part.iter().map(|&(x, w)| f(x, w)).collect::<Result<Vec<T>>>())
            })
            .collect();
        let mut out = Vec::with_capacity(points.len());
        for h in handles {
            out.extend(h.join().expect("worker panicked")?);
        }
        Ok(out)
    })
}

/// Runs a script against every (x, randomness) tuple, or against seeded
/// trials, and reports the robustness violation rate and the challenge ledger.
pub fn run_with_adversary(
    protocol: ProtocolId,
    profile: &ParameterProfile,
    source: &SourceSpec,
    script: &AdversaryScript,
    mode: &EstimateMode,
) -> Result<AttackReport> {
    require_valid(profile)?;
    if script.protocol != protocol {
        return Err(Error::invalid(format!("script {} targets {}", script.id, script.protocol.name())));
    }
    let schedule = classify_schedule(script, profile)?;
    let n = protocol.source_len(profile);
    if source.domain_len() != n {
        return Err(Error::DomainMismatch(n, source.domain_len()));
    }
    let (a_bits, b_bits) = protocol.randomness(profile);
    let first_tamper = script.first_tamper();
    let mut tally = Tally::default();
    let (exact, trials) = match mode {
        EstimateMode::Exact => {
            let points = source.weighted()?.points;
            let count = (points.len() as u128) << (a_bits + b_bits);
            if a_bits + b_bits > 40 || count > EXACT_LIMIT {
                return Err(Error::TooLarge(format!(
                    "{} source points x 2^{} tapes",
                    points.len(),
                    a_bits + b_bits
                )));
            }
            let slots = script.guess_slots();
            let mut tables: Vec<GuessTable> = Vec::new();
            for pass in 0..=slots {
                let collect = pass < slots;
                let parts = enumerate_points(&points, |xv, w| {
                    let mut guesser = Guesser {
                        enabled: true,
                        tables: &tables,
                        collecting: collect.then(|| (pass, GuessCounts::new())),
                        weight: w,
                    };
                    let x = BitString::from_u64(xv, n);
                    let mut part = Tally::default();
                    for ta in BitString::all(a_bits) {
                        for tb in BitString::all(b_bits) {
                            let rec = run_script(profile, &x, ta.clone(), tb, script, &mut guesser)?;
                            if !collect {
                                part.add(w, &rec, first_tamper);
                            }
                        }
                    }
                    Ok((part, guesser.collecting.map(|c| c.1)))
                })?;
                let mut counts = GuessCounts::new();
                for (part, c) in parts {
                    tally.merge(part);
                    if let Some(c) = c {
                        merge_counts(&mut counts, c);
                    }
                }
                if collect {
                    tables.push(best_answers(counts));
                }
            }
            (true, None)
        }
        EstimateMode::Sampling { trials, seed } => {
            let mut guesser = Guesser::default();
            for t in 0..*trials {
                let node = seed.child("trial").index(t);
                let xv = source.sample(&mut node.child("source").rng())?;
                let ta = Tape::random(a_bits, &mut node.child("alice").rng()).bits().clone();
                let tb = Tape::random(b_bits, &mut node.child("bob").rng()).bits().clone();
                let rec = run_script(profile, &BitString::from_u64(xv, n), ta, tb, script, &mut guesser)?;
                tally.add(1, &rec, first_tamper);
            }
            (false, Some(*trials))
        }
    };
    Ok(finish(tally, protocol, profile, script, schedule, exact, trials))
}

fn finish(
    tally: Tally,
    protocol: ProtocolId,
    profile: &ParameterProfile,
    script: &AdversaryScript,
    schedule: ScheduleClass,
    exact: bool,
    trials: Option<u64>,
) -> AttackReport {
    let total = tally.total;
    let frac = |c: u128| ratio::from_u128(c, total);
    let keys: Vec<CheckKey> = tally.labels.keys().copied().collect();
    // Length of the passed prefix of the canonical challenge order, per run.
    let mut prefix_mass = vec![0u128; keys.len() + 1];
    for (w, run) in &tally.runs {
        let got: HashMap<CheckKey, bool> = run.iter().copied().collect();
        let j = keys.iter().take_while(|k| got.get(k) == Some(&true)).count();
        prefix_mass[j] += w;
    }
    let at_least = |j: usize| -> u128 { prefix_mass[j..].iter().sum() };
    let mut ledger = Vec::new();
    let mut product = Rational::from_integer(1.into());
    for (j, key) in keys.iter().enumerate() {
        let (party, phase, check) = tally.labels[key].clone();
        let reached = at_least(j);
        let passed = at_least(j + 1);
        let conditional = (reached > 0).then(|| ratio::from_u128(passed, reached));
        product *= conditional.clone().unwrap_or_else(|| Rational::from_integer(0.into()));
        let op = schedule.ops.iter().find(|o| {
            let (r, p, c) = o.challenge();
            r == party && p == phase && c == check && (o.kind == OpKind::A || o.action == key.0)
        });
        ledger.push(LedgerEntry {
            index: j + 1,
            action: key.0,
            party,
            phase,
            check,
            op: op.map(|o| o.kind),
            forced: op.is_some_and(|o| o.forced),
            reached: frac(reached),
            passed: frac(passed),
            conditional,
            approximate: !exact,
        });
    }
    AttackReport {
        strategy: script.id.clone(),
        protocol,
        profile: profile.name.clone(),
        exact,
        trials,
        runs: tally.runs.len() as u64,
        success_event: SUCCESS_EVENT.into(),
        success: frac(tally.success),
        alice_accept: frac(tally.alice),
        bob_accept: frac(tally.bob),
        agree: frac(tally.agree),
        all_challenges_passed: frac(at_least(keys.len())),
        ledger_product: if keys.is_empty() { Rational::from_integer(1.into()) } else { product },
        check_failures: tally
            .failures
            .into_iter()
            .map(|(k, (bad, all))| (k, ratio::to_text(&ratio::from_u128(bad, all))))
            .collect(),
        schedule: (protocol == ProtocolId::Aka2).then_some(schedule),
        ledger,
    }
}
