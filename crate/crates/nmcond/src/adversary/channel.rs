//! The message-at-a-time channel: Eve holds every undelivered message and
//! picks the next recipient.

use std::collections::{HashMap, VecDeque};

use super::script::{Action, AdversaryScript, Edit};
use crate::bitcore::BitString;
use crate::condenser::ParameterProfile;
use crate::protocol::{aka2, CheckRecord, Direction, Exchange, Message, Party, PartyOutcome, ProtocolId, Role, Tape, Transcript};
use crate::{Error, Result};

/// Everything the parties have sent so far, as (phase, payload).
pub(crate) type View = Vec<(usize, BitString)>;

pub(crate) type GuessTable = HashMap<View, BitString>;
pub(crate) type GuessCounts = HashMap<View, HashMap<BitString, u128>>;

/// Best-guess answering. Slots below `tables.len()` are answered from their
/// table; slot `collecting` records the correct answer under the current
/// tuple's weight; other slots answer zero.
#[derive(Default)]
pub(crate) struct Guesser<'t> {
    pub enabled: bool,
    pub tables: &'t [GuessTable],
    pub collecting: Option<(usize, GuessCounts)>,
    pub weight: u128,
}

impl Guesser<'_> {
    fn answer(&mut self, slot: usize, view: &View, truth: Option<BitString>, len: usize) -> Result<BitString> {
        if !self.enabled {
            return Err(Error::invalid("best-guess answering needs exact mode"));
        }
        if let Some(table) = self.tables.get(slot) {
            return Ok(table.get(view).cloned().unwrap_or_else(|| BitString::zeros(len)));
        }
        if let (Some((s, acc)), Some(t)) = (self.collecting.as_mut(), truth) {
            if *s == slot {
                *acc.entry(view.clone()).or_default().entry(t).or_default() += self.weight;
            }
        }
        Ok(BitString::zeros(len))
    }
}

/// The most likely answer per view, preferring the smallest value on ties.
pub(crate) fn best_answers(counts: GuessCounts) -> GuessTable {
    counts
        .into_iter()
        .map(|(view, counts)| {
            let best = counts
                .into_iter()
                .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
                .map(|(v, _)| v)
                .expect("nonempty");
            (view, best)
        })
        .collect()
}

pub(crate) fn merge_counts(into: &mut GuessCounts, from: GuessCounts) {
    for (view, counts) in from {
        let slot = into.entry(view).or_default();
        for (v, w) in counts {
            *slot.entry(v).or_default() += w;
        }
    }
}

/// A check together with the index of the action during which it ran and its
/// position within that action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct TimedCheck {
    pub action: usize,
    pub sub: usize,
    pub check: CheckRecord,
}

pub(crate) struct RunRecord {
    pub transcript: Transcript,
    pub checks: Vec<TimedCheck>,
}

struct Channel<'a> {
    protocol: ProtocolId,
    profile: &'a ParameterProfile,
    parties: [Box<dyn Party>; 2],
    queues: [VecDeque<(u64, Message)>; 2],
    seq: u64,
    view: View,
    exchanges: Vec<Exchange>,
    checks: Vec<TimedCheck>,
    /// Y most recently delivered to Bob.
    bob_y: Option<BitString>,
}

fn idx(r: Role) -> usize {
    usize::from(r == Role::Bob)
}

impl Channel<'_> {
    fn emit(&mut self, from: Role, msg: Message) {
        self.view.push((msg.phase, msg.payload()));
        self.queues[idx(from)].push_back((self.seq, msg));
        self.seq += 1;
    }

    fn deliver(&mut self, to: Role, sent: Option<Message>, delivered: Message, action: usize) -> Result<()> {
        if to == Role::Bob {
            if let Some(y) = delivered.get("Y") {
                self.bob_y = Some(y.clone());
            }
        }
        let mut records = Vec::new();
        let reaction = self.parties[idx(to)].receive(&delivered, &mut records)?;
        for (sub, check) in records.into_iter().enumerate() {
            self.checks.push(TimedCheck { action, sub, check });
        }
        self.exchanges.push(Exchange { to, sent, delivered: Some(delivered) });
        if let Some(reply) = reaction.reply {
            self.emit(to, reply);
        }
        Ok(())
    }

    fn apply(&mut self, msg: &mut Message, to: Role, edit: &Edit, slot: Option<usize>, guesser: &mut Guesser) -> Result<()> {
        let name = edit.field();
        let Some(current) = msg.get(name).cloned() else {
            return Err(Error::invalid(format!("message has no field {name:?}")));
        };
        let value = match edit {
            Edit::Flip { bit, .. } => {
                if *bit >= current.len() {
                    return Err(Error::invalid(format!("bit {bit} of {}-bit field {name}", current.len())));
                }
                let mut v = current.clone();
                v.flip(*bit);
                v
            }
            Edit::Xor { mask, .. } => current.xor(mask)?,
            Edit::Set { value, .. } => {
                if value.len() != current.len() {
                    return Err(Error::DomainMismatch(current.len(), value.len()));
                }
                value.clone()
            }
            Edit::Guess { .. } => {
                let party = &self.parties[idx(to)];
                let truth = if party.outcome().is_some() {
                    None
                } else {
                    Some(party.expected(msg, name).ok_or_else(|| {
                        Error::invalid(format!("{to:?} does not check field {name:?}"))
                    })?)
                };
                guesser.answer(slot.expect("guess slot"), &self.view, truth, current.len())?
            }
            Edit::ReencodeBlock { block } => {
                let y = match (to, msg.get("Y")) {
                    (Role::Bob, Some(y)) => y.clone(),
                    _ => self.bob_y.clone().ok_or_else(|| Error::invalid("no Y has reached Bob"))?,
                };
                let p = &self.profile.aka2;
                let blocks = aka2::edit_code(p)?.encode(&y)?.chunks(p.d2);
                blocks
                    .get(block.wrapping_sub(1))
                    .cloned()
                    .ok_or_else(|| Error::invalid(format!("no block {block}")))?
            }
        };
        *msg.get_mut(name).expect("present") = value;
        Ok(())
    }

    fn pop(&mut self, from: Role) -> Option<Message> {
        self.queues[idx(from)].pop_front().map(|(_, m)| m)
    }
}

/// One run of a script without best-guess answering, for seeded replays.
pub fn run_attacked(
    profile: &ParameterProfile,
    x: &BitString,
    alice_tape: BitString,
    bob_tape: BitString,
    script: &AdversaryScript,
) -> Result<Transcript> {
    Ok(run_script(profile, x, alice_tape, bob_tape, script, &mut Guesser::default())?.transcript)
}

/// Runs one (x, tapes) tuple against a script.
pub(crate) fn run_script(
    profile: &ParameterProfile,
    x: &BitString,
    alice_tape: BitString,
    bob_tape: BitString,
    script: &AdversaryScript,
    guesser: &mut Guesser<'_>,
) -> Result<RunRecord> {
    let protocol = script.protocol;
    let (alice, bob) = protocol.parties(profile, x, Tape::new(alice_tape.clone()), Tape::new(bob_tape.clone()))?;
    let mut ch = Channel {
        protocol,
        profile,
        parties: [alice, bob],
        queues: [VecDeque::new(), VecDeque::new()],
        seq: 0,
        view: Vec::new(),
        exchanges: Vec::new(),
        checks: Vec::new(),
        bob_y: None,
    };
    if let Some(first) = ch.parties[0].start()? {
        ch.emit(Role::Alice, first);
    }
    let mut slot = 0usize;
    for (i, action) in script.actions.iter().enumerate() {
        let guesses = action.edits().iter().filter(|e| matches!(e, Edit::Guess { .. })).count();
        let base = slot;
        slot += guesses;
        let (to, sent, mut msg) = match action {
            Action::Drop { from } => {
                if let Some(m) = ch.pop(*from) {
                    ch.exchanges.push(Exchange { to: from.other(), sent: Some(m), delivered: None });
                }
                continue;
            }
            Action::Forward { to, phase, .. } => {
                let Some(sent) = ch.pop(to.other()) else { continue };
                let mut m = sent.clone();
                if let Some(p) = phase {
                    m.phase = *p;
                }
                (*to, Some(sent), m)
            }
            Action::Forge { to, phase, .. } => {
                let dir = Direction::toward(*to);
                (*to, None, Message::blank(dir, *phase, &ch.protocol.schema(profile, dir, *phase)))
            }
        };
        let mut g = base;
        for edit in action.edits() {
            let s = matches!(edit, Edit::Guess { .. }).then(|| {
                g += 1;
                g - 1
            });
            ch.apply(&mut msg, to, edit, s, guesser)?;
        }
        ch.deliver(to, sent, msg, i)?;
    }
    if script.then_pass {
        let mut i = script.actions.len();
        loop {
            let front = |q: &VecDeque<(u64, Message)>| q.front().map(|(s, _)| *s);
            let from = match (front(&ch.queues[0]), front(&ch.queues[1])) {
                (None, None) => break,
                (Some(_), None) => Role::Alice,
                (None, Some(_)) => Role::Bob,
                (Some(a), Some(b)) => if a < b { Role::Alice } else { Role::Bob },
            };
            let m = ch.pop(from).expect("nonempty");
            ch.deliver(from.other(), Some(m.clone()), m, i)?;
            i += 1;
        }
    }
    let outcome = |p: &dyn Party| p.outcome().cloned().unwrap_or(PartyOutcome::Reject);
    let transcript = Transcript {
        protocol,
        exchanges: ch.exchanges,
        alice: outcome(ch.parties[0].as_ref()),
        bob: outcome(ch.parties[1].as_ref()),
        checks: ch.checks.iter().map(|c| c.check.clone()).collect(),
        alice_tape,
        bob_tape,
    };
    Ok(RunRecord { transcript, checks: ch.checks })
}
