//! Alice/Bob state machines for the two-round and the multi-round privacy
//! amplification protocols.

pub mod aka;
pub mod aka2;
mod message;
mod tape;

use serde::{Deserialize, Serialize};

pub use message::{
    purify, CheckRecord, Direction, Field, Message, Party, PartyOutcome, Reaction, Role, Schema,
};
pub use tape::Tape;

use crate::bitcore::BitString;
use crate::condenser::{require_valid, ParameterProfile};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolId {
    /// Two rounds: (Y1, Y2, Y3) then (W', T1', T2').
    Aka,
    /// L + 1 phases over the edit codeword of Y.
    Aka2,
}

impl std::str::FromStr for ProtocolId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aka" => Ok(ProtocolId::Aka),
            "aka2" => Ok(ProtocolId::Aka2),
            _ => Err(Error::invalid(format!("unknown protocol {s:?}"))),
        }
    }
}

impl ProtocolId {
    pub fn name(self) -> &'static str {
        match self {
            ProtocolId::Aka => "aka",
            ProtocolId::Aka2 => "aka2",
        }
    }

    /// Bits of private randomness (Alice, Bob) one run consumes.
    pub fn randomness(self, profile: &ParameterProfile) -> (usize, usize) {
        match self {
            ProtocolId::Aka => (aka::alice_randomness(&profile.aka), aka::bob_randomness(&profile.aka)),
            ProtocolId::Aka2 => (aka2::alice_randomness(&profile.aka2), aka2::bob_randomness(&profile.aka2)),
        }
    }

    pub fn source_len(self, profile: &ParameterProfile) -> usize {
        match self {
            ProtocolId::Aka => profile.aka.n,
            ProtocolId::Aka2 => profile.aka2.n,
        }
    }

    pub fn key_len(self, profile: &ParameterProfile) -> usize {
        match self {
            ProtocolId::Aka => profile.aka.key_len,
            ProtocolId::Aka2 => profile.aka2.key_len,
        }
    }

    /// Number of phases; the last one carries each party's final message.
    pub fn phases(self, profile: &ParameterProfile) -> usize {
        match self {
            ProtocolId::Aka => 1,
            ProtocolId::Aka2 => profile.aka2.phases + 1,
        }
    }

    /// Schema of a message travelling in `direction` during `phase`.
    pub fn schema(self, profile: &ParameterProfile, direction: Direction, phase: usize) -> Schema {
        match (self, direction) {
            (ProtocolId::Aka, Direction::AliceToBob) => aka::alice_schema(&profile.aka),
            (ProtocolId::Aka, Direction::BobToAlice) => aka::bob_schema(&profile.aka),
            (ProtocolId::Aka2, Direction::AliceToBob) => aka2::alice_schema(&profile.aka2, phase),
            (ProtocolId::Aka2, Direction::BobToAlice) => aka2::bob_schema(&profile.aka2, phase),
        }
    }

    /// Fresh honest parties for one run.
    pub fn parties(
        self,
        profile: &ParameterProfile,
        x: &BitString,
        alice: Tape,
        bob: Tape,
    ) -> Result<(Box<dyn Party>, Box<dyn Party>)> {
        if x.len() != self.source_len(profile) {
            return Err(Error::DomainMismatch(self.source_len(profile), x.len()));
        }
        Ok(match self {
            ProtocolId::Aka => (
                Box::new(aka::AkaAlice::new(x.clone(), alice, &profile.aka)),
                Box::new(aka::AkaBob::new(x.clone(), bob, &profile.aka)),
            ),
            ProtocolId::Aka2 => {
                aka2::edit_code(&profile.aka2)?;
                (
                    Box::new(aka2::Aka2Alice::new(x.clone(), alice, &profile.aka2)),
                    Box::new(aka2::Aka2Bob::new(x.clone(), bob, &profile.aka2)),
                )
            }
        })
    }
}

/// One delivery: what the sender emitted (None if Eve forged it) and what
/// reached the recipient (None if Eve dropped it).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exchange {
    pub to: Role,
    pub sent: Option<Message>,
    pub delivered: Option<Message>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub protocol: ProtocolId,
    pub exchanges: Vec<Exchange>,
    pub alice: PartyOutcome,
    pub bob: PartyOutcome,
    pub checks: Vec<CheckRecord>,
    pub alice_tape: BitString,
    pub bob_tape: BitString,
}

/// One line of the JSONL transcript log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptLine {
    pub run_id: u64,
    pub phase: usize,
    pub direction: Direction,
    pub field: String,
    pub hex: String,
    pub tampered: bool,
}

impl Transcript {
    /// Both parties output the same non-⊥ key.
    pub fn agree(&self) -> bool {
        matches!((&self.alice, &self.bob), (PartyOutcome::Key(a), PartyOutcome::Key(b)) if a == b)
    }

    /// Both accept with different keys.
    pub fn violated(&self) -> bool {
        matches!((&self.alice, &self.bob), (PartyOutcome::Key(a), PartyOutcome::Key(b)) if a != b)
    }

    pub fn lines(&self, run_id: u64) -> Vec<TranscriptLine> {
        let mut out = Vec::new();
        for ex in &self.exchanges {
            let Some(msg) = ex.delivered.as_ref().or(ex.sent.as_ref()) else { continue };
            for f in &msg.fields {
                let original = ex.sent.as_ref().and_then(|s| s.get(&f.name));
                let tampered = ex.delivered.is_none()
                    || original != Some(&f.bits)
                    || ex.sent.as_ref().map(|s| s.phase) != Some(msg.phase);
                out.push(TranscriptLine {
                    run_id,
                    phase: msg.phase,
                    direction: msg.direction,
                    field: f.name.clone(),
                    hex: f.bits.to_hex(),
                    tampered,
                });
            }
        }
        out
    }
}

/// Runs the protocol with every message delivered unchanged.
pub fn run_honest(
    protocol: ProtocolId,
    profile: &ParameterProfile,
    x: &BitString,
    alice_tape: BitString,
    bob_tape: BitString,
) -> Result<Transcript> {
    require_valid(profile)?;
    let (mut alice, mut bob) =
        protocol.parties(profile, x, Tape::new(alice_tape.clone()), Tape::new(bob_tape.clone()))?;
    let mut exchanges = Vec::new();
    let mut checks = Vec::new();
    let mut next = alice.start()?;
    let mut to = Role::Bob;
    while let Some(msg) = next.take() {
        let party = if to == Role::Bob { &mut bob } else { &mut alice };
        let reaction = party.receive(&msg, &mut checks)?;
        exchanges.push(Exchange { to, sent: Some(msg.clone()), delivered: Some(msg) });
        next = reaction.reply;
        to = to.other();
    }
    Ok(Transcript {
        protocol,
        exchanges,
        alice: alice.outcome().cloned().unwrap_or(PartyOutcome::Reject),
        bob: bob.outcome().cloned().unwrap_or(PartyOutcome::Reject),
        checks,
        alice_tape,
        bob_tape,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condenser::{desk, micro, paper};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_run(protocol: ProtocolId, profile: &ParameterProfile, rng: &mut ChaCha8Rng) -> Transcript {
        let (a, b) = protocol.randomness(profile);
        let x = Tape::random(protocol.source_len(profile), rng).bits().clone();
        let ta = Tape::random(a, rng).bits().clone();
        let tb = Tape::random(b, rng).bits().clone();
        run_honest(protocol, profile, &x, ta, tb).unwrap()
    }

    #[test]
    fn honest_runs_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for profile in [desk(), micro()] {
            for protocol in [ProtocolId::Aka, ProtocolId::Aka2] {
                for _ in 0..50 {
                    let t = random_run(protocol, &profile, &mut rng);
                    assert!(t.agree(), "{} {}", profile.name, protocol.name());
                    assert!(t.checks.iter().all(|c| c.passed));
                    assert_eq!(t.alice.key().unwrap().len(), protocol.key_len(&profile));
                }
            }
        }
    }

    #[test]
    fn phase_counts_and_lengths() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = desk();
        let t = random_run(ProtocolId::Aka2, &p, &mut rng);
        // L + 1 phases, two messages each.
        assert_eq!(t.exchanges.len(), 2 * (p.aka2.phases + 1));
        for ex in &t.exchanges {
            let m = ex.delivered.as_ref().unwrap();
            let schema = match m.direction {
                Direction::AliceToBob => aka2::alice_schema(&p.aka2, m.phase),
                Direction::BobToAlice => aka2::bob_schema(&p.aka2, m.phase),
            };
            assert!(m.conforms(&schema));
        }
        let t = random_run(ProtocolId::Aka, &p, &mut rng);
        assert_eq!(t.exchanges.len(), 2);
        assert_eq!(t.exchanges[1].delivered.as_ref().unwrap().get("T1").unwrap().len(), p.aka.s as usize);
    }

    #[test]
    fn paper_mode_lengths() {
        let p = paper();
        assert_eq!(p.aka.r1_len as u64, 4 * p.aka.s);
        assert_eq!(p.aka.t1_len as u64, p.aka.s);
        // The repetition code has no rate-1/2 member; paper mode is shape-only here.
        assert!(aka2::edit_code(&p.aka2).is_err());
    }

    #[test]
    fn deterministic_given_randomness() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = desk();
        let x = Tape::random(p.aka.n, &mut rng).bits().clone();
        let a = Tape::random(aka::alice_randomness(&p.aka), &mut rng).bits().clone();
        let b = Tape::random(aka::bob_randomness(&p.aka), &mut rng).bits().clone();
        let t1 = run_honest(ProtocolId::Aka, &p, &x, a.clone(), b.clone()).unwrap();
        let t2 = run_honest(ProtocolId::Aka, &p, &x, a, b).unwrap();
        assert_eq!(t1, t2);
    }

    #[test]
    fn short_tape_is_an_error() {
        let p = micro();
        let err = run_honest(ProtocolId::Aka, &p, &BitString::zeros(4), BitString::zeros(2), BitString::zeros(1));
        assert!(matches!(err, Err(Error::Randomness { .. })));
    }

    #[test]
    fn flipped_tag_is_rejected() {
        let p = desk();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = Tape::random(p.aka.n, &mut rng).bits().clone();
        let mut alice = aka::AkaAlice::new(x.clone(), Tape::random(64, &mut rng), &p.aka);
        let mut bob = aka::AkaBob::new(x, Tape::random(64, &mut rng), &p.aka);
        let mut checks = vec![];
        let m1 = alice.start().unwrap().unwrap();
        let mut m2 = bob.receive(&m1, &mut checks).unwrap().reply.unwrap();
        m2.get_mut("T2").unwrap().flip(0);
        let r = alice.receive(&m2, &mut checks).unwrap();
        assert_eq!(r.outcome, Some(PartyOutcome::Reject));
        assert_eq!(checks.last().unwrap().check, "T2");
        // Malformed framing is a reject.
        let mut bob = aka::AkaBob::new(BitString::zeros(64), Tape::random(8, &mut rng), &p.aka);
        let mut bad = m1.clone();
        bad.phase = 2;
        assert!(bob.receive(&bad, &mut checks).unwrap().outcome.unwrap().is_reject());
    }

    #[test]
    fn purify_keeps_reject_and_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(purify(&PartyOutcome::Reject, &mut rng), PartyOutcome::Reject);
        let k = PartyOutcome::Key(BitString::zeros(9));
        assert_eq!(purify(&k, &mut rng).key().unwrap().len(), 9);
    }
}
