//! The two-round protocol: Alice sends (Y1, Y2, Y3), Bob answers
//! (W', T1', T2').

use super::message::{CheckRecord, Direction, Message, Party, PartyOutcome, Reaction, Role, Schema};
use super::tape::Tape;
use crate::bitcore::BitString;
use crate::condenser::AkaParams;
use crate::lookahead::{la_ext, la_mac, AltExtShape};
use crate::primitives::{mac_tag, poly_hash, two_source_ip};
use crate::Result;

pub fn alice_schema(p: &AkaParams) -> Schema {
    vec![("Y1", p.y1_len), ("Y2", p.y2_len), ("Y3", p.y3_len)]
}

pub fn bob_schema(p: &AkaParams) -> Schema {
    vec![("W", p.w_len), ("T1", p.t1_len), ("T2", p.tag_len)]
}

pub fn alice_randomness(p: &AkaParams) -> usize {
    p.y1_len + p.y2_len + p.y3_len
}

pub fn bob_randomness(p: &AkaParams) -> usize {
    p.w_len
}

/// Z = laMAC_{laExt(x, y2)}(y1).
fn look_ahead_tag(x: &BitString, y1: &BitString, y2: &BitString, p: &AkaParams) -> Result<BitString> {
    let shape = AltExtShape { d: p.row_len, t: p.t, q_input: p.y2_len };
    let rows = la_ext(x, y2, &y2.prefix(p.s0_len)?, shape)?;
    Ok(BitString::concat_all(&la_mac(&rows, y1)?))
}

/// Values Alice holds after her first message.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct AliceState {
    pub y1: BitString,
    pub y2: BitString,
    pub y3: BitString,
    pub r1: BitString,
    pub z: BitString,
}

pub struct AkaAlice {
    x: BitString,
    params: AkaParams,
    tape: Tape,
    state: Option<AliceState>,
    outcome: Option<PartyOutcome>,
}

impl AkaAlice {
    pub fn new(x: BitString, tape: Tape, params: &AkaParams) -> Self {
        AkaAlice { x, params: params.clone(), tape, state: None, outcome: None }
    }

    pub fn state(&self) -> Option<&AliceState> {
        self.state.as_ref()
    }

    fn expected_t1(&self) -> Option<BitString> {
        let s = self.state.as_ref()?;
        two_source_ip(&s.y3, &s.z, self.params.t1_len).ok()
    }
}

impl Party for AkaAlice {
    fn role(&self) -> Role {
        Role::Alice
    }

    fn start(&mut self) -> Result<Option<Message>> {
        let p = &self.params;
        let y1 = self.tape.take(p.y1_len)?;
        let y2 = self.tape.take(p.y2_len)?;
        let y3 = self.tape.take(p.y3_len)?;
        let z = look_ahead_tag(&self.x, &y1, &y2, p)?;
        let r1 = poly_hash(&self.x, &y1, p.r1_len)?;
        let msg = Message::new(
            Direction::AliceToBob,
            1,
            vec![("Y1", y1.clone()), ("Y2", y2.clone()), ("Y3", y3.clone())],
        );
        self.state = Some(AliceState { y1, y2, y3, r1, z });
        Ok(Some(msg))
    }

    fn receive(&mut self, msg: &Message, checks: &mut Vec<CheckRecord>) -> Result<Reaction> {
        if self.outcome.is_some() || self.state.is_none() {
            return Ok(Reaction::default());
        }
        let p = self.params.clone();
        if msg.phase != 1 || msg.direction != Direction::BobToAlice || !msg.conforms(&bob_schema(&p)) {
            self.outcome = Some(PartyOutcome::Reject);
            return Ok(Reaction::reject());
        }
        let w = msg.get("W").expect("conforms");
        let t1_ok = Some(msg.get("T1").expect("conforms")) == self.expected_t1().as_ref();
        checks.push(CheckRecord { party: Role::Alice, phase: 1, check: "T1".into(), passed: t1_ok });
        if !t1_ok {
            self.outcome = Some(PartyOutcome::Reject);
            return Ok(Reaction::reject());
        }
        let s = self.state.as_ref().expect("started");
        let t2_ok = *msg.get("T2").expect("conforms") == mac_tag(&s.r1, w, p.tag_len)?;
        checks.push(CheckRecord { party: Role::Alice, phase: 1, check: "T2".into(), passed: t2_ok });
        let outcome = if t2_ok { PartyOutcome::Key(poly_hash(&self.x, w, p.key_len)?) } else { PartyOutcome::Reject };
        self.outcome = Some(outcome.clone());
        Ok(Reaction { reply: None, outcome: Some(outcome) })
    }

    fn outcome(&self) -> Option<&PartyOutcome> {
        self.outcome.as_ref()
    }

    fn expected(&self, msg: &Message, field: &str) -> Option<BitString> {
        let s = self.state.as_ref()?;
        match field {
            "T1" => self.expected_t1(),
            "T2" => mac_tag(&s.r1, msg.get("W")?, self.params.tag_len).ok(),
            _ => None,
        }
    }

    fn expects(&self) -> Option<(usize, Schema)> {
        (self.outcome.is_none() && self.state.is_some()).then(|| (1, bob_schema(&self.params)))
    }
}

/// Values Bob computes from a delivered first message.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct BobState {
    pub z: BitString,
    pub r1: BitString,
    pub w: BitString,
    pub t1: BitString,
    pub t2: BitString,
    pub key: BitString,
}

pub struct AkaBob {
    x: BitString,
    params: AkaParams,
    tape: Tape,
    state: Option<BobState>,
    outcome: Option<PartyOutcome>,
}

impl AkaBob {
    pub fn new(x: BitString, tape: Tape, params: &AkaParams) -> Self {
        AkaBob { x, params: params.clone(), tape, state: None, outcome: None }
    }

    pub fn state(&self) -> Option<&BobState> {
        self.state.as_ref()
    }
}

impl Party for AkaBob {
    fn role(&self) -> Role {
        Role::Bob
    }

    fn start(&mut self) -> Result<Option<Message>> {
        Ok(None)
    }

    fn receive(&mut self, msg: &Message, _checks: &mut Vec<CheckRecord>) -> Result<Reaction> {
        if self.outcome.is_some() {
            return Ok(Reaction::default());
        }
        let p = self.params.clone();
        if msg.phase != 1 || msg.direction != Direction::AliceToBob || !msg.conforms(&alice_schema(&p)) {
            self.outcome = Some(PartyOutcome::Reject);
            return Ok(Reaction::reject());
        }
        let (y1, y2, y3) = (msg.get("Y1").unwrap(), msg.get("Y2").unwrap(), msg.get("Y3").unwrap());
        let z = look_ahead_tag(&self.x, y1, y2, &p)?;
        let r1 = poly_hash(&self.x, y1, p.r1_len)?;
        let w = self.tape.take(p.w_len)?;
        let t1 = two_source_ip(y3, &z, p.t1_len)?;
        let t2 = mac_tag(&r1, &w, p.tag_len)?;
        let key = poly_hash(&self.x, &w, p.key_len)?;
        let reply = Message::new(
            Direction::BobToAlice,
            1,
            vec![("W", w.clone()), ("T1", t1.clone()), ("T2", t2.clone())],
        );
        self.state = Some(BobState { z, r1, w, t1, t2, key: key.clone() });
        self.outcome = Some(PartyOutcome::Key(key.clone()));
        Ok(Reaction { reply: Some(reply), outcome: Some(PartyOutcome::Key(key)) })
    }

    fn outcome(&self) -> Option<&PartyOutcome> {
        self.outcome.as_ref()
    }

    fn expected(&self, _msg: &Message, _field: &str) -> Option<BitString> {
        None
    }

    fn expects(&self) -> Option<(usize, Schema)> {
        self.outcome.is_none().then(|| (1, alice_schema(&self.params)))
    }
}
