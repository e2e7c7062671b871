//! The multi-round protocol: Y is sent with its edit codeword split into L
//! blocks, each block authenticated by a look-ahead tag and followed by a
//! challenge V_i = Ext2(X, W_i) in the next phase.

use super::message::{CheckRecord, Direction, Message, Party, PartyOutcome, Reaction, Role, Schema};
use super::tape::Tape;
use crate::bitcore::BitString;
use crate::condenser::Aka2Params;
use crate::lookahead::{la_ext, la_mac, AltExtShape};
use crate::primitives::{mac_tag, poly_hash, two_source_ip, EditCode};
use crate::{Error, Result};

/// Alice's message in `phase` (1..=L+1).
pub fn alice_schema(p: &Aka2Params, phase: usize) -> Schema {
    let tail = [("M", p.d2), ("Y2", p.y2_len), ("Y3", p.y3_len)];
    match phase {
        1 => std::iter::once(("Y", p.d1)).chain(tail).collect(),
        i if i <= p.phases => std::iter::once(("V", p.v_len)).chain(tail).collect(),
        _ => vec![("V", p.v_len)],
    }
}

/// Bob's reply in `phase` (1..=L+1).
pub fn bob_schema(p: &Aka2Params, phase: usize) -> Schema {
    if phase <= p.phases {
        vec![("W", p.d2), ("T", p.t_len)]
    } else {
        vec![("W", p.w_len), ("T", p.tag_len)]
    }
}

pub fn alice_randomness(p: &Aka2Params) -> usize {
    p.d1 + p.phases * (p.y2_len + p.y3_len)
}

pub fn bob_randomness(p: &Aka2Params) -> usize {
    p.phases * p.d2 + p.w_len
}

pub fn edit_code(p: &Aka2Params) -> Result<EditCode> {
    let code = EditCode::new(p.repeat, p.d1)?;
    if code.codeword_len() != p.lambda_c {
        return Err(Error::Profile(format!(
            "aka2: lambda_c = d1*(repeat+2) ({} vs {})",
            p.lambda_c,
            code.codeword_len()
        )));
    }
    Ok(code)
}

/// T_i = Raz(Y_i3, laMAC_{laExt(x, Y_i2)}(M_i)).
fn block_tag(x: &BitString, m: &BitString, y2: &BitString, y3: &BitString, p: &Aka2Params) -> Result<BitString> {
    let shape = AltExtShape { d: p.row_len, t: p.t, q_input: p.y2_len };
    let rows = la_ext(x, y2, &y2.prefix(p.s0_len)?, shape)?;
    let z = BitString::concat_all(&la_mac(&rows, m)?);
    two_source_ip(y3, &z, p.t_len)
}

fn challenge(x: &BitString, w: &BitString, p: &Aka2Params) -> Result<BitString> {
    poly_hash(x, w, p.v_len)
}

pub struct Aka2Alice {
    x: BitString,
    params: Aka2Params,
    tape: Tape,
    y: BitString,
    blocks: Vec<BitString>,
    /// Phase of the message last sent; the reply must carry it.
    phase: usize,
    /// Expected T of the current phase.
    tag: Option<BitString>,
    /// R = Ext1(X, Y), set when the final phase starts.
    mac_key: Option<BitString>,
    outcome: Option<PartyOutcome>,
}

impl Aka2Alice {
    pub fn new(x: BitString, tape: Tape, params: &Aka2Params) -> Self {
        Aka2Alice {
            x,
            params: params.clone(),
            tape,
            y: BitString::empty(),
            blocks: vec![],
            phase: 0,
            tag: None,
            mac_key: None,
            outcome: None,
        }
    }

    pub fn y(&self) -> &BitString {
        &self.y
    }

    pub fn blocks(&self) -> &[BitString] {
        &self.blocks
    }

    /// Sends phase i <= L: samples (Y_i2, Y_i3) and fixes the expected T_i.
    fn block_message(&mut self, i: usize, lead: (&str, BitString)) -> Result<Message> {
        let p = &self.params;
        let y2 = self.tape.take(p.y2_len)?;
        let y3 = self.tape.take(p.y3_len)?;
        let m = self.blocks[i - 1].clone();
        self.tag = Some(block_tag(&self.x, &m, &y2, &y3, p)?);
        self.phase = i;
        Ok(Message::new(Direction::AliceToBob, i, vec![lead, ("M", m), ("Y2", y2), ("Y3", y3)]))
    }

    fn reject(&mut self) -> Reaction {
        self.outcome = Some(PartyOutcome::Reject);
        Reaction::reject()
    }
}

impl Party for Aka2Alice {
    fn role(&self) -> Role {
        Role::Alice
    }

    fn start(&mut self) -> Result<Option<Message>> {
        let p = self.params.clone();
        self.y = self.tape.take(p.d1)?;
        let codeword = edit_code(&p)?.encode(&self.y)?;
        self.blocks = codeword.chunks(p.d2);
        let y = self.y.clone();
        Ok(Some(self.block_message(1, ("Y", y))?))
    }

    fn receive(&mut self, msg: &Message, checks: &mut Vec<CheckRecord>) -> Result<Reaction> {
        if self.outcome.is_some() || self.phase == 0 {
            return Ok(Reaction::default());
        }
        let p = self.params.clone();
        let i = self.phase;
        if msg.phase != i || msg.direction != Direction::BobToAlice || !msg.conforms(&bob_schema(&p, i)) {
            return Ok(self.reject());
        }
        let w = msg.get("W").expect("conforms").clone();
        let t = msg.get("T").expect("conforms");
        if i <= p.phases {
            let ok = Some(t) == self.tag.as_ref();
            checks.push(CheckRecord { party: Role::Alice, phase: i, check: "T".into(), passed: ok });
            if !ok {
                return Ok(self.reject());
            }
            let v = challenge(&self.x, &w, &p)?;
            if i < p.phases {
                return Ok(Reaction::reply(self.block_message(i + 1, ("V", v))?));
            }
            self.mac_key = Some(poly_hash(&self.x, &self.y, p.r_len)?);
            self.phase = i + 1;
            return Ok(Reaction::reply(Message::new(Direction::AliceToBob, i + 1, vec![("V", v)])));
        }
        let key = self.mac_key.as_ref().expect("final phase");
        let ok = *t == mac_tag(key, &w, p.tag_len)?;
        checks.push(CheckRecord { party: Role::Alice, phase: i, check: "MAC".into(), passed: ok });
        if !ok {
            return Ok(self.reject());
        }
        let out = PartyOutcome::Key(poly_hash(&self.x, &w, p.key_len)?);
        self.outcome = Some(out.clone());
        Ok(Reaction { reply: None, outcome: Some(out) })
    }

    fn outcome(&self) -> Option<&PartyOutcome> {
        self.outcome.as_ref()
    }

    fn expected(&self, msg: &Message, field: &str) -> Option<BitString> {
        if field != "T" || self.outcome.is_some() {
            return None;
        }
        if self.phase <= self.params.phases {
            self.tag.clone()
        } else {
            mac_tag(self.mac_key.as_ref()?, msg.get("W")?, self.params.tag_len).ok()
        }
    }

    fn expects(&self) -> Option<(usize, Schema)> {
        (self.outcome.is_none() && self.phase > 0).then(|| (self.phase, bob_schema(&self.params, self.phase)))
    }
}

pub struct Aka2Bob {
    x: BitString,
    params: Aka2Params,
    tape: Tape,
    y: Option<BitString>,
    blocks: Vec<BitString>,
    /// W_i' sent in the previous phase, for the V check.
    last_w: Option<BitString>,
    phase: usize,
    outcome: Option<PartyOutcome>,
}

impl Aka2Bob {
    pub fn new(x: BitString, tape: Tape, params: &Aka2Params) -> Self {
        Aka2Bob { x, params: params.clone(), tape, y: None, blocks: vec![], last_w: None, phase: 0, outcome: None }
    }

    /// Blocks M_i' received so far.
    pub fn blocks(&self) -> &[BitString] {
        &self.blocks
    }

    fn reject(&mut self) -> Reaction {
        self.outcome = Some(PartyOutcome::Reject);
        Reaction::reject()
    }

    fn check_v(&mut self, msg: &Message, checks: &mut Vec<CheckRecord>) -> Result<bool> {
        let w = self.last_w.as_ref().expect("phase > 1");
        let ok = *msg.get("V").expect("conforms") == challenge(&self.x, w, &self.params)?;
        checks.push(CheckRecord { party: Role::Bob, phase: msg.phase, check: "V".into(), passed: ok });
        Ok(ok)
    }
}

impl Party for Aka2Bob {
    fn role(&self) -> Role {
        Role::Bob
    }

    fn start(&mut self) -> Result<Option<Message>> {
        Ok(None)
    }

    fn receive(&mut self, msg: &Message, checks: &mut Vec<CheckRecord>) -> Result<Reaction> {
        if self.outcome.is_some() {
            return Ok(Reaction::default());
        }
        let p = self.params.clone();
        let i = self.phase + 1;
        if msg.phase != i || msg.direction != Direction::AliceToBob || !msg.conforms(&alice_schema(&p, i)) {
            return Ok(self.reject());
        }
        self.phase = i;
        if i > 1 && !self.check_v(msg, checks)? {
            return Ok(self.reject());
        }
        if i == 1 {
            self.y = Some(msg.get("Y").expect("conforms").clone());
        }
        if i <= p.phases {
            let m = msg.get("M").expect("conforms").clone();
            let t = block_tag(&self.x, &m, msg.get("Y2").unwrap(), msg.get("Y3").unwrap(), &p)?;
            self.blocks.push(m);
            let w = self.tape.take(p.d2)?;
            self.last_w = Some(w.clone());
            return Ok(Reaction::reply(Message::new(Direction::BobToAlice, i, vec![("W", w), ("T", t)])));
        }
        let y = self.y.clone().expect("phase 1 seen");
        let ok = BitString::concat_all(&self.blocks) == edit_code(&p)?.encode(&y)?;
        checks.push(CheckRecord { party: Role::Bob, phase: i, check: "Edit".into(), passed: ok });
        if !ok {
            return Ok(self.reject());
        }
        let r = poly_hash(&self.x, &y, p.r_len)?;
        let w = self.tape.take(p.w_len)?;
        let t = mac_tag(&r, &w, p.tag_len)?;
        let key = poly_hash(&self.x, &w, p.key_len)?;
        let out = PartyOutcome::Key(key);
        self.outcome = Some(out.clone());
        Ok(Reaction {
            reply: Some(Message::new(Direction::BobToAlice, i, vec![("W", w), ("T", t)])),
            outcome: Some(out),
        })
    }

    fn outcome(&self) -> Option<&PartyOutcome> {
        self.outcome.as_ref()
    }

    fn expected(&self, _msg: &Message, field: &str) -> Option<BitString> {
        if field != "V" || self.outcome.is_some() || self.phase == 0 {
            return None;
        }
        challenge(&self.x, self.last_w.as_ref()?, &self.params).ok()
    }

    fn expects(&self) -> Option<(usize, Schema)> {
        self.outcome.is_none().then(|| (self.phase + 1, alice_schema(&self.params, self.phase + 1)))
    }
}
