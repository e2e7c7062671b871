use serde::{Deserialize, Serialize};

use crate::bitcore::BitString;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Alice,
    Bob,
}

impl Role {
    pub fn other(self) -> Role {
        match self {
            Role::Alice => Role::Bob,
            Role::Bob => Role::Alice,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "A->B")]
    AliceToBob,
    #[serde(rename = "B->A")]
    BobToAlice,
}

impl Direction {
    pub fn recipient(self) -> Role {
        match self {
            Direction::AliceToBob => Role::Bob,
            Direction::BobToAlice => Role::Alice,
        }
    }

    pub fn toward(role: Role) -> Direction {
        match role {
            Role::Alice => Direction::BobToAlice,
            Role::Bob => Direction::AliceToBob,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Field {
    pub name: String,
    pub bits: BitString,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Message {
    pub direction: Direction,
    pub phase: usize,
    pub fields: Vec<Field>,
}

/// Field names and lengths a message must carry.
pub type Schema = Vec<(&'static str, usize)>;

impl Message {
    pub fn new(direction: Direction, phase: usize, fields: Vec<(&str, BitString)>) -> Self {
        let fields = fields
            .into_iter()
            .map(|(name, bits)| Field { name: name.to_string(), bits })
            .collect();
        Message { direction, phase, fields }
    }

    /// A message of the given schema with every field zero.
    pub fn blank(direction: Direction, phase: usize, schema: &Schema) -> Self {
        Message::new(direction, phase, schema.iter().map(|&(n, l)| (n, BitString::zeros(l))).collect())
    }

    pub fn get(&self, name: &str) -> Option<&BitString> {
        self.fields.iter().find(|f| f.name == name).map(|f| &f.bits)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut BitString> {
        self.fields.iter_mut().find(|f| f.name == name).map(|f| &mut f.bits)
    }

    /// True iff the field names and lengths are exactly `schema`, in order.
    pub fn conforms(&self, schema: &Schema) -> bool {
        self.fields.len() == schema.len()
            && self.fields.iter().zip(schema).all(|(f, &(n, l))| f.name == n && f.bits.len() == l)
    }

    /// Concatenation of all fields, for keying Eve's view.
    pub fn payload(&self) -> BitString {
        BitString::concat_all(self.fields.iter().map(|f| &f.bits))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartyOutcome {
    Key(BitString),
    /// ⊥.
    Reject,
}

impl PartyOutcome {
    pub fn key(&self) -> Option<&BitString> {
        match self {
            PartyOutcome::Key(k) => Some(k),
            PartyOutcome::Reject => None,
        }
    }

    pub fn is_reject(&self) -> bool {
        matches!(self, PartyOutcome::Reject)
    }
}

/// ⊥ stays ⊥; a key becomes a fresh uniform key of the same length.
pub fn purify(outcome: &PartyOutcome, rng: &mut impl rand::Rng) -> PartyOutcome {
    match outcome {
        PartyOutcome::Reject => PartyOutcome::Reject,
        PartyOutcome::Key(k) => PartyOutcome::Key(BitString::from_bits((0..k.len()).map(|_| rng.gen::<bool>()))),
    }
}

/// One equality check an honest party ran on a delivered message.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CheckRecord {
    pub party: Role,
    pub phase: usize,
    pub check: String,
    pub passed: bool,
}

/// What a party does after a delivery.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Reaction {
    pub reply: Option<Message>,
    pub outcome: Option<PartyOutcome>,
}

impl Reaction {
    pub fn reply(m: Message) -> Self {
        Reaction { reply: Some(m), outcome: None }
    }

    pub fn reject() -> Self {
        Reaction { reply: None, outcome: Some(PartyOutcome::Reject) }
    }
}

/// An honest protocol participant driven one delivered message at a time.
pub trait Party {
    fn role(&self) -> Role;

    /// The opening message, for the party that speaks first.
    fn start(&mut self) -> crate::Result<Option<Message>>;

    /// Processes a delivered message. Deliveries after an outcome are ignored.
    fn receive(&mut self, msg: &Message, checks: &mut Vec<CheckRecord>) -> crate::Result<Reaction>;

    fn outcome(&self) -> Option<&PartyOutcome>;

    /// The value of `field` that would pass this party's check on `msg`, given
    /// the message's other fields; None if the field is not checked.
    fn expected(&self, msg: &Message, field: &str) -> Option<BitString>;

    /// Schema this party expects for its next delivery, if it is still live.
    fn expects(&self) -> Option<(usize, Schema)>;
}
