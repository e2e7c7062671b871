use serde::{Deserialize, Serialize};

use crate::bitcore::BitString;
use crate::condenser::ParameterProfile;
use crate::protocol::{ProtocolId, Role};

/// A change Eve makes to one field of a message before delivering it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Edit {
    Flip { field: String, bit: usize },
    Xor { field: String, mask: BitString },
    Set { field: String, value: BitString },
    /// The value maximizing the chance the recipient's check on this field
    /// passes, given everything Eve has seen. Exact mode only.
    Guess { field: String },
    /// Sets M to block `block` (1-based) of the edit codeword of the Y most
    /// recently delivered to Bob.
    ReencodeBlock { block: usize },
}

impl Edit {
    pub fn field(&self) -> &str {
        match self {
            Edit::Flip { field, .. } | Edit::Xor { field, .. } | Edit::Set { field, .. } | Edit::Guess { field } => field,
            Edit::ReencodeBlock { .. } => "M",
        }
    }

    pub fn flip(field: &str, bit: usize) -> Self {
        Edit::Flip { field: field.into(), bit }
    }

    pub fn guess(field: &str) -> Self {
        Edit::Guess { field: field.into() }
    }
}

/// One scheduling step. Eve chooses the next recipient every time.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    /// Delivers the oldest undelivered message of the other party to `to`,
    /// optionally relabelled with `phase`. Skipped if nothing is pending.
    Forward {
        to: Role,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        edits: Vec<Edit>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phase: Option<usize>,
    },
    /// Delivers a message Eve builds herself: every field zero, then `edits`.
    Forge {
        to: Role,
        phase: usize,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        edits: Vec<Edit>,
    },
    /// Discards the oldest undelivered message of `from`.
    Drop { from: Role },
}

impl Action {
    pub fn forward(to: Role) -> Self {
        Action::Forward { to, edits: vec![], phase: None }
    }

    pub fn forward_with(to: Role, edits: Vec<Edit>) -> Self {
        Action::Forward { to, edits, phase: None }
    }

    pub fn recipient(&self) -> Option<Role> {
        match self {
            Action::Forward { to, .. } | Action::Forge { to, .. } => Some(*to),
            Action::Drop { .. } => None,
        }
    }

    /// True for anything but an unedited, unrelabelled forward.
    pub fn tampers(&self) -> bool {
        !matches!(self, Action::Forward { edits, phase: None, .. } if edits.is_empty())
    }

    pub fn edits(&self) -> &[Edit] {
        match self {
            Action::Forward { edits, .. } | Action::Forge { edits, .. } => edits,
            Action::Drop { .. } => &[],
        }
    }
}

/// A deterministic Eve: the listed actions, then (if `then_pass`) oldest-first
/// unchanged delivery until no message is pending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryScript {
    pub id: String,
    pub protocol: ProtocolId,
    pub description: String,
    pub actions: Vec<Action>,
    #[serde(default = "yes")]
    pub then_pass: bool,
}

fn yes() -> bool {
    true
}

impl AdversaryScript {
    fn new(id: &str, protocol: ProtocolId, description: &str, actions: Vec<Action>) -> Self {
        AdversaryScript { id: id.into(), protocol, description: description.into(), actions, then_pass: true }
    }

    pub fn passive(protocol: ProtocolId) -> Self {
        AdversaryScript::new("passive", protocol, "every message delivered unchanged", vec![])
    }

    /// Number of best-guess slots, in action then edit order.
    pub fn guess_slots(&self) -> usize {
        self.actions
            .iter()
            .flat_map(|a| a.edits())
            .filter(|e| matches!(e, Edit::Guess { .. }))
            .count()
    }

    /// Index of the first tampering action, or None for a passive script.
    pub fn first_tamper(&self) -> Option<usize> {
        self.actions.iter().position(Action::tampers)
    }
}

/// The built-in suite for one protocol. Multi-round scripts are laid out for
/// the profile's number of block phases L (at least two).
pub fn builtin_scripts(protocol: ProtocolId, profile: &ParameterProfile) -> Vec<AdversaryScript> {
    use Action::*;
    use Role::{Alice as A, Bob as B};
    let fwd = Action::forward;
    let fwd_with = Action::forward_with;
    match protocol {
        ProtocolId::Aka => vec![
            AdversaryScript::passive(protocol),
            AdversaryScript::new("flip-t2", protocol, "flip the first bit of T2'", vec![fwd(B), fwd_with(A, vec![Edit::flip("T2", 0)])]),
            AdversaryScript::new(
                "substitute-w-keep-tag",
                protocol,
                "change W' and keep Bob's tag",
                vec![fwd(B), fwd_with(A, vec![Edit::flip("W", 0)])],
            ),
            AdversaryScript::new(
                "substitute-w-guess-tag",
                protocol,
                "change W' and answer T2 with the best guess",
                vec![fwd(B), fwd_with(A, vec![Edit::flip("W", 0), Edit::guess("T2")])],
            ),
            AdversaryScript::new(
                "case1-y2",
                protocol,
                "keep Y1, change Y2, best-guess both tags",
                vec![fwd_with(B, vec![Edit::flip("Y2", 0)]), fwd_with(A, vec![Edit::guess("T1"), Edit::guess("T2")])],
            ),
            AdversaryScript::new(
                "case2-y1",
                protocol,
                "change Y1, best-guess both tags",
                vec![fwd_with(B, vec![Edit::flip("Y1", 0)]), fwd_with(A, vec![Edit::guess("T1"), Edit::guess("T2")])],
            ),
        ],
        ProtocolId::Aka2 => {
            let l = profile.aka2.phases;
            // A forged phase-3 message for Bob carries a block only if phase 3
            // is still a block phase.
            let mut insert3 = vec![Edit::guess("V")];
            if l >= 3 {
                insert3.push(Edit::ReencodeBlock { block: 3 });
            }
            let mut change_y = vec![fwd_with(B, vec![Edit::flip("Y", 0), Edit::ReencodeBlock { block: 1 }])];
            let mut change_y_guess = vec![
                fwd_with(B, vec![Edit::flip("Y", 0), Edit::ReencodeBlock { block: 1 }]),
                fwd_with(A, vec![Edit::guess("T")]),
            ];
            for i in 2..=l {
                change_y.extend([fwd(A), fwd_with(B, vec![Edit::ReencodeBlock { block: i }])]);
                change_y_guess.extend([
                    fwd_with(B, vec![Edit::ReencodeBlock { block: i }]),
                    fwd_with(A, vec![Edit::guess("T")]),
                ]);
            }
            change_y_guess.extend([fwd(B), fwd_with(A, vec![Edit::flip("W", 0), Edit::guess("T")])]);
            let mut alter_insert =
                vec![fwd(B), fwd(A), fwd_with(B, vec![Edit::flip("M", 0)]), Forge { to: B, phase: 3, edits: insert3.clone() }];
            if l < 3 {
                // The insertion handed Bob his last message, so a matching
                // deletion on Alice's side is needed for the schedule to exist.
                alter_insert.extend([fwd(A), fwd(A), Drop { from: A }]);
            }
            vec![
                AdversaryScript::passive(protocol),
                AdversaryScript::new(
                    "alter-m2",
                    protocol,
                    "A: flip a bit of block M_2 on its way to Bob",
                    vec![fwd(B), fwd(A), fwd_with(B, vec![Edit::flip("M", 0)])],
                ),
                AdversaryScript::new(
                    "alter-m2-guess",
                    protocol,
                    "A on M_2, then best-guess T_2 for Alice",
                    vec![fwd(B), fwd(A), fwd_with(B, vec![Edit::flip("M", 0)]), fwd_with(A, vec![Edit::guess("T")])],
                ),
                AdversaryScript::new(
                    "delete-insert-2",
                    protocol,
                    "D: answer Alice's phase 2 alone; I: feed Bob a forged phase 3",
                    vec![
                        fwd(B),
                        fwd(A),
                        Forge { to: A, phase: 2, edits: vec![Edit::guess("T")] },
                        fwd(B),
                        Forge { to: B, phase: 3, edits: insert3.clone() },
                        Drop { from: B },
                        fwd(A),
                        Drop { from: A },
                    ],
                ),
                AdversaryScript::new("alter-insert", protocol, "A on M_2 immediately followed by I", alter_insert),
                AdversaryScript::new("change-y", protocol, "flip Y and re-encode every block for Bob", change_y),
                AdversaryScript::new(
                    "change-y-guess-final",
                    protocol,
                    "flip Y, re-encode, best-guess every T and the final tag on a changed W",
                    change_y_guess,
                ),
            ]
        }
    }
}

pub fn builtin_script(protocol: ProtocolId, profile: &ParameterProfile, id: &str) -> Option<AdversaryScript> {
    builtin_scripts(protocol, profile).into_iter().find(|s| s.id == id)
}
