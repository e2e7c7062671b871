//! Reading a script as delete / insert / alter operations on the block
//! schedule of the multi-round protocol.

use serde::{Deserialize, Serialize};

use super::script::{Action, AdversaryScript, Edit};
use crate::condenser::ParameterProfile;
use crate::protocol::{ProtocolId, Role};
use crate::ratio::{self, Rational};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OpKind {
    /// Eve interacts with Alice twice in a row.
    D,
    /// Eve interacts with Bob twice in a row.
    I,
    /// A block M_i reaches Bob altered.
    A,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleOp {
    pub kind: OpKind,
    /// Index of the script action performing it.
    pub action: usize,
    /// Recipient's phase at that delivery.
    pub phase: usize,
    /// False for an A immediately followed by an I: Eve never has to deliver
    /// Bob's answer to the altered block.
    pub forced: bool,
}

impl ScheduleOp {
    /// The honest check this operation makes Eve answer.
    pub fn challenge(&self) -> (Role, usize, &'static str) {
        match self.kind {
            OpKind::D | OpKind::A => (Role::Alice, self.phase, "T"),
            OpKind::I => (Role::Bob, self.phase, "V"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleClass {
    pub ops: Vec<ScheduleOp>,
    /// Counts of D, I and A.
    pub a: usize,
    pub b: usize,
    pub c: usize,
    /// A operations immediately followed by an I.
    pub d: usize,
    pub changes_y: bool,
    /// a + b + c - d.
    pub forced_challenges: usize,
    /// ⌈2eL/3⌉, when Y reaches Bob changed.
    pub y_change_bound: Option<u64>,
    /// The larger of the two bounds.
    pub challenge_bound: u64,
}

fn ceil_rational(r: &Rational) -> u64 {
    ratio::ceil_int(r).try_into().unwrap_or(0)
}

/// The canonical D/I/A sequence of a script, checked against a skeleton run
/// in which no party rejects.
///
/// Deliveries are read in order with Alice's opening message as the zeroth
/// interaction; a delivery to the same party as the previous one is a D
/// (Alice) or an I (Bob). Only the explicit actions are classified; the
/// passive tail is not.
pub fn classify_schedule(script: &AdversaryScript, profile: &ParameterProfile) -> Result<ScheduleClass> {
    let protocol = script.protocol;
    let last = protocol.phases(profile);
    // Pending messages and deliveries received, per party.
    let mut pending = [1usize, 0];
    let mut received = [0usize, 0];
    let slot = |r: Role| usize::from(r == Role::Bob);
    let mut prev = Role::Alice;
    let mut ops: Vec<ScheduleOp> = Vec::new();
    let mut changes_y = false;
    for (i, action) in script.actions.iter().enumerate() {
        match action {
            Action::Drop { from } => {
                if pending[slot(*from)] == 0 {
                    return Err(Error::Schedule(format!("action {i} drops from an empty queue")));
                }
                pending[slot(*from)] -= 1;
                continue;
            }
            Action::Forward { to, .. } => {
                let from = slot(to.other());
                if pending[from] == 0 {
                    return Err(Error::Schedule(format!("action {i} forwards from an empty queue")));
                }
                pending[from] -= 1;
            }
            Action::Forge { .. } => {}
        }
        let to = action.recipient().expect("delivery");
        if received[slot(to)] >= last {
            return Err(Error::Schedule(format!("action {i} delivers past the last phase of {to:?}")));
        }
        received[slot(to)] += 1;
        let phase = received[slot(to)];
        let replies = to == Role::Bob || phase < last;
        if replies {
            pending[slot(to)] += 1;
        }
        if to == prev {
            let kind = if to == Role::Alice { OpKind::D } else { OpKind::I };
            ops.push(ScheduleOp { kind, action: i, phase, forced: true });
        }
        if protocol == ProtocolId::Aka2 && to == Role::Bob {
            if let Action::Forward { edits, .. } = action {
                if edits.iter().any(|e| e.field() == "M") {
                    ops.push(ScheduleOp { kind: OpKind::A, action: i, phase, forced: true });
                }
            }
        }
        if to == Role::Bob && phase == 1 {
            let y_fields = if protocol == ProtocolId::Aka2 { &["Y"][..] } else { &["Y1", "Y2"][..] };
            changes_y |= action.edits().iter().any(|e| y_fields.contains(&e.field()) && !matches!(e, Edit::ReencodeBlock { .. }));
        }
        prev = to;
    }
    // An A whose very next delivery is an I does not force a challenge.
    let kinds: Vec<(OpKind, usize)> = ops.iter().map(|o| (o.kind, o.action)).collect();
    for op in ops.iter_mut().filter(|o| o.kind == OpKind::A) {
        let next_delivery = script.actions[op.action + 1..]
            .iter()
            .position(|a| a.recipient().is_some())
            .map(|k| op.action + 1 + k);
        if let Some(n) = next_delivery {
            if kinds.contains(&(OpKind::I, n)) {
                op.forced = false;
            }
        }
    }
    let count = |k: OpKind| ops.iter().filter(|o| o.kind == k).count();
    let (a, b, c) = (count(OpKind::D), count(OpKind::I), count(OpKind::A));
    let d = ops.iter().filter(|o| !o.forced).count();
    if a != b && received[1] == last {
        return Err(Error::Schedule(format!(
            "{a} deletions and {b} insertions but Bob receives a full codeword"
        )));
    }
    let y_change_bound = (changes_y && protocol == ProtocolId::Aka2).then(|| {
        let p = &profile.aka2;
        let l = Rational::from_integer((p.phases as i64).into());
        ceil_rational(&(ratio::rat(2, 3) * &p.e * l))
    });
    let forced_challenges = a + b + c - d;
    Ok(ScheduleClass {
        a,
        b,
        c,
        d,
        changes_y,
        forced_challenges,
        y_change_bound,
        challenge_bound: y_change_bound.unwrap_or(0).max(forced_challenges as u64),
        ops,
    })
}
