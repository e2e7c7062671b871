//! The active channel adversary: scripts, D/I/A classification and exact or
//! sampled success estimation.

mod channel;
mod estimate;
mod schedule;
mod script;

pub use channel::run_attacked;
pub use estimate::{challenge_ledger, run_with_adversary, AttackReport, EstimateMode, LedgerEntry, EXACT_LIMIT, SUCCESS_EVENT};
pub use schedule::{classify_schedule, OpKind, ScheduleClass, ScheduleOp};
pub use script::{builtin_script, builtin_scripts, Action, AdversaryScript, Edit};
