use std::path::Path;

use nmcond::adversary::{builtin_script, run_attacked, run_with_adversary, AdversaryScript, EstimateMode};
use nmcond::primitives::registry::Kind;
use nmcond::protocol::{run_honest, PartyOutcome, ProtocolId, Tape, Transcript};
use nmcond::BitString;
use serde::{Deserialize, Serialize};

use crate::config::{section, Loaded, ScriptRef};
use crate::output::{write_json, write_jsonl};
use crate::{CliError, ModeFlags};

pub const OUTCOME_SCHEMA: &str = "nmcond.outcome/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunOutcome {
    Agree,
    Reject,
    Violation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: u64,
    pub outcome: RunOutcome,
    pub alice: Option<String>,
    pub bob: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeSummary {
    pub schema: String,
    pub config: String,
    pub protocol: ProtocolId,
    pub profile: String,
    pub script: String,
    pub runs: u64,
    pub agree: u64,
    pub reject: u64,
    pub violation: u64,
    pub key_len: usize,
    pub transcript: String,
    pub attack_report: Option<String>,
    pub records: Vec<RunRecord>,
}

fn key_hex(o: &PartyOutcome) -> Option<String> {
    o.key().map(BitString::to_hex)
}

fn classify(t: &Transcript) -> RunOutcome {
    if t.agree() {
        RunOutcome::Agree
    } else if t.violated() {
        RunOutcome::Violation
    } else {
        RunOutcome::Reject
    }
}

/// Primitive kinds a protocol consumes; runs are refused unless the registry
/// certifies one of each.
fn required_kinds(protocol: ProtocolId) -> Vec<Kind> {
    let mut kinds = vec![Kind::StrongExt, Kind::TwoSourceExt, Kind::Mac];
    if protocol == ProtocolId::Aka2 {
        kinds.push(Kind::EditCode);
    }
    kinds
}

pub fn resolve_script(r: Option<&ScriptRef>, protocol: ProtocolId, loaded: &Loaded) -> Result<AdversaryScript, CliError> {
    match r {
        None => Ok(AdversaryScript::passive(protocol)),
        Some(ScriptRef::Inline(s)) => Ok(s.clone()),
        Some(ScriptRef::Builtin(id)) => builtin_script(protocol, &loaded.profile, id)
            .ok_or_else(|| CliError::usage(format!("no built-in {} script {id:?}", protocol.name()))),
    }
}

pub fn cmd_run(config: &Path, out: &Path, seed: Option<&str>, mode: &ModeFlags) -> Result<(), CliError> {
    let loaded = Loaded::read(config)?;
    let sec = section(&loaded.config.run, "run")?;
    let seed = loaded.seed(seed)?;
    let mut registry = loaded.registry()?;
    registry.certify().map_err(CliError::lib)?;
    for kind in required_kinds(sec.protocol) {
        if !registry.kind_certified(kind) {
            return Err(CliError::Violation(format!("refusing to run: no certified {kind:?} primitive")));
        }
    }
    let script = resolve_script(sec.script.as_ref(), sec.protocol, &loaded)?;
    let profile = &loaded.profile;
    let n = sec.protocol.source_len(profile);
    if sec.source.domain_len() != n {
        return Err(CliError::usage(format!("source has {} bits, protocol needs {n}", sec.source.domain_len())));
    }
    let (a_bits, b_bits) = sec.protocol.randomness(profile);
    let dir = out.join("run");
    let mut lines = Vec::new();
    let mut records = Vec::new();
    for r in 0..sec.runs {
        let node = seed.child("run").index(r);
        let xv = sec.source.sample(&mut node.child("source").rng()).map_err(CliError::lib)?;
        let x = BitString::from_u64(xv, n);
        let ta = Tape::random(a_bits, &mut node.child("alice").rng()).bits().clone();
        let tb = Tape::random(b_bits, &mut node.child("bob").rng()).bits().clone();
        let t = if script.actions.is_empty() && script.then_pass {
            run_honest(sec.protocol, profile, &x, ta, tb)
        } else {
            run_attacked(profile, &x, ta, tb, &script)
        }
        .map_err(CliError::lib)?;
        lines.extend(t.lines(r));
        records.push(RunRecord { run_id: r, outcome: classify(&t), alice: key_hex(&t.alice), bob: key_hex(&t.bob) });
    }
    write_jsonl(&dir.join("transcript.jsonl"), &lines)?;
    let attack_report = if script.actions.is_empty() {
        None
    } else {
        let est = if mode.exact {
            EstimateMode::Exact
        } else {
            EstimateMode::Sampling { trials: mode.trials.unwrap_or(sec.runs), seed: seed.child("attack") }
        };
        let report = run_with_adversary(sec.protocol, profile, &sec.source, &script, &est).map_err(CliError::lib)?;
        write_json(&dir.join("attack_report.json"), &report)?;
        Some("attack_report.json".to_string())
    };
    let count = |o: RunOutcome| records.iter().filter(|r| r.outcome == o).count() as u64;
    let summary = OutcomeSummary {
        schema: OUTCOME_SCHEMA.into(),
        config: loaded.config.name.clone(),
        protocol: sec.protocol,
        profile: profile.name.clone(),
        script: script.id.clone(),
        runs: sec.runs,
        agree: count(RunOutcome::Agree),
        reject: count(RunOutcome::Reject),
        violation: count(RunOutcome::Violation),
        key_len: sec.protocol.key_len(profile),
        transcript: "transcript.jsonl".into(),
        attack_report,
        records,
    };
    write_json(&dir.join("outcome.json"), &summary)?;
    println!(
        "{} {} under {}: {} runs, {} agree, {} reject, {} violation",
        sec.protocol.name(),
        profile.name,
        script.id,
        summary.runs,
        summary.agree,
        summary.reject,
        summary.violation
    );
    Ok(())
}
