use std::fmt::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use nmcond::adversary::AttackReport;
use nmcond::primitives::registry::{Certification, CERT_SCHEMA};
use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::certify::{CertSummary, CERT_SUMMARY_SCHEMA};
use crate::oracle::{OracleAnswer, ORACLE_SCHEMA};
use crate::run::{OutcomeSummary, OUTCOME_SCHEMA};
use crate::suite::{SuiteSummary, SUITE_SCHEMA};
use crate::CliError;

fn opt(v: &Option<String>) -> &str {
    v.as_deref().unwrap_or("-")
}

pub fn suite_table(s: &SuiteSummary) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "attack suite {} at {} ({})", s.config, s.profile, if s.exact { "exact" } else { "sampled" });
    let _ = writeln!(t, "{:<34} {:>14} {:>14} {:>8} {:>10}  verdict", "script", "success", "all passed", "product", "runs");
    for r in &s.rows {
        let product = match r.product_holds {
            Some(true) => "holds",
            Some(false) => "BROKEN",
            None => "-",
        };
        let _ = writeln!(
            t,
            "{:<34} {:>14} {:>14} {:>8} {:>10}  {:?}",
            r.key,
            opt(&r.success),
            opt(&r.all_challenges_passed),
            product,
            r.runs,
            r.verdict
        );
        for n in &r.notes {
            let _ = writeln!(t, "    {n}");
        }
    }
    t
}

fn cert_table(certs: &[Certification]) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "{:<24} {:<16} {:>12} {:>12}  result", "primitive", "kind", "measured", "claimed");
    for c in certs {
        let _ = writeln!(
            t,
            "{:<24} {:<16} {:>12} {:>12}  {}",
            c.name,
            format!("{:?}", c.kind),
            c.measured,
            c.claimed,
            if c.passed { "ok" } else { "FAIL" }
        );
    }
    t
}

fn outcome_table(o: &OutcomeSummary) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "{} at {} under {}: {} runs", o.protocol.name(), o.profile, o.script, o.runs);
    let _ = writeln!(t, "  agree {}  reject {}  violation {}  key bits {}", o.agree, o.reject, o.violation, o.key_len);
    if let Some(a) = &o.attack_report {
        let _ = writeln!(t, "  attack report: {a}");
    }
    t
}

fn attack_table(r: &AttackReport) -> String {
    let mut t = String::new();
    let mode = if r.exact { "exact".to_string() } else { format!("{} trials", r.trials.unwrap_or(0)) };
    let _ = writeln!(t, "{} / {} at {} ({mode})", r.protocol.name(), r.strategy, r.profile);
    let _ = writeln!(t, "  success {}  alice accepts {}  bob accepts {}", r.success, r.alice_accept, r.bob_accept);
    let _ = writeln!(t, "  all challenges passed {}  ledger product {}", r.all_challenges_passed, r.ledger_product);
    let _ = writeln!(t, "  {:>3} {:>6} {:<6} {:>5} {:<6} {:<4} {:>16}", "j", "action", "party", "phase", "check", "op", "Pr[H_j|E_j-1]");
    for e in &r.ledger {
        let _ = writeln!(
            t,
            "  {:>3} {:>6} {:<6} {:>5} {:<6} {:<4} {:>16}",
            e.index,
            e.action,
            format!("{:?}", e.party),
            e.phase,
            e.check,
            e.op.map_or("-".to_string(), |o| format!("{o:?}{}", if e.forced { "*" } else { "" })),
            e.conditional.as_ref().map_or("-".to_string(), |c| c.to_string())
        );
    }
    t
}

fn oracle_table(a: &OracleAnswer) -> String {
    let mut t = format!("{} ({:?})\n", a.id, a.verdict);
    for (k, v) in &a.metrics {
        let _ = writeln!(t, "  {k:<24} {v}");
    }
    t
}

fn parse<T: DeserializeOwned>(v: Value, path: &Path) -> Result<T, CliError> {
    serde_json::from_value(v).with_context(|| format!("{} does not match its schema", path.display())).map_err(CliError::Usage)
}

/// Renders one report file as text.
pub fn render(path: &Path) -> Result<String, CliError> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(CliError::Usage)?;
    let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display())).map_err(CliError::Usage)?;
    let schema = v.get("schema").and_then(Value::as_str).map(str::to_string);
    match schema.as_deref() {
        Some(SUITE_SCHEMA) => Ok(suite_table(&parse(v, path)?)),
        Some(CERT_SUMMARY_SCHEMA) => Ok(cert_table(&parse::<CertSummary>(v, path)?.certifications)),
        Some(CERT_SCHEMA) => Ok(cert_table(&[parse(v, path)?])),
        Some(OUTCOME_SCHEMA) => Ok(outcome_table(&parse(v, path)?)),
        Some(ORACLE_SCHEMA) => Ok(oracle_table(&parse(v, path)?)),
        None if v.get("ledger").is_some() => Ok(attack_table(&parse(v, path)?)),
        other => Err(CliError::usage(format!("{}: unknown report schema {other:?}", path.display()))),
    }
}

pub fn cmd_report(files: &[PathBuf]) -> Result<(), CliError> {
    for f in files {
        print!("{}", render(f)?);
    }
    Ok(())
}
