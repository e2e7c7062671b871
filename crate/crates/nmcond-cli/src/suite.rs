use std::collections::BTreeMap;
use std::path::Path;

use nmcond::adversary::{builtin_scripts, run_with_adversary, AdversaryScript, AttackReport, EstimateMode};
use nmcond::ratio;
use serde::{Deserialize, Serialize};

use crate::config::{section, Loaded};
use crate::output::{compare, enforce, write_json, Baselines, Verdict};
use crate::{CliError, ModeFlags};

pub const SUITE_SCHEMA: &str = "nmcond.suite/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteRow {
    /// "protocol/script".
    pub key: String,
    pub success: Option<String>,
    pub all_challenges_passed: Option<String>,
    pub ledger_product: Option<String>,
    pub product_holds: Option<bool>,
    pub runs: u64,
    pub verdict: Verdict,
    pub notes: Vec<String>,
    pub report: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub schema: String,
    pub config: String,
    pub profile: String,
    pub exact: bool,
    pub rows: Vec<SuiteRow>,
}

/// Metrics compared against baselines.
pub fn metrics(r: &AttackReport) -> BTreeMap<String, String> {
    BTreeMap::from([
        ("success".to_string(), ratio::to_text(&r.success)),
        ("all_challenges_passed".to_string(), ratio::to_text(&r.all_challenges_passed)),
    ])
}

pub fn cmd_attack_suite(
    config: &Path,
    out: &Path,
    seed: Option<&str>,
    mode: &ModeFlags,
    strict: bool,
) -> Result<(), CliError> {
    let loaded = Loaded::read(config)?;
    let sec = section(&loaded.config.attack_suite, "attack_suite")?;
    let trials = if mode.exact { None } else { mode.trials.or(sec.trials) };
    let est = match trials {
        None => EstimateMode::Exact,
        Some(t) => EstimateMode::Sampling { trials: t, seed: loaded.seed(seed)?.child("suite") },
    };
    let baselines = sec.baselines.as_ref().map(|rel| Baselines::read(&loaded.resolve(rel))).transpose()?;
    let mut scripts: Vec<AdversaryScript> = Vec::new();
    for &protocol in &sec.protocols {
        let all = builtin_scripts(protocol, &loaded.profile);
        if let Some(ids) = &sec.scripts {
            for id in ids {
                if !all.iter().any(|s| &s.id == id) && !sec.extra_scripts.iter().any(|s| &s.id == id) {
                    return Err(CliError::usage(format!("unknown script {id:?}")));
                }
            }
        }
        scripts.extend(all.into_iter().filter(|s| sec.scripts.as_ref().is_none_or(|ids| ids.contains(&s.id))));
        scripts.extend(sec.extra_scripts.iter().filter(|s| s.protocol == protocol).cloned());
    }
    let dir = out.join("attack_suite");
    let mut rows = Vec::new();
    let mut product_failures = Vec::new();
    for s in &scripts {
        let key = format!("{}/{}", s.protocol.name(), s.id);
        if trials.is_some() && s.guess_slots() > 0 {
            rows.push(SuiteRow {
                key,
                success: None,
                all_challenges_passed: None,
                ledger_product: None,
                product_holds: None,
                runs: 0,
                verdict: Verdict::Skipped,
                notes: vec!["best-guess answering needs exact mode".into()],
                report: None,
            });
            continue;
        }
        let report = run_with_adversary(s.protocol, &loaded.profile, &sec.source, s, &est).map_err(CliError::lib)?;
        let file = format!("{}-{}.json", s.protocol.name(), s.id);
        write_json(&dir.join(&file), &report)?;
        // Sampled values are not comparable with exact baselines.
        let (verdict, notes) = if report.exact {
            compare(baselines.as_ref(), &key, &metrics(&report))
        } else {
            (Verdict::NoBaseline, vec!["sampled, not compared".into()])
        };
        if report.exact && !report.product_bound_holds() {
            product_failures.push(format!("{key}: ledger product differs from the joint pass rate"));
        }
        rows.push(SuiteRow {
            key,
            success: Some(ratio::to_text(&report.success)),
            all_challenges_passed: Some(ratio::to_text(&report.all_challenges_passed)),
            ledger_product: Some(ratio::to_text(&report.ledger_product)),
            product_holds: Some(report.product_bound_holds()),
            runs: report.runs,
            verdict,
            notes,
            report: Some(file),
        });
    }
    let summary = SuiteSummary {
        schema: SUITE_SCHEMA.into(),
        config: loaded.config.name.clone(),
        profile: loaded.profile.name.clone(),
        exact: trials.is_none(),
        rows,
    };
    write_json(&dir.join("summary.json"), &summary)?;
    print!("{}", crate::report::suite_table(&summary));
    let verdicts: Vec<_> = summary.rows.iter().map(|r| (r.key.clone(), r.verdict.clone(), r.notes.clone())).collect();
    if summary.exact {
        enforce(&verdicts, strict)?;
    }
    if !product_failures.is_empty() {
        return Err(CliError::Violation(product_failures.join("\n")));
    }
    Ok(())
}
