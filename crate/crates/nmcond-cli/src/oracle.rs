use std::collections::BTreeMap;
use std::path::Path;

use nmcond::condenser::analyze_nm_cond;
use nmcond::distoracle::{min_entropy, verify_nm_extractor, verify_strong_extractor, AdversarySet, FlatFamily, SourceSpec};
use nmcond::lookahead::{is_top_heavy, topheavy_map};
use nmcond::primitives::registry::HashFamily;
use nmcond::primitives::{ext_hash, mac_forgery_advantage, nm_ip, poly_hash, EditCode};
use nmcond::ratio::{self, rat};
use nmcond::BitString;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{section, Loaded, OracleQuery};
use crate::output::{compare, enforce, write_json, Baselines, Verdict};
use crate::CliError;

pub const ORACLE_SCHEMA: &str = "nmcond.oracle/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleAnswer {
    pub schema: String,
    pub id: String,
    pub query: OracleQuery,
    /// Exact values compared against baselines.
    pub metrics: BTreeMap<String, String>,
    pub detail: Value,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Usage(e.into()))
}

fn flat_sources(n: usize, k: usize) -> Vec<SourceSpec> {
    FlatFamily::exhaustive(n, k).sources().collect()
}

/// Evaluates one query; returns its metrics and a detail value.
pub fn answer(q: &OracleQuery, loaded: &Loaded) -> Result<(BTreeMap<String, String>, Value), CliError> {
    let mut m = BTreeMap::new();
    let detail = match q {
        OracleQuery::NmExt { n, m: out, k, .. } => {
            let f = |x: &BitString, y: &BitString| nm_ip(x, y, *out).expect("lengths fixed");
            let rep = verify_nm_extractor(&f, *n, *n, *out, *k, &flat_sources(*n, *k as usize), &AdversarySet::exhaustive())
                .map_err(CliError::lib)?;
            m.insert("worst_distance".into(), ratio::to_text(&rep.report.worst_distance));
            m.insert("decomposed_worst".into(), ratio::to_text(&rep.decomposed_worst));
            m.insert("adversaries".into(), rep.adversaries_checked.to_string());
            to_value(&rep)?
        }
        OracleQuery::NmCond { k, k_prime, literal_cap, .. } => {
            let p = &loaded.profile.nm_cond;
            let a = analyze_nm_cond(p, *k, *k_prime, &flat_sources(p.n, *k as usize), *literal_cap)
                .map_err(CliError::lib)?;
            m.insert("eps_seed".into(), ratio::to_text(&a.report.balanced.eps_seed));
            m.insert("eps_inner".into(), ratio::to_text(&a.report.balanced.eps_inner));
            to_value(&a)?
        }
        OracleQuery::StrongExt { hash, n, d, m: out, k, cap, extra, seed, .. } => {
            let fam = FlatFamily { n: *n, k: *k as usize, cap: *cap, extra: *extra, seed: *seed };
            let sources: Vec<SourceSpec> = fam.sources().collect();
            let f = |x: &BitString, y: &BitString| match hash {
                HashFamily::Toeplitz => ext_hash(x, y, *out).expect("lengths fixed"),
                HashFamily::Poly => poly_hash(x, y, *out).expect("lengths fixed"),
            };
            let rep = verify_strong_extractor(&f, *n, *d, *out, *k, &sources).map_err(CliError::lib)?;
            m.insert("worst_distance".into(), ratio::to_text(&rep.worst_distance));
            m.insert("sources".into(), rep.sources_checked.to_string());
            to_value(&rep)?
        }
        OracleQuery::Mac { v, chunks, .. } => {
            let adv = mac_forgery_advantage(*v, *chunks, None).map_err(CliError::lib)?;
            let bound = rat(*chunks as i64, 1i64 << v);
            m.insert("advantage".into(), ratio::to_text(&adv));
            m.insert("bound".into(), ratio::to_text(&bound));
            serde_json::json!({ "within_bound": adv <= bound })
        }
        OracleQuery::EditCode { repeat, msg_len, .. } => {
            let code = EditCode::new(*repeat, *msg_len).map_err(CliError::lib)?;
            let e = code.certify().map_err(CliError::lib)?;
            m.insert("e".into(), ratio::to_text(&e));
            m.insert("codeword_len".into(), code.codeword_len().to_string());
            serde_json::json!({ "rate": ratio::to_text(&code.rate()) })
        }
        OracleQuery::TopHeavy { max_m, .. } => {
            let mut per_m = Vec::new();
            for len in 1..=*max_m {
                let sets: Vec<_> = BitString::all(len).map(|mu| topheavy_map(&mu).map(|s| s.elems)).collect::<Result<_, _>>().map_err(CliError::lib)?;
                let mut failures = 0u64;
                let mut pairs = 0u64;
                for (i, a) in sets.iter().enumerate() {
                    for (j, b) in sets.iter().enumerate() {
                        if i != j {
                            pairs += 1;
                            failures += u64::from(is_top_heavy(a, b, 4 * len).is_none());
                        }
                    }
                }
                per_m.push(serde_json::json!({ "m": len, "pairs": pairs, "failures": failures }));
                m.insert(format!("failures_m{len}"), failures.to_string());
            }
            Value::Array(per_m)
        }
        OracleQuery::MinEntropy { source, .. } => {
            let d = source.to_dist().map_err(CliError::lib)?;
            m.insert("max_prob".into(), ratio::to_text(&d.max_prob()));
            serde_json::json!({ "min_entropy": min_entropy(&d).map_err(CliError::lib)? })
        }
    };
    Ok((m, detail))
}

pub fn cmd_oracle(config: &Path, out: &Path, strict: bool) -> Result<(), CliError> {
    let loaded = Loaded::read(config)?;
    let sec = section(&loaded.config.oracle, "oracle")?;
    let baselines = sec.baselines.as_ref().map(|rel| Baselines::read(&loaded.resolve(rel))).transpose()?;
    let dir = out.join("oracle");
    let mut verdicts = Vec::new();
    for q in &sec.queries {
        let (metrics, detail) = answer(q, &loaded)?;
        let (verdict, notes) = compare(baselines.as_ref(), q.id(), &metrics);
        let rendered: Vec<String> = metrics.iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!("{:<24} {:<12} {}", q.id(), format!("{verdict:?}"), rendered.join(" "));
        let ans = OracleAnswer {
            schema: ORACLE_SCHEMA.into(),
            id: q.id().into(),
            query: q.clone(),
            metrics,
            detail,
            verdict: verdict.clone(),
            notes: notes.clone(),
        };
        write_json(&dir.join(format!("{}.json", q.id())), &ans)?;
        verdicts.push((q.id().to_string(), verdict, notes));
    }
    enforce(&verdicts, strict)
}
