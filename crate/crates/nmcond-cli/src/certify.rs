use std::path::Path;

use nmcond::primitives::registry::Certification;
use serde::{Deserialize, Serialize};

use crate::config::Loaded;
use crate::output::write_json;
use crate::CliError;

pub const CERT_SUMMARY_SCHEMA: &str = "nmcond.certify-summary/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertSummary {
    pub schema: String,
    pub config: String,
    pub certifications: Vec<Certification>,
}

pub fn cmd_certify(config: &Path, out: &Path) -> Result<(), CliError> {
    let loaded = Loaded::read(config)?;
    let mut registry = loaded.registry()?;
    let certs = registry.certify().map_err(CliError::lib)?;
    let dir = out.join("certify");
    for c in &certs {
        write_json(&dir.join(format!("{}.json", c.name)), c)?;
        println!(
            "{:<24} {:<16} measured {:<12} claimed {:<12} {}",
            c.name,
            format!("{:?}", c.kind),
            c.measured,
            c.claimed,
            if c.passed { "ok" } else { "FAIL" }
        );
    }
    let summary = CertSummary {
        schema: CERT_SUMMARY_SCHEMA.into(),
        config: loaded.config.name.clone(),
        certifications: certs.clone(),
    };
    write_json(&dir.join("summary.json"), &summary)?;
    let failed: Vec<String> = certs
        .iter()
        .filter(|c| !c.passed)
        .map(|c| {
            format!(
                "{}: measured {} does not meet claimed {} (witness: {})",
                c.name,
                c.measured,
                c.claimed,
                c.witness.as_deref().unwrap_or("none")
            )
        })
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Violation(failed.join("\n")))
    }
}
