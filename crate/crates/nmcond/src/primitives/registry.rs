//! Certify-then-use registry of primitive instantiations.
//!
//! Every entry declares its input and output lengths and a claimed contract.
//! `certify` runs the matching exhaustive verifier; calls are refused until
//! the entry is certified and whenever argument lengths break the signature.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ext_hash, mac_forgery_advantage, mac_tag, nm_ip, poly_hash, two_source_ip};
use super::{toeplitz_seed_len, verify_somewhere, EditCode, SomewhereCond};
use crate::bitcore::BitString;
use crate::distoracle::{
    verify_nm_extractor, verify_strong_extractor, verify_two_source, AdversarySet, FlatFamily,
    SourceSpec,
};
use crate::ratio::{self, Rational};
use crate::{Error, Result};

pub const CERT_SCHEMA: &str = "nmcond.certification/1";
pub const MANIFEST_SCHEMA: &str = "nmcond.registry/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    StrongExt,
    TwoSourceExt,
    NmExt,
    Mac,
    SomewhereCond,
    EditCode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HashFamily {
    Toeplitz,
    Poly,
}

/// Caps for the flat-source family a strong extractor is certified against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyCap {
    pub cap: u64,
    pub extra: u64,
    pub seed: u64,
}

impl Default for FamilyCap {
    fn default() -> Self {
        FamilyCap { cap: 500, extra: 500, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Instantiation {
    StrongExt {
        hash: HashFamily,
        n: usize,
        d: usize,
        m: usize,
        k: u32,
        #[serde(with = "ratio::text")]
        eps: Rational,
        #[serde(default)]
        family: FamilyCap,
    },
    TwoSourceExt {
        n1: usize,
        n2: usize,
        m: usize,
        k1: usize,
        k2: usize,
        #[serde(with = "ratio::text")]
        eps: Rational,
    },
    NmExt {
        n: usize,
        m: usize,
        k: u32,
        #[serde(with = "ratio::text")]
        eps: Rational,
    },
    Mac {
        v: usize,
        msg_len: usize,
        #[serde(with = "ratio::text")]
        eps: Rational,
    },
    SomewhereCond {
        cond: SomewhereCond,
        k: usize,
        row_entropy: f64,
    },
    EditCode {
        repeat: usize,
        msg_len: usize,
        #[serde(with = "ratio::text")]
        e: Rational,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub inputs: Vec<usize>,
    pub output: usize,
}

impl Instantiation {
    pub fn kind(&self) -> Kind {
        match self {
            Instantiation::StrongExt { .. } => Kind::StrongExt,
            Instantiation::TwoSourceExt { .. } => Kind::TwoSourceExt,
            Instantiation::NmExt { .. } => Kind::NmExt,
            Instantiation::Mac { .. } => Kind::Mac,
            Instantiation::SomewhereCond { .. } => Kind::SomewhereCond,
            Instantiation::EditCode { .. } => Kind::EditCode,
        }
    }

    pub fn signature(&self) -> Signature {
        let (inputs, output) = match self {
            Instantiation::StrongExt { n, d, m, .. } => (vec![*n, *d], *m),
            Instantiation::TwoSourceExt { n1, n2, m, .. } => (vec![*n1, *n2], *m),
            Instantiation::NmExt { n, m, .. } => (vec![*n, *n], *m),
            Instantiation::Mac { v, msg_len, .. } => (vec![2 * v, *msg_len], *v),
            Instantiation::SomewhereCond { cond, .. } => {
                (vec![cond.input_len()], cond.rows() * cond.row_len())
            }
            Instantiation::EditCode { repeat, msg_len, .. } => {
                (vec![*msg_len], msg_len * (repeat + 2))
            }
        };
        Signature { inputs, output }
    }

    fn check_shape(&self) -> Result<()> {
        if let Instantiation::StrongExt { hash: HashFamily::Toeplitz, n, d, m, .. } = self {
            if *d != toeplitz_seed_len(*n, *m) {
                return Err(Error::invalid(format!(
                    "Toeplitz seed for n={n}, m={m} must have {} bits",
                    toeplitz_seed_len(*n, *m)
                )));
            }
        }
        if let Instantiation::SomewhereCond { cond, .. } = self {
            cond.check()?;
        }
        Ok(())
    }

    /// Evaluates the primitive without any signature or certification check.
    pub fn eval(&self, args: &[&BitString]) -> Result<BitString> {
        match self {
            Instantiation::StrongExt { hash: HashFamily::Toeplitz, m, .. } => ext_hash(args[0], args[1], *m),
            Instantiation::StrongExt { hash: HashFamily::Poly, m, .. } => poly_hash(args[0], args[1], *m),
            Instantiation::TwoSourceExt { m, .. } => two_source_ip(args[0], args[1], *m),
            Instantiation::NmExt { m, .. } => nm_ip(args[0], args[1], *m),
            Instantiation::Mac { v, .. } => mac_tag(args[0], args[1], *v),
            Instantiation::SomewhereCond { cond, .. } => {
                Ok(BitString::concat_all(&cond.condense(args[0])?))
            }
            Instantiation::EditCode { repeat, msg_len, .. } => {
                EditCode::new(*repeat, *msg_len)?.encode(args[0])
            }
        }
    }

    /// Runs the matching verifier. Returns (measured, claimed, passed, witness).
    fn measure(&self) -> Result<(String, String, bool, Option<String>)> {
        let f = |x: &BitString, y: &BitString| self.eval(&[x, y]).expect("signature checked");
        match self {
            Instantiation::StrongExt { n, d, m, k, eps, family, .. } => {
                let fam = FlatFamily {
                    n: *n,
                    k: *k as usize,
                    cap: family.cap,
                    extra: family.extra,
                    seed: family.seed,
                };
                let sources: Vec<SourceSpec> = fam.sources().collect();
                let rep = verify_strong_extractor(&f, *n, *d, *m, *k, &sources)?;
                let witness = rep.witness_source.map(|i| format!("{:?}", sources[i]));
                Ok((ratio::to_text(&rep.worst_distance), ratio::to_text(eps), rep.worst_distance <= *eps, witness))
            }
            Instantiation::TwoSourceExt { n1, n2, m, k1, k2, eps } => {
                let rep = verify_two_source(&f, *n1, *n2, *m, *k1, *k2)?;
                let witness = format!("x {:?}, y {:?}", rep.witness_x, rep.witness_y);
                Ok((ratio::to_text(&rep.worst), ratio::to_text(eps), rep.worst <= *eps, Some(witness)))
            }
            Instantiation::NmExt { n, m, k, eps } => {
                let sources: Vec<SourceSpec> = FlatFamily::exhaustive(*n, *k as usize).sources().collect();
                let rep = verify_nm_extractor(&f, *n, *n, *m, *k, &sources, &AdversarySet::exhaustive())?;
                let worst = rep.decomposed_worst.clone();
                let witness = format!(
                    "source {:?}, adversary {:?}",
                    rep.report.witness_source.map(|i| &sources[i]),
                    rep.report.witness_adversary
                );
                Ok((ratio::to_text(&worst), ratio::to_text(eps), worst <= *eps, Some(witness)))
            }
            Instantiation::Mac { v, msg_len, eps } => {
                let adv = mac_forgery_advantage(*v, msg_len.div_ceil(*v), None)?;
                Ok((ratio::to_text(&adv), ratio::to_text(eps), adv <= *eps, None))
            }
            Instantiation::SomewhereCond { cond, k, row_entropy } => {
                let cert = verify_somewhere(cond, *k)?;
                Ok((
                    format!("{}", cert.row_entropy),
                    format!("{row_entropy}"),
                    cert.row_entropy >= *row_entropy,
                    Some(format!("worst fiber {}", cert.worst_fiber)),
                ))
            }
            Instantiation::EditCode { repeat, msg_len, e } => {
                let got = EditCode::new(*repeat, *msg_len)?.certify()?;
                Ok((ratio::to_text(&got), ratio::to_text(e), got >= *e, None))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveEntry {
    pub name: String,
    #[serde(flatten)]
    pub spec: Instantiation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certification {
    pub schema: String,
    pub name: String,
    pub kind: Kind,
    pub signature: Signature,
    pub claimed: String,
    pub measured: String,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub primitives: Vec<PrimitiveEntry>,
}

#[derive(Clone, Debug, Default)]
pub struct Registry {
    entries: BTreeMap<String, PrimitiveEntry>,
    certs: BTreeMap<String, Certification>,
}

impl Registry {
    pub fn from_manifest(manifest: Manifest) -> Result<Self> {
        if manifest.schema != MANIFEST_SCHEMA {
            return Err(Error::invalid(format!("unknown registry schema {:?}", manifest.schema)));
        }
        let mut entries = BTreeMap::new();
        for e in manifest.primitives {
            e.spec.check_shape()?;
            if entries.insert(e.name.clone(), e.clone()).is_some() {
                return Err(Error::invalid(format!("duplicate primitive {:?}", e.name)));
            }
        }
        Ok(Registry { entries, certs: BTreeMap::new() })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let manifest: Manifest =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("registry manifest: {e}")))?;
        Self::from_manifest(manifest)
    }

    pub fn entries(&self) -> impl Iterator<Item = &PrimitiveEntry> {
        self.entries.values()
    }

    /// Runs every verifier, recording results. Entries whose measurement
    /// beats or meets the claim become callable.
    pub fn certify(&mut self) -> Result<Vec<Certification>> {
        let mut out = Vec::new();
        for (name, e) in &self.entries {
            let (measured, claimed, passed, witness) = e.spec.measure()?;
            let cert = Certification {
                schema: CERT_SCHEMA.into(),
                name: name.clone(),
                kind: e.spec.kind(),
                signature: e.spec.signature(),
                claimed,
                measured,
                passed,
                witness,
            };
            self.certs.insert(name.clone(), cert.clone());
            out.push(cert);
        }
        Ok(out)
    }

    pub fn is_certified(&self, name: &str) -> bool {
        self.certs.get(name).is_some_and(|c| c.passed)
    }

    /// Whether some entry of this kind has passed certification.
    pub fn kind_certified(&self, kind: Kind) -> bool {
        self.entries.values().any(|e| e.spec.kind() == kind && self.is_certified(&e.name))
    }

    pub fn call(&self, name: &str, args: &[&BitString]) -> Result<BitString> {
        let e = self
            .entries
            .get(name)
            .ok_or_else(|| Error::invalid(format!("no primitive named {name:?}")))?;
        if !self.is_certified(name) {
            return Err(Error::invalid(format!("primitive {name:?} is not certified")));
        }
        let sig = e.spec.signature();
        let lens: Vec<usize> = args.iter().map(|a| a.len()).collect();
        if lens != sig.inputs {
            return Err(Error::invalid(format!(
                "{name}: argument lengths {lens:?} violate signature {:?}",
                sig.inputs
            )));
        }
        e.spec.eval(args)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;

    fn manifest() -> Manifest {
        Manifest {
            schema: MANIFEST_SCHEMA.into(),
            primitives: vec![
                PrimitiveEntry {
                    name: "ext".into(),
                    spec: Instantiation::StrongExt {
                        hash: HashFamily::Toeplitz,
                        n: 4,
                        d: 4,
                        m: 1,
                        k: 3,
                        eps: rat(1, 4),
                        family: FamilyCap::default(),
                    },
                },
                PrimitiveEntry {
                    name: "mac".into(),
                    spec: Instantiation::Mac { v: 2, msg_len: 4, eps: rat(1, 2) },
                },
                PrimitiveEntry {
                    name: "edit".into(),
                    spec: Instantiation::EditCode { repeat: 1, msg_len: 1, e: rat(1, 3) },
                },
            ],
        }
    }

    #[test]
    fn certify_then_use() {
        let mut reg = Registry::from_manifest(manifest()).unwrap();
        let x = BitString::parse("1011").unwrap();
        let seed = BitString::parse("0110").unwrap();
        assert!(reg.call("ext", &[&x, &seed]).is_err());
        let certs = reg.certify().unwrap();
        assert!(certs.iter().all(|c| c.passed), "{certs:?}");
        assert_eq!(reg.call("ext", &[&x, &seed]).unwrap(), ext_hash(&x, &seed, 1).unwrap());
        let err = reg.call("ext", &[&x, &x.concat(&seed)]).unwrap_err();
        assert!(err.to_string().contains("violate signature"));
        assert!(reg.kind_certified(Kind::Mac));
        assert!(!reg.kind_certified(Kind::NmExt));
    }

    #[test]
    fn overclaimed_contract_fails_with_witness() {
        let mut m = manifest();
        m.primitives.truncate(1);
        if let Instantiation::StrongExt { eps, .. } = &mut m.primitives[0].spec {
            *eps = rat(1, 1000);
        }
        let mut reg = Registry::from_manifest(m).unwrap();
        let certs = reg.certify().unwrap();
        assert!(!certs[0].passed);
        assert!(certs[0].witness.is_some());
        assert!(!reg.is_certified("ext"));
    }

    #[test]
    fn manifest_round_trips_and_rejects_bad_shapes() {
        let m = manifest();
        let text = serde_json::to_string_pretty(&m).unwrap();
        let back: Manifest = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        let mut bad = manifest();
        if let Instantiation::StrongExt { d, .. } = &mut bad.primitives[0].spec {
            *d = 3;
        }
        assert!(Registry::from_manifest(bad).is_err());
    }
}
