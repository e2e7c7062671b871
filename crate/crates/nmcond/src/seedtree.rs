//! Master-seed expansion. A node's seed is SHA-256 over its parent's seed
//! followed by the length-prefixed label; each node seeds a ChaCha20 stream.
//! This stands in for the parties' true private randomness.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedTree {
    seed: [u8; 32],
}

impl SeedTree {
    /// The root is SHA-256 of the master seed bytes.
    pub fn new(master: &[u8]) -> Self {
        SeedTree { seed: Sha256::digest(master).into() }
    }

    /// Parses a hex master seed such as `00ff` (an optional `0x` is allowed).
    pub fn from_hex(text: &str) -> Result<Self> {
        let t = text.strip_prefix("0x").unwrap_or(text);
        if t.is_empty() || t.len() % 2 != 0 {
            return Err(Error::invalid(format!("seed {text:?} is not whole hex bytes")));
        }
        let bytes = (0..t.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&t[i..i + 2], 16))
            .collect::<std::result::Result<Vec<u8>, _>>()
            .map_err(|_| Error::invalid(format!("seed {text:?} is not hex")))?;
        Ok(SeedTree::new(&bytes))
    }

    pub fn child(&self, label: &str) -> SeedTree {
        let mut h = Sha256::new();
        h.update(self.seed);
        h.update((label.len() as u64).to_be_bytes());
        h.update(label.as_bytes());
        SeedTree { seed: h.finalize().into() }
    }

    pub fn index(&self, i: u64) -> SeedTree {
        self.child(&i.to_string())
    }

    pub fn rng(&self) -> ChaCha20Rng {
        ChaCha20Rng::from_seed(self.seed)
    }

    pub fn seed(&self) -> [u8; 32] {
        self.seed
    }
}
