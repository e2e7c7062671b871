//! Non-malleable condensers, look-ahead extraction and two privacy-amplification
//! protocols, built on desk-scale primitive instantiations and checked by an
//! exact brute-force distribution oracle.

pub mod adversary;
pub mod bitcore;
pub mod condenser;
pub mod distoracle;
pub mod error;
pub mod lookahead;
pub mod primitives;
pub mod protocol;
pub mod ratio;
pub mod seedtree;

pub use bitcore::{gf_mul, ip, BitString, FieldElem};
pub use error::{Error, Result};
pub use ratio::Rational;
