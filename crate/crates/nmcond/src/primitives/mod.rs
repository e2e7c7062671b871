//! Desk-scale instantiations of every black-box primitive the constructions
//! consume, plus the certify-then-use registry.

mod edit;
mod ext;
mod mac;
mod nm;
pub mod registry;
mod somewhere;
mod twosource;

pub use edit::{edit_distance, EditCode};
pub use ext::{ext_hash, poly_hash, toeplitz_seed_len};
pub use mac::{mac_forgery_advantage, mac_forgery_sampled, mac_tag};
pub use nm::nm_ip;
pub use somewhere::{search_projection_pair, verify_somewhere, SomewhereCert, SomewhereCond};
pub use twosource::{block_ip, two_source_ip};
