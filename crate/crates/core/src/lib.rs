//! Secret sharing for arbitrary monotone access structures built from a
//! cryptographic hash and a public XOR control area, plus the machinery
//! around it:
//!
//! - [`access`]: monotone access structures and their bases (threshold,
//!   hierarchical, compartmented, or explicit).
//! - [`hss`]: the hash-based scheme itself — dealer setup, recovery,
//!   proactive refresh and hash commitments for share verification.
//! - [`shamir`]: a polynomial baseline (Shamir splitting, Herzberg-style
//!   renewal, Feldman verification) used as an independent oracle and
//!   comparison target.
//! - [`herding`]: a truncated-width iterative hash with birthday collisions,
//!   multicollisions, diamond structures and prefix herding, making the
//!   underlying technique observable at desk scale.
//! - [`storage`]: the JSON file formats used by the `herdshare` CLI.

pub mod access;
pub mod herding;
pub mod hss;
pub mod shamir;
pub mod storage;

pub use access::{
    AccessError, AccessStructureBasis, CompartmentSpec, HierarchicalMode, HierarchicalSpec,
    ParticipantId, Subset,
};
pub use hss::{
    commit_shares, private_message, recover, reduce_to_basis, refresh, setup, verify_share,
    DealerOutput, HashAlgorithm, HashSpec, HssError, PublicControlArea, SecretDigest,
    SecretSource, Share,
};
