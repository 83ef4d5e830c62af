//! A workbench for *hidden sums* over GF(2).
//!
//! The crate studies alternating bilinear products on GF(2)^n whose induced
//! operation `x ∘ y = x + y + x·y` turns the vector space into an elementary
//! abelian group of affine permutations, the differential uniformity of maps
//! with respect to such operations, a small trapdoored SPN whose rounds are
//! affine for one of these hidden operations, and the low-query key-recovery
//! attack the trapdoor enables.
//!
//! Start with the `examples/` directory; each example exercises one major
//! capability end to end.

pub mod attack;
pub mod diff;
pub mod error;
pub mod gf2;
pub mod oracle;
pub mod ring;
pub mod toy;

pub use attack::{
    cost_report, recover_affine, AttackOptions, AttackTranscript, AttackVariant, EncryptionOracle,
    LocalOracle, RecoveredAffine,
};
pub use diff::{
    ddt, delta_uniformity, fact1_scan, parallel_map, verify_theorem_bound, DDTable, Fact1Report,
    GroupOp, PermutationTable, ScanMode, TheoremBoundReport,
};
pub use error::{Error, QueryKind, Result};
pub use gf2::{AffineMap, BitMatrix, BitVector};
pub use oracle::{serve, OracleClient, ServerConfig, ServerHandle};
pub use ring::{CoordinateTable, EnumerationMode, RingProduct};
pub use toy::{FieldConvention, SessionKey, ToyCipherSpec};
