//! One-round lattice-based multi-signature scheme with aggregate public
//! keys, over R_q = Z_q[x]/(x^n + 1).
//!
//! Each signer broadcasts a single message per peer: a short response z, a
//! challenge digest, and an LWE-style ciphertext carrying its mask seed.
//! Receivers verify the share, decrypt the seed, recover the mask, and
//! combine everything into one signature (z, c, b) whose aggregate public
//! key b is independent of the number of signers. A verifier needs only the
//! shared system seed: it recomputes w = A z - b and checks one hash.
//!
//! The crate splits into:
//! - [`ring`]: R_q arithmetic, norms, and the high/low-bits rounding;
//! - [`sampling`]: all deterministic randomness expansion (normative);
//! - [`protocol`]: setup, key generation, signing, extraction, aggregation,
//!   verification;
//! - [`codec`]: bit-exact wire formats (see docs/wire-format.md);
//! - [`simnet`]: a deterministic multi-party simulator with fault injection;
//! - the `rzms` binary: key management, local signing, verification,
//!   simulation, and benchmarks.

pub mod codec;
pub mod error;
mod ntt;
pub mod params;
pub mod protocol;
pub mod ring;
pub mod sampling;
pub mod simnet;

pub use error::{CodecError, Error, Result, ShareRejectReason};
pub use params::Params;
