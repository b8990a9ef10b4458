//! A (2,3)-threshold ECDSA scheme with an offline recovery party.
//!
//! Two online parties generate a shared key and sign together; a third party
//! contributes only a long-term encryption key at setup and can later step in
//! for an unavailable signer using recovery material produced during key
//! generation. Signatures verify under any standard ECDSA verifier.

pub mod algebra;
pub mod encoding;
pub mod errors;
pub mod mta;
pub mod paillier;
pub mod primes;
pub mod protocol;
pub mod sealedbox;
pub mod transport;
pub mod vss;
pub mod zkp;

pub use algebra::{CurveConfig, GroupPoint, Scalar, Signature};
pub use errors::{AbortReason, Error};
