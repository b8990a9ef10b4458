//! Commitments and the sigma protocols used by the signing and key
//! generation flows, all non-interactive via Fiat-Shamir.

mod aux_params;
mod commitment;
mod factorization;
mod range;
mod schnorr;
mod share_proof;
pub mod transcript;

pub use aux_params::AuxRsaParams;
pub use commitment::{commit, verify_commitment, Commitment, Decommitment};
pub use factorization::{
    factorization_prove, factorization_verify, FactRound, FactorizationParams,
    FactorizationProof,
};
pub use range::{
    range_prove_initiator, range_prove_respondent, range_verify_initiator,
    range_verify_respondent, RangeProofA, RangeProofB,
};
pub use schnorr::{
    schnorr_check_equation, schnorr_commit, schnorr_prove, schnorr_respond, schnorr_verify,
    SchnorrProof, SchnorrProverState,
};
pub use share_proof::{share_proof_prove, share_proof_verify, ShareConsistencyProof};
