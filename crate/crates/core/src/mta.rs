//! Multiplicative-to-additive share conversion over Paillier. Two parties
//! holding a and b end with alpha and beta such that alpha + beta = ab mod q:
//! the initiator sends c_A = E_A(a), the responder returns
//! c_B = b (*) c_A (+) E_A(beta') for a uniform beta' in Z_N and keeps
//! beta = -beta'; the initiator decrypts alpha = D(c_B) mod q. Range proofs
//! gate both ciphertexts; the with-check variant additionally links b to a
//! public curve point.
//!
//! Correctness needs ab + beta' < N. With a, b < q and a 2048-bit modulus the
//! wraparound probability is below 2^-500; the tests construct the failure
//! deliberately at a tiny modulus.

use num_bigint::RandBigInt;
use rand::{CryptoRng, RngCore};

use crate::algebra::{mul_generator, scalar_from_uint_mod_q, scalar_to_uint, GroupPoint, Scalar};
use crate::errors::AbortReason;
use crate::paillier::{PaillierCiphertext, PaillierPublicKey, PaillierSecretKey};
use crate::zkp::{
    range_prove_initiator, range_prove_respondent, range_verify_initiator,
    range_verify_respondent, AuxRsaParams, RangeProofA, RangeProofB,
};

/// The four conversions inside one signing session, used for transcript
/// separation: both nonce-by-gamma instances and both nonce-by-key-share
/// instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MtaInstance {
    KaGammaB,
    KbGammaA,
    KaOmegaB,
    KbOmegaA,
}

impl MtaInstance {
    pub fn wire_tag(&self) -> u8 {
        match self {
            MtaInstance::KaGammaB => 1,
            MtaInstance::KbGammaA => 2,
            MtaInstance::KaOmegaB => 3,
            MtaInstance::KbOmegaA => 4,
        }
    }

    pub fn from_wire_tag(tag: u8) -> Option<MtaInstance> {
        match tag {
            1 => Some(MtaInstance::KaGammaB),
            2 => Some(MtaInstance::KbGammaA),
            3 => Some(MtaInstance::KaOmegaB),
            4 => Some(MtaInstance::KbOmegaA),
            _ => None,
        }
    }

    pub fn with_check(&self) -> bool {
        matches!(self, MtaInstance::KaOmegaB | MtaInstance::KbOmegaA)
    }
}

fn instance_context(session: &[u8], instance: MtaInstance) -> Vec<u8> {
    let mut ctx = Vec::with_capacity(session.len() + 2);
    ctx.extend_from_slice(session);
    ctx.push(b'/');
    ctx.push(instance.wire_tag());
    ctx
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MtaRole {
    Initiator,
    Responder,
}

/// One side's additive share of the product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MtaOutcome {
    pub role: MtaRole,
    pub share: Scalar,
}

#[derive(Clone, Debug)]
pub struct MtaInitMessage {
    pub ciphertext: PaillierCiphertext,
    pub proof: Option<RangeProofA>,
}

#[derive(Clone, Debug)]
pub struct MtaResponseMessage {
    pub ciphertext: PaillierCiphertext,
    pub proof: Option<RangeProofB>,
}

/// Initiator state kept between init and finalize.
#[derive(Clone)]
pub struct MtaInitiatorState {
    ciphertext: PaillierCiphertext,
}

/// Encrypts the initiator input and attaches the range proof, created under
/// the responder's auxiliary parameters since the responder verifies it.
pub fn mta_init(
    a: &Scalar,
    own_pk: &PaillierPublicKey,
    responder_aux: &AuxRsaParams,
    session: &[u8],
    instance: MtaInstance,
    range_proofs: bool,
    rng: &mut (impl RngCore + CryptoRng),
) -> (MtaInitMessage, MtaInitiatorState) {
    let ctx = instance_context(session, instance);
    let m = scalar_to_uint(a);
    let (ciphertext, randomness) = own_pk
        .encrypt(&m, rng)
        .expect("scalar plaintext is below any usable modulus");
    let proof = range_proofs.then(|| {
        range_prove_initiator(&m, &randomness, &ciphertext, own_pk, responder_aux, &ctx, rng)
    });
    (
        MtaInitMessage { ciphertext: ciphertext.clone(), proof },
        MtaInitiatorState { ciphertext },
    )
}

/// Verifies the initiator proof, then produces the response ciphertext and
/// the responder share beta = -beta' mod q. In with-check mode `b_point`
/// must be the public point b B; the proof then carries the link.
#[allow(clippy::too_many_arguments)]
pub fn mta_respond(
    b: &Scalar,
    init: &MtaInitMessage,
    initiator_pk: &PaillierPublicKey,
    own_aux: &AuxRsaParams,
    initiator_aux: &AuxRsaParams,
    b_point: Option<&GroupPoint>,
    session: &[u8],
    instance: MtaInstance,
    range_proofs: bool,
    rng: &mut (impl RngCore + CryptoRng),
) -> Result<(MtaResponseMessage, MtaOutcome), AbortReason> {
    let ctx = instance_context(session, instance);
    if range_proofs {
        let Some(proof) = &init.proof else {
            return Err(AbortReason::RangeProofMissing);
        };
        if !range_verify_initiator(proof, &init.ciphertext, initiator_pk, own_aux, &ctx) {
            return Err(AbortReason::RangeProofInvalid);
        }
    }
    debug_assert!(b_point.is_none_or(|bp| *bp == mul_generator(b)));

    let n = initiator_pk.modulus();
    let beta_prime = rng.gen_biguint_below(n);
    let randomness = initiator_pk.sample_unit(rng);
    let scaled = initiator_pk
        .scalar_mul_ciphertext(&scalar_to_uint(b), &init.ciphertext)
        .map_err(|_| AbortReason::MalformedMessage)?;
    let masked = initiator_pk
        .encrypt_with(&beta_prime, &randomness)
        .map_err(|_| AbortReason::Internal)?;
    let ciphertext = initiator_pk.add_ciphertexts(&scaled, &masked);

    let proof = range_proofs.then(|| {
        range_prove_respondent(
            b,
            &beta_prime,
            &randomness,
            &init.ciphertext,
            &ciphertext,
            initiator_pk,
            initiator_aux,
            b_point,
            &ctx,
            rng,
        )
    });

    let beta = -scalar_from_uint_mod_q(&beta_prime);
    Ok((
        MtaResponseMessage { ciphertext, proof },
        MtaOutcome { role: MtaRole::Responder, share: beta },
    ))
}

/// Verifies the responder proof against the initiator's own auxiliary
/// parameters and decrypts alpha = D(c_B) mod q.
pub fn mta_finalize(
    state: &MtaInitiatorState,
    response: &MtaResponseMessage,
    own_secret: &PaillierSecretKey,
    own_aux: &AuxRsaParams,
    b_point: Option<&GroupPoint>,
    session: &[u8],
    instance: MtaInstance,
    range_proofs: bool,
) -> Result<MtaOutcome, AbortReason> {
    let ctx = instance_context(session, instance);
    if range_proofs {
        let Some(proof) = &response.proof else {
            return Err(AbortReason::RangeProofMissing);
        };
        if !range_verify_respondent(
            proof,
            &state.ciphertext,
            &response.ciphertext,
            own_secret.public(),
            own_aux,
            b_point,
            &ctx,
        ) {
            return Err(AbortReason::RangeProofInvalid);
        }
    }
    let alpha_raw = own_secret
        .decrypt(&response.ciphertext)
        .map_err(|_| AbortReason::MalformedMessage)?;
    Ok(MtaOutcome { role: MtaRole::Initiator, share: scalar_from_uint_mod_q(&alpha_raw) })
}
