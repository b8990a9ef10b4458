//! Recovery signing with the offline party. The calling online party sends
//! the public key, both sealed recovery blobs and the keygen-time commitment
//! points; the offline party decrypts its material, reconstructs
//! x_3 = sigma_13 + 2 sigma_31 - sigma_32 + sigma_23, generates a fresh
//! Paillier key with auxiliary parameters, and both sides exchange
//! factorization and Schnorr proofs before running the ordinary signature
//! algorithm with pairing-adjusted shares.

use rand::{CryptoRng, RngCore};

use crate::algebra::{mul_generator, GroupPoint, Scalar};
use crate::errors::AbortReason;
use crate::paillier::{paillier_keygen_insecure, GammaChoice, PaillierKeyPair, PaillierPublicKey};
use crate::sealedbox::{open, seal};
use crate::vss;
use crate::zkp::{
    factorization_prove, factorization_verify, schnorr_prove, schnorr_verify, AuxRsaParams,
    FactorizationParams,
};

use super::derive::{derived_public_key, share_adjustments};
use super::messages::{RecoveryKeysMsg, RecoveryRequest};
use super::{KeyShareRecord, Pairing, PartyRole, ProtocolConfig, SharePoints, SignRole, SignerLocal};

fn recovery_x_context(session: &[u8; 16], role: PartyRole) -> Vec<u8> {
    let mut ctx = session.to_vec();
    ctx.extend_from_slice(b"/recovery-x/");
    ctx.push(role.id());
    ctx
}

fn recovery_fact_context(session: &[u8; 16], role: PartyRole) -> Vec<u8> {
    let mut ctx = session.to_vec();
    ctx.extend_from_slice(b"/recovery-fact/");
    ctx.push(role.id());
    ctx
}

/// Builds the request bundle an online party sends to bring the offline
/// party back. The derivation secret rides along sealed to the recovery key
/// so derived-key signing works in recovery pairings.
pub fn recovery_prepare(
    record: &KeyShareRecord,
    rng: &mut (impl RngCore + CryptoRng),
) -> Result<RecoveryRequest, AbortReason> {
    let sealed_derivation = seal(&record.recovery_pk, &record.derivation_secret, rng)
        .map_err(|_| AbortReason::Internal)?;
    Ok(RecoveryRequest {
        caller: record.role,
        public_key: record.public_key,
        rec_p1: record.rec_p1.clone(),
        rec_p2: record.rec_p2.clone(),
        vss_commitments: record.vss_commitments,
        sigma3_points: record.sigma3_points,
        sealed_derivation,
    })
}

/// The offline party's reconstructed signing material.
pub struct RecoveredShare {
    pub x3: Scalar,
    pub derivation_secret: [u8; 32],
    pub public_key: GroupPoint,
    pub share_points: SharePoints,
    pub caller: PartyRole,
}

impl std::fmt::Debug for RecoveredShare {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RecoveredShare(caller: {:?}, <secrets redacted>)", self.caller)
    }
}

/// Decrypts the recovery blobs and checks every reconstructed value against
/// the keygen-time commitments before anything is signed with it.
pub fn recovery_p3_process(
    request: &RecoveryRequest,
    recovery_secret: &Scalar,
) -> Result<RecoveredShare, AbortReason> {
    if request.caller == PartyRole::P3 {
        return Err(AbortReason::MalformedMessage);
    }
    let blob1 = open(recovery_secret, &request.rec_p1)
        .map_err(|_| AbortReason::RecoveryDecryptionFailed)?;
    let blob2 = open(recovery_secret, &request.rec_p2)
        .map_err(|_| AbortReason::RecoveryDecryptionFailed)?;
    if blob1.len() != 64 || blob2.len() != 64 {
        return Err(AbortReason::RecoveryDataInconsistent);
    }
    let parse = |b: &[u8]| -> Result<(Scalar, Scalar), AbortReason> {
        let first = Scalar::from_bytes(b[..32].try_into().expect("length checked"))
            .map_err(|_| AbortReason::RecoveryDataInconsistent)?;
        let second = Scalar::from_bytes(b[32..].try_into().expect("length checked"))
            .map_err(|_| AbortReason::RecoveryDataInconsistent)?;
        Ok((first, second))
    };
    let (sigma_13, sigma_31) = parse(&blob1)?;
    let (sigma_23, sigma_32) = parse(&blob2)?;

    // The decrypted sigma_3i must match the committed points.
    if mul_generator(&sigma_31) != request.sigma3_points.0
        || mul_generator(&sigma_32) != request.sigma3_points.1
    {
        return Err(AbortReason::RecoveryDataInconsistent);
    }

    let two = Scalar::from_u64(2);
    let three = Scalar::from_u64(3);
    let x3 = sigma_13 + two * sigma_31 - sigma_32 + sigma_23;

    // Rebuild the public share points from the commitments and cross-check.
    let (c1, c2) = (request.vss_commitments.p1, request.vss_commitments.p2);
    let share_point_at = |point: u32, sigma3: GroupPoint| {
        vss::public_share_point(&c1.0, &c1.1, point)
            + vss::public_share_point(&c2.0, &c2.1, point)
            + sigma3
    };
    let share_points = SharePoints {
        x1: share_point_at(PartyRole::P1.eval_point(), request.sigma3_points.0),
        x2: share_point_at(PartyRole::P2.eval_point(), request.sigma3_points.1),
        x3: share_point_at(
            PartyRole::P3.eval_point(),
            request.sigma3_points.0 * two - request.sigma3_points.1,
        ),
    };
    if mul_generator(&x3) != share_points.x3 {
        return Err(AbortReason::RecoveryDataInconsistent);
    }
    // The sigma_13 / sigma_23 halves must be the dealt f_i(1) values.
    if mul_generator(&sigma_13) != vss::public_share_point(&c1.0, &c1.1, 1)
        || mul_generator(&sigma_23) != vss::public_share_point(&c2.0, &c2.1, 1)
    {
        return Err(AbortReason::RecoveryDataInconsistent);
    }
    // And the whole bundle must reassemble the claimed public key.
    let u3_point = request.sigma3_points.0 * three - request.sigma3_points.1 * two;
    if request.public_key != c1.0 + c2.0 + u3_point {
        return Err(AbortReason::RecoveryDataInconsistent);
    }

    let derivation: [u8; 32] = open(recovery_secret, &request.sealed_derivation)
        .map_err(|_| AbortReason::RecoveryDecryptionFailed)?
        .try_into()
        .map_err(|_| AbortReason::RecoveryDataInconsistent)?;

    Ok(RecoveredShare {
        x3,
        derivation_secret: derivation,
        public_key: request.public_key,
        share_points,
        caller: request.caller,
    })
}

/// The offline party's fresh keys plus its proofs for the preamble.
pub struct RecoveryP3Keys {
    pub paillier: PaillierKeyPair,
    pub aux: AuxRsaParams,
}

/// Generates the offline party's fresh Paillier key and auxiliary
/// parameters and its proof message.
pub fn recovery_p3_keys(
    share: &RecoveredShare,
    cfg: &ProtocolConfig,
    session: &[u8; 16],
    rng: &mut (impl RngCore + CryptoRng),
) -> Result<(RecoveryP3Keys, RecoveryKeysMsg), AbortReason> {
    cfg.validate().map_err(|_| AbortReason::Internal)?;
    let paillier = paillier_keygen_insecure(cfg.paillier_bits, GammaChoice::NPlusOne, rng)
        .map_err(|_| AbortReason::Internal)?;
    let aux = AuxRsaParams::generate(cfg.aux_bits, rng);
    let params = FactorizationParams::for_modulus_bits(cfg.paillier_bits)
        .map_err(|_| AbortReason::Internal)?;
    let fact_proof = factorization_prove(
        &paillier.secret,
        &params,
        &recovery_fact_context(session, PartyRole::P3),
        rng,
    )
    .map_err(|_| AbortReason::Internal)?;
    let x_proof = schnorr_prove(
        &share.x3,
        &mul_generator(&share.x3),
        &recovery_x_context(session, PartyRole::P3),
        rng,
    );
    let msg = RecoveryKeysMsg {
        paillier_n: paillier.public.modulus().clone(),
        paillier_gamma: paillier.public.gamma().clone(),
        aux: aux.clone(),
        fact_proof,
        x_proof,
    };
    Ok((RecoveryP3Keys { paillier, aux }, msg))
}

/// Verifies a peer's recovery-preamble keys message against the expected
/// public share point.
pub fn verify_recovery_keys(
    msg: &RecoveryKeysMsg,
    expected_x_point: &GroupPoint,
    peer_role: PartyRole,
    cfg: &ProtocolConfig,
    session: &[u8; 16],
) -> Result<PaillierPublicKey, AbortReason> {
    if msg.paillier_n.bits() != cfg.paillier_bits {
        return Err(AbortReason::PaillierKeyInvalid);
    }
    let pk = PaillierPublicKey::from_parts(&msg.paillier_n, &msg.paillier_gamma)
        .map_err(|_| AbortReason::PaillierKeyInvalid)?;
    let params = FactorizationParams::for_modulus_bits(cfg.paillier_bits)
        .map_err(|_| AbortReason::Internal)?;
    if !factorization_verify(
        &msg.fact_proof,
        &msg.paillier_n,
        &params,
        &recovery_fact_context(session, peer_role),
    ) {
        return Err(AbortReason::FactorizationProofInvalid);
    }
    if !schnorr_verify(
        &msg.x_proof,
        expected_x_point,
        &recovery_x_context(session, peer_role),
    ) {
        return Err(AbortReason::SchnorrProofInvalid);
    }
    Ok(pk)
}

/// The calling party's keys message for the preamble: its keygen-time
/// Paillier key with fresh proofs under the recovery session context.
pub fn recovery_caller_keys(
    record: &KeyShareRecord,
    session: &[u8; 16],
    rng: &mut (impl RngCore + CryptoRng),
) -> Result<RecoveryKeysMsg, AbortReason> {
    let params = FactorizationParams::for_modulus_bits(record.paillier_bits)
        .map_err(|_| AbortReason::Internal)?;
    let fact_proof = factorization_prove(
        &record.paillier.secret,
        &params,
        &recovery_fact_context(session, record.role),
        rng,
    )
    .map_err(|_| AbortReason::Internal)?;
    let x_proof = schnorr_prove(
        &record.x_share,
        &mul_generator(&record.x_share),
        &recovery_x_context(session, record.role),
        rng,
    );
    Ok(RecoveryKeysMsg {
        paillier_n: record.paillier.public.modulus().clone(),
        paillier_gamma: record.paillier.public.gamma().clone(),
        aux: record.aux.clone(),
        fact_proof,
        x_proof,
    })
}

/// Signer configuration for the calling online party in a recovery pairing.
#[allow(clippy::too_many_arguments)]
pub fn caller_signer_local(
    record: &KeyShareRecord,
    p3_paillier: PaillierPublicKey,
    p3_aux: AuxRsaParams,
    session: [u8; 16],
    message: Vec<u8>,
    derive_index: Option<u32>,
    range_proofs: bool,
) -> Result<SignerLocal, AbortReason> {
    let pairing = match record.role {
        PartyRole::P1 => Pairing::P1P3,
        PartyRole::P2 => Pairing::P2P3,
        PartyRole::P3 => return Err(AbortReason::Internal),
    };
    let (w_a, w_b) = pairing.weights();
    let (omega, peer_omega_point, public_key) = adjusted_shares(
        record.x_share,
        record.share_points.x3,
        record.public_key,
        (w_a, w_b),
        &record.derivation_secret,
        derive_index,
        pairing,
        true,
    );
    Ok(SignerLocal {
        session,
        sign_role: SignRole::A,
        pairing,
        message,
        omega,
        peer_omega_point,
        public_key,
        paillier: record.paillier.clone(),
        aux: record.aux.clone(),
        peer_paillier: p3_paillier,
        peer_aux: p3_aux,
        range_proofs,
    })
}

/// Signer configuration for the offline party.
#[allow(clippy::too_many_arguments)]
pub fn p3_signer_local(
    share: &RecoveredShare,
    keys: &RecoveryP3Keys,
    caller_paillier: PaillierPublicKey,
    caller_aux: AuxRsaParams,
    session: [u8; 16],
    message: Vec<u8>,
    derive_index: Option<u32>,
    range_proofs: bool,
) -> Result<SignerLocal, AbortReason> {
    let pairing = match share.caller {
        PartyRole::P1 => Pairing::P1P3,
        PartyRole::P2 => Pairing::P2P3,
        PartyRole::P3 => return Err(AbortReason::Internal),
    };
    let (w_a, w_b) = pairing.weights();
    let caller_x_point = share.share_points.for_role(share.caller);
    let (omega, peer_omega_point, public_key) = adjusted_shares(
        share.x3,
        caller_x_point,
        share.public_key,
        (w_a, w_b),
        &share.derivation_secret,
        derive_index,
        pairing,
        false,
    );
    Ok(SignerLocal {
        session,
        sign_role: SignRole::B,
        pairing,
        message,
        omega,
        peer_omega_point,
        public_key,
        paillier: keys.paillier.clone(),
        aux: keys.aux.clone(),
        peer_paillier: caller_paillier,
        peer_aux: caller_aux,
        range_proofs,
    })
}

/// Applies pairing weights and optional derivation adjustments. `is_role_a`
/// selects which weight belongs to the local share.
#[allow(clippy::too_many_arguments)]
fn adjusted_shares(
    own_x: Scalar,
    peer_x_point: GroupPoint,
    public_key: GroupPoint,
    weights: (Scalar, Scalar),
    derivation_secret: &[u8; 32],
    derive_index: Option<u32>,
    pairing: Pairing,
    is_role_a: bool,
) -> (Scalar, GroupPoint, GroupPoint) {
    let (w_a, w_b) = weights;
    let (w_own, w_peer) = if is_role_a { (w_a, w_b) } else { (w_b, w_a) };
    let mut omega = w_own * own_x;
    let mut peer_omega_point = peer_x_point * w_peer;
    let mut y = public_key;
    if let Some(index) = derive_index {
        let (adj_a, adj_b) = share_adjustments(pairing, derivation_secret, index);
        let (adj_own, adj_peer) = if is_role_a { (adj_a, adj_b) } else { (adj_b, adj_a) };
        omega = omega + adj_own;
        peer_omega_point = peer_omega_point + mul_generator(&adj_peer);
        y = derived_public_key(&public_key, derivation_secret, index);
    }
    (omega, peer_omega_point, y)
}

impl KeyShareRecord {
    /// Signer configuration for the ordinary pairing of the two online
    /// parties, optionally with a derived key.
    pub fn ordinary_signer_local(
        &self,
        session: [u8; 16],
        message: Vec<u8>,
        derive_index: Option<u32>,
        range_proofs: bool,
    ) -> Result<SignerLocal, AbortReason> {
        let pairing = Pairing::P1P2;
        let (is_role_a, sign_role, peer_role) = match self.role {
            PartyRole::P1 => (true, SignRole::A, PartyRole::P2),
            PartyRole::P2 => (false, SignRole::B, PartyRole::P1),
            PartyRole::P3 => return Err(AbortReason::Internal),
        };
        let (omega, peer_omega_point, public_key) = adjusted_shares(
            self.x_share,
            self.share_points.for_role(peer_role),
            self.public_key,
            pairing.weights(),
            &self.derivation_secret,
            derive_index,
            pairing,
            is_role_a,
        );
        Ok(SignerLocal {
            session,
            sign_role,
            pairing,
            message,
            omega,
            peer_omega_point,
            public_key,
            paillier: self.paillier.clone(),
            aux: self.aux.clone(),
            peer_paillier: self.peer_paillier.clone(),
            peer_aux: self.peer_aux.clone(),
            range_proofs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::keygen::KeygenParty;
    use crate::sealedbox::recovery_keypair;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::sync::OnceLock;

    struct KeygenOut {
        rec1: KeyShareRecord,
        rec2: KeyShareRecord,
        kp3: crate::sealedbox::RecoveryKeyPair,
    }

    fn shared_keygen() -> &'static KeygenOut {
        static K: OnceLock<KeygenOut> = OnceLock::new();
        K.get_or_init(|| {
            let cfg = ProtocolConfig::test_sizes();
            let mut rng3 = ChaCha20Rng::seed_from_u64(7000);
            let kp3 = recovery_keypair(&mut rng3);
            let mut rng1 = ChaCha20Rng::seed_from_u64(7001);
            let mut rng2 = ChaCha20Rng::seed_from_u64(7002);
            let session = [1u8; 16];
            let mut p1 =
                KeygenParty::new(cfg.clone(), PartyRole::P1, session, kp3.public, &mut rng1)
                    .unwrap();
            let mut p2 =
                KeygenParty::new(cfg, PartyRole::P2, session, kp3.public, &mut rng2).unwrap();
            let m1 = p1.round1(&mut rng1);
            let m2 = p2.round1(&mut rng2);
            let r2_1 = p1.round2(m2, &mut rng1).unwrap();
            let r2_2 = p2.round2(m1, &mut rng2).unwrap();
            let r3_1 = p1.round3(r2_2, &mut rng1).unwrap();
            let r3_2 = p2.round3(r2_1, &mut rng2).unwrap();
            KeygenOut {
                rec1: p1.finalize(r3_2).unwrap(),
                rec2: p2.finalize(r3_1).unwrap(),
                kp3,
            }
        })
    }

    #[test]
    fn recovered_share_satisfies_key_identities() {
        let kg = shared_keygen();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for record in [&kg.rec1, &kg.rec2] {
            let request = recovery_prepare(record, &mut rng).unwrap();
            let share = recovery_p3_process(&request, &kg.kp3.secret).unwrap();
            assert_eq!(share.derivation_secret, record.derivation_secret);
            assert_eq!(mul_generator(&share.x3), record.share_points.x3);

            // (omega-tilde_caller + omega_3) B = Y for both pairings.
            let pairing = match record.role {
                PartyRole::P1 => Pairing::P1P3,
                _ => Pairing::P2P3,
            };
            let (w_a, w_b) = pairing.weights();
            let omega_caller = w_a * record.x_share;
            let omega3 = w_b * share.x3;
            assert_eq!(mul_generator(&(omega_caller + omega3)), record.public_key);
        }
    }

    #[test]
    fn recovery_weights_match_share_definitions() {
        // omega-tilde_1 = -(1/3) omega_1 and omega_3 = 2 x_3 for (P1,P3);
        // omega-tilde_2 = (1/4) omega_2 and omega_3 = (3/2) x_3 for (P2,P3).
        let kg = shared_keygen();
        let (w_a, w_b) = Pairing::P1P3.weights();
        let third = Scalar::from_u64(3).invert().unwrap();
        assert_eq!(w_a * kg.rec1.x_share, -(third * kg.rec1.omega));
        assert_eq!(w_b, Scalar::from_u64(2));
        let (w_a2, w_b2) = Pairing::P2P3.weights();
        let quarter = Scalar::from_u64(4).invert().unwrap();
        assert_eq!(w_a2 * kg.rec2.x_share, quarter * kg.rec2.omega);
        assert_eq!(w_b2, Scalar::from_u64(3) * Scalar::from_u64(2).invert().unwrap());
    }

    #[test]
    fn corrupted_blob_detected_before_signing() {
        let kg = shared_keygen();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let mut request = recovery_prepare(&kg.rec1, &mut rng).unwrap();
        let last = request.rec_p2.ciphertext.len() - 1;
        request.rec_p2.ciphertext[last] ^= 1;
        assert_eq!(
            recovery_p3_process(&request, &kg.kp3.secret).unwrap_err(),
            AbortReason::RecoveryDecryptionFailed
        );
    }

    #[test]
    fn wrong_recovery_secret_fails() {
        let kg = shared_keygen();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let request = recovery_prepare(&kg.rec1, &mut rng).unwrap();
        let wrong = Scalar::random(&mut rng);
        assert_eq!(
            recovery_p3_process(&request, &wrong).unwrap_err(),
            AbortReason::RecoveryDecryptionFailed
        );
    }

    #[test]
    fn inconsistent_bundle_detected() {
        let kg = shared_keygen();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        // Swap the two sigma3 points: decryption succeeds but the committed
        // points no longer match.
        let mut request = recovery_prepare(&kg.rec1, &mut rng).unwrap();
        request.sigma3_points = (request.sigma3_points.1, request.sigma3_points.0);
        assert_eq!(
            recovery_p3_process(&request, &kg.kp3.secret).unwrap_err(),
            AbortReason::RecoveryDataInconsistent
        );
        // Or a lying public key.
        let mut request = recovery_prepare(&kg.rec1, &mut rng).unwrap();
        request.public_key = request.public_key + GroupPoint::generator();
        assert_eq!(
            recovery_p3_process(&request, &kg.kp3.secret).unwrap_err(),
            AbortReason::RecoveryDataInconsistent
        );
    }

    #[test]
    fn preamble_proof_exchange_verifies() {
        let kg = shared_keygen();
        let cfg = ProtocolConfig::test_sizes();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let session = [2u8; 16];
        let request = recovery_prepare(&kg.rec1, &mut rng).unwrap();
        let share = recovery_p3_process(&request, &kg.kp3.secret).unwrap();
        let (_keys, p3_msg) = recovery_p3_keys(&share, &cfg, &session, &mut rng).unwrap();
        // Caller verifies P3's keys against its own record's x3 point.
        verify_recovery_keys(
            &p3_msg,
            &kg.rec1.share_points.x3,
            PartyRole::P3,
            &cfg,
            &session,
        )
        .unwrap();
        // P3 verifies the caller's keys against the reconstructed x1 point.
        let caller_msg = recovery_caller_keys(&kg.rec1, &session, &mut rng).unwrap();
        verify_recovery_keys(
            &caller_msg,
            &share.share_points.x1,
            PartyRole::P1,
            &cfg,
            &session,
        )
        .unwrap();
        // A proof bound to the wrong point is rejected.
        assert_eq!(
            verify_recovery_keys(
                &caller_msg,
                &share.share_points.x2,
                PartyRole::P1,
                &cfg,
                &session,
            )
            .unwrap_err(),
            AbortReason::SchnorrProofInvalid
        );
    }
}
