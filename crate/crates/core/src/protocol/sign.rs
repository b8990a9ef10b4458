//! The four-phase signature algorithm run by any pairing of two parties.
//!
//! Phase 1 commits to the nonce points G_i = gamma_i B. Phase 2 runs four
//! share conversions (both k-by-gamma instances plain, both k-by-omega
//! instances with the public-point check) and exchanges delta_i, giving both
//! parties delta = k gamma. Phase 3 decommits the nonce points with a
//! Schnorr proof and fixes R = delta^-1 (G_A + G_B), r = R_x. Phase 4
//! computes s_i = m k_i + r sigma_i and runs the mutual-check dance: the
//! masked points W_i = s_i R + l_i B and Z_i = rho_i B are committed,
//! opened and proven, then U_i = rho_i W and T_i = l_i Z are committed and
//! opened, and only if T_A + T_B = U_A + U_B are the shares s_i revealed.
//! The assembled (r, s) must pass standard verification or the session
//! aborts.

use rand::{CryptoRng, RngCore};

use crate::algebra::{ecdsa_verify, hash_to_scalar, mul_generator, GroupPoint, Scalar, Signature};
use crate::errors::AbortReason;
use crate::mta::{mta_finalize, mta_init, mta_respond, MtaInitiatorState, MtaInstance};
use crate::paillier::{PaillierKeyPair, PaillierPublicKey};
use crate::zkp::{
    commit, schnorr_prove, schnorr_verify, share_proof_prove, share_proof_verify,
    verify_commitment, Commitment, Decommitment,
};

use super::messages::{
    expect_point, put_point, SignCheckReveal, SignCommitMsg, SignDelta, SignMtaInits,
    SignMtaResponses, SignMutualReveal, SignNonceReveal, SignShareMsg,
};
use super::Pairing;

const TAG_NONCE: &str = "sign-nonce";
const TAG_CHECK: &str = "sign-check";
const TAG_MUTUAL: &str = "sign-mutual";

/// Which seat a party occupies in the signature algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignRole {
    A,
    B,
}

impl SignRole {
    fn tag(&self) -> u8 {
        match self {
            SignRole::A => b'A',
            SignRole::B => b'B',
        }
    }

    fn peer(&self) -> SignRole {
        match self {
            SignRole::A => SignRole::B,
            SignRole::B => SignRole::A,
        }
    }
}

/// Everything one party needs to enter a signing session: its
/// pairing-adjusted additive share, the peer's public share point, both
/// Paillier/auxiliary key sets and the message.
#[derive(Clone)]
pub struct SignerLocal {
    pub session: [u8; 16],
    pub sign_role: SignRole,
    pub pairing: Pairing,
    pub message: Vec<u8>,
    pub omega: Scalar,
    pub peer_omega_point: GroupPoint,
    pub public_key: GroupPoint,
    pub paillier: PaillierKeyPair,
    pub aux: crate::zkp::AuxRsaParams,
    pub peer_paillier: PaillierPublicKey,
    pub peer_aux: crate::zkp::AuxRsaParams,
    pub range_proofs: bool,
}

impl std::fmt::Debug for SignerLocal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "SignerLocal(role: {:?}, pairing: {:?}, <secrets redacted>)",
            self.sign_role, self.pairing
        )
    }
}

fn gamma_proof_context(session: &[u8; 16], role: SignRole) -> Vec<u8> {
    let mut ctx = session.to_vec();
    ctx.extend_from_slice(b"/sign-gamma/");
    ctx.push(role.tag());
    ctx
}

fn share_proof_context(session: &[u8; 16], role: SignRole) -> Vec<u8> {
    let mut ctx = session.to_vec();
    ctx.extend_from_slice(b"/sign-share/");
    ctx.push(role.tag());
    ctx
}

fn encode_point_pair(a: &GroupPoint, b: &GroupPoint) -> Vec<u8> {
    let mut buf = Vec::new();
    put_point(&mut buf, 1, a);
    put_point(&mut buf, 2, b);
    buf
}

fn decode_point_pair(bytes: &[u8]) -> Result<(GroupPoint, GroupPoint), AbortReason> {
    let mut r = crate::encoding::TlvReader::new(bytes);
    let a = expect_point(&mut r, 1).map_err(|_| AbortReason::MalformedMessage)?;
    let b = expect_point(&mut r, 2).map_err(|_| AbortReason::MalformedMessage)?;
    r.finish().map_err(|_| AbortReason::MalformedMessage)?;
    Ok((a, b))
}

/// Signing state machine; methods are called in order, each consuming the
/// peer's previous message.
#[derive(Clone)]
pub struct SignParty {
    local: SignerLocal,
    stage: u8,
    forced_share: Option<Scalar>,
    k: Scalar,
    gamma: Scalar,
    own_omega_point: GroupPoint,
    open_nonce: Option<Decommitment>,
    peer_nonce_commit: Option<Commitment>,
    mta_gamma_state: Option<MtaInitiatorState>,
    mta_omega_state: Option<MtaInitiatorState>,
    beta: Option<Scalar>,
    nu: Option<Scalar>,
    delta_own: Option<Scalar>,
    sigma_own: Option<Scalar>,
    delta_inv: Option<Scalar>,
    r_point: Option<GroupPoint>,
    r: Option<Scalar>,
    s_share: Option<Scalar>,
    mask_l: Option<Scalar>,
    mask_rho: Option<Scalar>,
    w_own: Option<GroupPoint>,
    z_own: Option<GroupPoint>,
    open_check: Option<Decommitment>,
    peer_check_commit: Option<Commitment>,
    w_combined: Option<GroupPoint>,
    z_combined: Option<GroupPoint>,
    u_own: Option<GroupPoint>,
    t_own: Option<GroupPoint>,
    open_mutual: Option<Decommitment>,
    peer_mutual_commit: Option<Commitment>,
}

impl SignParty {
    pub fn new(local: SignerLocal) -> SignParty {
        let own_omega_point = mul_generator(&local.omega);
        SignParty {
            local,
            stage: 0,
            forced_share: None,
            k: Scalar::ZERO,
            gamma: Scalar::ZERO,
            own_omega_point,
            open_nonce: None,
            peer_nonce_commit: None,
            mta_gamma_state: None,
            mta_omega_state: None,
            beta: None,
            nu: None,
            delta_own: None,
            sigma_own: None,
            delta_inv: None,
            r_point: None,
            r: None,
            s_share: None,
            mask_l: None,
            mask_rho: None,
            w_own: None,
            z_own: None,
            open_check: None,
            peer_check_commit: None,
            w_combined: None,
            z_combined: None,
            u_own: None,
            t_own: None,
            open_mutual: None,
            peer_mutual_commit: None,
        }
    }

    pub fn sign_role(&self) -> SignRole {
        self.local.sign_role
    }

    fn expect_stage(&mut self, stage: u8) -> Result<(), AbortReason> {
        if self.stage != stage {
            return Err(AbortReason::UnexpectedMessage);
        }
        self.stage += 1;
        Ok(())
    }

    /// The instances this party initiates: (k-by-gamma, k-by-omega).
    fn init_instances(&self) -> (MtaInstance, MtaInstance) {
        match self.local.sign_role {
            SignRole::A => (MtaInstance::KaGammaB, MtaInstance::KaOmegaB),
            SignRole::B => (MtaInstance::KbGammaA, MtaInstance::KbOmegaA),
        }
    }

    /// The instances this party responds to.
    fn respond_instances(&self) -> (MtaInstance, MtaInstance) {
        match self.local.sign_role {
            SignRole::A => (MtaInstance::KbGammaA, MtaInstance::KbOmegaA),
            SignRole::B => (MtaInstance::KaGammaB, MtaInstance::KaOmegaB),
        }
    }

    fn mta_session(&self) -> Vec<u8> {
        let mut s = self.local.session.to_vec();
        s.extend_from_slice(b"/sign-mta");
        s
    }

    /// Round 1: pick k_i, gamma_i and commit to G_i = gamma_i B.
    pub fn nonce_commit(&mut self, rng: &mut (impl RngCore + CryptoRng)) -> Result<SignCommitMsg, AbortReason> {
        self.expect_stage(0)?;
        self.k = Scalar::random(rng);
        self.gamma = Scalar::random(rng);
        let g_point = mul_generator(&self.gamma);
        let (com, open) = commit(TAG_NONCE, &g_point.to_bytes(), rng);
        self.open_nonce = Some(open);
        Ok(SignCommitMsg { commit: com })
    }

    /// Round 2: store the peer commitment and start both own-initiated
    /// share conversions for k_i.
    pub fn mta_inits(
        &mut self,
        peer: SignCommitMsg,
        rng: &mut (impl RngCore + CryptoRng),
    ) -> Result<SignMtaInits, AbortReason> {
        self.expect_stage(1)?;
        self.peer_nonce_commit = Some(peer.commit);
        let session = self.mta_session();
        let (gamma_inst, omega_inst) = self.init_instances();
        let (gamma_msg, gamma_state) = mta_init(
            &self.k,
            &self.local.paillier.public,
            &self.local.peer_aux,
            &session,
            gamma_inst,
            self.local.range_proofs,
            rng,
        );
        let (omega_msg, omega_state) = mta_init(
            &self.k,
            &self.local.paillier.public,
            &self.local.peer_aux,
            &session,
            omega_inst,
            self.local.range_proofs,
            rng,
        );
        self.mta_gamma_state = Some(gamma_state);
        self.mta_omega_state = Some(omega_state);
        Ok(SignMtaInits { gamma_instance: gamma_msg, omega_instance: omega_msg })
    }

    /// Round 3: respond to the peer's conversions with gamma_i and omega_i;
    /// the omega response carries the public-point link.
    pub fn mta_respond_step(
        &mut self,
        peer: SignMtaInits,
        rng: &mut (impl RngCore + CryptoRng),
    ) -> Result<SignMtaResponses, AbortReason> {
        self.expect_stage(2)?;
        let session = self.mta_session();
        let (gamma_inst, omega_inst) = self.respond_instances();
        let (gamma_msg, beta) = mta_respond(
            &self.gamma,
            &peer.gamma_instance,
            &self.local.peer_paillier,
            &self.local.aux,
            &self.local.peer_aux,
            None,
            &session,
            gamma_inst,
            self.local.range_proofs,
            rng,
        )?;
        let (omega_msg, nu) = mta_respond(
            &self.local.omega,
            &peer.omega_instance,
            &self.local.peer_paillier,
            &self.local.aux,
            &self.local.peer_aux,
            Some(&self.own_omega_point),
            &session,
            omega_inst,
            self.local.range_proofs,
            rng,
        )?;
        self.beta = Some(beta.share);
        self.nu = Some(nu.share);
        Ok(SignMtaResponses { gamma_instance: gamma_msg, omega_instance: omega_msg })
    }

    /// Round 4: finalize own conversions and reveal delta_i.
    pub fn delta_share(&mut self, peer: SignMtaResponses) -> Result<SignDelta, AbortReason> {
        self.expect_stage(3)?;
        let session = self.mta_session();
        let (gamma_inst, omega_inst) = self.init_instances();
        let alpha = mta_finalize(
            self.mta_gamma_state.as_ref().ok_or(AbortReason::Internal)?,
            &peer.gamma_instance,
            &self.local.paillier.secret,
            &self.local.aux,
            None,
            &session,
            gamma_inst,
            self.local.range_proofs,
        )?;
        let mu = mta_finalize(
            self.mta_omega_state.as_ref().ok_or(AbortReason::Internal)?,
            &peer.omega_instance,
            &self.local.paillier.secret,
            &self.local.aux,
            Some(&self.local.peer_omega_point),
            &session,
            omega_inst,
            self.local.range_proofs,
        )?;
        let delta = self.k * self.gamma + alpha.share + self.beta.ok_or(AbortReason::Internal)?;
        let sigma =
            self.k * self.local.omega + mu.share + self.nu.ok_or(AbortReason::Internal)?;
        self.delta_own = Some(delta);
        self.sigma_own = Some(sigma);
        Ok(SignDelta { delta })
    }

    /// Round 5: with both delta shares public, invert delta and decommit the
    /// nonce point alongside its Schnorr proof.
    pub fn nonce_reveal(
        &mut self,
        peer: SignDelta,
        rng: &mut (impl RngCore + CryptoRng),
    ) -> Result<SignNonceReveal, AbortReason> {
        self.expect_stage(4)?;
        let delta = self.delta_own.ok_or(AbortReason::Internal)? + peer.delta;
        let delta_inv = delta.invert().map_err(|_| AbortReason::DeltaNotInvertible)?;
        self.delta_inv = Some(delta_inv);
        let proof = schnorr_prove(
            &self.gamma,
            &mul_generator(&self.gamma),
            &gamma_proof_context(&self.local.session, self.local.sign_role),
            rng,
        );
        Ok(SignNonceReveal {
            open: self.open_nonce.clone().ok_or(AbortReason::Internal)?,
            gamma_proof: proof,
        })
    }

    /// Round 6: verify the peer decommitment and proof, fix R and r, compute
    /// the signature share and commit to the masked points (W_i, Z_i).
    pub fn check_commit(
        &mut self,
        peer: SignNonceReveal,
        rng: &mut (impl RngCore + CryptoRng),
    ) -> Result<SignCommitMsg, AbortReason> {
        self.expect_stage(5)?;
        let peer_commit = self.peer_nonce_commit.as_ref().ok_or(AbortReason::Internal)?;
        let bytes = verify_commitment(TAG_NONCE, peer_commit, &peer.open)
            .ok_or(AbortReason::CommitmentMismatch)?;
        let peer_g = GroupPoint::from_bytes(bytes).map_err(|_| AbortReason::MalformedMessage)?;
        if !schnorr_verify(
            &peer.gamma_proof,
            &peer_g,
            &gamma_proof_context(&self.local.session, self.local.sign_role.peer()),
        ) {
            return Err(AbortReason::SchnorrProofInvalid);
        }
        let delta_inv = self.delta_inv.ok_or(AbortReason::Internal)?;
        let r_point = (mul_generator(&self.gamma) + peer_g) * delta_inv;
        let r = r_point.x_scalar().ok_or(AbortReason::NonceRestart)?;
        if r.is_zero() {
            return Err(AbortReason::NonceRestart);
        }
        self.r_point = Some(r_point);
        self.r = Some(r);

        let m = hash_to_scalar(&self.local.message);
        let sigma = self.sigma_own.ok_or(AbortReason::Internal)?;
        let s_share = self.forced_share.unwrap_or(m * self.k + r * sigma);
        let l = Scalar::random(rng);
        let rho = Scalar::random(rng);
        let w = r_point * s_share + mul_generator(&l);
        let z = mul_generator(&rho);
        self.s_share = Some(s_share);
        self.mask_l = Some(l);
        self.mask_rho = Some(rho);
        self.w_own = Some(w);
        self.z_own = Some(z);

        let (com, open) = commit(TAG_CHECK, &encode_point_pair(&w, &z), rng);
        self.open_check = Some(open);
        Ok(SignCommitMsg { commit: com })
    }

    /// Round 7: open (W_i, Z_i) and prove knowledge of (s_i, l_i, rho_i).
    pub fn check_reveal(
        &mut self,
        peer: SignCommitMsg,
        rng: &mut (impl RngCore + CryptoRng),
    ) -> Result<SignCheckReveal, AbortReason> {
        self.expect_stage(6)?;
        self.peer_check_commit = Some(peer.commit);
        let proof = share_proof_prove(
            self.s_share.as_ref().ok_or(AbortReason::Internal)?,
            self.mask_l.as_ref().ok_or(AbortReason::Internal)?,
            self.mask_rho.as_ref().ok_or(AbortReason::Internal)?,
            self.r_point.as_ref().ok_or(AbortReason::Internal)?,
            self.w_own.as_ref().ok_or(AbortReason::Internal)?,
            self.z_own.as_ref().ok_or(AbortReason::Internal)?,
            &share_proof_context(&self.local.session, self.local.sign_role),
            rng,
        );
        Ok(SignCheckReveal {
            open: self.open_check.clone().ok_or(AbortReason::Internal)?,
            proof,
        })
    }

    /// Round 8: verify the peer's opened points and proof, assemble
    /// W = -m B - r Y + W_A + W_B and Z = Z_A + Z_B, then commit to
    /// (U_i, T_i) = (rho_i W, l_i Z).
    pub fn mutual_commit(
        &mut self,
        peer: SignCheckReveal,
        rng: &mut (impl RngCore + CryptoRng),
    ) -> Result<SignCommitMsg, AbortReason> {
        self.expect_stage(7)?;
        let peer_commit = self.peer_check_commit.as_ref().ok_or(AbortReason::Internal)?;
        let bytes = verify_commitment(TAG_CHECK, peer_commit, &peer.open)
            .ok_or(AbortReason::CommitmentMismatch)?;
        let (w_peer, z_peer) = decode_point_pair(bytes)?;
        let r_point = self.r_point.as_ref().ok_or(AbortReason::Internal)?;
        if !share_proof_verify(
            &peer.proof,
            r_point,
            &w_peer,
            &z_peer,
            &share_proof_context(&self.local.session, self.local.sign_role.peer()),
        ) {
            return Err(AbortReason::PhaseProofInvalid);
        }
        let m = hash_to_scalar(&self.local.message);
        let r = self.r.ok_or(AbortReason::Internal)?;
        let w = *self.w_own.as_ref().ok_or(AbortReason::Internal)? + w_peer
            - mul_generator(&m)
            - self.local.public_key * r;
        let z = *self.z_own.as_ref().ok_or(AbortReason::Internal)? + z_peer;
        let u = w * self.mask_rho.ok_or(AbortReason::Internal)?;
        let t = z * self.mask_l.ok_or(AbortReason::Internal)?;
        self.w_combined = Some(w);
        self.z_combined = Some(z);
        self.u_own = Some(u);
        self.t_own = Some(t);
        let (com, open) = commit(TAG_MUTUAL, &encode_point_pair(&u, &t), rng);
        self.open_mutual = Some(open);
        Ok(SignCommitMsg { commit: com })
    }

    /// Round 9: open (U_i, T_i).
    pub fn mutual_reveal(&mut self, peer: SignCommitMsg) -> Result<SignMutualReveal, AbortReason> {
        self.expect_stage(8)?;
        self.peer_mutual_commit = Some(peer.commit);
        Ok(SignMutualReveal {
            open: self.open_mutual.clone().ok_or(AbortReason::Internal)?,
        })
    }

    /// Round 10: the abort gate. Only when T_A + T_B = U_A + U_B is the
    /// signature share released.
    pub fn share_reveal(&mut self, peer: SignMutualReveal) -> Result<SignShareMsg, AbortReason> {
        self.expect_stage(9)?;
        let peer_commit = self.peer_mutual_commit.as_ref().ok_or(AbortReason::Internal)?;
        let bytes = verify_commitment(TAG_MUTUAL, peer_commit, &peer.open)
            .ok_or(AbortReason::CommitmentMismatch)?;
        let (u_peer, t_peer) = decode_point_pair(bytes)?;
        let u_sum = *self.u_own.as_ref().ok_or(AbortReason::Internal)? + u_peer;
        let t_sum = *self.t_own.as_ref().ok_or(AbortReason::Internal)? + t_peer;
        if t_sum != u_sum {
            return Err(AbortReason::MutualCheckFailed);
        }
        Ok(SignShareMsg { share: self.s_share.ok_or(AbortReason::Internal)? })
    }

    /// Assemble and verify the final signature.
    pub fn complete(&mut self, peer: SignShareMsg) -> Result<Signature, AbortReason> {
        self.expect_stage(10)?;
        let s = self.s_share.ok_or(AbortReason::Internal)? + peer.share;
        let r = self.r.ok_or(AbortReason::Internal)?;
        if s.is_zero() {
            return Err(AbortReason::NonceRestart);
        }
        let sig = Signature { r, s };
        if !ecdsa_verify(&self.local.public_key, &self.local.message, &sig) {
            return Err(AbortReason::FinalSignatureInvalid);
        }
        Ok(sig)
    }

    /// Adversary hook for the abort-safety tests: substitutes an arbitrary
    /// signature share. The cheater's masked point and proof stay
    /// self-consistent, so only the mutual check can catch it.
    #[doc(hidden)]
    pub fn force_signature_share(&mut self, share: Scalar) {
        self.forced_share = Some(share);
    }

    #[cfg(test)]
    pub(crate) fn test_nonces(&self) -> (Scalar, Scalar) {
        (self.k, self.gamma)
    }

    #[cfg(test)]
    pub(crate) fn test_sigma(&self) -> Option<Scalar> {
        self.sigma_own
    }

    #[cfg(test)]
    pub(crate) fn test_delta(&self) -> Option<Scalar> {
        self.delta_own
    }

    #[cfg(test)]
    pub(crate) fn test_r_point(&self) -> Option<GroupPoint> {
        self.r_point
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paillier::{paillier_keygen_insecure, GammaChoice};
    use crate::protocol::Pairing;
    use crate::zkp::AuxRsaParams;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::sync::OnceLock;

    struct Fixture {
        paillier_a: PaillierKeyPair,
        paillier_b: PaillierKeyPair,
        aux_a: AuxRsaParams,
        aux_b: AuxRsaParams,
    }

    fn fixture() -> &'static Fixture {
        static F: OnceLock<Fixture> = OnceLock::new();
        F.get_or_init(|| {
            let mut rng = ChaCha20Rng::seed_from_u64(77);
            Fixture {
                paillier_a: paillier_keygen_insecure(1024, GammaChoice::NPlusOne, &mut rng)
                    .unwrap(),
                paillier_b: paillier_keygen_insecure(1024, GammaChoice::NPlusOne, &mut rng)
                    .unwrap(),
                aux_a: AuxRsaParams::generate(1024, &mut rng),
                aux_b: AuxRsaParams::generate(1024, &mut rng),
            }
        })
    }

    /// Standalone signer pair with additive shares of a fresh key.
    fn signer_pair(message: &[u8], rng: &mut ChaCha20Rng) -> (SignParty, SignParty, GroupPoint) {
        let f = fixture();
        let omega_a = Scalar::random(rng);
        let omega_b = Scalar::random(rng);
        let y = mul_generator(&(omega_a + omega_b));
        let session = [3u8; 16];
        let a = SignParty::new(SignerLocal {
            session,
            sign_role: SignRole::A,
            pairing: Pairing::P1P2,
            message: message.to_vec(),
            omega: omega_a,
            peer_omega_point: mul_generator(&omega_b),
            public_key: y,
            paillier: f.paillier_a.clone(),
            aux: f.aux_a.clone(),
            peer_paillier: f.paillier_b.public.clone(),
            peer_aux: f.aux_b.clone(),
            range_proofs: true,
        });
        let b = SignParty::new(SignerLocal {
            session,
            sign_role: SignRole::B,
            pairing: Pairing::P1P2,
            message: message.to_vec(),
            omega: omega_b,
            peer_omega_point: mul_generator(&omega_a),
            public_key: y,
            paillier: f.paillier_b.clone(),
            aux: f.aux_b.clone(),
            peer_paillier: f.paillier_a.public.clone(),
            peer_aux: f.aux_a.clone(),
            range_proofs: true,
        });
        (a, b, y)
    }

    fn drive_to_signature(
        a: &mut SignParty,
        b: &mut SignParty,
        rng_a: &mut ChaCha20Rng,
        rng_b: &mut ChaCha20Rng,
    ) -> Result<(Signature, Signature), AbortReason> {
        let c_a = a.nonce_commit(rng_a)?;
        let c_b = b.nonce_commit(rng_b)?;
        let i_a = a.mta_inits(c_b, rng_a)?;
        let i_b = b.mta_inits(c_a, rng_b)?;
        let r_a = a.mta_respond_step(i_b, rng_a)?;
        let r_b = b.mta_respond_step(i_a, rng_b)?;
        let d_a = a.delta_share(r_b)?;
        let d_b = b.delta_share(r_a)?;
        let n_a = a.nonce_reveal(d_b, rng_a)?;
        let n_b = b.nonce_reveal(d_a, rng_b)?;
        let cc_a = a.check_commit(n_b, rng_a)?;
        let cc_b = b.check_commit(n_a, rng_b)?;
        let cr_a = a.check_reveal(cc_b, rng_a)?;
        let cr_b = b.check_reveal(cc_a, rng_b)?;
        let mc_a = a.mutual_commit(cr_b, rng_a)?;
        let mc_b = b.mutual_commit(cr_a, rng_b)?;
        let mr_a = a.mutual_reveal(mc_b)?;
        let mr_b = b.mutual_reveal(mc_a)?;
        let s_a = a.share_reveal(mr_b)?;
        let s_b = b.share_reveal(mr_a)?;
        let sig_a = a.complete(s_b)?;
        let sig_b = b.complete(s_a)?;
        Ok((sig_a, sig_b))
    }

    #[test]
    fn honest_run_produces_valid_signature() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let (mut a, mut b, y) = signer_pair(b"the message", &mut rng);
        let mut rng_a = ChaCha20Rng::seed_from_u64(2);
        let mut rng_b = ChaCha20Rng::seed_from_u64(3);
        let (sig_a, sig_b) = drive_to_signature(&mut a, &mut b, &mut rng_a, &mut rng_b).unwrap();
        assert_eq!(sig_a, sig_b);
        assert!(ecdsa_verify(&y, b"the message", &sig_a));

        // Joint phase-2 identities: delta = k gamma and sigma_A + sigma_B = k u.
        let (k_a, g_a) = a.test_nonces();
        let (k_b, g_b) = b.test_nonces();
        let k = k_a + k_b;
        assert_eq!(
            a.test_delta().unwrap() + b.test_delta().unwrap(),
            k * (g_a + g_b)
        );
        let sigma_sum = a.test_sigma().unwrap() + b.test_sigma().unwrap();
        assert_eq!(mul_generator(&sigma_sum), y * k);
        // R = k^-1 B.
        assert_eq!(a.test_r_point().unwrap(), mul_generator(&k.invert().unwrap()));
    }

    #[test]
    fn empty_message_signs() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let (mut a, mut b, y) = signer_pair(b"", &mut rng);
        let mut rng_a = ChaCha20Rng::seed_from_u64(5);
        let mut rng_b = ChaCha20Rng::seed_from_u64(6);
        let (sig, _) = drive_to_signature(&mut a, &mut b, &mut rng_a, &mut rng_b).unwrap();
        assert!(ecdsa_verify(&y, b"", &sig));
    }

    #[test]
    fn tampered_delta_aborts_before_share_release() {
        // Desynchronized delta shares leave the two parties with different R
        // points, so the check-phase proof already fails to verify. No share
        // is ever revealed.
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let (mut a, mut b, _) = signer_pair(b"m", &mut rng);
        let mut rng_a = ChaCha20Rng::seed_from_u64(8);
        let mut rng_b = ChaCha20Rng::seed_from_u64(9);
        let c_a = a.nonce_commit(&mut rng_a).unwrap();
        let c_b = b.nonce_commit(&mut rng_b).unwrap();
        let i_a = a.mta_inits(c_b, &mut rng_a).unwrap();
        let i_b = b.mta_inits(c_a, &mut rng_b).unwrap();
        let r_a = a.mta_respond_step(i_b, &mut rng_a).unwrap();
        let r_b = b.mta_respond_step(i_a, &mut rng_b).unwrap();
        let d_a = a.delta_share(r_b).unwrap();
        let mut d_b = b.delta_share(r_a).unwrap();
        // Channel tamper: B's delta share is altered in flight to A.
        d_b.delta = d_b.delta + Scalar::ONE;
        let n_a = a.nonce_reveal(d_b, &mut rng_a).unwrap();
        let n_b = b.nonce_reveal(d_a, &mut rng_b).unwrap();
        let cc_a = a.check_commit(n_b, &mut rng_a).unwrap();
        let cc_b = b.check_commit(n_a, &mut rng_b).unwrap();
        let cr_a = a.check_reveal(cc_b, &mut rng_a).unwrap();
        let cr_b = b.check_reveal(cc_a, &mut rng_b).unwrap();
        assert_eq!(
            a.mutual_commit(cr_b, &mut rng_a).unwrap_err(),
            AbortReason::PhaseProofInvalid
        );
        assert_eq!(
            b.mutual_commit(cr_a, &mut rng_b).unwrap_err(),
            AbortReason::PhaseProofInvalid
        );
    }

    #[test]
    fn forged_share_caught_by_mutual_check() {
        // The cheater's masked point and proof are self-consistent for the
        // forged share, so the run reaches the T/U gate and stops there,
        // before any share crosses the channel.
        let mut rng = ChaCha20Rng::seed_from_u64(20);
        let (mut a, mut b, _) = signer_pair(b"m", &mut rng);
        b.force_signature_share(Scalar::random(&mut rng));
        let mut rng_a = ChaCha20Rng::seed_from_u64(21);
        let mut rng_b = ChaCha20Rng::seed_from_u64(22);
        let c_a = a.nonce_commit(&mut rng_a).unwrap();
        let c_b = b.nonce_commit(&mut rng_b).unwrap();
        let i_a = a.mta_inits(c_b, &mut rng_a).unwrap();
        let i_b = b.mta_inits(c_a, &mut rng_b).unwrap();
        let r_a = a.mta_respond_step(i_b, &mut rng_a).unwrap();
        let r_b = b.mta_respond_step(i_a, &mut rng_b).unwrap();
        let d_a = a.delta_share(r_b).unwrap();
        let d_b = b.delta_share(r_a).unwrap();
        let n_a = a.nonce_reveal(d_b, &mut rng_a).unwrap();
        let n_b = b.nonce_reveal(d_a, &mut rng_b).unwrap();
        let cc_a = a.check_commit(n_b, &mut rng_a).unwrap();
        let cc_b = b.check_commit(n_a, &mut rng_b).unwrap();
        let cr_a = a.check_reveal(cc_b, &mut rng_a).unwrap();
        let cr_b = b.check_reveal(cc_a, &mut rng_b).unwrap();
        let mc_a = a.mutual_commit(cr_b, &mut rng_a).unwrap();
        let mc_b = b.mutual_commit(cr_a, &mut rng_b).unwrap();
        let mr_a = a.mutual_reveal(mc_b).unwrap();
        let mr_b = b.mutual_reveal(mc_a).unwrap();
        assert_eq!(a.share_reveal(mr_b).unwrap_err(), AbortReason::MutualCheckFailed);
        assert_eq!(b.share_reveal(mr_a).unwrap_err(), AbortReason::MutualCheckFailed);
    }

    #[test]
    fn wrong_nonce_decommit_aborts() {
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        let (mut a, mut b, _) = signer_pair(b"m", &mut rng);
        let mut rng_a = ChaCha20Rng::seed_from_u64(11);
        let mut rng_b = ChaCha20Rng::seed_from_u64(12);
        let c_a = a.nonce_commit(&mut rng_a).unwrap();
        let c_b = b.nonce_commit(&mut rng_b).unwrap();
        let i_a = a.mta_inits(c_b, &mut rng_a).unwrap();
        let i_b = b.mta_inits(c_a, &mut rng_b).unwrap();
        let r_a = a.mta_respond_step(i_b, &mut rng_a).unwrap();
        let r_b = b.mta_respond_step(i_a, &mut rng_b).unwrap();
        let d_a = a.delta_share(r_b).unwrap();
        let d_b = b.delta_share(r_a).unwrap();
        let mut n_a = a.nonce_reveal(d_b, &mut rng_a).unwrap();
        let _n_b = b.nonce_reveal(d_a, &mut rng_b).unwrap();
        n_a.open.payload[1] ^= 1;
        assert_eq!(
            b.check_commit(n_a, &mut rng_b).unwrap_err(),
            AbortReason::CommitmentMismatch
        );
    }

    #[test]
    fn cheating_omega_point_aborts_in_mta() {
        // B claims a different omega than the public share point implies.
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        let f = fixture();
        let omega_a = Scalar::random(&mut rng);
        let omega_b = Scalar::random(&mut rng);
        let y = mul_generator(&(omega_a + omega_b));
        let session = [4u8; 16];
        let mk = |role, omega: Scalar, peer_point: GroupPoint, own: &PaillierKeyPair, own_aux: &AuxRsaParams, peer: &PaillierKeyPair, peer_aux: &AuxRsaParams| {
            SignParty::new(SignerLocal {
                session,
                sign_role: role,
                pairing: Pairing::P1P2,
                message: b"m".to_vec(),
                omega,
                peer_omega_point: peer_point,
                public_key: y,
                paillier: own.clone(),
                aux: own_aux.clone(),
                peer_paillier: peer.public.clone(),
                peer_aux: peer_aux.clone(),
                range_proofs: true,
            })
        };
        let mut a = mk(
            SignRole::A,
            omega_a,
            mul_generator(&omega_b),
            &f.paillier_a,
            &f.aux_a,
            &f.paillier_b,
            &f.aux_b,
        );
        // B uses omega_b + 1 while A expects omega_b B.
        let mut b = mk(
            SignRole::B,
            omega_b + Scalar::ONE,
            mul_generator(&omega_a),
            &f.paillier_b,
            &f.aux_b,
            &f.paillier_a,
            &f.aux_a,
        );
        let mut rng_a = ChaCha20Rng::seed_from_u64(14);
        let mut rng_b = ChaCha20Rng::seed_from_u64(15);
        let c_a = a.nonce_commit(&mut rng_a).unwrap();
        let c_b = b.nonce_commit(&mut rng_b).unwrap();
        let i_a = a.mta_inits(c_b, &mut rng_a).unwrap();
        let i_b = b.mta_inits(c_a, &mut rng_b).unwrap();
        let r_a = a.mta_respond_step(i_b, &mut rng_a).unwrap();
        let r_b = b.mta_respond_step(i_a, &mut rng_b).unwrap();
        // A finalizes against the expected public point and rejects.
        let err = a.delta_share(r_b).unwrap_err();
        assert_eq!(err, AbortReason::RangeProofInvalid);
        let _ = r_a;
    }

    #[test]
    fn out_of_order_calls_rejected() {
        let mut rng = ChaCha20Rng::seed_from_u64(16);
        let (mut a, _, _) = signer_pair(b"m", &mut rng);
        let mut rng_a = ChaCha20Rng::seed_from_u64(17);
        let _ = a.nonce_commit(&mut rng_a).unwrap();
        assert_eq!(
            a.delta_share(SignMtaResponses {
                gamma_instance: crate::mta::MtaResponseMessage {
                    ciphertext: crate::paillier::PaillierCiphertext::from_uint(
                        num_bigint::BigUint::from(2u8),
                        &fixture().paillier_a.public,
                    )
                    .unwrap(),
                    proof: None,
                },
                omega_instance: crate::mta::MtaResponseMessage {
                    ciphertext: crate::paillier::PaillierCiphertext::from_uint(
                        num_bigint::BigUint::from(2u8),
                        &fixture().paillier_a.public,
                    )
                    .unwrap(),
                    proof: None,
                },
            })
            .unwrap_err(),
            AbortReason::UnexpectedMessage
        );
    }
}
