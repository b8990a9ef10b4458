//! Distributed key generation between the two online parties. Each picks
//! u_i and sigma_3i, commits to both curve points, deals u_i with Feldman
//! VSS at the fixed evaluation points and encrypts the offline party's
//! material under its long-term key. The offline party's secret is defined
//! virtually through u_3 = 3 sigma_31 - 2 sigma_32, which is exactly the
//! degree-1 interpolation of the two committed values.

use rand::{CryptoRng, RngCore};

use crate::algebra::{mul_generator, GroupPoint, Scalar};
use crate::errors::AbortReason;
use crate::paillier::{
    paillier_keygen_insecure, GammaChoice, PaillierKeyPair, PaillierPublicKey,
};
use crate::sealedbox::{seal, SealedBox};
use crate::vss;
use crate::zkp::{
    commit, factorization_prove, factorization_verify, schnorr_prove, schnorr_verify,
    verify_commitment, AuxRsaParams, Commitment, FactorizationParams,
};

use super::messages::{KeygenRound1, KeygenRound2, KeygenRound3};
use super::{KeyShareRecord, Pairing, PartyRole, ProtocolConfig, SharePoints, VssCommitments};

const TAG_U: &str = "keygen-u";
const TAG_SIGMA3: &str = "keygen-sigma3";

fn x_proof_context(session: &[u8; 16], role: PartyRole) -> Vec<u8> {
    let mut ctx = session.to_vec();
    ctx.extend_from_slice(b"/keygen-x/");
    ctx.push(role.id());
    ctx
}

fn fact_context(session: &[u8; 16], role: PartyRole) -> Vec<u8> {
    let mut ctx = session.to_vec();
    ctx.extend_from_slice(b"/keygen-fact/");
    ctx.push(role.id());
    ctx
}

struct PeerRound1 {
    commit_u: Commitment,
    commit_sigma3: Commitment,
    paillier: PaillierPublicKey,
    aux: AuxRsaParams,
}

struct PeerRound2 {
    u_point: GroupPoint,
    sigma3_point: GroupPoint,
    vss_constant: GroupPoint,
    vss_linear: GroupPoint,
    rec_blob: SealedBox,
}

/// One online party's keygen state machine. Rounds must be driven in order;
/// each consumes the peer's previous-round message.
pub struct KeygenParty {
    cfg: ProtocolConfig,
    role: PartyRole,
    session: [u8; 16],
    recovery_pk: GroupPoint,
    u: Scalar,
    sigma3: Scalar,
    paillier: PaillierKeyPair,
    aux: AuxRsaParams,
    open_u: Option<crate::zkp::Decommitment>,
    open_sigma3: Option<crate::zkp::Decommitment>,
    dealing: Option<vss::VssDealing>,
    peer_r1: Option<PeerRound1>,
    peer_r2: Option<PeerRound2>,
    peer_share: Option<Scalar>,
    x: Option<Scalar>,
    derivation_secret: Option<[u8; 32]>,
    own_rec_blob: Option<SealedBox>,
}

impl KeygenParty {
    /// Generates long-lived key material (Paillier and auxiliary RSA). The
    /// role must be one of the two online parties.
    pub fn new(
        cfg: ProtocolConfig,
        role: PartyRole,
        session: [u8; 16],
        recovery_pk: GroupPoint,
        rng: &mut (impl RngCore + CryptoRng),
    ) -> Result<KeygenParty, AbortReason> {
        if role == PartyRole::P3 {
            return Err(AbortReason::Internal);
        }
        cfg.validate().map_err(|_| AbortReason::Internal)?;
        let paillier = paillier_keygen_insecure(cfg.paillier_bits, GammaChoice::NPlusOne, rng)
            .map_err(|_| AbortReason::Internal)?;
        let aux = AuxRsaParams::generate(cfg.aux_bits, rng);
        Ok(KeygenParty {
            cfg,
            role,
            session,
            recovery_pk,
            u: Scalar::random(rng),
            sigma3: Scalar::random(rng),
            paillier,
            aux,
            open_u: None,
            open_sigma3: None,
            dealing: None,
            peer_r1: None,
            peer_r2: None,
            peer_share: None,
            x: None,
            derivation_secret: None,
            own_rec_blob: None,
        })
    }

    pub fn role(&self) -> PartyRole {
        self.role
    }

    fn peer_role(&self) -> PartyRole {
        match self.role {
            PartyRole::P1 => PartyRole::P2,
            _ => PartyRole::P1,
        }
    }

    /// Round 1: commitments to u_i B and sigma_3i B plus the Paillier and
    /// auxiliary public keys.
    pub fn round1(&mut self, rng: &mut (impl RngCore + CryptoRng)) -> KeygenRound1 {
        let (com_u, open_u) = commit(TAG_U, &mul_generator(&self.u).to_bytes(), rng);
        let (com_s, open_s) = commit(TAG_SIGMA3, &mul_generator(&self.sigma3).to_bytes(), rng);
        self.open_u = Some(open_u);
        self.open_sigma3 = Some(open_s);
        KeygenRound1 {
            commit_u: com_u,
            commit_sigma3: com_s,
            paillier_n: self.paillier.public.modulus().clone(),
            paillier_gamma: self.paillier.public.gamma().clone(),
            aux: self.aux.clone(),
        }
    }

    /// Round 2: validates the peer's public keys, then reveals the
    /// decommitments, deals u_i and sends the peer its share, the offline
    /// party's sealed material and the dealing commitments.
    pub fn round2(
        &mut self,
        peer: KeygenRound1,
        rng: &mut (impl RngCore + CryptoRng),
    ) -> Result<KeygenRound2, AbortReason> {
        if peer.paillier_n.bits() != self.cfg.paillier_bits {
            return Err(AbortReason::PaillierKeyInvalid);
        }
        let peer_pk = reconstruct_paillier_pk(&peer.paillier_n, &peer.paillier_gamma)?;
        self.peer_r1 = Some(PeerRound1 {
            commit_u: peer.commit_u,
            commit_sigma3: peer.commit_sigma3,
            paillier: peer_pk,
            aux: peer.aux,
        });

        let dealing = vss::deal(&self.u, rng);
        let sigma_i3 = dealing
            .share_at(PartyRole::P3.eval_point())
            .expect("fixed point")
            .value;
        let peer_share = dealing
            .share_at(self.peer_role().eval_point())
            .expect("fixed point")
            .value;

        // rec_{i,3}: the offline party's incoming share f_i(1) and the
        // locally chosen sigma_3i, sealed to the recovery key.
        let mut plaintext = [0u8; 64];
        plaintext[..32].copy_from_slice(&sigma_i3.to_bytes());
        plaintext[32..].copy_from_slice(&self.sigma3.to_bytes());
        let rec_blob =
            seal(&self.recovery_pk, &plaintext, rng).map_err(|_| AbortReason::Internal)?;
        self.own_rec_blob = Some(rec_blob.clone());

        let msg = KeygenRound2 {
            open_u: self.open_u.clone().ok_or(AbortReason::UnexpectedMessage)?,
            open_sigma3: self.open_sigma3.clone().ok_or(AbortReason::UnexpectedMessage)?,
            vss_commit_constant: dealing.commit_constant,
            vss_commit_linear: dealing.commit_linear,
            peer_share,
            rec_blob,
        };
        self.dealing = Some(dealing);
        Ok(msg)
    }

    /// Round 3: opens the peer commitments, checks the VSS share, computes
    /// x_i and the common secret d, and produces the Schnorr and
    /// factorization proofs.
    pub fn round3(
        &mut self,
        peer: KeygenRound2,
        rng: &mut (impl RngCore + CryptoRng),
    ) -> Result<KeygenRound3, AbortReason> {
        let peer_r1 = self.peer_r1.as_ref().ok_or(AbortReason::UnexpectedMessage)?;
        let dealing = self.dealing.as_ref().ok_or(AbortReason::UnexpectedMessage)?;

        let u_bytes = verify_commitment(TAG_U, &peer_r1.commit_u, &peer.open_u)
            .ok_or(AbortReason::CommitmentMismatch)?;
        let peer_u_point =
            GroupPoint::from_bytes(u_bytes).map_err(|_| AbortReason::MalformedMessage)?;
        let s_bytes = verify_commitment(TAG_SIGMA3, &peer_r1.commit_sigma3, &peer.open_sigma3)
            .ok_or(AbortReason::CommitmentMismatch)?;
        let peer_sigma3_point =
            GroupPoint::from_bytes(s_bytes).map_err(|_| AbortReason::MalformedMessage)?;

        // The dealt constant term must be the committed u_j.
        if peer.vss_commit_constant != peer_u_point {
            return Err(AbortReason::VssCommitmentInconsistent);
        }
        let own_point = self.role.eval_point();
        let share = vss::VssShare { point: own_point, value: peer.peer_share };
        if !vss::verify_share(&share, &peer.vss_commit_constant, &peer.vss_commit_linear) {
            return Err(AbortReason::VssShareInvalid);
        }

        let own_share = dealing.share_at(own_point).expect("fixed point").value;
        let x = own_share + peer.peer_share + self.sigma3;
        self.x = Some(x);
        self.peer_share = Some(peer.peer_share);

        // Common secret d = (sigma_21 sigma_23 B)_x, computed DH-style: P1
        // multiplies its received share into P2's public f_2(1) point, P2
        // multiplies its own evaluations directly.
        let d_point = match self.role {
            PartyRole::P1 => {
                let f2_at_1 = vss::public_share_point(
                    &peer.vss_commit_constant,
                    &peer.vss_commit_linear,
                    PartyRole::P3.eval_point(),
                );
                f2_at_1 * peer.peer_share
            }
            _ => {
                let sigma_21 = dealing
                    .share_at(PartyRole::P1.eval_point())
                    .expect("fixed point")
                    .value;
                let sigma_23 = dealing
                    .share_at(PartyRole::P3.eval_point())
                    .expect("fixed point")
                    .value;
                mul_generator(&sigma_21) * sigma_23
            }
        };
        self.derivation_secret = Some(d_point.x_bytes().ok_or(AbortReason::Internal)?);
        self.peer_r2 = Some(PeerRound2 {
            u_point: peer_u_point,
            sigma3_point: peer_sigma3_point,
            vss_constant: peer.vss_commit_constant,
            vss_linear: peer.vss_commit_linear,
            rec_blob: peer.rec_blob,
        });

        let x_proof = schnorr_prove(
            &x,
            &mul_generator(&x),
            &x_proof_context(&self.session, self.role),
            rng,
        );
        let params = FactorizationParams::for_modulus_bits(self.cfg.paillier_bits)
            .map_err(|_| AbortReason::Internal)?;
        let fact_proof = factorization_prove(
            &self.paillier.secret,
            &params,
            &fact_context(&self.session, self.role),
            rng,
        )
        .map_err(|_| AbortReason::Internal)?;
        Ok(KeygenRound3 { x_proof, fact_proof })
    }

    /// Finalize: verifies the peer's proofs against publicly reconstructed
    /// statements and assembles the key share record.
    pub fn finalize(self, peer: KeygenRound3) -> Result<KeyShareRecord, AbortReason> {
        let peer_r1 = self.peer_r1.as_ref().ok_or(AbortReason::UnexpectedMessage)?;
        let peer_r2 = self.peer_r2.as_ref().ok_or(AbortReason::UnexpectedMessage)?;
        let dealing = self.dealing.as_ref().ok_or(AbortReason::UnexpectedMessage)?;
        let x = self.x.ok_or(AbortReason::UnexpectedMessage)?;
        let peer_role = self.peer_role();

        // Public share point of the peer: own dealing at the peer's point,
        // peer dealing at the peer's point, plus the peer's sigma_3j point.
        let peer_point = peer_role.eval_point();
        let peer_x_point = vss::public_share_point(
            &dealing.commit_constant,
            &dealing.commit_linear,
            peer_point,
        ) + vss::public_share_point(&peer_r2.vss_constant, &peer_r2.vss_linear, peer_point)
            + peer_r2.sigma3_point;

        if !schnorr_verify(
            &peer.x_proof,
            &peer_x_point,
            &x_proof_context(&self.session, peer_role),
        ) {
            return Err(AbortReason::SchnorrProofInvalid);
        }
        let params = FactorizationParams::for_modulus_bits(self.cfg.paillier_bits)
            .map_err(|_| AbortReason::Internal)?;
        if !factorization_verify(
            &peer.fact_proof,
            peer_r1.paillier.modulus(),
            &params,
            &fact_context(&self.session, peer_role),
        ) {
            return Err(AbortReason::FactorizationProofInvalid);
        }

        // sigma_31 B and sigma_32 B by party, then u_3 B by interpolation.
        let own_sigma3_point = mul_generator(&self.sigma3);
        let (sigma31_point, sigma32_point) = match self.role {
            PartyRole::P1 => (own_sigma3_point, peer_r2.sigma3_point),
            _ => (peer_r2.sigma3_point, own_sigma3_point),
        };
        let three = Scalar::from_u64(3);
        let two = Scalar::from_u64(2);
        let u3_point = sigma31_point * three - sigma32_point * two;
        let public_key = mul_generator(&self.u) + peer_r2.u_point + u3_point;

        let (c1, c2) = match self.role {
            PartyRole::P1 => (
                (dealing.commit_constant, dealing.commit_linear),
                (peer_r2.vss_constant, peer_r2.vss_linear),
            ),
            _ => (
                (peer_r2.vss_constant, peer_r2.vss_linear),
                (dealing.commit_constant, dealing.commit_linear),
            ),
        };
        let share_point_at = |point: u32, sigma3: GroupPoint| {
            vss::public_share_point(&c1.0, &c1.1, point)
                + vss::public_share_point(&c2.0, &c2.1, point)
                + sigma3
        };
        let share_points = SharePoints {
            x1: share_point_at(PartyRole::P1.eval_point(), sigma31_point),
            x2: share_point_at(PartyRole::P2.eval_point(), sigma32_point),
            x3: share_point_at(
                PartyRole::P3.eval_point(),
                sigma31_point * two - sigma32_point,
            ),
        };

        let (w_a, w_b) = Pairing::P1P2.weights();
        let omega = match self.role {
            PartyRole::P1 => w_a * x,
            _ => w_b * x,
        };

        let own_blob = self.own_rec_blob.clone().ok_or(AbortReason::UnexpectedMessage)?;
        let (rec_p1, rec_p2) = match self.role {
            PartyRole::P1 => (own_blob, peer_r2.rec_blob.clone()),
            _ => (peer_r2.rec_blob.clone(), own_blob),
        };

        Ok(KeyShareRecord {
            role: self.role,
            curve: self.cfg.curve,
            x_share: x,
            omega,
            public_key,
            derivation_secret: self.derivation_secret.ok_or(AbortReason::UnexpectedMessage)?,
            paillier: self.paillier,
            aux: self.aux,
            peer_paillier: peer_r1.paillier.clone(),
            peer_aux: peer_r1.aux.clone(),
            rec_p1,
            rec_p2,
            recovery_pk: self.recovery_pk,
            share_points,
            vss_commitments: VssCommitments { p1: c1, p2: c2 },
            sigma3_points: (sigma31_point, sigma32_point),
            paillier_bits: self.cfg.paillier_bits,
        })
    }
}

fn reconstruct_paillier_pk(
    n: &num_bigint::BigUint,
    gamma: &num_bigint::BigUint,
) -> Result<PaillierPublicKey, AbortReason> {
    PaillierPublicKey::from_parts(n, gamma).map_err(|_| AbortReason::PaillierKeyInvalid)
}
