//! Wire formats for every protocol message: TLV with 2-byte field tags,
//! big-endian integers, 32-byte scalars and SEC1 points. Decoding is strict;
//! any unknown tag, wrong length or trailing byte is rejected.

use num_bigint::BigUint;

use crate::algebra::{GroupPoint, Scalar};
use crate::encoding::{put, put_u32, put_u64, put_u8, put_uint, TlvReader};
use crate::errors::Error;
use crate::mta::{MtaInitMessage, MtaResponseMessage};
use crate::paillier::{PaillierCiphertext, PaillierPublicKey};
use crate::sealedbox::SealedBox;
use crate::zkp::{
    AuxRsaParams, Commitment, Decommitment, FactRound, FactorizationProof, RangeProofA,
    RangeProofB, SchnorrProof, ShareConsistencyProof,
};

use super::{PartyRole, VssCommitments};

/// Message-kind tags carried in the envelope.
pub mod kind {
    pub const ACK: u8 = 0;
    pub const KEYGEN_COMMITMENTS: u8 = 1;
    pub const KEYGEN_REVEAL: u8 = 2;
    pub const KEYGEN_PROOFS: u8 = 3;
    pub const SIGN_NONCE_COMMIT: u8 = 10;
    pub const SIGN_MTA_INITS: u8 = 11;
    pub const SIGN_MTA_RESPONSES: u8 = 12;
    pub const SIGN_DELTA: u8 = 13;
    pub const SIGN_NONCE_REVEAL: u8 = 14;
    pub const SIGN_CHECK_COMMIT: u8 = 15;
    pub const SIGN_CHECK_REVEAL: u8 = 16;
    pub const SIGN_MUTUAL_COMMIT: u8 = 17;
    pub const SIGN_MUTUAL_REVEAL: u8 = 18;
    pub const SIGN_SHARE: u8 = 19;
    pub const RECOVERY_REQUEST: u8 = 30;
    pub const RECOVERY_P3_KEYS: u8 = 31;
    pub const RECOVERY_CALLER_KEYS: u8 = 32;
}

// Field helpers over the curve types.

pub(crate) fn put_scalar(buf: &mut Vec<u8>, tag: u16, s: &Scalar) {
    put(buf, tag, &s.to_bytes());
}

pub(crate) fn expect_scalar(r: &mut TlvReader, tag: u16) -> Result<Scalar, Error> {
    let bytes = r.expect_array::<32>(tag)?;
    Scalar::from_bytes(&bytes)
}

pub(crate) fn put_point(buf: &mut Vec<u8>, tag: u16, p: &GroupPoint) {
    put(buf, tag, &p.to_bytes());
}

pub(crate) fn expect_point(r: &mut TlvReader, tag: u16) -> Result<GroupPoint, Error> {
    GroupPoint::from_bytes(r.expect(tag)?)
}

fn put_commitment(buf: &mut Vec<u8>, tag: u16, c: &Commitment) {
    put(buf, tag, &c.0);
}

fn expect_commitment(r: &mut TlvReader, tag: u16) -> Result<Commitment, Error> {
    Ok(Commitment(r.expect_array::<32>(tag)?))
}

fn put_decommitment(buf: &mut Vec<u8>, tag: u16, d: &Decommitment) {
    let mut inner = Vec::new();
    put(&mut inner, 1, &d.payload);
    put(&mut inner, 2, &d.nonce);
    put(buf, tag, &inner);
}

fn expect_decommitment(r: &mut TlvReader, tag: u16) -> Result<Decommitment, Error> {
    let mut inner = TlvReader::new(r.expect(tag)?);
    let payload = inner.expect(1)?.to_vec();
    let nonce = inner.expect_array::<32>(2)?;
    inner.finish()?;
    Ok(Decommitment { payload, nonce })
}

fn put_aux(buf: &mut Vec<u8>, tag: u16, aux: &AuxRsaParams) {
    let mut inner = Vec::new();
    put_uint(&mut inner, 1, aux.modulus());
    put_uint(&mut inner, 2, aux.h1());
    put_uint(&mut inner, 3, aux.h2());
    put(buf, tag, &inner);
}

fn expect_aux(r: &mut TlvReader, tag: u16) -> Result<AuxRsaParams, Error> {
    let mut inner = TlvReader::new(r.expect(tag)?);
    let modulus = inner.expect_uint(1)?;
    let h1 = inner.expect_uint(2)?;
    let h2 = inner.expect_uint(3)?;
    inner.finish()?;
    AuxRsaParams::from_parts(modulus, h1, h2)
}

fn put_schnorr(buf: &mut Vec<u8>, tag: u16, p: &SchnorrProof) {
    let mut inner = Vec::new();
    put(&mut inner, 1, &p.nonce_point.to_bytes());
    put(&mut inner, 2, &p.challenge.to_bytes());
    put(&mut inner, 3, &p.response.to_bytes());
    put(buf, tag, &inner);
}

fn expect_schnorr(r: &mut TlvReader, tag: u16) -> Result<SchnorrProof, Error> {
    let mut inner = TlvReader::new(r.expect(tag)?);
    let nonce_point = GroupPoint::from_bytes(inner.expect(1)?)?;
    let challenge = Scalar::from_bytes(&inner.expect_array::<32>(2)?)?;
    let response = Scalar::from_bytes(&inner.expect_array::<32>(3)?)?;
    inner.finish()?;
    Ok(SchnorrProof { nonce_point, challenge, response })
}

fn put_fact_proof(buf: &mut Vec<u8>, tag: u16, p: &FactorizationProof) {
    let mut inner = Vec::new();
    put_u32(&mut inner, 1, p.rounds.len() as u32);
    for round in &p.rounds {
        let mut rb = Vec::new();
        put_u32(&mut rb, 1, round.commitments.len() as u32);
        for x in &round.commitments {
            put_uint(&mut rb, 2, x);
        }
        put_u64(&mut rb, 3, round.challenge);
        put_uint(&mut rb, 4, &round.response);
        put(&mut inner, 2, &rb);
    }
    put(buf, tag, &inner);
}

fn expect_fact_proof(r: &mut TlvReader, tag: u16) -> Result<FactorizationProof, Error> {
    let mut inner = TlvReader::new(r.expect(tag)?);
    let count = inner.expect_u32(1)? as usize;
    if count > 64 {
        return Err(Error::Malformed("too many proof rounds"));
    }
    let mut rounds = Vec::with_capacity(count);
    for _ in 0..count {
        let mut rb = TlvReader::new(inner.expect(2)?);
        let n_bases = rb.expect_u32(1)? as usize;
        if n_bases > 128 {
            return Err(Error::Malformed("too many proof bases"));
        }
        let mut commitments = Vec::with_capacity(n_bases);
        for _ in 0..n_bases {
            commitments.push(rb.expect_uint(2)?);
        }
        let challenge = rb.expect_u64(3)?;
        let response = rb.expect_uint(4)?;
        rb.finish()?;
        rounds.push(FactRound { commitments, challenge, response });
    }
    inner.finish()?;
    Ok(FactorizationProof { rounds })
}

fn put_range_a(buf: &mut Vec<u8>, tag: u16, p: &RangeProofA) {
    let mut inner = Vec::new();
    put_uint(&mut inner, 1, &p.z);
    put_uint(&mut inner, 2, &p.u);
    put_uint(&mut inner, 3, &p.w);
    put(&mut inner, 4, &p.challenge.to_bytes());
    put_uint(&mut inner, 5, &p.s);
    put_uint(&mut inner, 6, &p.s1);
    put_uint(&mut inner, 7, &p.s2);
    put(buf, tag, &inner);
}

fn expect_range_a(r: &mut TlvReader, tag: u16) -> Result<RangeProofA, Error> {
    let mut inner = TlvReader::new(r.expect(tag)?);
    let proof = RangeProofA {
        z: inner.expect_uint(1)?,
        u: inner.expect_uint(2)?,
        w: inner.expect_uint(3)?,
        challenge: Scalar::from_bytes(&inner.expect_array::<32>(4)?)?,
        s: inner.expect_uint(5)?,
        s1: inner.expect_uint(6)?,
        s2: inner.expect_uint(7)?,
    };
    inner.finish()?;
    Ok(proof)
}

fn put_range_b(buf: &mut Vec<u8>, tag: u16, p: &RangeProofB) {
    let mut inner = Vec::new();
    put_uint(&mut inner, 1, &p.z);
    put_uint(&mut inner, 2, &p.z_prime);
    put_uint(&mut inner, 3, &p.t);
    put_uint(&mut inner, 4, &p.v);
    put_uint(&mut inner, 5, &p.w);
    match &p.u {
        Some(u) => {
            put_u8(&mut inner, 6, 1);
            put(&mut inner, 7, &u.to_bytes());
        }
        None => put_u8(&mut inner, 6, 0),
    }
    put(&mut inner, 8, &p.challenge.to_bytes());
    put_uint(&mut inner, 9, &p.s);
    put_uint(&mut inner, 10, &p.s1);
    put_uint(&mut inner, 11, &p.s2);
    put_uint(&mut inner, 12, &p.t1);
    put_uint(&mut inner, 13, &p.t2);
    put(buf, tag, &inner);
}

fn expect_range_b(r: &mut TlvReader, tag: u16) -> Result<RangeProofB, Error> {
    let mut inner = TlvReader::new(r.expect(tag)?);
    let z = inner.expect_uint(1)?;
    let z_prime = inner.expect_uint(2)?;
    let t = inner.expect_uint(3)?;
    let v = inner.expect_uint(4)?;
    let w = inner.expect_uint(5)?;
    let u = match inner.expect_u8(6)? {
        0 => None,
        1 => Some(GroupPoint::from_bytes(inner.expect(7)?)?),
        _ => return Err(Error::Malformed("bad presence flag")),
    };
    let proof = RangeProofB {
        z,
        z_prime,
        t,
        v,
        w,
        u,
        challenge: Scalar::from_bytes(&inner.expect_array::<32>(8)?)?,
        s: inner.expect_uint(9)?,
        s1: inner.expect_uint(10)?,
        s2: inner.expect_uint(11)?,
        t1: inner.expect_uint(12)?,
        t2: inner.expect_uint(13)?,
    };
    inner.finish()?;
    Ok(proof)
}

fn put_sealed(buf: &mut Vec<u8>, tag: u16, s: &SealedBox) {
    put(buf, tag, &s.encode());
}

fn expect_sealed(r: &mut TlvReader, tag: u16) -> Result<SealedBox, Error> {
    SealedBox::decode(r.expect(tag)?)
}

fn put_mta_init(buf: &mut Vec<u8>, tag: u16, m: &MtaInitMessage) {
    let mut inner = Vec::new();
    put_uint(&mut inner, 1, m.ciphertext.as_uint());
    match &m.proof {
        Some(p) => {
            put_u8(&mut inner, 2, 1);
            put_range_a(&mut inner, 3, p);
        }
        None => put_u8(&mut inner, 2, 0),
    }
    put(buf, tag, &inner);
}

fn expect_mta_init(
    r: &mut TlvReader,
    tag: u16,
    sender_pk: &PaillierPublicKey,
) -> Result<MtaInitMessage, Error> {
    let mut inner = TlvReader::new(r.expect(tag)?);
    let raw = inner.expect_uint(1)?;
    let ciphertext = PaillierCiphertext::from_uint(raw, sender_pk)?;
    let proof = match inner.expect_u8(2)? {
        0 => None,
        1 => Some(expect_range_a(&mut inner, 3)?),
        _ => return Err(Error::Malformed("bad presence flag")),
    };
    inner.finish()?;
    Ok(MtaInitMessage { ciphertext, proof })
}

fn put_mta_response(buf: &mut Vec<u8>, tag: u16, m: &MtaResponseMessage) {
    let mut inner = Vec::new();
    put_uint(&mut inner, 1, m.ciphertext.as_uint());
    match &m.proof {
        Some(p) => {
            put_u8(&mut inner, 2, 1);
            put_range_b(&mut inner, 3, p);
        }
        None => put_u8(&mut inner, 2, 0),
    }
    put(buf, tag, &inner);
}

fn expect_mta_response(
    r: &mut TlvReader,
    tag: u16,
    initiator_pk: &PaillierPublicKey,
) -> Result<MtaResponseMessage, Error> {
    let mut inner = TlvReader::new(r.expect(tag)?);
    let raw = inner.expect_uint(1)?;
    let ciphertext = PaillierCiphertext::from_uint(raw, initiator_pk)?;
    let proof = match inner.expect_u8(2)? {
        0 => None,
        1 => Some(expect_range_b(&mut inner, 3)?),
        _ => return Err(Error::Malformed("bad presence flag")),
    };
    inner.finish()?;
    Ok(MtaResponseMessage { ciphertext, proof })
}

// Key generation messages.

#[derive(Clone, Debug)]
pub struct KeygenRound1 {
    pub commit_u: Commitment,
    pub commit_sigma3: Commitment,
    pub paillier_n: BigUint,
    pub paillier_gamma: BigUint,
    pub aux: AuxRsaParams,
}

impl KeygenRound1 {
    pub fn encode(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        put_commitment(&mut buf, 1, &self.commit_u);
        put_commitment(&mut buf, 2, &self.commit_sigma3);
        put_uint(&mut buf, 3, &self.paillier_n);
        put_uint(&mut buf, 4, &self.paillier_gamma);
        put_aux(&mut buf, 5, &self.aux);
        buf
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, Error> {
        let mut r = TlvReader::new(bytes);
        let msg = KeygenRound1 {
            commit_u: expect_commitment(&mut r, 1)?,
            commit_sigma3: expect_commitment(&mut r, 2)?,
            paillier_n: r.expect_uint(3)?,
            paillier_gamma: r.expect_uint(4)?,
            aux: expect_aux(&mut r, 5)?,
        };
        r.finish()?;
        Ok(msg)
    }
}

#[derive(Clone, Debug)]
pub struct KeygenRound2 {
    pub open_u: Decommitment,
    pub open_sigma3: Decommitment,
    pub vss_commit_constant: GroupPoint,
    pub vss_commit_linear: GroupPoint,
    /// The peer's point-share sigma_ij, sent point-to-point.
    pub peer_share: Scalar,
    pub rec_blob: SealedBox,
}

impl KeygenRound2 {
    pub fn encode(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        put_decommitment(&mut buf, 1, &self.open_u);
        put_decommitment(&mut buf, 2, &self.open_sigma3);
        put_point(&mut buf, 3, &self.vss_commit_constant);
        put_point(&mut buf, 4, &self.vss_commit_linear);
        put_scalar(&mut buf, 5, &self.peer_share);
        put_sealed(&mut buf, 6, &self.rec_blob);
        buf
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, Error> {
        let mut r = TlvReader::new(bytes);
        let msg = KeygenRound2 {
            open_u: expect_decommitment(&mut r, 1)?,
            open_sigma3: expect_decommitment(&mut r, 2)?,
            vss_commit_constant: expect_point(&mut r, 3)?,
            vss_commit_linear: expect_point(&mut r, 4)?,
            peer_share: expect_scalar(&mut r, 5)?,
            rec_blob: expect_sealed(&mut r, 6)?,
        };
        r.finish()?;
        Ok(msg)
    }
}

#[derive(Clone, Debug)]
pub struct KeygenRound3 {
    pub x_proof: SchnorrProof,
    pub fact_proof: FactorizationProof,
}

impl KeygenRound3 {
    pub fn encode(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        put_schnorr(&mut buf, 1, &self.x_proof);
        put_fact_proof(&mut buf, 2, &self.fact_proof);
        buf
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, Error> {
        let mut r = TlvReader::new(bytes);
        let msg = KeygenRound3 {
            x_proof: expect_schnorr(&mut r, 1)?,
            fact_proof: expect_fact_proof(&mut r, 2)?,
        };
        r.finish()?;
        Ok(msg)
    }
}

// Signing messages.

#[derive(Clone, Debug)]
pub struct SignCommitMsg {
    pub commit: Commitment,
}

impl SignCommitMsg {
    pub fn encode(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        put_commitment(&mut buf, 1, &self.commit);
        buf
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, Error> {
        let mut r = TlvReader::new(bytes);
        let msg = SignCommitMsg { commit: expect_commitment(&mut r, 1)? };
        r.finish()?;
        Ok(msg)
    }
}

#[derive(Clone, Debug)]
pub struct SignMtaInits {
    pub gamma_instance: MtaInitMessage,
    pub omega_instance: MtaInitMessage,
}

impl SignMtaInits {
    pub fn encode(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        put_mta_init(&mut buf, 1, &self.gamma_instance);
        put_mta_init(&mut buf, 2, &self.omega_instance);
        buf
    }

    /// Both ciphertexts are under the sending initiator's Paillier key.
    pub fn decode(bytes: &[u8], sender_pk: &PaillierPublicKey) -> Result<Self, Error> {
        let mut r = TlvReader::new(bytes);
        let msg = SignMtaInits {
            gamma_instance: expect_mta_init(&mut r, 1, sender_pk)?,
            omega_instance: expect_mta_init(&mut r, 2, sender_pk)?,
        };
        r.finish()?;
        Ok(msg)
    }
}

#[derive(Clone, Debug)]
pub struct SignMtaResponses {
    pub gamma_instance: MtaResponseMessage,
    pub omega_instance: MtaResponseMessage,
}

impl SignMtaResponses {
    pub fn encode(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        put_mta_response(&mut buf, 1, &self.gamma_instance);
        put_mta_response(&mut buf, 2, &self.omega_instance);
        buf
    }

    /// Responses come back under the receiving initiator's Paillier key.
    pub fn decode(bytes: &[u8], initiator_pk: &PaillierPublicKey) -> Result<Self, Error> {
        let mut r = TlvReader::new(bytes);
        let msg = SignMtaResponses {
            gamma_instance: expect_mta_response(&mut r, 1, initiator_pk)?,
            omega_instance: expect_mta_response(&mut r, 2, initiator_pk)?,
        };
        r.finish()?;
        Ok(msg)
    }
}

#[derive(Clone, Debug)]
pub struct SignDelta {
    pub delta: Scalar,
}

impl SignDelta {
    pub fn encode(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        put_scalar(&mut buf, 1, &self.delta);
        buf
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, Error> {
        let mut r = TlvReader::new(bytes);
        let msg = SignDelta { delta: expect_scalar(&mut r, 1)? };
        r.finish()?;
        Ok(msg)
    }
}

#[derive(Clone, Debug)]
pub struct SignNonceReveal {
    pub open: Decommitment,
    pub gamma_proof: SchnorrProof,
}

impl SignNonceReveal {
    pub fn encode(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        put_decommitment(&mut buf, 1, &self.open);
        put_schnorr(&mut buf, 2, &self.gamma_proof);
        buf
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, Error> {
        let mut r = TlvReader::new(bytes);
        let msg = SignNonceReveal {
            open: expect_decommitment(&mut r, 1)?,
            gamma_proof: expect_schnorr(&mut r, 2)?,
        };
        r.finish()?;
        Ok(msg)
    }
}

#[derive(Clone, Debug)]
pub struct SignCheckReveal {
    pub open: Decommitment,
    pub proof: ShareConsistencyProof,
}

impl SignCheckReveal {
    pub fn encode(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        put_decommitment(&mut buf, 1, &self.open);
        let mut inner = Vec::new();
        put(&mut inner, 1, &self.proof.nonce_w.to_bytes());
        put(&mut inner, 2, &self.proof.nonce_z.to_bytes());
        put(&mut inner, 3, &self.proof.challenge.to_bytes());
        put(&mut inner, 4, &self.proof.resp_s.to_bytes());
        put(&mut inner, 5, &self.proof.resp_l.to_bytes());
        put(&mut inner, 6, &self.proof.resp_rho.to_bytes());
        put(&mut buf, 2, &inner);
        buf
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, Error> {
        let mut r = TlvReader::new(bytes);
        let open = expect_decommitment(&mut r, 1)?;
        let mut inner = TlvReader::new(r.expect(2)?);
        let proof = ShareConsistencyProof {
            nonce_w: GroupPoint::from_bytes(inner.expect(1)?)?,
            nonce_z: GroupPoint::from_bytes(inner.expect(2)?)?,
            challenge: Scalar::from_bytes(&inner.expect_array::<32>(3)?)?,
            resp_s: Scalar::from_bytes(&inner.expect_array::<32>(4)?)?,
            resp_l: Scalar::from_bytes(&inner.expect_array::<32>(5)?)?,
            resp_rho: Scalar::from_bytes(&inner.expect_array::<32>(6)?)?,
        };
        inner.finish()?;
        r.finish()?;
        Ok(SignCheckReveal { open, proof })
    }
}

#[derive(Clone, Debug)]
pub struct SignMutualReveal {
    pub open: Decommitment,
}

impl SignMutualReveal {
    pub fn encode(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        put_decommitment(&mut buf, 1, &self.open);
        buf
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, Error> {
        let mut r = TlvReader::new(bytes);
        let msg = SignMutualReveal { open: expect_decommitment(&mut r, 1)? };
        r.finish()?;
        Ok(msg)
    }
}

#[derive(Clone, Debug)]
pub struct SignShareMsg {
    pub share: Scalar,
}

impl SignShareMsg {
    pub fn encode(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        put_scalar(&mut buf, 1, &self.share);
        buf
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, Error> {
        let mut r = TlvReader::new(bytes);
        let msg = SignShareMsg { share: expect_scalar(&mut r, 1)? };
        r.finish()?;
        Ok(msg)
    }
}

// Recovery messages.

#[derive(Clone, Debug)]
pub struct RecoveryRequest {
    pub caller: PartyRole,
    pub public_key: GroupPoint,
    pub rec_p1: SealedBox,
    pub rec_p2: SealedBox,
    pub vss_commitments: VssCommitments,
    pub sigma3_points: (GroupPoint, GroupPoint),
    /// The derivation secret d, sealed to the recovery key so derived-key
    /// signing works in recovery pairings.
    pub sealed_derivation: SealedBox,
}

impl RecoveryRequest {
    pub fn encode(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        put_u8(&mut buf, 1, self.caller.id());
        put_point(&mut buf, 2, &self.public_key);
        put_sealed(&mut buf, 3, &self.rec_p1);
        put_sealed(&mut buf, 4, &self.rec_p2);
        put_point(&mut buf, 5, &self.vss_commitments.p1.0);
        put_point(&mut buf, 6, &self.vss_commitments.p1.1);
        put_point(&mut buf, 7, &self.vss_commitments.p2.0);
        put_point(&mut buf, 8, &self.vss_commitments.p2.1);
        put_point(&mut buf, 9, &self.sigma3_points.0);
        put_point(&mut buf, 10, &self.sigma3_points.1);
        put_sealed(&mut buf, 11, &self.sealed_derivation);
        buf
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, Error> {
        let mut r = TlvReader::new(bytes);
        let caller = PartyRole::from_id(r.expect_u8(1)?).ok_or(Error::Malformed("bad role"))?;
        let msg = RecoveryRequest {
            caller,
            public_key: expect_point(&mut r, 2)?,
            rec_p1: expect_sealed(&mut r, 3)?,
            rec_p2: expect_sealed(&mut r, 4)?,
            vss_commitments: VssCommitments {
                p1: (expect_point(&mut r, 5)?, expect_point(&mut r, 6)?),
                p2: (expect_point(&mut r, 7)?, expect_point(&mut r, 8)?),
            },
            sigma3_points: (expect_point(&mut r, 9)?, expect_point(&mut r, 10)?),
            sealed_derivation: expect_sealed(&mut r, 11)?,
        };
        r.finish()?;
        Ok(msg)
    }
}

/// Paillier key, aux parameters and proofs exchanged during the recovery
/// preamble; both directions use the same shape.
#[derive(Clone, Debug)]
pub struct RecoveryKeysMsg {
    pub paillier_n: BigUint,
    pub paillier_gamma: BigUint,
    pub aux: AuxRsaParams,
    pub fact_proof: FactorizationProof,
    pub x_proof: SchnorrProof,
}

impl RecoveryKeysMsg {
    pub fn encode(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        put_uint(&mut buf, 1, &self.paillier_n);
        put_uint(&mut buf, 2, &self.paillier_gamma);
        put_aux(&mut buf, 3, &self.aux);
        put_fact_proof(&mut buf, 4, &self.fact_proof);
        put_schnorr(&mut buf, 5, &self.x_proof);
        buf
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, Error> {
        let mut r = TlvReader::new(bytes);
        let msg = RecoveryKeysMsg {
            paillier_n: r.expect_uint(1)?,
            paillier_gamma: r.expect_uint(2)?,
            aux: expect_aux(&mut r, 3)?,
            fact_proof: expect_fact_proof(&mut r, 4)?,
            x_proof: expect_schnorr(&mut r, 5)?,
        };
        r.finish()?;
        Ok(msg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paillier::{paillier_keygen_insecure, GammaChoice};
    use crate::zkp::commit;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn keygen_round1_roundtrip_and_strictness() {
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let pair = paillier_keygen_insecure(128, GammaChoice::NPlusOne, &mut rng).unwrap();
        let aux = AuxRsaParams::generate(512, &mut rng);
        let (c1, _) = commit("t", b"a", &mut rng);
        let (c2, _) = commit("t", b"b", &mut rng);
        let msg = KeygenRound1 {
            commit_u: c1,
            commit_sigma3: c2,
            paillier_n: pair.public.modulus().clone(),
            paillier_gamma: pair.public.gamma().clone(),
            aux,
        };
        let enc = msg.encode();
        let dec = KeygenRound1::decode(&enc).unwrap();
        assert_eq!(dec.commit_u, msg.commit_u);
        assert_eq!(dec.paillier_n, msg.paillier_n);
        // Truncations never decode.
        for cut in 0..enc.len() {
            assert!(KeygenRound1::decode(&enc[..cut]).is_err(), "cut {cut}");
        }
    }

    #[test]
    fn sign_delta_roundtrip() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let msg = SignDelta { delta: crate::algebra::Scalar::random(&mut rng) };
        let dec = SignDelta::decode(&msg.encode()).unwrap();
        assert_eq!(dec.delta, msg.delta);
    }

    #[test]
    fn mta_init_decode_validates_ciphertext() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let pair = paillier_keygen_insecure(128, GammaChoice::NPlusOne, &mut rng).unwrap();
        // Ciphertext equal to N is not a unit mod N^2.
        let mut buf = Vec::new();
        put_uint(&mut buf, 1, pair.public.modulus());
        put_u8(&mut buf, 2, 0);
        let mut outer = Vec::new();
        put(&mut outer, 1, &buf);
        put(&mut outer, 2, &buf);
        assert!(SignMtaInits::decode(&outer, &pair.public).is_err());
    }
}
