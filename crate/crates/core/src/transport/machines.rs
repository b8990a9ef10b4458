//! Round-driven adapters wrapping the protocol state machines for the
//! router and the socket runner. Every machine emits at most one envelope
//! per round and validates session, sender, round and kind on everything it
//! consumes.

use rand_chacha::ChaCha20Rng;

use crate::algebra::Signature;
use crate::errors::AbortReason;
use crate::paillier::PaillierPublicKey;
use crate::protocol::messages::{
    kind, KeygenRound1, KeygenRound2, KeygenRound3, RecoveryKeysMsg, RecoveryRequest,
    SignCheckReveal, SignCommitMsg, SignDelta, SignMtaInits, SignMtaResponses, SignMutualReveal,
    SignNonceReveal, SignShareMsg,
};
use crate::protocol::recovery::{
    caller_signer_local, p3_signer_local, recovery_caller_keys, recovery_p3_keys,
    recovery_p3_process, verify_recovery_keys, RecoveryP3Keys,
};
use crate::protocol::{
    KeygenParty, KeyShareRecord, PartyRole, ProtocolConfig, RecoveredShare, SignParty,
    SignerLocal,
};
use crate::algebra::{GroupPoint, Scalar};

use super::Envelope;

pub trait PartyMachine {
    fn party_id(&self) -> u8;
    /// Consumes this round's inbound envelopes and returns the outbound
    /// ones. An error is a session abort attributed to this party.
    fn proceed(&mut self, inbound: &[Envelope]) -> Result<Vec<Envelope>, AbortReason>;
    fn is_done(&self) -> bool;
}

fn expect_single<'a>(
    inbound: &'a [Envelope],
    session: &[u8; 16],
    peer: u8,
    round: u8,
    kind: u8,
) -> Result<&'a Envelope, AbortReason> {
    let env = match inbound {
        [] => return Err(AbortReason::PeerMessageMissing),
        [e] => e,
        _ => return Err(AbortReason::UnexpectedMessage),
    };
    if env.session_id != *session {
        return Err(AbortReason::SessionMismatch);
    }
    if env.sender != peer || env.round != round || env.kind != kind {
        return Err(AbortReason::UnexpectedMessage);
    }
    Ok(env)
}

/// Key generation machine for one of the two online parties.
pub struct KeygenMachine {
    party: Option<KeygenParty>,
    rng: ChaCha20Rng,
    session: [u8; 16],
    id: u8,
    peer_id: u8,
    round: u8,
    record: Option<KeyShareRecord>,
}

impl KeygenMachine {
    pub fn new(
        cfg: ProtocolConfig,
        role: PartyRole,
        session: [u8; 16],
        recovery_pk: GroupPoint,
        mut rng: ChaCha20Rng,
    ) -> Result<KeygenMachine, AbortReason> {
        let peer = match role {
            PartyRole::P1 => PartyRole::P2,
            PartyRole::P2 => PartyRole::P1,
            PartyRole::P3 => return Err(AbortReason::Internal),
        };
        let party = KeygenParty::new(cfg, role, session, recovery_pk, &mut rng)?;
        Ok(KeygenMachine {
            party: Some(party),
            rng,
            session,
            id: role.id(),
            peer_id: peer.id(),
            round: 0,
            record: None,
        })
    }

    pub fn take_record(&mut self) -> Option<KeyShareRecord> {
        self.record.take()
    }

    fn envelope(&self, kind: u8, payload: Vec<u8>) -> Envelope {
        Envelope { session_id: self.session, sender: self.id, round: self.round, kind, payload }
    }
}

impl PartyMachine for KeygenMachine {
    fn party_id(&self) -> u8 {
        self.id
    }

    fn proceed(&mut self, inbound: &[Envelope]) -> Result<Vec<Envelope>, AbortReason> {
        let round = self.round;
        let out = match round {
            0 => {
                if !inbound.is_empty() {
                    return Err(AbortReason::UnexpectedMessage);
                }
                let party = self.party.as_mut().ok_or(AbortReason::Internal)?;
                let msg = party.round1(&mut self.rng);
                vec![self.envelope(kind::KEYGEN_COMMITMENTS, msg.encode())]
            }
            1 => {
                let env = expect_single(
                    inbound,
                    &self.session,
                    self.peer_id,
                    0,
                    kind::KEYGEN_COMMITMENTS,
                )?;
                let peer = KeygenRound1::decode(&env.payload)
                    .map_err(|_| AbortReason::MalformedMessage)?;
                let party = self.party.as_mut().ok_or(AbortReason::Internal)?;
                let msg = party.round2(peer, &mut self.rng)?;
                vec![self.envelope(kind::KEYGEN_REVEAL, msg.encode())]
            }
            2 => {
                let env =
                    expect_single(inbound, &self.session, self.peer_id, 1, kind::KEYGEN_REVEAL)?;
                let peer = KeygenRound2::decode(&env.payload)
                    .map_err(|_| AbortReason::MalformedMessage)?;
                let party = self.party.as_mut().ok_or(AbortReason::Internal)?;
                let msg = party.round3(peer, &mut self.rng)?;
                vec![self.envelope(kind::KEYGEN_PROOFS, msg.encode())]
            }
            3 => {
                let env =
                    expect_single(inbound, &self.session, self.peer_id, 2, kind::KEYGEN_PROOFS)?;
                let peer = KeygenRound3::decode(&env.payload)
                    .map_err(|_| AbortReason::MalformedMessage)?;
                let party = self.party.take().ok_or(AbortReason::Internal)?;
                self.record = Some(party.finalize(peer)?);
                Vec::new()
            }
            _ => return Err(AbortReason::UnexpectedMessage),
        };
        self.round += 1;
        Ok(out)
    }

    fn is_done(&self) -> bool {
        self.record.is_some()
    }
}

/// Drives a `SignParty` one message at a time; shared by the plain signing
/// machine and the recovery machine's signing phase.
struct SignStepper {
    party: SignParty,
    own_pk: PaillierPublicKey,
    peer_pk: PaillierPublicKey,
    signature: Option<Signature>,
}

impl SignStepper {
    fn new(local: SignerLocal) -> SignStepper {
        let own_pk = local.paillier.public.clone();
        let peer_pk = local.peer_paillier.clone();
        SignStepper { party: SignParty::new(local), own_pk, peer_pk, signature: None }
    }

    fn expected_inbound_kind(step: u8) -> u8 {
        match step {
            1 => kind::SIGN_NONCE_COMMIT,
            2 => kind::SIGN_MTA_INITS,
            3 => kind::SIGN_MTA_RESPONSES,
            4 => kind::SIGN_DELTA,
            5 => kind::SIGN_NONCE_REVEAL,
            6 => kind::SIGN_CHECK_COMMIT,
            7 => kind::SIGN_CHECK_REVEAL,
            8 => kind::SIGN_MUTUAL_COMMIT,
            9 => kind::SIGN_MUTUAL_REVEAL,
            _ => kind::SIGN_SHARE,
        }
    }

    /// Runs signing step 0..=10. Steps 1..=10 consume the peer payload of
    /// the previous step; steps 0..=9 produce an outbound (kind, payload).
    fn step(
        &mut self,
        step: u8,
        payload: Option<&[u8]>,
        rng: &mut ChaCha20Rng,
    ) -> Result<Option<(u8, Vec<u8>)>, AbortReason> {
        let malformed = |_| AbortReason::MalformedMessage;
        if step > 0 && payload.is_none() {
            return Err(AbortReason::PeerMessageMissing);
        }
        let payload = payload.unwrap_or(&[]);
        Ok(match step {
            0 => Some((kind::SIGN_NONCE_COMMIT, self.party.nonce_commit(rng)?.encode())),
            1 => {
                let m = SignCommitMsg::decode(payload).map_err(malformed)?;
                Some((kind::SIGN_MTA_INITS, self.party.mta_inits(m, rng)?.encode()))
            }
            2 => {
                let m = SignMtaInits::decode(payload, &self.peer_pk).map_err(malformed)?;
                Some((
                    kind::SIGN_MTA_RESPONSES,
                    self.party.mta_respond_step(m, rng)?.encode(),
                ))
            }
            3 => {
                let m = SignMtaResponses::decode(payload, &self.own_pk).map_err(malformed)?;
                Some((kind::SIGN_DELTA, self.party.delta_share(m)?.encode()))
            }
            4 => {
                let m = SignDelta::decode(payload).map_err(malformed)?;
                Some((kind::SIGN_NONCE_REVEAL, self.party.nonce_reveal(m, rng)?.encode()))
            }
            5 => {
                let m = SignNonceReveal::decode(payload).map_err(malformed)?;
                Some((kind::SIGN_CHECK_COMMIT, self.party.check_commit(m, rng)?.encode()))
            }
            6 => {
                let m = SignCommitMsg::decode(payload).map_err(malformed)?;
                Some((kind::SIGN_CHECK_REVEAL, self.party.check_reveal(m, rng)?.encode()))
            }
            7 => {
                let m = SignCheckReveal::decode(payload).map_err(malformed)?;
                Some((kind::SIGN_MUTUAL_COMMIT, self.party.mutual_commit(m, rng)?.encode()))
            }
            8 => {
                let m = SignCommitMsg::decode(payload).map_err(malformed)?;
                Some((kind::SIGN_MUTUAL_REVEAL, self.party.mutual_reveal(m)?.encode()))
            }
            9 => {
                let m = SignMutualReveal::decode(payload).map_err(malformed)?;
                Some((kind::SIGN_SHARE, self.party.share_reveal(m)?.encode()))
            }
            10 => {
                let m = SignShareMsg::decode(payload).map_err(malformed)?;
                self.signature = Some(self.party.complete(m)?);
                None
            }
            _ => return Err(AbortReason::UnexpectedMessage),
        })
    }
}

/// Two-party signing machine for any pairing whose signer configuration is
/// already assembled.
pub struct SignMachine {
    stepper: SignStepper,
    rng: ChaCha20Rng,
    session: [u8; 16],
    id: u8,
    peer_id: u8,
    round: u8,
}

impl SignMachine {
    pub fn new(local: SignerLocal, id: u8, peer_id: u8, rng: ChaCha20Rng) -> SignMachine {
        let session = local.session;
        SignMachine { stepper: SignStepper::new(local), rng, session, id, peer_id, round: 0 }
    }

    pub fn signature(&self) -> Option<Signature> {
        self.stepper.signature
    }

    /// Adversary hook: substitute the signature share (see the protocol
    /// tests and the abort-safety sweep).
    #[doc(hidden)]
    pub fn force_signature_share(&mut self, share: Scalar) {
        self.stepper.party.force_signature_share(share);
    }
}

impl PartyMachine for SignMachine {
    fn party_id(&self) -> u8 {
        self.id
    }

    fn proceed(&mut self, inbound: &[Envelope]) -> Result<Vec<Envelope>, AbortReason> {
        let step = self.round;
        let payload = if step == 0 {
            if !inbound.is_empty() {
                return Err(AbortReason::UnexpectedMessage);
            }
            None
        } else {
            let env = expect_single(
                inbound,
                &self.session,
                self.peer_id,
                step - 1,
                SignStepper::expected_inbound_kind(step),
            )?;
            Some(env.payload.clone())
        };
        let out = self.stepper.step(step, payload.as_deref(), &mut self.rng)?;
        let round = self.round;
        self.round += 1;
        Ok(out
            .map(|(kind, payload)| Envelope {
                session_id: self.session,
                sender: self.id,
                round,
                kind,
                payload,
            })
            .into_iter()
            .collect())
    }

    fn is_done(&self) -> bool {
        self.stepper.signature.is_some()
    }
}

/// Which side of a recovery session this machine plays.
enum RecoverySide {
    Caller {
        record: Box<KeyShareRecord>,
        p3_keys: Option<(PaillierPublicKey, crate::zkp::AuxRsaParams)>,
    },
    OfflineParty {
        recovery_secret: Scalar,
        share: Option<RecoveredShare>,
        keys: Option<RecoveryP3Keys>,
    },
}

/// Recovery signing: a three-round preamble (request, offline party's fresh
/// keys and proofs, caller's keys and proofs) followed by the ordinary
/// signing rounds.
pub struct RecoverySignMachine {
    side: RecoverySide,
    cfg: ProtocolConfig,
    session: [u8; 16],
    id: u8,
    peer_id: u8,
    round: u8,
    message: Vec<u8>,
    derive_index: Option<u32>,
    stepper: Option<SignStepper>,
    rng: ChaCha20Rng,
}

const PREAMBLE_ROUNDS: u8 = 3;

impl RecoverySignMachine {
    pub fn new_caller(
        record: KeyShareRecord,
        cfg: ProtocolConfig,
        session: [u8; 16],
        message: Vec<u8>,
        derive_index: Option<u32>,
        rng: ChaCha20Rng,
    ) -> Result<RecoverySignMachine, AbortReason> {
        if record.role == PartyRole::P3 {
            return Err(AbortReason::Internal);
        }
        Ok(RecoverySignMachine {
            id: record.role.id(),
            side: RecoverySide::Caller { record: Box::new(record), p3_keys: None },
            cfg,
            session,
            peer_id: PartyRole::P3.id(),
            round: 0,
            message,
            derive_index,
            stepper: None,
            rng,
        })
    }

    pub fn new_offline_party(
        recovery_secret: Scalar,
        caller: PartyRole,
        cfg: ProtocolConfig,
        session: [u8; 16],
        message: Vec<u8>,
        derive_index: Option<u32>,
        rng: ChaCha20Rng,
    ) -> Result<RecoverySignMachine, AbortReason> {
        if caller == PartyRole::P3 {
            return Err(AbortReason::Internal);
        }
        Ok(RecoverySignMachine {
            side: RecoverySide::OfflineParty { recovery_secret, share: None, keys: None },
            cfg,
            session,
            id: PartyRole::P3.id(),
            peer_id: caller.id(),
            round: 0,
            message,
            derive_index,
            stepper: None,
            rng,
        })
    }

    pub fn signature(&self) -> Option<Signature> {
        self.stepper.as_ref().and_then(|s| s.signature)
    }

    fn envelope(&self, kind: u8, payload: Vec<u8>) -> Envelope {
        Envelope { session_id: self.session, sender: self.id, round: self.round, kind, payload }
    }

    fn ack(&self) -> Envelope {
        self.envelope(kind::ACK, Vec::new())
    }

    fn expect_ack(&self, inbound: &[Envelope], round: u8) -> Result<(), AbortReason> {
        expect_single(inbound, &self.session, self.peer_id, round, kind::ACK).map(|_| ())
    }

    fn preamble(&mut self, inbound: &[Envelope]) -> Result<Vec<Envelope>, AbortReason> {
        let round = self.round;
        match (&mut self.side, round) {
            (RecoverySide::Caller { record, .. }, 0) => {
                if !inbound.is_empty() {
                    return Err(AbortReason::UnexpectedMessage);
                }
                let request = crate::protocol::recovery::recovery_prepare(record, &mut self.rng)?;
                Ok(vec![self.envelope(kind::RECOVERY_REQUEST, request.encode())])
            }
            (RecoverySide::OfflineParty { .. }, 0) => {
                if !inbound.is_empty() {
                    return Err(AbortReason::UnexpectedMessage);
                }
                Ok(vec![self.ack()])
            }
            (RecoverySide::Caller { .. }, 1) => {
                self.expect_ack(inbound, 0)?;
                Ok(vec![self.ack()])
            }
            (RecoverySide::OfflineParty { recovery_secret, share, keys }, 1) => {
                let env = expect_single(
                    inbound,
                    &self.session,
                    self.peer_id,
                    0,
                    kind::RECOVERY_REQUEST,
                )?;
                let request = RecoveryRequest::decode(&env.payload)
                    .map_err(|_| AbortReason::MalformedMessage)?;
                if request.caller.id() != self.peer_id {
                    return Err(AbortReason::UnexpectedMessage);
                }
                let recovered = recovery_p3_process(&request, recovery_secret)?;
                let (p3_keys, msg) =
                    recovery_p3_keys(&recovered, &self.cfg, &self.session, &mut self.rng)?;
                *share = Some(recovered);
                *keys = Some(p3_keys);
                Ok(vec![self.envelope(kind::RECOVERY_P3_KEYS, msg.encode())])
            }
            (RecoverySide::Caller { record, p3_keys }, 2) => {
                let env = expect_single(
                    inbound,
                    &self.session,
                    self.peer_id,
                    1,
                    kind::RECOVERY_P3_KEYS,
                )?;
                let msg = RecoveryKeysMsg::decode(&env.payload)
                    .map_err(|_| AbortReason::MalformedMessage)?;
                let pk = verify_recovery_keys(
                    &msg,
                    &record.share_points.x3,
                    PartyRole::P3,
                    &self.cfg,
                    &self.session,
                )?;
                *p3_keys = Some((pk, msg.aux.clone()));
                let reply = recovery_caller_keys(record, &self.session, &mut self.rng)?;
                Ok(vec![self.envelope(kind::RECOVERY_CALLER_KEYS, reply.encode())])
            }
            (RecoverySide::OfflineParty { .. }, 2) => {
                self.expect_ack(inbound, 1)?;
                Ok(vec![self.ack()])
            }
            _ => Err(AbortReason::UnexpectedMessage),
        }
    }

    /// Builds the signer configuration once the preamble completes.
    fn enter_sign_phase(&mut self, inbound: &[Envelope]) -> Result<(), AbortReason> {
        if matches!(self.side, RecoverySide::Caller { .. }) {
            self.expect_ack(inbound, 2)?;
        }
        match &mut self.side {
            RecoverySide::Caller { record, p3_keys } => {
                let (pk, aux) = p3_keys.clone().ok_or(AbortReason::Internal)?;
                let local = caller_signer_local(
                    record,
                    pk,
                    aux,
                    self.session,
                    self.message.clone(),
                    self.derive_index,
                    self.cfg.range_proofs,
                )?;
                self.stepper = Some(SignStepper::new(local));
            }
            RecoverySide::OfflineParty { share, keys, .. } => {
                let env = expect_single(
                    inbound,
                    &self.session,
                    self.peer_id,
                    2,
                    kind::RECOVERY_CALLER_KEYS,
                )?;
                let msg = RecoveryKeysMsg::decode(&env.payload)
                    .map_err(|_| AbortReason::MalformedMessage)?;
                let recovered = share.as_ref().ok_or(AbortReason::Internal)?;
                let caller_role =
                    PartyRole::from_id(self.peer_id).ok_or(AbortReason::Internal)?;
                let caller_point = recovered.share_points.for_role(caller_role);
                let pk = verify_recovery_keys(
                    &msg,
                    &caller_point,
                    caller_role,
                    &self.cfg,
                    &self.session,
                )?;
                let local = p3_signer_local(
                    recovered,
                    keys.as_ref().ok_or(AbortReason::Internal)?,
                    pk,
                    msg.aux.clone(),
                    self.session,
                    self.message.clone(),
                    self.derive_index,
                    self.cfg.range_proofs,
                )?;
                self.stepper = Some(SignStepper::new(local));
            }
        }
        Ok(())
    }
}

impl PartyMachine for RecoverySignMachine {
    fn party_id(&self) -> u8 {
        self.id
    }

    fn proceed(&mut self, inbound: &[Envelope]) -> Result<Vec<Envelope>, AbortReason> {
        let round = self.round;
        let out = if round < PREAMBLE_ROUNDS {
            self.preamble(inbound)?
        } else {
            let step = round - PREAMBLE_ROUNDS;
            if step == 0 {
                self.enter_sign_phase(inbound)?;
                let stepper = self.stepper.as_mut().ok_or(AbortReason::Internal)?;
                let out = stepper.step(0, None, &mut self.rng)?;
                out.map(|(kind, payload)| Envelope {
                    session_id: self.session,
                    sender: self.id,
                    round,
                    kind,
                    payload,
                })
                .into_iter()
                .collect()
            } else {
                let env = expect_single(
                    inbound,
                    &self.session,
                    self.peer_id,
                    round - 1,
                    SignStepper::expected_inbound_kind(step),
                )?;
                let payload = env.payload.clone();
                let stepper = self.stepper.as_mut().ok_or(AbortReason::Internal)?;
                let out = stepper.step(step, Some(&payload), &mut self.rng)?;
                out.map(|(kind, payload)| Envelope {
                    session_id: self.session,
                    sender: self.id,
                    round,
                    kind,
                    payload,
                })
                .into_iter()
                .collect()
            }
        };
        self.round += 1;
        Ok(out)
    }

    fn is_done(&self) -> bool {
        self.signature().is_some()
    }
}
