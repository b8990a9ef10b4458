//! Message routing between party state machines: an in-process router with
//! adversarial tamper rules for the simulator, and a length-prefixed socket
//! runner for multi-process operation.

pub mod machines;
pub mod socket;

use std::collections::BTreeMap;

use crate::encoding::{put, put_u8, TlvReader};
use crate::errors::{AbortReason, Error};

pub use machines::{KeygenMachine, PartyMachine, RecoverySignMachine, SignMachine};
pub use socket::{run_over_socket, socket_connect, socket_serve, FramedChannel};

/// One protocol message in flight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Envelope {
    pub session_id: [u8; 16],
    pub sender: u8,
    pub round: u8,
    pub kind: u8,
    pub payload: Vec<u8>,
}

impl Envelope {
    pub fn encode(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(self.payload.len() + 40);
        put(&mut buf, 1, &self.session_id);
        put_u8(&mut buf, 2, self.sender);
        put_u8(&mut buf, 3, self.round);
        put_u8(&mut buf, 4, self.kind);
        put(&mut buf, 5, &self.payload);
        buf
    }

    pub fn decode(bytes: &[u8]) -> Result<Envelope, Error> {
        let mut r = TlvReader::new(bytes);
        let env = Envelope {
            session_id: r.expect_array::<16>(1)?,
            sender: r.expect_u8(2)?,
            round: r.expect_u8(3)?,
            kind: r.expect_u8(4)?,
            payload: r.expect(5)?.to_vec(),
        };
        r.finish()?;
        Ok(env)
    }
}

/// What to do with a matched message. Only the simulator applies these.
#[derive(Clone, Debug)]
pub enum TamperAction {
    Drop,
    ReplacePayload(Vec<u8>),
    FlipByte(usize),
}

/// Matches messages by any combination of sender, round and kind.
#[derive(Clone, Debug)]
pub struct TamperRule {
    pub sender: Option<u8>,
    pub round: Option<u8>,
    pub kind: Option<u8>,
    pub action: TamperAction,
}

impl TamperRule {
    fn matches(&self, env: &Envelope) -> bool {
        self.sender.is_none_or(|s| s == env.sender)
            && self.round.is_none_or(|r| r == env.round)
            && self.kind.is_none_or(|k| k == env.kind)
    }
}

/// In-process router: applies tamper rules, then delivers to every other
/// registered party. Keeps the full ordered transcript of delivered
/// messages.
pub struct SessionRouter {
    session_id: [u8; 16],
    queues: BTreeMap<u8, Vec<Envelope>>,
    rules: Vec<TamperRule>,
    transcript: Vec<Envelope>,
}

impl SessionRouter {
    pub fn new(session_id: [u8; 16], parties: &[u8]) -> SessionRouter {
        SessionRouter {
            session_id,
            queues: parties.iter().map(|p| (*p, Vec::new())).collect(),
            rules: Vec::new(),
            transcript: Vec::new(),
        }
    }

    pub fn add_rule(&mut self, rule: TamperRule) {
        self.rules.push(rule);
    }

    /// Routes one envelope, returning the delivery events (recipient,
    /// delivered envelope). A drop rule yields no deliveries.
    pub fn route(&mut self, env: Envelope) -> Result<Vec<(u8, Envelope)>, AbortReason> {
        if env.session_id != self.session_id {
            return Err(AbortReason::SessionMismatch);
        }
        if !self.queues.contains_key(&env.sender) {
            return Err(AbortReason::UnexpectedMessage);
        }
        let mut env = env;
        for rule in &self.rules {
            if rule.matches(&env) {
                match &rule.action {
                    TamperAction::Drop => return Ok(Vec::new()),
                    TamperAction::ReplacePayload(p) => env.payload = p.clone(),
                    TamperAction::FlipByte(offset) => {
                        if !env.payload.is_empty() {
                            let at = offset % env.payload.len();
                            env.payload[at] ^= 0x01;
                        }
                    }
                }
            }
        }
        let mut events = Vec::new();
        let recipients: Vec<u8> =
            self.queues.keys().copied().filter(|p| *p != env.sender).collect();
        for recipient in recipients {
            self.queues.get_mut(&recipient).expect("registered").push(env.clone());
            events.push((recipient, env.clone()));
        }
        self.transcript.push(env);
        Ok(events)
    }

    pub fn drain(&mut self, party: u8) -> Vec<Envelope> {
        self.queues.get_mut(&party).map(std::mem::take).unwrap_or_default()
    }

    pub fn transcript(&self) -> &[Envelope] {
        &self.transcript
    }
}

/// Outcome of a driven session.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SessionOutcome {
    Success,
    Abort { party: u8, reason: AbortReason },
}

impl SessionOutcome {
    pub fn abort_reason(&self) -> Option<AbortReason> {
        match self {
            SessionOutcome::Success => None,
            SessionOutcome::Abort { reason, .. } => Some(*reason),
        }
    }
}

#[derive(Debug)]
pub struct SessionResult {
    pub outcome: SessionOutcome,
    pub rounds: usize,
}

/// Drives the machines round by round in the given fixed order until all
/// are done, one aborts, or the round budget runs out. On abort, messages
/// produced in the failing round are discarded undelivered.
pub fn run_session(
    machines: &mut [&mut dyn PartyMachine],
    router: &mut SessionRouter,
    max_rounds: usize,
) -> SessionResult {
    for round in 0..max_rounds {
        let mut outbound = Vec::new();
        for machine in machines.iter_mut() {
            let inbound = router.drain(machine.party_id());
            match machine.proceed(&inbound) {
                Ok(envs) => outbound.extend(envs),
                Err(reason) => {
                    return SessionResult {
                        outcome: SessionOutcome::Abort { party: machine.party_id(), reason },
                        rounds: round,
                    }
                }
            }
        }
        for env in outbound {
            if let Err(reason) = router.route(env) {
                return SessionResult {
                    outcome: SessionOutcome::Abort { party: 0, reason },
                    rounds: round,
                };
            }
        }
        if machines.iter().all(|m| m.is_done()) {
            return SessionResult { outcome: SessionOutcome::Success, rounds: round + 1 };
        }
    }
    SessionResult {
        outcome: SessionOutcome::Abort { party: 0, reason: AbortReason::Timeout },
        rounds: max_rounds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(sender: u8, round: u8, kind: u8, payload: &[u8]) -> Envelope {
        Envelope { session_id: [1; 16], sender, round, kind, payload: payload.to_vec() }
    }

    #[test]
    fn envelope_roundtrip() {
        let e = env(2, 5, 11, b"payload");
        assert_eq!(Envelope::decode(&e.encode()).unwrap(), e);
        assert!(Envelope::decode(&e.encode()[..10]).is_err());
    }

    #[test]
    fn broadcast_reaches_all_other_parties() {
        let mut router = SessionRouter::new([1; 16], &[1, 2, 3]);
        let events = router.route(env(1, 0, 7, b"x")).unwrap();
        assert_eq!(events.len(), 2);
        assert_eq!(router.drain(2).len(), 1);
        assert_eq!(router.drain(3).len(), 1);
        assert!(router.drain(1).is_empty());
    }

    #[test]
    fn drop_rule_suppresses_delivery() {
        let mut router = SessionRouter::new([1; 16], &[1, 2]);
        router.add_rule(TamperRule {
            sender: Some(1),
            round: Some(2),
            kind: None,
            action: TamperAction::Drop,
        });
        assert!(router.route(env(1, 2, 7, b"x")).unwrap().is_empty());
        assert_eq!(router.route(env(1, 3, 7, b"x")).unwrap().len(), 1);
    }

    #[test]
    fn flip_byte_rule_changes_payload() {
        let mut router = SessionRouter::new([1; 16], &[1, 2]);
        router.add_rule(TamperRule {
            sender: None,
            round: None,
            kind: Some(9),
            action: TamperAction::FlipByte(1),
        });
        let events = router.route(env(1, 0, 9, b"abc")).unwrap();
        assert_eq!(events[0].1.payload, b"a\x63c");
    }

    #[test]
    fn session_mismatch_rejected() {
        let mut router = SessionRouter::new([1; 16], &[1, 2]);
        let mut e = env(1, 0, 1, b"");
        e.session_id = [2; 16];
        assert_eq!(router.route(e).unwrap_err(), AbortReason::SessionMismatch);
    }
}
