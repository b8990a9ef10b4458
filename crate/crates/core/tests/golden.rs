//! Wire-format stability: full session transcripts under fixed seeds are
//! compared byte for byte against checked-in golden files. Any change to
//! message layout, proof encoding, challenge derivation or randomness
//! consumption order shows up here.
//!
//! Regenerate with UPDATE_GOLDEN=1 after an intentional format change.

mod common;

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use tecdsa::protocol::{PartyRole, ProtocolConfig};
use tecdsa::sealedbox::recovery_keypair;
use tecdsa::transport::{
    run_session, KeygenMachine, RecoverySignMachine, SessionOutcome, SessionRouter, SignMachine,
};

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn check_golden(name: &str, actual: &[u8]) {
    let path = golden_path(name);
    if std::env::var("UPDATE_GOLDEN").is_ok() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read(&path)
        .unwrap_or_else(|_| panic!("missing golden file {name}; run with UPDATE_GOLDEN=1"));
    assert_eq!(
        expected, actual,
        "wire format drifted from golden file {name}"
    );
}

fn transcript_bytes(router: &SessionRouter) -> Vec<u8> {
    router.transcript().iter().flat_map(|e| e.encode()).collect()
}

#[test]
fn keygen_and_sign_transcripts_are_stable() {
    let cfg = ProtocolConfig::test_sizes();
    let session = [0xAAu8; 16];
    let mut rng3 = ChaCha20Rng::seed_from_u64(1234);
    let kp3 = recovery_keypair(&mut rng3);
    let mut m1 = KeygenMachine::new(
        cfg.clone(),
        PartyRole::P1,
        session,
        kp3.public,
        ChaCha20Rng::seed_from_u64(1),
    )
    .unwrap();
    let mut m2 = KeygenMachine::new(
        cfg.clone(),
        PartyRole::P2,
        session,
        kp3.public,
        ChaCha20Rng::seed_from_u64(2),
    )
    .unwrap();
    let mut router = SessionRouter::new(session, &[1, 2]);
    assert_eq!(
        run_session(&mut [&mut m2, &mut m1], &mut router, 16).outcome,
        SessionOutcome::Success
    );
    check_golden("keygen_transcript.bin", &transcript_bytes(&router));

    let rec1 = m1.take_record().unwrap();
    let rec2 = m2.take_record().unwrap();
    let sign_session = [0xBBu8; 16];
    let local1 = rec1
        .ordinary_signer_local(sign_session, b"golden message".to_vec(), None, true)
        .unwrap();
    let local2 = rec2
        .ordinary_signer_local(sign_session, b"golden message".to_vec(), None, true)
        .unwrap();
    let mut a = SignMachine::new(local1, 1, 2, ChaCha20Rng::seed_from_u64(3));
    let mut b = SignMachine::new(local2, 2, 1, ChaCha20Rng::seed_from_u64(4));
    let mut router = SessionRouter::new(sign_session, &[1, 2]);
    assert_eq!(
        run_session(&mut [&mut b, &mut a], &mut router, 24).outcome,
        SessionOutcome::Success
    );
    check_golden("sign_transcript.bin", &transcript_bytes(&router));

    // The recovery flow exercises the request bundle and the preamble keys
    // message encodings.
    let rc_session = [0xCCu8; 16];
    let mut caller = RecoverySignMachine::new_caller(
        rec1,
        cfg.clone(),
        rc_session,
        b"golden recovery".to_vec(),
        Some(7),
        ChaCha20Rng::seed_from_u64(5),
    )
    .unwrap();
    let mut offline = RecoverySignMachine::new_offline_party(
        kp3.secret,
        PartyRole::P1,
        cfg,
        rc_session,
        b"golden recovery".to_vec(),
        Some(7),
        ChaCha20Rng::seed_from_u64(6),
    )
    .unwrap();
    let mut router = SessionRouter::new(rc_session, &[1, 3]);
    assert_eq!(
        run_session(&mut [&mut offline, &mut caller], &mut router, 24).outcome,
        SessionOutcome::Success
    );
    check_golden("recovery_transcript.bin", &transcript_bytes(&router));
}

#[test]
fn envelope_header_layout_is_stable() {
    let env = tecdsa::transport::Envelope {
        session_id: [0x11; 16],
        sender: 2,
        round: 3,
        kind: 14,
        payload: vec![0xDE, 0xAD],
    };
    check_golden("envelope_header.bin", &env.encode());
}
