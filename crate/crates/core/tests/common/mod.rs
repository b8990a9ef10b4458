//! Shared helpers for the integration and acceptance suites: session
//! drivers over the in-process router and an independent ECDSA oracle
//! implemented directly over big integers, used to cross-check the curve
//! backend.

#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use tecdsa::algebra::Signature;
use tecdsa::protocol::{KeyShareRecord, Pairing, PartyRole, ProtocolConfig};
use tecdsa::sealedbox::{recovery_keypair, RecoveryKeyPair};
use tecdsa::transport::{
    run_session, KeygenMachine, RecoverySignMachine, SessionOutcome, SessionRouter, SignMachine,
};

pub struct KeygenOutput {
    pub rec1: KeyShareRecord,
    pub rec2: KeyShareRecord,
    pub recovery: RecoveryKeyPair,
}

/// Runs setup plus a full keygen session through the router.
pub fn run_full_keygen(cfg: &ProtocolConfig, seed: u64) -> KeygenOutput {
    let mut rng3 = ChaCha20Rng::seed_from_u64(seed);
    let recovery = recovery_keypair(&mut rng3);
    let session = session_id(seed, 0xA0);
    let mut m1 = KeygenMachine::new(
        cfg.clone(),
        PartyRole::P1,
        session,
        recovery.public,
        ChaCha20Rng::seed_from_u64(seed ^ 0x1111),
    )
    .unwrap();
    let mut m2 = KeygenMachine::new(
        cfg.clone(),
        PartyRole::P2,
        session,
        recovery.public,
        ChaCha20Rng::seed_from_u64(seed ^ 0x2222),
    )
    .unwrap();
    let mut router = SessionRouter::new(session, &[1, 2]);
    let result = run_session(&mut [&mut m2, &mut m1], &mut router, 16);
    assert_eq!(result.outcome, SessionOutcome::Success, "keygen failed");
    KeygenOutput {
        rec1: m1.take_record().unwrap(),
        rec2: m2.take_record().unwrap(),
        recovery,
    }
}

/// Ordinary two-party signature through the router. Returns both parties'
/// signatures (identical on success).
pub fn run_ordinary_sign(
    out: &KeygenOutput,
    cfg: &ProtocolConfig,
    message: &[u8],
    derive_index: Option<u32>,
    seed: u64,
) -> Result<Signature, SessionOutcome> {
    let session = session_id(seed, 0xB0);
    let local1 = out
        .rec1
        .ordinary_signer_local(session, message.to_vec(), derive_index, cfg.range_proofs)
        .unwrap();
    let local2 = out
        .rec2
        .ordinary_signer_local(session, message.to_vec(), derive_index, cfg.range_proofs)
        .unwrap();
    let mut a = SignMachine::new(local1, 1, 2, ChaCha20Rng::seed_from_u64(seed ^ 0x3333));
    let mut b = SignMachine::new(local2, 2, 1, ChaCha20Rng::seed_from_u64(seed ^ 0x4444));
    let mut router = SessionRouter::new(session, &[1, 2]);
    let result = run_session(&mut [&mut b, &mut a], &mut router, 24);
    match result.outcome {
        SessionOutcome::Success => {
            let sig_a = a.signature().unwrap();
            let sig_b = b.signature().unwrap();
            assert_eq!(sig_a, sig_b);
            Ok(sig_a)
        }
        other => Err(other),
    }
}

/// Recovery signature for the given pairing through the router.
pub fn run_recovery_sign(
    out: &KeygenOutput,
    cfg: &ProtocolConfig,
    pairing: Pairing,
    message: &[u8],
    derive_index: Option<u32>,
    seed: u64,
) -> Result<Signature, SessionOutcome> {
    let caller_record = match pairing {
        Pairing::P1P3 => &out.rec1,
        Pairing::P2P3 => &out.rec2,
        Pairing::P1P2 => panic!("not a recovery pairing"),
    };
    let session = session_id(seed, 0xC0);
    let mut caller = RecoverySignMachine::new_caller(
        caller_record.clone(),
        cfg.clone(),
        session,
        message.to_vec(),
        derive_index,
        ChaCha20Rng::seed_from_u64(seed ^ 0x5555),
    )
    .unwrap();
    let mut offline = RecoverySignMachine::new_offline_party(
        out.recovery.secret,
        caller_record.role,
        cfg.clone(),
        session,
        message.to_vec(),
        derive_index,
        ChaCha20Rng::seed_from_u64(seed ^ 0x6666),
    )
    .unwrap();
    let caller_id = caller_record.role.id();
    let mut router = SessionRouter::new(session, &[caller_id, 3]);
    let result = run_session(&mut [&mut offline, &mut caller], &mut router, 24);
    match result.outcome {
        SessionOutcome::Success => {
            let sig_c = caller.signature().unwrap();
            let sig_o = offline.signature().unwrap();
            assert_eq!(sig_c, sig_o);
            Ok(sig_c)
        }
        other => Err(other),
    }
}

pub fn session_id(seed: u64, tag: u8) -> [u8; 16] {
    let mut id = [tag; 16];
    id[..8].copy_from_slice(&seed.to_be_bytes());
    id
}

/// Verifies a signature with the widely used k256 ECDSA verifier (an
/// implementation independent of this crate's signing path).
pub fn external_verify(public_key: &tecdsa::GroupPoint, message: &[u8], sig: &Signature) -> bool {
    use k256::ecdsa::signature::Verifier;
    let low = sig.normalize_low_s();
    let Ok(vk) = k256::ecdsa::VerifyingKey::from_sec1_bytes(&public_key.to_bytes()) else {
        return false;
    };
    let Ok(ext) = k256::ecdsa::Signature::from_scalars(low.r.to_bytes(), low.s.to_bytes()) else {
        return false;
    };
    vk.verify(message, &ext).is_ok()
}

/// ECDSA over secp256k1 implemented from scratch on big integers: affine
/// point arithmetic, no curve library. Slow, used only as an oracle.
pub mod indep {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{One, Zero};
    use sha2::{Digest, Sha256};

    fn field_p() -> BigInt {
        BigInt::parse_bytes(
            b"FFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFC2F",
            16,
        )
        .unwrap()
    }

    fn order_n() -> BigInt {
        BigInt::parse_bytes(
            b"FFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141",
            16,
        )
        .unwrap()
    }

    fn generator() -> Point {
        Some((
            BigInt::parse_bytes(
                b"79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798",
                16,
            )
            .unwrap(),
            BigInt::parse_bytes(
                b"483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8",
                16,
            )
            .unwrap(),
        ))
    }

    /// None is the point at infinity.
    pub type Point = Option<(BigInt, BigInt)>;

    fn modp(v: &BigInt) -> BigInt {
        v.mod_floor(&field_p())
    }

    fn inv_mod(v: &BigInt, m: &BigInt) -> BigInt {
        let e = v.extended_gcd(m);
        assert!(e.gcd.is_one(), "not invertible");
        e.x.mod_floor(m)
    }

    pub fn point_add(a: &Point, b: &Point) -> Point {
        let p = field_p();
        match (a, b) {
            (None, _) => b.clone(),
            (_, None) => a.clone(),
            (Some((x1, y1)), Some((x2, y2))) => {
                if x1 == x2 && modp(&(y1 + y2)).is_zero() {
                    return None;
                }
                let lambda = if x1 == x2 && y1 == y2 {
                    // 3 x^2 / 2 y
                    modp(&(3 * x1 * x1 * inv_mod(&modp(&(2 * y1)), &p)))
                } else {
                    modp(&((y2 - y1) * inv_mod(&modp(&(x2 - x1)), &p)))
                };
                let x3 = modp(&(&lambda * &lambda - x1 - x2));
                let y3 = modp(&(&lambda * (x1 - &x3) - y1));
                Some((x3, y3))
            }
        }
    }

    pub fn scalar_mul(k: &BigInt, point: &Point) -> Point {
        let mut result: Point = None;
        let mut addend = point.clone();
        let mut k = k.mod_floor(&order_n());
        while !k.is_zero() {
            if k.is_odd() {
                result = point_add(&result, &addend);
            }
            addend = point_add(&addend, &addend);
            k >>= 1;
        }
        result
    }

    pub fn hash_msg(message: &[u8]) -> BigInt {
        let digest = Sha256::digest(message);
        BigInt::from_bytes_be(num_bigint::Sign::Plus, &digest).mod_floor(&order_n())
    }

    /// Signer with the published point R = k^-1 G and s = k(e + r d).
    pub fn sign_paper_convention(d: &BigInt, message: &[u8], k: &BigInt) -> (BigInt, BigInt) {
        let n = order_n();
        let e = hash_msg(message);
        let k_inv = inv_mod(k, &n);
        let big_r = scalar_mul(&k_inv, &generator());
        let r = big_r.expect("nonzero nonce").0.mod_floor(&n);
        let s = (k * (e + &r * d)).mod_floor(&n);
        (r, s)
    }

    pub fn verify(qx_qy: &Point, message: &[u8], r: &BigInt, s: &BigInt) -> bool {
        let n = order_n();
        if r.is_zero() || s.is_zero() || r >= &n || s >= &n {
            return false;
        }
        let e = hash_msg(message);
        let s_inv = inv_mod(s, &n);
        let u1 = (&e * &s_inv).mod_floor(&n);
        let u2 = (r * &s_inv).mod_floor(&n);
        let point = point_add(&scalar_mul(&u1, &generator()), &scalar_mul(&u2, qx_qy));
        match point {
            Some((x, _)) => x.mod_floor(&n) == *r,
            None => false,
        }
    }

    pub fn pubkey_for(d: &BigInt) -> Point {
        scalar_mul(d, &generator())
    }
}
