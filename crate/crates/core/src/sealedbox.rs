//! Hybrid encryption under the recovery party's long-term key: ephemeral
//! Diffie-Hellman on the protocol curve, key derivation through the protocol
//! hash with a domain tag, payload sealed with AES-256-GCM. Authentication
//! means corrupted recovery material is detected before any signing starts.

use aes_gcm::aead::{Aead, KeyInit, Payload};
use aes_gcm::{Aes256Gcm, Nonce};
use rand::{CryptoRng, RngCore};
use sha2::{Digest, Sha256};
use zeroize::Zeroize;

use crate::algebra::{mul_generator, GroupPoint, Scalar};
use crate::encoding::{put, TlvReader};
use crate::errors::Error;

/// The recovery party's key pair: pk is published at setup, sk stays with
/// the party until a recovery signature is needed.
#[derive(Clone)]
pub struct RecoveryKeyPair {
    pub public: GroupPoint,
    pub secret: Scalar,
}

impl std::fmt::Debug for RecoveryKeyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RecoveryKeyPair(public: {:?})", self.public)
    }
}

pub fn recovery_keypair(rng: &mut (impl RngCore + CryptoRng)) -> RecoveryKeyPair {
    let secret = Scalar::random_nonzero(rng);
    RecoveryKeyPair { public: mul_generator(&secret), secret }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SealedBox {
    pub ephemeral: GroupPoint,
    pub nonce: [u8; 12],
    pub ciphertext: Vec<u8>,
}

fn derive_key(ephemeral: &GroupPoint, shared: &GroupPoint) -> Result<[u8; 32], Error> {
    let shared_x = shared.x_bytes().ok_or(Error::InvalidPoint)?;
    let mut h = Sha256::new();
    h.update(b"tecdsa/hybrid/v1");
    h.update(ephemeral.to_bytes());
    h.update(shared_x);
    Ok(h.finalize().into())
}

pub fn seal(
    recipient: &GroupPoint,
    plaintext: &[u8],
    rng: &mut (impl RngCore + CryptoRng),
) -> Result<SealedBox, Error> {
    if recipient.is_identity() {
        return Err(Error::InvalidPoint);
    }
    let eph_secret = Scalar::random_nonzero(rng);
    let ephemeral = mul_generator(&eph_secret);
    let shared = *recipient * eph_secret;
    let mut key = derive_key(&ephemeral, &shared)?;
    let mut nonce = [0u8; 12];
    rng.fill_bytes(&mut nonce);
    let cipher = Aes256Gcm::new((&key).into());
    let ciphertext = cipher
        .encrypt(Nonce::from_slice(&nonce), Payload { msg: plaintext, aad: &[] })
        .map_err(|_| Error::DecryptionFailed)?;
    key.zeroize();
    Ok(SealedBox { ephemeral, nonce, ciphertext })
}

pub fn open(secret: &Scalar, sealed: &SealedBox) -> Result<Vec<u8>, Error> {
    if sealed.ephemeral.is_identity() {
        return Err(Error::InvalidPoint);
    }
    let shared = sealed.ephemeral * *secret;
    let mut key = derive_key(&sealed.ephemeral, &shared)?;
    let cipher = Aes256Gcm::new((&key).into());
    let plain = cipher
        .decrypt(
            Nonce::from_slice(&sealed.nonce),
            Payload { msg: &sealed.ciphertext, aad: &[] },
        )
        .map_err(|_| Error::DecryptionFailed);
    key.zeroize();
    plain
}

impl SealedBox {
    pub fn encode(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        put(&mut buf, 1, &self.ephemeral.to_bytes());
        put(&mut buf, 2, &self.nonce);
        put(&mut buf, 3, &self.ciphertext);
        buf
    }

    pub fn decode(bytes: &[u8]) -> Result<SealedBox, Error> {
        let mut r = TlvReader::new(bytes);
        let ephemeral = GroupPoint::from_bytes(r.expect(1)?)?;
        let nonce = r.expect_array::<12>(2)?;
        let ciphertext = r.expect(3)?.to_vec();
        r.finish()?;
        Ok(SealedBox { ephemeral, nonce, ciphertext })
    }
}
