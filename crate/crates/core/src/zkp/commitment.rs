//! Hash commitment in the random-oracle model: digest over a domain tag, the
//! payload and a fresh 32-byte nonce. Hiding comes from the nonce, binding
//! from collision resistance.

use rand::{CryptoRng, RngCore};
use sha2::{Digest, Sha256};
use subtle::ConstantTimeEq;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Commitment(pub [u8; 32]);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decommitment {
    pub payload: Vec<u8>,
    pub nonce: [u8; 32],
}

fn digest(tag: &str, payload: &[u8], nonce: &[u8; 32]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"tecdsa/com/v1");
    h.update((tag.len() as u64).to_be_bytes());
    h.update(tag.as_bytes());
    h.update((payload.len() as u64).to_be_bytes());
    h.update(payload);
    h.update(nonce);
    h.finalize().into()
}

pub fn commit(
    tag: &str,
    payload: &[u8],
    rng: &mut (impl RngCore + CryptoRng),
) -> (Commitment, Decommitment) {
    let mut nonce = [0u8; 32];
    rng.fill_bytes(&mut nonce);
    let com = Commitment(digest(tag, payload, &nonce));
    (com, Decommitment { payload: payload.to_vec(), nonce })
}

/// Returns the committed payload when the decommitment opens the digest.
pub fn verify_commitment<'a>(
    tag: &str,
    com: &Commitment,
    dec: &'a Decommitment,
) -> Option<&'a [u8]> {
    let expect = digest(tag, &dec.payload, &dec.nonce);
    if expect.ct_eq(&com.0).into() {
        Some(&dec.payload)
    } else {
        None
    }
}
