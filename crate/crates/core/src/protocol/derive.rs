//! Deterministic key derivation from the common secret d. For index i the
//! shared tweak is h = H(tag || d || i); the public key moves to
//! Y + h B and each party shifts its pairing share by its Lagrange weight
//! times h, so the adjusted shares still sum to the derived key.

use crate::algebra::{hash_to_scalar, mul_generator, GroupPoint, Scalar};

use super::Pairing;

/// h = H(d || i) with a domain tag, d as the 32-byte x-coordinate from key
/// generation and i big-endian.
pub fn derivation_scalar(derivation_secret: &[u8; 32], index: u32) -> Scalar {
    let mut input = Vec::with_capacity(16 + 32 + 4);
    input.extend_from_slice(b"tecdsa/derive/v1");
    input.extend_from_slice(derivation_secret);
    input.extend_from_slice(&index.to_be_bytes());
    hash_to_scalar(&input)
}

/// Y^i = Y + H(d || i) B, identical for every pairing.
pub fn derived_public_key(
    public_key: &GroupPoint,
    derivation_secret: &[u8; 32],
    index: u32,
) -> GroupPoint {
    *public_key + mul_generator(&derivation_scalar(derivation_secret, index))
}

/// Per-pairing share adjustments (role A, role B): each side adds its
/// Lagrange weight times h, so (P1,P2) shifts by (3h, -2h), (P1,P3) by
/// (-h, 2h) and (P2,P3) by (-h/2, 3h/2).
pub fn share_adjustments(pairing: Pairing, derivation_secret: &[u8; 32], index: u32) -> (Scalar, Scalar) {
    let h = derivation_scalar(derivation_secret, index);
    let (w_a, w_b) = pairing.weights();
    (w_a * h, w_b * h)
}
