//! Curve group and scalar-field arithmetic, message hashing, Lagrange
//! interpolation weights and a self-contained centralized ECDSA.
//!
//! The signer here uses the nonce convention where the published point is
//! `R = k^{ -1} B` and `s = k(e + r d)`. It maps to textbook ECDSA under the
//! bijection `k <-> k^{ -1}`: signatures produced here verify under any
//! standard verifier and vice versa.

use k256::elliptic_curve::ops::Reduce;
use k256::elliptic_curve::point::AffineCoordinates;
use k256::elliptic_curve::scalar::IsHigh;
use k256::elliptic_curve::sec1::{FromEncodedPoint, ToEncodedPoint};
use k256::elliptic_curve::PrimeField;
use k256::{AffinePoint, EncodedPoint, ProjectivePoint, U256};
use rand::{CryptoRng, RngCore};
use sha2::{Digest, Sha256};

use crate::errors::Error;

/// Element of the scalar field Z_q of the curve. Holds every secret share,
/// nonce and signature component, so `Debug` is redacted.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Scalar(pub(crate) k256::Scalar);

impl std::fmt::Debug for Scalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Scalar(<redacted>)")
    }
}

impl Scalar {
    pub const ZERO: Scalar = Scalar(k256::Scalar::ZERO);
    pub const ONE: Scalar = Scalar(k256::Scalar::ONE);

    /// Uniform scalar by rejection sampling; unbiased and deterministic for a
    /// deterministic rng.
    pub fn random(rng: &mut (impl RngCore + CryptoRng)) -> Scalar {
        loop {
            let mut bytes = [0u8; 32];
            rng.fill_bytes(&mut bytes);
            if let Ok(s) = Scalar::from_bytes(&bytes) {
                return s;
            }
        }
    }

    /// Nonzero uniform scalar.
    pub fn random_nonzero(rng: &mut (impl RngCore + CryptoRng)) -> Scalar {
        loop {
            let s = Scalar::random(rng);
            if !s.is_zero() {
                return s;
            }
        }
    }

    pub fn from_u64(v: u64) -> Scalar {
        Scalar(k256::Scalar::from(v))
    }

    /// Strict decoding: rejects values >= q.
    pub fn from_bytes(bytes: &[u8; 32]) -> Result<Scalar, Error> {
        let repr = (*bytes).into();
        Option::<k256::Scalar>::from(k256::Scalar::from_repr(repr))
            .map(Scalar)
            .ok_or(Error::InvalidScalar)
    }

    /// Interprets up to 32 big-endian bytes, reducing mod q.
    pub fn reduce_bytes(bytes: &[u8; 32]) -> Scalar {
        Scalar(<k256::Scalar as Reduce<U256>>::reduce_bytes(bytes.into()))
    }

    pub fn to_bytes(&self) -> [u8; 32] {
        self.0.to_repr().into()
    }

    pub fn is_zero(&self) -> bool {
        self.0 == k256::Scalar::ZERO
    }

    pub fn invert(&self) -> Result<Scalar, Error> {
        Option::<k256::Scalar>::from(self.0.invert())
            .map(Scalar)
            .ok_or(Error::ZeroInverse)
    }

    /// True when the value exceeds q/2; used for optional low-s output.
    pub fn is_high(&self) -> bool {
        self.0.is_high().into()
    }
}

impl std::ops::Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 + rhs.0)
    }
}

impl std::ops::Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 - rhs.0)
    }
}

impl std::ops::Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 * rhs.0)
    }
}

impl std::ops::Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::ZERO, |a, b| a + b)
    }
}

/// Point on the curve; the identity is a legal value.
#[derive(Clone, Copy, PartialEq)]
pub struct GroupPoint(pub(crate) ProjectivePoint);

impl Eq for GroupPoint {}

impl std::fmt::Debug for GroupPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GroupPoint(")?;
        for b in self.to_bytes() {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}

impl GroupPoint {
    pub fn generator() -> GroupPoint {
        GroupPoint(ProjectivePoint::GENERATOR)
    }

    pub fn identity() -> GroupPoint {
        GroupPoint(ProjectivePoint::IDENTITY)
    }

    pub fn is_identity(&self) -> bool {
        self.0 == ProjectivePoint::IDENTITY
    }

    /// SEC1 encoding: 33-byte compressed point, or the single byte 0x00 for
    /// the identity.
    pub fn to_bytes(&self) -> Vec<u8> {
        if self.is_identity() {
            vec![0u8]
        } else {
            self.0.to_affine().to_encoded_point(true).as_bytes().to_vec()
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<GroupPoint, Error> {
        if bytes == [0u8] {
            return Ok(GroupPoint::identity());
        }
        if bytes.len() != 33 {
            return Err(Error::InvalidPoint);
        }
        let ep = EncodedPoint::from_bytes(bytes).map_err(|_| Error::InvalidPoint)?;
        Option::<AffinePoint>::from(AffinePoint::from_encoded_point(&ep))
            .map(|a| GroupPoint(ProjectivePoint::from(a)))
            .ok_or(Error::InvalidPoint)
    }

    /// Big-endian x-coordinate; None for the identity.
    pub fn x_bytes(&self) -> Option<[u8; 32]> {
        if self.is_identity() {
            return None;
        }
        Some(self.0.to_affine().x().into())
    }

    /// x-coordinate reduced mod q, as used for the signature component r.
    pub fn x_scalar(&self) -> Option<Scalar> {
        self.x_bytes().map(|b| Scalar::reduce_bytes(&b))
    }
}

impl std::ops::Add for GroupPoint {
    type Output = GroupPoint;
    fn add(self, rhs: GroupPoint) -> GroupPoint {
        GroupPoint(self.0 + rhs.0)
    }
}

impl std::ops::Sub for GroupPoint {
    type Output = GroupPoint;
    fn sub(self, rhs: GroupPoint) -> GroupPoint {
        GroupPoint(self.0 - rhs.0)
    }
}

impl std::ops::Neg for GroupPoint {
    type Output = GroupPoint;
    fn neg(self) -> GroupPoint {
        GroupPoint(-self.0)
    }
}

impl std::ops::Mul<Scalar> for GroupPoint {
    type Output = GroupPoint;
    fn mul(self, rhs: Scalar) -> GroupPoint {
        GroupPoint(self.0 * rhs.0)
    }
}

/// Scalar multiple of the generator.
pub fn mul_generator(s: &Scalar) -> GroupPoint {
    GroupPoint(ProjectivePoint::GENERATOR * s.0)
}

/// ECDSA signature pair; r and s are nonzero in any valid signature.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub r: Scalar,
    pub s: Scalar,
}

impl std::fmt::Debug for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Signature(r: {}, s: {})", hex32(&self.r.to_bytes()), hex32(&self.s.to_bytes()))
    }
}

fn hex32(b: &[u8; 32]) -> String {
    b.iter().map(|x| format!("{x:02x}")).collect()
}

impl Signature {
    pub fn to_bytes(&self) -> [u8; 64] {
        let mut out = [0u8; 64];
        out[..32].copy_from_slice(&self.r.to_bytes());
        out[32..].copy_from_slice(&self.s.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8; 64]) -> Result<Signature, Error> {
        let r = Scalar::from_bytes(bytes[..32].try_into().unwrap())?;
        let s = Scalar::from_bytes(bytes[32..].try_into().unwrap())?;
        if r.is_zero() || s.is_zero() {
            return Err(Error::ZeroSignatureComponent);
        }
        Ok(Signature { r, s })
    }

    /// Replaces s by q - s when s > q/2. Some chains require the low form;
    /// the protocol itself never applies it.
    pub fn normalize_low_s(&self) -> Signature {
        if self.s.is_high() {
            Signature { r: self.r, s: -self.s }
        } else {
            *self
        }
    }
}

/// Curve and hash selection. Only secp256k1 with SHA-256 is wired in; the
/// identifiers exist so configurations and keystores are explicit about what
/// they were created with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CurveConfig {
    pub curve: CurveId,
    pub hash: HashId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveId {
    Secp256k1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HashId {
    Sha256,
}

impl Default for CurveConfig {
    fn default() -> Self {
        CurveConfig { curve: CurveId::Secp256k1, hash: HashId::Sha256 }
    }
}

impl CurveConfig {
    pub fn id_bytes(&self) -> (u8, u8) {
        (1, 1)
    }

    pub fn from_id_bytes(curve: u8, hash: u8) -> Result<CurveConfig, Error> {
        match (curve, hash) {
            (1, 1) => Ok(CurveConfig::default()),
            _ => Err(Error::UnsupportedConfig),
        }
    }
}

/// SHA-256 of the input interpreted as a big-endian integer mod q.
pub fn hash_to_scalar(data: &[u8]) -> Scalar {
    let digest: [u8; 32] = Sha256::digest(data).into();
    Scalar::reduce_bytes(&digest)
}

/// Scalar as an unsigned big integer in [0, q).
pub fn scalar_to_uint(s: &Scalar) -> num_bigint::BigUint {
    num_bigint::BigUint::from_bytes_be(&s.to_bytes())
}

/// Big integer reduced into the scalar field.
pub fn scalar_from_uint_mod_q(v: &num_bigint::BigUint) -> Scalar {
    let reduced = v % curve_order_uint();
    let bytes = reduced.to_bytes_be();
    let mut out = [0u8; 32];
    out[32 - bytes.len()..].copy_from_slice(&bytes);
    Scalar::reduce_bytes(&out)
}

/// The group order q as a big integer, for the range-proof bounds.
pub fn curve_order_uint() -> num_bigint::BigUint {
    num_bigint::BigUint::from_bytes_be(&[
        0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff,
        0xff, 0xfe, 0xba, 0xae, 0xdc, 0xe6, 0xaf, 0x48, 0xa0, 0x3b, 0xbf, 0xd2, 0x5e, 0x8c,
        0xd0, 0x36, 0x41, 0x41,
    ])
}

/// Lagrange coefficient at 0 for one point of a two-point evaluation pair.
/// For points (a, b) the coefficient of a is b/(b-a).
pub fn lagrange_weight(pair: (u32, u32), which: usize) -> Result<Scalar, Error> {
    let (a, b) = pair;
    if a == b {
        return Err(Error::EqualEvaluationPoints);
    }
    let (own, other) = match which {
        0 => (a, b),
        1 => (b, a),
        _ => return Err(Error::EqualEvaluationPoints),
    };
    let own = Scalar::from_u64(own as u64);
    let other = Scalar::from_u64(other as u64);
    Ok(other * (other - own).invert()?)
}

/// Centralized ECDSA signer with the caller-supplied nonce k, published
/// point R = k^{ -1} B, s = k(e + r d). A zero r or s is surfaced as an
/// error so the caller can retry with a fresh nonce.
pub fn ecdsa_sign(d: &Scalar, msg: &[u8], k: &Scalar) -> Result<Signature, Error> {
    let e = hash_to_scalar(msg);
    let big_r = mul_generator(&k.invert()?);
    let r = big_r.x_scalar().ok_or(Error::ZeroSignatureComponent)?;
    if r.is_zero() {
        return Err(Error::ZeroSignatureComponent);
    }
    let s = *k * (e + r * *d);
    if s.is_zero() {
        return Err(Error::ZeroSignatureComponent);
    }
    Ok(Signature { r, s })
}

/// Standard ECDSA verification: u1 = e/s, u2 = r/s, U = u1 B + u2 Y,
/// accept iff r, s in [1, q-1] and r = U_x mod q.
pub fn ecdsa_verify(public_key: &GroupPoint, msg: &[u8], sig: &Signature) -> bool {
    if sig.r.is_zero() || sig.s.is_zero() {
        return false;
    }
    let e = hash_to_scalar(msg);
    let s_inv = match sig.s.invert() {
        Ok(v) => v,
        Err(_) => return false,
    };
    let u1 = e * s_inv;
    let u2 = sig.r * s_inv;
    let u = mul_generator(&u1) + *public_key * u2;
    match u.x_scalar() {
        Some(x) => x == sig.r,
        None => false,
    }
}
