//! Range proofs attached to the share-conversion messages. The initiator
//! proof shows the plaintext of a Paillier ciphertext lies in [-q^3, q^3];
//! the respondent proof additionally shows the homomorphic relation
//! c2 = c1^b Gamma^y r^N and, in with-check mode, that b matches a public
//! curve point. Verification runs against the verifier's own auxiliary RSA
//! parameters (M, h1, h2).

use num_bigint::{BigUint, RandBigInt};
use rand::{CryptoRng, RngCore};

use crate::algebra::{curve_order_uint, mul_generator, GroupPoint, Scalar};
use crate::paillier::{PaillierCiphertext, PaillierPublicKey};
use crate::zkp::aux_params::AuxRsaParams;
use crate::zkp::transcript::FsTranscript;

fn q_cubed() -> BigUint {
    curve_order_uint().pow(3)
}

fn scalar_to_uint(s: &Scalar) -> BigUint {
    BigUint::from_bytes_be(&s.to_bytes())
}

/// Initiator proof for c = Gamma^m r^N mod N^2 with m in [-q^3, q^3].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangeProofA {
    pub z: BigUint,
    pub u: BigUint,
    pub w: BigUint,
    pub challenge: Scalar,
    pub s: BigUint,
    pub s1: BigUint,
    pub s2: BigUint,
}

fn challenge_a(
    context: &[u8],
    pk: &PaillierPublicKey,
    aux: &AuxRsaParams,
    c: &PaillierCiphertext,
    z: &BigUint,
    u: &BigUint,
    w: &BigUint,
) -> Scalar {
    let mut t = FsTranscript::new("mta-range-initiator");
    t.append("context", context);
    t.append_uint("n", pk.modulus());
    t.append_uint("gamma", pk.gamma());
    t.append_uint("m_aux", aux.modulus());
    t.append_uint("h1", aux.h1());
    t.append_uint("h2", aux.h2());
    t.append_uint("c", c.as_uint());
    t.append_uint("z", z);
    t.append_uint("u", u);
    t.append_uint("w", w);
    t.challenge_scalar("e")
}

pub fn range_prove_initiator(
    m: &BigUint,
    r: &BigUint,
    c: &PaillierCiphertext,
    pk: &PaillierPublicKey,
    aux: &AuxRsaParams,
    context: &[u8],
    rng: &mut (impl RngCore + CryptoRng),
) -> RangeProofA {
    let q3 = q_cubed();
    let big_m = aux.modulus();
    let n = pk.modulus();
    let nn = pk.modulus_squared();

    let alpha = rng.gen_biguint_below(&q3);
    let beta = pk.sample_unit(rng);
    let gamma = rng.gen_biguint_below(&(&q3 * big_m));
    let rho = rng.gen_biguint_below(&(curve_order_uint() * big_m));

    let z = (aux.h1().modpow(m, big_m) * aux.h2().modpow(&rho, big_m)) % big_m;
    let u = (pk.gamma_pow(&alpha) * beta.modpow(n, nn)) % nn;
    let w = (aux.h1().modpow(&alpha, big_m) * aux.h2().modpow(&gamma, big_m)) % big_m;

    let challenge = challenge_a(context, pk, aux, c, &z, &u, &w);
    let e = scalar_to_uint(&challenge);

    let s = (r.modpow(&e, n) * &beta) % n;
    let s1 = &e * m + &alpha;
    let s2 = &e * &rho + &gamma;
    RangeProofA { z, u, w, challenge, s, s1, s2 }
}

pub fn range_verify_initiator(
    proof: &RangeProofA,
    c: &PaillierCiphertext,
    pk: &PaillierPublicKey,
    aux: &AuxRsaParams,
    context: &[u8],
) -> bool {
    let q3 = q_cubed();
    let big_m = aux.modulus();
    let n = pk.modulus();
    let nn = pk.modulus_squared();

    if proof.s1 > q3 {
        return false;
    }
    let expected = challenge_a(context, pk, aux, c, &proof.z, &proof.u, &proof.w);
    if proof.challenge != expected {
        return false;
    }
    let e = scalar_to_uint(&proof.challenge);

    // u = Gamma^s1 s^N c^-e mod N^2
    let Some(c_inv) = c.as_uint().modinv(nn) else {
        return false;
    };
    let lhs = (pk.gamma_pow(&proof.s1) * proof.s.modpow(n, nn)) % nn;
    let lhs = (lhs * c_inv.modpow(&e, nn)) % nn;
    if lhs != proof.u {
        return false;
    }

    // h1^s1 h2^s2 = z^e w mod M
    let ped_lhs =
        (aux.h1().modpow(&proof.s1, big_m) * aux.h2().modpow(&proof.s2, big_m)) % big_m;
    let ped_rhs = (proof.z.modpow(&e, big_m) * &proof.w) % big_m;
    ped_lhs == ped_rhs
}

/// Respondent proof for c2 = c1^b Gamma^y r^N mod N^2 with b in [-q^3, q^3];
/// carries the curve-point link u = g^alpha only in with-check mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangeProofB {
    pub z: BigUint,
    pub z_prime: BigUint,
    pub t: BigUint,
    pub v: BigUint,
    pub w: BigUint,
    pub u: Option<GroupPoint>,
    pub challenge: Scalar,
    pub s: BigUint,
    pub s1: BigUint,
    pub s2: BigUint,
    pub t1: BigUint,
    pub t2: BigUint,
}

#[allow(clippy::too_many_arguments)]
fn challenge_b(
    context: &[u8],
    pk: &PaillierPublicKey,
    aux: &AuxRsaParams,
    c1: &PaillierCiphertext,
    c2: &PaillierCiphertext,
    b_point: Option<&GroupPoint>,
    first: (&BigUint, &BigUint, &BigUint, &BigUint, &BigUint, Option<&GroupPoint>),
) -> Scalar {
    let (z, z_prime, t, v, w, u) = first;
    let mut tr = FsTranscript::new("mta-range-respondent");
    tr.append("context", context);
    tr.append_uint("n", pk.modulus());
    tr.append_uint("gamma", pk.gamma());
    tr.append_uint("m_aux", aux.modulus());
    tr.append_uint("h1", aux.h1());
    tr.append_uint("h2", aux.h2());
    tr.append_uint("c1", c1.as_uint());
    tr.append_uint("c2", c2.as_uint());
    match b_point {
        Some(bp) => tr.append_point("b_point", bp),
        None => tr.append("b_point", b"absent"),
    }
    tr.append_uint("z", z);
    tr.append_uint("z_prime", z_prime);
    tr.append_uint("t", t);
    tr.append_uint("v", v);
    tr.append_uint("w", w);
    match u {
        Some(u) => tr.append_point("u", u),
        None => tr.append("u", b"absent"),
    }
    tr.challenge_scalar("e")
}

#[allow(clippy::too_many_arguments)]
pub fn range_prove_respondent(
    b: &Scalar,
    y: &BigUint,
    r: &BigUint,
    c1: &PaillierCiphertext,
    c2: &PaillierCiphertext,
    pk: &PaillierPublicKey,
    aux: &AuxRsaParams,
    b_point: Option<&GroupPoint>,
    context: &[u8],
    rng: &mut (impl RngCore + CryptoRng),
) -> RangeProofB {
    let q = curve_order_uint();
    let q3 = q_cubed();
    let big_m = aux.modulus();
    let n = pk.modulus();
    let nn = pk.modulus_squared();
    let b_uint = scalar_to_uint(b);
    debug_assert!(b_point.is_none_or(|bp| *bp == mul_generator(b)));

    let alpha = rng.gen_biguint_below(&q3);
    let rho = rng.gen_biguint_below(&(&q * big_m));
    let sigma = rng.gen_biguint_below(&(&q * big_m));
    let tau = rng.gen_biguint_below(&(&q * big_m));
    let rho_prime = rng.gen_biguint_below(&(&q3 * big_m));
    let beta = pk.sample_unit(rng);
    let gamma = pk.sample_unit(rng);

    let z = (aux.h1().modpow(&b_uint, big_m) * aux.h2().modpow(&rho, big_m)) % big_m;
    let z_prime =
        (aux.h1().modpow(&alpha, big_m) * aux.h2().modpow(&rho_prime, big_m)) % big_m;
    let t = (aux.h1().modpow(y, big_m) * aux.h2().modpow(&sigma, big_m)) % big_m;
    let v = (((c1.as_uint().modpow(&alpha, nn) * pk.gamma_pow(&gamma)) % nn)
        * beta.modpow(n, nn))
        % nn;
    let w = (aux.h1().modpow(&gamma, big_m) * aux.h2().modpow(&tau, big_m)) % big_m;
    let u = b_point.map(|_| mul_generator(&Scalar::reduce_bytes(&to_32(&(&alpha % &q)))));

    let challenge = challenge_b(
        context,
        pk,
        aux,
        c1,
        c2,
        b_point,
        (&z, &z_prime, &t, &v, &w, u.as_ref()),
    );
    let e = scalar_to_uint(&challenge);

    let s = (r.modpow(&e, n) * &beta) % n;
    let s1 = &e * &b_uint + &alpha;
    let s2 = &e * &rho + &rho_prime;
    let t1 = &e * y + &gamma;
    let t2 = &e * &sigma + &tau;
    RangeProofB { z, z_prime, t, v, w, u, challenge, s, s1, s2, t1, t2 }
}

#[allow(clippy::too_many_arguments)]
pub fn range_verify_respondent(
    proof: &RangeProofB,
    c1: &PaillierCiphertext,
    c2: &PaillierCiphertext,
    pk: &PaillierPublicKey,
    aux: &AuxRsaParams,
    b_point: Option<&GroupPoint>,
    context: &[u8],
) -> bool {
    let q = curve_order_uint();
    let q3 = q_cubed();
    let big_m = aux.modulus();
    let n = pk.modulus();
    let nn = pk.modulus_squared();

    if proof.s1 > q3 {
        return false;
    }
    // The link point must be present exactly in with-check mode.
    if b_point.is_some() != proof.u.is_some() {
        return false;
    }
    let expected = challenge_b(
        context,
        pk,
        aux,
        c1,
        c2,
        b_point,
        (&proof.z, &proof.z_prime, &proof.t, &proof.v, &proof.w, proof.u.as_ref()),
    );
    if proof.challenge != expected {
        return false;
    }
    let e = scalar_to_uint(&proof.challenge);

    // g^s1 = B^e u, exponents taken mod q on the curve.
    if let (Some(bp), Some(u)) = (b_point, &proof.u) {
        let s1_scalar = Scalar::reduce_bytes(&to_32(&(&proof.s1 % &q)));
        if mul_generator(&s1_scalar) != *bp * proof.challenge + *u {
            return false;
        }
    }

    // h1^s1 h2^s2 = z^e z' mod M
    let lhs = (aux.h1().modpow(&proof.s1, big_m) * aux.h2().modpow(&proof.s2, big_m)) % big_m;
    let rhs = (proof.z.modpow(&e, big_m) * &proof.z_prime) % big_m;
    if lhs != rhs {
        return false;
    }

    // h1^t1 h2^t2 = w t^e mod M
    let lhs = (aux.h1().modpow(&proof.t1, big_m) * aux.h2().modpow(&proof.t2, big_m)) % big_m;
    let rhs = (&proof.w * proof.t.modpow(&e, big_m)) % big_m;
    if lhs != rhs {
        return false;
    }

    // c1^s1 s^N Gamma^t1 = c2^e v mod N^2
    let lhs = (((c1.as_uint().modpow(&proof.s1, nn) * proof.s.modpow(n, nn)) % nn)
        * pk.gamma_pow(&proof.t1))
        % nn;
    let rhs = (c2.as_uint().modpow(&e, nn) * &proof.v) % nn;
    lhs == rhs
}

fn to_32(v: &BigUint) -> [u8; 32] {
    let bytes = v.to_bytes_be();
    let mut out = [0u8; 32];
    out[32 - bytes.len()..].copy_from_slice(&bytes);
    out
}
