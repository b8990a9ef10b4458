//! Paillier cryptosystem: key generation, encryption, decryption and the two
//! homomorphic operators the share-conversion protocol relies on,
//!   c1 (+) c2 = c1*c2 mod N^2        decrypting to m1 + m2 mod N,
//!   a (*) c   = c^a   mod N^2        decrypting to a*m mod N.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{CryptoRng, RngCore};

use crate::errors::Error;
use crate::primes;

/// Secure floor for the modulus size. Smaller keys are available behind the
/// insecure entry point for tests and benchmarks only.
pub const MIN_SECURE_BITS: u64 = 1024;
pub const MIN_USABLE_BITS: u64 = 32;

#[derive(Clone, PartialEq, Eq)]
pub struct PaillierPublicKey {
    n: BigUint,
    gamma: BigUint,
    nn: BigUint,
}

impl std::fmt::Debug for PaillierPublicKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PaillierPublicKey({} bits)", self.n.bits())
    }
}

#[derive(Clone)]
pub struct PaillierSecretKey {
    p: BigUint,
    q: BigUint,
    lambda: BigUint,
    mu: BigUint,
    public: PaillierPublicKey,
}

impl std::fmt::Debug for PaillierSecretKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("PaillierSecretKey(<redacted>)")
    }
}

#[derive(Clone, Debug)]
pub struct PaillierKeyPair {
    pub public: PaillierPublicKey,
    pub secret: PaillierSecretKey,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaillierCiphertext(BigUint);

impl PaillierCiphertext {
    pub fn as_uint(&self) -> &BigUint {
        &self.0
    }

    /// Decodes a ciphertext, enforcing 0 < c < N^2 and gcd(c, N) = 1.
    pub fn from_uint(value: BigUint, pk: &PaillierPublicKey) -> Result<Self, Error> {
        if value.is_zero() || value >= pk.nn {
            return Err(Error::InvalidCiphertext);
        }
        if value.gcd(&pk.n) != BigUint::one() {
            return Err(Error::InvalidCiphertext);
        }
        Ok(PaillierCiphertext(value))
    }
}

/// Generator choice for key generation. N+1 always has order N in Z*_{N^2}
/// and admits the shortcut (1+N)^m = 1 + mN, so it is the default.
#[derive(Clone, Debug)]
pub enum GammaChoice {
    NPlusOne,
    Random,
    Fixed(BigUint),
}

pub fn paillier_keygen(
    bits: u64,
    rng: &mut (impl RngCore + CryptoRng),
) -> Result<PaillierKeyPair, Error> {
    if bits < MIN_SECURE_BITS {
        return Err(Error::InsecureKeySize(bits));
    }
    keygen_unchecked(bits, GammaChoice::NPlusOne, rng)
}

/// Key generation without the size floor, for tests and benchmark profiles.
pub fn paillier_keygen_insecure(
    bits: u64,
    gamma: GammaChoice,
    rng: &mut (impl RngCore + CryptoRng),
) -> Result<PaillierKeyPair, Error> {
    if bits < MIN_USABLE_BITS {
        return Err(Error::UnusableKeySize(bits));
    }
    keygen_unchecked(bits, gamma, rng)
}

fn keygen_unchecked(
    bits: u64,
    gamma: GammaChoice,
    rng: &mut (impl RngCore + CryptoRng),
) -> Result<PaillierKeyPair, Error> {
    loop {
        let p = primes::gen_prime(bits / 2, rng);
        let q = primes::gen_prime(bits - bits / 2, rng);
        if p == q {
            continue;
        }
        match key_from_primes(&p, &q, gamma.clone(), rng) {
            Ok(pair) => return Ok(pair),
            // gcd(pq, (p-1)(q-1)) != 1: reject the pair and draw fresh primes.
            Err(Error::InvalidCiphertext) | Err(Error::NotAUnit) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Builds a key pair from caller-supplied primes. Used by the small-modulus
/// test oracles; generation paths call it internally.
pub fn key_from_primes(
    p: &BigUint,
    q: &BigUint,
    gamma: GammaChoice,
    rng: &mut (impl RngCore + CryptoRng),
) -> Result<PaillierKeyPair, Error> {
    let one = BigUint::one();
    let n = p * q;
    let phi = (p - &one) * (q - &one);
    if n.gcd(&phi) != one {
        return Err(Error::NotAUnit);
    }
    let nn = &n * &n;
    let lambda = (p - &one).lcm(&(q - &one));
    let mut attempts = 0;
    loop {
        let g = match &gamma {
            GammaChoice::NPlusOne => &n + &one,
            GammaChoice::Fixed(g) => g.clone(),
            GammaChoice::Random => loop {
                let candidate = rng.gen_biguint_below(&nn);
                if !candidate.is_zero() && candidate.gcd(&nn) == one {
                    break candidate;
                }
            },
        };
        // N divides ord(gamma) exactly when L(gamma^lambda) is invertible
        // mod N; a failed inversion rejects the candidate.
        let l = l_function(&g.modpow(&lambda, &nn), &n)?;
        match l.modinv(&n) {
            Some(mu) => {
                let public = PaillierPublicKey { n: n.clone(), gamma: g, nn: nn.clone() };
                let secret = PaillierSecretKey {
                    p: p.clone(),
                    q: q.clone(),
                    lambda,
                    mu,
                    public: public.clone(),
                };
                return Ok(PaillierKeyPair { public, secret });
            }
            None => {
                attempts += 1;
                if !matches!(gamma, GammaChoice::Random) || attempts > 64 {
                    return Err(Error::InvalidCiphertext);
                }
            }
        }
    }
}

/// L(x) = (x - 1) / N, defined only when N divides x - 1 exactly.
fn l_function(x: &BigUint, n: &BigUint) -> Result<BigUint, Error> {
    let one = BigUint::one();
    if x.is_zero() {
        return Err(Error::InvalidCiphertext);
    }
    let t = x - &one;
    let (quot, rem) = t.div_rem(n);
    if !rem.is_zero() {
        return Err(Error::InvalidCiphertext);
    }
    Ok(quot)
}

impl PaillierPublicKey {
    /// Rebuilds a peer's public key from wire values, with structural
    /// validation only (N odd and large enough, Gamma a unit below N^2).
    pub fn from_parts(n: &BigUint, gamma: &BigUint) -> Result<PaillierPublicKey, Error> {
        if n.bits() < MIN_USABLE_BITS || n.is_even() {
            return Err(Error::UnusableKeySize(n.bits()));
        }
        let nn = n * n;
        if gamma.is_zero() || *gamma >= nn || gamma.gcd(n) != BigUint::one() {
            return Err(Error::NotAUnit);
        }
        Ok(PaillierPublicKey { n: n.clone(), gamma: gamma.clone(), nn })
    }

    pub fn modulus(&self) -> &BigUint {
        &self.n
    }

    pub fn gamma(&self) -> &BigUint {
        &self.gamma
    }

    pub fn modulus_squared(&self) -> &BigUint {
        &self.nn
    }

    /// Samples a unit of Z*_N.
    pub fn sample_unit(&self, rng: &mut (impl RngCore + CryptoRng)) -> BigUint {
        let one = BigUint::one();
        loop {
            let r = rng.gen_biguint_below(&self.n);
            if !r.is_zero() && r.gcd(&self.n) == one {
                return r;
            }
        }
    }

    /// Encrypts with fresh randomness, returning the randomness for use in
    /// the range proofs.
    pub fn encrypt(
        &self,
        m: &BigUint,
        rng: &mut (impl RngCore + CryptoRng),
    ) -> Result<(PaillierCiphertext, BigUint), Error> {
        let r = self.sample_unit(rng);
        let c = self.encrypt_with(m, &r)?;
        Ok((c, r))
    }

    /// c = Gamma^m * r^N mod N^2.
    pub fn encrypt_with(&self, m: &BigUint, r: &BigUint) -> Result<PaillierCiphertext, Error> {
        if m >= &self.n {
            return Err(Error::PlaintextOutOfRange);
        }
        if r.is_zero() || r >= &self.n || r.gcd(&self.n) != BigUint::one() {
            return Err(Error::NotAUnit);
        }
        let gm = self.gamma_pow(m);
        let rn = r.modpow(&self.n, &self.nn);
        Ok(PaillierCiphertext((gm * rn) % &self.nn))
    }

    /// Gamma^e mod N^2, using (1+N)^e = 1 + eN when Gamma = N + 1.
    pub(crate) fn gamma_pow(&self, e: &BigUint) -> BigUint {
        if self.gamma == &self.n + BigUint::one() {
            let e_red = e % &self.n;
            (BigUint::one() + e_red * &self.n) % &self.nn
        } else {
            self.gamma.modpow(e, &self.nn)
        }
    }

    /// Homomorphic addition: c1 * c2 mod N^2.
    pub fn add_ciphertexts(
        &self,
        c1: &PaillierCiphertext,
        c2: &PaillierCiphertext,
    ) -> PaillierCiphertext {
        PaillierCiphertext((&c1.0 * &c2.0) % &self.nn)
    }

    /// Homomorphic scalar multiplication: c^a mod N^2.
    pub fn scalar_mul_ciphertext(
        &self,
        a: &BigUint,
        c: &PaillierCiphertext,
    ) -> Result<PaillierCiphertext, Error> {
        if a >= &self.n {
            return Err(Error::MultiplierOutOfRange);
        }
        Ok(PaillierCiphertext(c.0.modpow(a, &self.nn)))
    }
}

impl PaillierSecretKey {
    pub fn public(&self) -> &PaillierPublicKey {
        &self.public
    }

    /// Totient of N; the factorization proof needs it.
    pub(crate) fn phi(&self) -> BigUint {
        let one = BigUint::one();
        (&self.p - &one) * (&self.q - &one)
    }

    /// m = L(c^lambda mod N^2) * mu mod N.
    pub fn decrypt(&self, c: &PaillierCiphertext) -> Result<BigUint, Error> {
        let pk = &self.public;
        if c.0.is_zero() || c.0 >= pk.nn || c.0.gcd(&pk.n) != BigUint::one() {
            return Err(Error::InvalidCiphertext);
        }
        let x = c.0.modpow(&self.lambda, &pk.nn);
        let l = l_function(&x, &pk.n)?;
        Ok((l * &self.mu) % &pk.n)
    }
}
