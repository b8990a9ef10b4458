//! Auxiliary RSA parameters for the range proofs: a modulus M that is the
//! product of two safe primes, and h1, h2 with h2 in the subgroup generated
//! by h1. The discrete log linking h1 and h2 is discarded after generation.
//! Each party generates its own parameters and verifies peer proofs against
//! them.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::One;
use rand::{CryptoRng, RngCore};

use crate::errors::Error;
use crate::primes;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxRsaParams {
    modulus: BigUint,
    h1: BigUint,
    h2: BigUint,
}

impl AuxRsaParams {
    /// Generates a modulus of `bits` bits from two safe primes, then
    /// h1 a random quadratic residue and h2 = h1^alpha.
    pub fn generate(bits: u64, rng: &mut (impl RngCore + CryptoRng)) -> AuxRsaParams {
        let p = primes::gen_safe_prime(bits / 2, rng);
        let q = loop {
            let q = primes::gen_safe_prime(bits - bits / 2, rng);
            if q != p {
                break q;
            }
        };
        let m = &p * &q;
        let one = BigUint::one();
        // Order of the quadratic-residue subgroup: p' q' for p = 2p' + 1.
        let subgroup_order = ((&p - &one) >> 1) * ((&q - &one) >> 1);
        let h1 = loop {
            let x = rng.gen_biguint_below(&m);
            if x.gcd(&m) != one {
                continue;
            }
            let h = (&x * &x) % &m;
            if h != one {
                break h;
            }
        };
        let alpha = rng.gen_biguint_range(&one, &subgroup_order);
        let h2 = h1.modpow(&alpha, &m);
        AuxRsaParams { modulus: m, h1, h2 }
    }

    pub fn from_parts(modulus: BigUint, h1: BigUint, h2: BigUint) -> Result<AuxRsaParams, Error> {
        let params = AuxRsaParams { modulus, h1, h2 };
        params.validate()?;
        Ok(params)
    }

    /// Structural checks on received parameters. Proving that M really is a
    /// safe-prime product is out of scope; these catch degenerate values.
    pub fn validate(&self) -> Result<(), Error> {
        let one = BigUint::one();
        if self.modulus.bits() < 512 || self.modulus.is_even() {
            return Err(Error::Malformed("aux modulus too small or even"));
        }
        for h in [&self.h1, &self.h2] {
            if h <= &one || h >= &self.modulus || h.gcd(&self.modulus) != one {
                return Err(Error::Malformed("aux generator out of range"));
            }
        }
        if self.h1 == self.h2 {
            return Err(Error::Malformed("aux generators equal"));
        }
        Ok(())
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn h1(&self) -> &BigUint {
        &self.h1
    }

    pub fn h2(&self) -> &BigUint {
        &self.h2
    }
}
