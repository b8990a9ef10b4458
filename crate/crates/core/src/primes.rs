//! Prime generation for Paillier moduli and the auxiliary RSA parameters.
//!
//! Safe primes are found with an incremental sieve over a window of
//! candidates, striking indices where either q or 2q+1 has a small factor
//! before any Miller-Rabin test runs. A naive generate-and-test loop is two
//! orders of magnitude slower at the sizes the protocol uses.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{CryptoRng, RngCore};
use std::sync::OnceLock;

const SIEVE_LIMIT: usize = 1 << 16;
const SIEVE_SPAN: usize = 1 << 14;
const MR_ROUNDS: usize = 24;

fn small_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut composite = vec![false; SIEVE_LIMIT];
        let mut out = Vec::new();
        for i in 2..SIEVE_LIMIT {
            if !composite[i] {
                out.push(i as u64);
                let mut j = i * i;
                while j < SIEVE_LIMIT {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        out
    })
}

/// Miller-Rabin with a fixed base-2 round followed by random bases.
pub fn is_probable_prime(n: &BigUint, rng: &mut (impl RngCore + CryptoRng)) -> bool {
    miller_rabin(n, MR_ROUNDS, rng)
}

fn miller_rabin(n: &BigUint, rounds: usize, rng: &mut (impl RngCore + CryptoRng)) -> bool {
    let one = BigUint::one();
    let two = BigUint::from(2u8);
    if *n < two {
        return false;
    }
    if n.is_even() {
        return *n == two;
    }
    for &p in small_primes().iter().take(256) {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for i in 0..rounds {
        let a = if i == 0 {
            two.clone()
        } else {
            rng.gen_biguint_range(&two, &n_minus_1)
        };
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Random prime with exactly `bits` bits and the top two bits set, so a
/// product of two such primes has exactly `2*bits` bits.
pub fn gen_prime(bits: u64, rng: &mut (impl RngCore + CryptoRng)) -> BigUint {
    assert!(bits >= 16, "prime size too small");
    loop {
        let mut candidate = rng.gen_biguint(bits);
        candidate.set_bit(bits - 1, true);
        candidate.set_bit(bits - 2, true);
        candidate.set_bit(0, true);
        if has_small_factor(&candidate) {
            continue;
        }
        if miller_rabin(&candidate, MR_ROUNDS, rng) {
            return candidate;
        }
    }
}

fn has_small_factor(n: &BigUint) -> bool {
    for &p in small_primes().iter().take(512) {
        let bp = BigUint::from(p);
        if *n == bp {
            return false;
        }
        if (n % &bp).is_zero() {
            return true;
        }
    }
    false
}

/// Random safe prime p = 2q + 1 with exactly `bits` bits, q prime.
pub fn gen_safe_prime(bits: u64, rng: &mut (impl RngCore + CryptoRng)) -> BigUint {
    assert!(bits >= 32, "safe prime size too small");
    let qbits = bits - 1;
    let one = BigUint::one();
    loop {
        let mut base = rng.gen_biguint(qbits);
        base.set_bit(qbits - 1, true);
        base.set_bit(qbits - 2, true);
        base.set_bit(0, true);

        // Strike window indices i where base + 2i or 2(base + 2i) + 1 has a
        // small factor r. With m = base mod r and inv2 = (r+1)/2 mod r:
        //   base + 2i = 0  =>  i = -m * inv2
        //   2(base + 2i) + 1 = 0  =>  i = -(2m + 1) * inv4
        let mut alive = vec![true; SIEVE_SPAN];
        for &r in small_primes().iter().skip(1) {
            let m = (&base % r).to_u64_digits().first().copied().unwrap_or(0);
            let inv2 = (r + 1) / 2;
            let inv4 = (inv2 * inv2) % r;
            let mut i = (((r - m) % r) * inv2 % r) as usize;
            while i < SIEVE_SPAN {
                alive[i] = false;
                i += r as usize;
            }
            let mut j = (((r - (2 * m + 1) % r) % r) * inv4 % r) as usize;
            while j < SIEVE_SPAN {
                alive[j] = false;
                j += r as usize;
            }
        }

        for (i, live) in alive.iter().enumerate() {
            if !live {
                continue;
            }
            let q = &base + BigUint::from(2 * i as u64);
            if q.bits() != qbits {
                break;
            }
            if !miller_rabin(&q, 1, rng) {
                continue;
            }
            let p = (&q << 1) + &one;
            if !miller_rabin(&p, 1, rng) {
                continue;
            }
            if miller_rabin(&q, MR_ROUNDS, rng) && miller_rabin(&p, MR_ROUNDS, rng) {
                return p;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn miller_rabin_knowns() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for p in [2u64, 3, 5, 7, 65537, 2147483647] {
            assert!(is_probable_prime(&BigUint::from(p), &mut rng), "{p}");
        }
        for c in [1u64, 4, 9, 561, 6601, 62745, 2147483649] {
            assert!(!is_probable_prime(&BigUint::from(c), &mut rng), "{c}");
        }
    }

    #[test]
    fn generated_primes_pass_independent_check() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for _ in 0..4 {
            let p = gen_prime(256, &mut rng);
            assert_eq!(p.bits(), 256);
            assert!(glass_pumpkin::prime::strong_check(&p));
        }
    }

    #[test]
    fn generated_safe_primes_pass_independent_check() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..2 {
            let p = gen_safe_prime(256, &mut rng);
            assert_eq!(p.bits(), 256);
            assert!(glass_pumpkin::safe_prime::strong_check(&p));
        }
    }

    #[test]
    fn deterministic_for_seeded_rng() {
        let a = gen_safe_prime(128, &mut ChaCha20Rng::seed_from_u64(9));
        let b = gen_safe_prime(128, &mut ChaCha20Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }
}
