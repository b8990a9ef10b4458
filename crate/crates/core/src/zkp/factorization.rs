//! Proof of knowledge of the factorization of N, as l repetitions of a
//! commit-challenge-response round over k random bases of Z*_N. The response
//! y = r + e(N - phi(N)) stays below A for an honest prover, and the verifier
//! checks z_i^(y - Ne) = x_i, where the exponent is handled through a modular
//! inverse because y < A < Ne for any e >= 1.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{CryptoRng, RngCore};

use crate::errors::Error;
use crate::paillier::PaillierSecretKey;
use crate::zkp::transcript::FsTranscript;

/// Security parameter: l * log2(B) = 128.
pub const CHALLENGE_BITS: u32 = 16;
pub const ITERATIONS: usize = 8;
pub const NUM_BASES: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizationParams {
    pub modulus_bits: u64,
    pub a_bound: BigUint,
    pub b_bound: u64,
    pub iterations: usize,
    pub num_bases: usize,
}

impl FactorizationParams {
    /// A = 2^(bits-1), B = 2^16, l = 8, k = 16. Validates the constraint
    /// bound(N - phi(N)) * l * B < A < N with the generic totient-gap bound
    /// 3 * 2^(bits/2 + 1).
    pub fn for_modulus_bits(bits: u64) -> Result<FactorizationParams, Error> {
        let params = FactorizationParams {
            modulus_bits: bits,
            a_bound: BigUint::one() << (bits - 1),
            b_bound: 1u64 << CHALLENGE_BITS,
            iterations: ITERATIONS,
            num_bases: NUM_BASES,
        };
        let phi_gap_bound = BigUint::from(3u8) << (bits / 2 + 1);
        let lhs = phi_gap_bound * params.iterations as u64 * params.b_bound;
        if lhs >= params.a_bound {
            return Err(Error::BadProofParameters);
        }
        Ok(params)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactRound {
    /// x_i = z_i^r mod N, one per base.
    pub commitments: Vec<BigUint>,
    pub challenge: u64,
    /// y = r + e (N - phi(N)).
    pub response: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizationProof {
    pub rounds: Vec<FactRound>,
}

/// Bases are derived from the context and N, so prover and verifier agree on
/// them without extra messages.
fn derive_bases(n: &BigUint, count: usize, context: &[u8]) -> Vec<BigUint> {
    let mut t = FsTranscript::new("factorization-bases");
    t.append("context", context);
    t.append_uint("modulus", n);
    let one = BigUint::one();
    let mut bases = Vec::with_capacity(count);
    while bases.len() < count {
        let z = t.challenge_below("base", n);
        if z <= one || z.gcd(n) != one {
            continue;
        }
        bases.push(z);
    }
    bases
}

/// Challenge derivation binds every commitment of every round, then draws
/// one challenge per round from the folded state.
fn derive_challenges(
    n: &BigUint,
    all_commitments: &[Vec<BigUint>],
    b_bound: u64,
    context: &[u8],
) -> Vec<u64> {
    let mut t = FsTranscript::new("factorization");
    t.append("context", context);
    t.append_uint("modulus", n);
    for (j, round) in all_commitments.iter().enumerate() {
        for (i, x) in round.iter().enumerate() {
            t.append_uint(&format!("x{j}.{i}"), x);
        }
    }
    let bound = BigUint::from(b_bound);
    (0..all_commitments.len())
        .map(|_| {
            let e = t.challenge_below("e", &bound);
            e.to_u64_digits().first().copied().unwrap_or(0)
        })
        .collect()
}

pub fn factorization_prove(
    secret: &PaillierSecretKey,
    params: &FactorizationParams,
    context: &[u8],
    rng: &mut (impl RngCore + CryptoRng),
) -> Result<FactorizationProof, Error> {
    let n = secret.public().modulus();
    if n.bits() != params.modulus_bits || params.a_bound >= *n {
        return Err(Error::BadProofParameters);
    }
    let phi = secret.phi();
    let gap = n - &phi;
    let bases = derive_bases(n, params.num_bases, context);

    // The whole proof restarts if any response overflows A, so the challenge
    // derivation can keep binding every round. Overflow probability is about
    // l * B * gap / A, negligible for the supported sizes.
    for _ in 0..64 {
        let nonces: Vec<BigUint> = (0..params.iterations)
            .map(|_| rng.gen_biguint_below(&params.a_bound))
            .collect();
        let commitments: Vec<Vec<BigUint>> = nonces
            .iter()
            .map(|r| bases.iter().map(|z| z.modpow(r, n)).collect())
            .collect();
        let challenges = derive_challenges(n, &commitments, params.b_bound, context);
        let responses: Vec<BigUint> = nonces
            .iter()
            .zip(&challenges)
            .map(|(r, e)| r + &gap * *e)
            .collect();
        if responses.iter().any(|y| *y >= params.a_bound) {
            continue;
        }
        let rounds = commitments
            .into_iter()
            .zip(challenges)
            .zip(responses)
            .map(|((commitments, challenge), response)| FactRound {
                commitments,
                challenge,
                response,
            })
            .collect();
        return Ok(FactorizationProof { rounds });
    }
    Err(Error::BadProofParameters)
}

pub fn factorization_verify(
    proof: &FactorizationProof,
    n: &BigUint,
    params: &FactorizationParams,
    context: &[u8],
) -> bool {
    if n.bits() != params.modulus_bits || params.a_bound >= *n {
        return false;
    }
    if proof.rounds.len() != params.iterations {
        return false;
    }
    if proof
        .rounds
        .iter()
        .any(|r| r.commitments.len() != params.num_bases)
    {
        return false;
    }
    let all: Vec<Vec<BigUint>> = proof.rounds.iter().map(|r| r.commitments.clone()).collect();
    let challenges = derive_challenges(n, &all, params.b_bound, context);
    let bases = derive_bases(n, params.num_bases, context);
    for (round, expected_e) in proof.rounds.iter().zip(challenges) {
        if round.challenge != expected_e {
            return false;
        }
        if round.response >= params.a_bound {
            return false;
        }
        for (z, x) in bases.iter().zip(&round.commitments) {
            if !check_iteration(z, x, n, &round.response, round.challenge) {
                return false;
            }
        }
    }
    true
}

/// Checks z^(y - Ne) = x mod N with a signed exponent.
pub(crate) fn check_iteration(z: &BigUint, x: &BigUint, n: &BigUint, y: &BigUint, e: u64) -> bool {
    if x.is_zero() || x >= n {
        return false;
    }
    let ne = n * e;
    let value = if ne >= *y {
        let Some(z_inv) = z.modinv(n) else {
            return false;
        };
        z_inv.modpow(&(ne - y), n)
    } else {
        z.modpow(&(y - ne), n)
    };
    value == *x
}
