//! Schnorr proof of knowledge of a discrete logarithm, non-interactive by
//! default. The interactive commit/respond split is kept for the
//! special-soundness extraction check in the test suite.

use rand::{CryptoRng, RngCore};

use crate::algebra::{mul_generator, GroupPoint, Scalar};
use crate::zkp::transcript::FsTranscript;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchnorrProof {
    /// Prover nonce point U = r B.
    pub nonce_point: GroupPoint,
    pub challenge: Scalar,
    /// z = r + c x.
    pub response: Scalar,
}

pub struct SchnorrProverState {
    nonce: Scalar,
}

/// Interactive first move: U = r B.
pub fn schnorr_commit(rng: &mut (impl RngCore + CryptoRng)) -> (SchnorrProverState, GroupPoint) {
    let nonce = Scalar::random(rng);
    let point = mul_generator(&nonce);
    (SchnorrProverState { nonce }, point)
}

/// Interactive third move: z = r + c x.
pub fn schnorr_respond(state: &SchnorrProverState, x: &Scalar, challenge: &Scalar) -> Scalar {
    state.nonce + *challenge * *x
}

/// Verification equation z B = U + c X on an arbitrary transcript.
pub fn schnorr_check_equation(
    nonce_point: &GroupPoint,
    challenge: &Scalar,
    response: &Scalar,
    public: &GroupPoint,
) -> bool {
    mul_generator(response) == *nonce_point + *public * *challenge
}

fn derive_challenge(context: &[u8], public: &GroupPoint, nonce_point: &GroupPoint) -> Scalar {
    let mut t = FsTranscript::new("schnorr-dlog");
    t.append("context", context);
    t.append_point("base", &GroupPoint::generator());
    t.append_point("public", public);
    t.append_point("nonce", nonce_point);
    t.challenge_scalar("e")
}

pub fn schnorr_prove(
    x: &Scalar,
    public: &GroupPoint,
    context: &[u8],
    rng: &mut (impl RngCore + CryptoRng),
) -> SchnorrProof {
    debug_assert_eq!(mul_generator(x), *public);
    let (state, nonce_point) = schnorr_commit(rng);
    let challenge = derive_challenge(context, public, &nonce_point);
    let response = schnorr_respond(&state, x, &challenge);
    SchnorrProof { nonce_point, challenge, response }
}

pub fn schnorr_verify(proof: &SchnorrProof, public: &GroupPoint, context: &[u8]) -> bool {
    let expected = derive_challenge(context, public, &proof.nonce_point);
    if proof.challenge != expected {
        return false;
    }
    schnorr_check_equation(&proof.nonce_point, &proof.challenge, &proof.response, public)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    #[test]
    fn honest_proof_verifies() {
        let mut rng = rng(0);
        for _ in 0..20 {
            let x = Scalar::random(&mut rng);
            let public = mul_generator(&x);
            let proof = schnorr_prove(&x, &public, b"ctx", &mut rng);
            assert!(schnorr_verify(&proof, &public, b"ctx"));
        }
    }

    #[test]
    fn zero_witness_identity_point_accepted() {
        let mut rng = rng(1);
        let proof = schnorr_prove(&Scalar::ZERO, &GroupPoint::identity(), b"ctx", &mut rng);
        assert!(schnorr_verify(&proof, &GroupPoint::identity(), b"ctx"));
    }

    #[test]
    fn replay_against_other_statement_or_context_fails() {
        let mut rng = rng(2);
        let x = Scalar::random(&mut rng);
        let public = mul_generator(&x);
        let proof = schnorr_prove(&x, &public, b"ctx", &mut rng);
        let other = mul_generator(&Scalar::random(&mut rng));
        assert!(!schnorr_verify(&proof, &other, b"ctx"));
        assert!(!schnorr_verify(&proof, &public, b"other-ctx"));
    }

    #[test]
    fn perturbed_fields_fail() {
        let mut rng = rng(3);
        let x = Scalar::random(&mut rng);
        let public = mul_generator(&x);
        let proof = schnorr_prove(&x, &public, b"ctx", &mut rng);

        let mut p = proof;
        p.response = p.response + Scalar::ONE;
        assert!(!schnorr_verify(&p, &public, b"ctx"));

        let mut p = proof;
        p.challenge = p.challenge + Scalar::ONE;
        assert!(!schnorr_verify(&p, &public, b"ctx"));

        let mut p = proof;
        p.nonce_point = p.nonce_point + GroupPoint::generator();
        assert!(!schnorr_verify(&p, &public, b"ctx"));
    }

    #[test]
    fn special_soundness_extraction() {
        // Two accepting transcripts with the same nonce point and distinct
        // challenges reveal the witness as (z - z') / (c - c').
        let mut rng = rng(4);
        for _ in 0..10 {
            let x = Scalar::random(&mut rng);
            let public = mul_generator(&x);
            let (state, nonce_point) = schnorr_commit(&mut rng);
            let c1 = Scalar::random(&mut rng);
            let c2 = Scalar::random(&mut rng);
            if c1 == c2 {
                continue;
            }
            let z1 = schnorr_respond(&state, &x, &c1);
            let z2 = schnorr_respond(&state, &x, &c2);
            assert!(schnorr_check_equation(&nonce_point, &c1, &z1, &public));
            assert!(schnorr_check_equation(&nonce_point, &c2, &z2, &public));
            let extracted = (z1 - z2) * (c1 - c2).invert().unwrap();
            assert_eq!(extracted, x);
        }
    }
}
