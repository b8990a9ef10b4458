//! Sigma protocol for the check phase of signing: proves knowledge of
//! (s, l, rho) with W = s R + l B and Z = rho B, over the two bases (R, B).

use rand::{CryptoRng, RngCore};

use crate::algebra::{mul_generator, GroupPoint, Scalar};
use crate::zkp::transcript::FsTranscript;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShareConsistencyProof {
    pub nonce_w: GroupPoint,
    pub nonce_z: GroupPoint,
    pub challenge: Scalar,
    pub resp_s: Scalar,
    pub resp_l: Scalar,
    pub resp_rho: Scalar,
}

fn derive_challenge(
    context: &[u8],
    r_point: &GroupPoint,
    w: &GroupPoint,
    z: &GroupPoint,
    nonce_w: &GroupPoint,
    nonce_z: &GroupPoint,
) -> Scalar {
    let mut t = FsTranscript::new("share-consistency");
    t.append("context", context);
    t.append_point("r_point", r_point);
    t.append_point("w", w);
    t.append_point("z", z);
    t.append_point("nonce_w", nonce_w);
    t.append_point("nonce_z", nonce_z);
    t.challenge_scalar("e")
}

pub fn share_proof_prove(
    s: &Scalar,
    l: &Scalar,
    rho: &Scalar,
    r_point: &GroupPoint,
    w: &GroupPoint,
    z: &GroupPoint,
    context: &[u8],
    rng: &mut (impl RngCore + CryptoRng),
) -> ShareConsistencyProof {
    let (a_s, a_l, a_rho) = (Scalar::random(rng), Scalar::random(rng), Scalar::random(rng));
    let nonce_w = *r_point * a_s + mul_generator(&a_l);
    let nonce_z = mul_generator(&a_rho);
    let challenge = derive_challenge(context, r_point, w, z, &nonce_w, &nonce_z);
    ShareConsistencyProof {
        nonce_w,
        nonce_z,
        challenge,
        resp_s: a_s + challenge * *s,
        resp_l: a_l + challenge * *l,
        resp_rho: a_rho + challenge * *rho,
    }
}

pub fn share_proof_verify(
    proof: &ShareConsistencyProof,
    r_point: &GroupPoint,
    w: &GroupPoint,
    z: &GroupPoint,
    context: &[u8],
) -> bool {
    let expected = derive_challenge(context, r_point, w, z, &proof.nonce_w, &proof.nonce_z);
    if proof.challenge != expected {
        return false;
    }
    let lhs_w = *r_point * proof.resp_s + mul_generator(&proof.resp_l);
    if lhs_w != proof.nonce_w + *w * proof.challenge {
        return false;
    }
    mul_generator(&proof.resp_rho) == proof.nonce_z + *z * proof.challenge
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn roundtrip_and_perturbations() {
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let r_point = mul_generator(&Scalar::random(&mut rng));
        let (s, l, rho) = (
            Scalar::random(&mut rng),
            Scalar::random(&mut rng),
            Scalar::random(&mut rng),
        );
        let w = r_point * s + mul_generator(&l);
        let z = mul_generator(&rho);
        let proof = share_proof_prove(&s, &l, &rho, &r_point, &w, &z, b"ctx", &mut rng);
        assert!(share_proof_verify(&proof, &r_point, &w, &z, b"ctx"));
        assert!(!share_proof_verify(&proof, &r_point, &w, &z, b"other"));

        let g = GroupPoint::generator();
        for field in 0..6 {
            let mut p = proof;
            match field {
                0 => p.nonce_w = p.nonce_w + g,
                1 => p.nonce_z = p.nonce_z + g,
                2 => p.challenge = p.challenge + Scalar::ONE,
                3 => p.resp_s = p.resp_s + Scalar::ONE,
                4 => p.resp_l = p.resp_l + Scalar::ONE,
                _ => p.resp_rho = p.resp_rho + Scalar::ONE,
            }
            assert!(!share_proof_verify(&p, &r_point, &w, &z, b"ctx"), "field {field}");
        }
    }

    #[test]
    fn wrong_statement_fails() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let r_point = mul_generator(&Scalar::random(&mut rng));
        let (s, l, rho) = (
            Scalar::random(&mut rng),
            Scalar::random(&mut rng),
            Scalar::random(&mut rng),
        );
        let w = r_point * s + mul_generator(&l);
        let z = mul_generator(&rho);
        let proof = share_proof_prove(&s, &l, &rho, &r_point, &w, &z, b"ctx", &mut rng);
        let wrong_w = w + GroupPoint::generator();
        assert!(!share_proof_verify(&proof, &r_point, &wrong_w, &z, b"ctx"));
    }
}
