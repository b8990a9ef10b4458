//! Fiat-Shamir transcript. Every proof type derives its challenges from a
//! domain-tagged running hash over length-prefixed (label, data) pairs, so
//! challenges are bound to the statement, the session context and the order
//! of the first-message elements.

use num_bigint::BigUint;
use sha2::{Digest, Sha256};

use crate::algebra::{GroupPoint, Scalar};

const PROTO_TAG: &[u8] = b"tecdsa/fs/v1";

#[derive(Clone)]
pub struct FsTranscript {
    state: [u8; 32],
}

impl FsTranscript {
    pub fn new(domain: &str) -> Self {
        let mut h = Sha256::new();
        h.update(PROTO_TAG);
        h.update((domain.len() as u64).to_be_bytes());
        h.update(domain.as_bytes());
        FsTranscript { state: h.finalize().into() }
    }

    pub fn append(&mut self, label: &str, data: &[u8]) {
        let mut h = Sha256::new();
        h.update(self.state);
        h.update([0x01]);
        h.update((label.len() as u64).to_be_bytes());
        h.update(label.as_bytes());
        h.update((data.len() as u64).to_be_bytes());
        h.update(data);
        self.state = h.finalize().into();
    }

    pub fn append_uint(&mut self, label: &str, v: &BigUint) {
        self.append(label, &v.to_bytes_be());
    }

    pub fn append_scalar(&mut self, label: &str, v: &Scalar) {
        self.append(label, &v.to_bytes());
    }

    pub fn append_point(&mut self, label: &str, v: &GroupPoint) {
        self.append(label, &v.to_bytes());
    }

    fn squeeze(&mut self, label: &str, counter: u64) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(self.state);
        h.update([0x02]);
        h.update((label.len() as u64).to_be_bytes());
        h.update(label.as_bytes());
        h.update(counter.to_be_bytes());
        h.finalize().into()
    }

    /// Challenge in Z_q. Folds itself into the state so successive
    /// challenges are independent.
    pub fn challenge_scalar(&mut self, label: &str) -> Scalar {
        let out = self.squeeze(label, 0);
        self.append("fold", &out);
        Scalar::reduce_bytes(&out)
    }

    /// Uniform integer in [0, bound) by rejection sampling over hash output.
    pub fn challenge_below(&mut self, label: &str, bound: &BigUint) -> BigUint {
        assert!(*bound > BigUint::from(0u8));
        let bytes = (bound.bits() as usize).div_ceil(8);
        let mut counter = 0u64;
        loop {
            let mut buf = Vec::with_capacity(bytes);
            while buf.len() < bytes {
                let block = self.squeeze(label, counter);
                counter += 1;
                buf.extend_from_slice(&block);
            }
            buf.truncate(bytes);
            // Mask excess high bits to tighten the rejection rate.
            let excess = bytes * 8 - bound.bits() as usize;
            buf[0] &= 0xffu8 >> excess;
            let v = BigUint::from_bytes_be(&buf);
            if &v < bound {
                self.append("fold", &buf);
                return v;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_order_sensitive() {
        let mut a = FsTranscript::new("t");
        a.append("x", b"1");
        a.append("y", b"2");
        let mut b = FsTranscript::new("t");
        b.append("x", b"1");
        b.append("y", b"2");
        assert_eq!(a.challenge_scalar("c").to_bytes(), b.challenge_scalar("c").to_bytes());

        let mut c = FsTranscript::new("t");
        c.append("y", b"2");
        c.append("x", b"1");
        assert_ne!(a.challenge_scalar("c2").to_bytes(), c.challenge_scalar("c2").to_bytes());
    }

    #[test]
    fn any_appended_byte_changes_challenge() {
        let base = {
            let mut t = FsTranscript::new("t");
            t.append("m", b"hello");
            t.challenge_scalar("c")
        };
        let changed = {
            let mut t = FsTranscript::new("t");
            t.append("m", b"hellp");
            t.challenge_scalar("c")
        };
        assert_ne!(base, changed);
    }

    #[test]
    fn domain_separation() {
        let mut a = FsTranscript::new("alpha");
        let mut b = FsTranscript::new("beta");
        assert_ne!(a.challenge_scalar("c"), b.challenge_scalar("c"));
    }

    #[test]
    fn successive_challenges_differ() {
        let mut t = FsTranscript::new("t");
        assert_ne!(t.challenge_scalar("c"), t.challenge_scalar("c"));
    }

    #[test]
    fn challenge_below_respects_bound() {
        let mut t = FsTranscript::new("t");
        for bound in [2u64, 3, 17, 65536, u64::MAX] {
            let b = BigUint::from(bound);
            for _ in 0..50 {
                assert!(t.challenge_below("e", &b) < b);
            }
        }
    }
}
