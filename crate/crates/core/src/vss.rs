//! Feldman verifiable secret sharing over degree-1 polynomials, which is the
//! only degree the protocol deals. The dealer commits to both coefficients
//! of f(X) = s + mX with curve points; any share is checked against those
//! commitments. A failed check aborts the session, there is no complaint or
//! recovery round.

use rand::{CryptoRng, RngCore};

use crate::algebra::{mul_generator, GroupPoint, Scalar};

/// Fixed evaluation points of the protocol: the share kept for the first
/// online party evaluates at 2, the second at 3 and the offline party at 1.
pub const EVAL_P1: u32 = 2;
pub const EVAL_P2: u32 = 3;
pub const EVAL_P3: u32 = 1;

#[derive(Clone, Debug)]
pub struct VssDealing {
    /// Commitment to the constant term, c0 = s B.
    pub commit_constant: GroupPoint,
    /// Commitment to the linear coefficient, c1 = m B.
    pub commit_linear: GroupPoint,
    /// Shares at the three fixed evaluation points.
    pub shares: [VssShare; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VssShare {
    pub point: u32,
    pub value: Scalar,
}

impl VssDealing {
    pub fn share_at(&self, point: u32) -> Option<&VssShare> {
        self.shares.iter().find(|s| s.point == point)
    }
}

/// Deals f(X) = secret + mX with random m, evaluated at the fixed points.
pub fn deal(secret: &Scalar, rng: &mut (impl RngCore + CryptoRng)) -> VssDealing {
    deal_with_coefficient(secret, &Scalar::random(rng))
}

/// Deterministic dealing for tests and derived checks.
pub fn deal_with_coefficient(secret: &Scalar, m: &Scalar) -> VssDealing {
    let eval = |x: u32| *secret + *m * Scalar::from_u64(x as u64);
    VssDealing {
        commit_constant: mul_generator(secret),
        commit_linear: mul_generator(m),
        shares: [
            VssShare { point: EVAL_P1, value: eval(EVAL_P1) },
            VssShare { point: EVAL_P2, value: eval(EVAL_P2) },
            VssShare { point: EVAL_P3, value: eval(EVAL_P3) },
        ],
    }
}

/// Share check: value B = c0 + point c1.
pub fn verify_share(share: &VssShare, commit_constant: &GroupPoint, commit_linear: &GroupPoint) -> bool {
    mul_generator(&share.value) == public_share_point(commit_constant, commit_linear, share.point)
}

/// Publicly computable f(point) B = c0 + point c1.
pub fn public_share_point(
    commit_constant: &GroupPoint,
    commit_linear: &GroupPoint,
    point: u32,
) -> GroupPoint {
    *commit_constant + *commit_linear * Scalar::from_u64(point as u64)
}
