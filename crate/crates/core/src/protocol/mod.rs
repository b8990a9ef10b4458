//! Party state machines for the protocol: key generation between the two
//! online parties, the shared four-phase signing algorithm, recovery signing
//! with the offline party and deterministic key derivation.

pub mod derive;
pub mod keygen;
pub mod messages;
pub mod recovery;
pub mod sign;

use crate::algebra::{lagrange_weight, CurveConfig, GroupPoint, Scalar};
use crate::errors::Error;
use crate::paillier::PaillierKeyPair;
use crate::sealedbox::SealedBox;
use crate::zkp::AuxRsaParams;

pub use keygen::KeygenParty;
pub use recovery::{recovery_prepare, RecoveredShare};
pub use sign::{SignParty, SignRole, SignerLocal};

/// The three parties and their fixed polynomial evaluation points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartyRole {
    P1,
    P2,
    P3,
}

impl PartyRole {
    pub fn id(&self) -> u8 {
        match self {
            PartyRole::P1 => 1,
            PartyRole::P2 => 2,
            PartyRole::P3 => 3,
        }
    }

    pub fn from_id(id: u8) -> Option<PartyRole> {
        match id {
            1 => Some(PartyRole::P1),
            2 => Some(PartyRole::P2),
            3 => Some(PartyRole::P3),
            _ => None,
        }
    }

    /// Share evaluation points: P1 holds f(2), P2 holds f(3), P3 holds f(1).
    pub fn eval_point(&self) -> u32 {
        match self {
            PartyRole::P1 => 2,
            PartyRole::P2 => 3,
            PartyRole::P3 => 1,
        }
    }
}

/// A signing pair. The first named party always plays role A in the
/// signature algorithm, the second role B.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pairing {
    P1P2,
    P1P3,
    P2P3,
}

impl Pairing {
    pub fn role_a(&self) -> PartyRole {
        match self {
            Pairing::P1P2 | Pairing::P1P3 => PartyRole::P1,
            Pairing::P2P3 => PartyRole::P2,
        }
    }

    pub fn role_b(&self) -> PartyRole {
        match self {
            Pairing::P1P2 => PartyRole::P2,
            Pairing::P1P3 | Pairing::P2P3 => PartyRole::P3,
        }
    }

    pub fn contains(&self, role: PartyRole) -> bool {
        self.role_a() == role || self.role_b() == role
    }

    pub fn peer_of(&self, role: PartyRole) -> Option<PartyRole> {
        if role == self.role_a() {
            Some(self.role_b())
        } else if role == self.role_b() {
            Some(self.role_a())
        } else {
            None
        }
    }

    /// Lagrange weights at 0 for (role A, role B). Converting both parties'
    /// point-shares with these weights yields additive shares of the key:
    /// (P1,P2) gives (3, -2), (P1,P3) gives (-1, 2), (P2,P3) gives (-1/2, 3/2).
    pub fn weights(&self) -> (Scalar, Scalar) {
        let pair = (self.role_a().eval_point(), self.role_b().eval_point());
        let a = lagrange_weight(pair, 0).expect("distinct fixed points");
        let b = lagrange_weight(pair, 1).expect("distinct fixed points");
        (a, b)
    }
}

/// Key and proof sizes plus feature switches for a protocol run.
#[derive(Clone, Debug)]
pub struct ProtocolConfig {
    pub curve: CurveConfig,
    pub paillier_bits: u64,
    pub aux_bits: u64,
    pub range_proofs: bool,
    pub allow_insecure: bool,
}

/// Production floor for both moduli.
pub const SECURE_MODULUS_BITS: u64 = 2048;

impl ProtocolConfig {
    pub fn production() -> Self {
        ProtocolConfig {
            curve: CurveConfig::default(),
            paillier_bits: 2048,
            aux_bits: 2048,
            range_proofs: true,
            allow_insecure: false,
        }
    }

    /// CI profile: 1024-bit moduli, still large enough that the share
    /// conversion cannot wrap. Marked insecure.
    pub fn test_sizes() -> Self {
        ProtocolConfig {
            curve: CurveConfig::default(),
            paillier_bits: 1024,
            aux_bits: 1024,
            range_proofs: true,
            allow_insecure: true,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !self.allow_insecure
            && (self.paillier_bits < SECURE_MODULUS_BITS || self.aux_bits < SECURE_MODULUS_BITS)
        {
            return Err(Error::InsecureKeySize(self.paillier_bits.min(self.aux_bits)));
        }
        // Below this the share conversion wraps for honest inputs.
        if self.paillier_bits < 1024 {
            return Err(Error::UnusableKeySize(self.paillier_bits));
        }
        Ok(())
    }
}

/// Publicly computable per-party share points x_i B.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SharePoints {
    pub x1: GroupPoint,
    pub x2: GroupPoint,
    pub x3: GroupPoint,
}

impl SharePoints {
    pub fn for_role(&self, role: PartyRole) -> GroupPoint {
        match role {
            PartyRole::P1 => self.x1,
            PartyRole::P2 => self.x2,
            PartyRole::P3 => self.x3,
        }
    }
}

/// Both online parties' Feldman commitment pairs (constant, linear).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VssCommitments {
    pub p1: (GroupPoint, GroupPoint),
    pub p2: (GroupPoint, GroupPoint),
}

/// Everything one online party keeps after key generation.
#[derive(Clone)]
pub struct KeyShareRecord {
    pub role: PartyRole,
    pub curve: CurveConfig,
    /// Point-share x_i = sigma_1i + sigma_2i + sigma_3i.
    pub x_share: Scalar,
    /// Additive share for the ordinary pairing: 3 x_1 or -2 x_2.
    pub omega: Scalar,
    pub public_key: GroupPoint,
    /// Common secret d, the x-coordinate driving key derivation.
    pub derivation_secret: [u8; 32],
    pub paillier: PaillierKeyPair,
    pub aux: AuxRsaParams,
    pub peer_paillier: crate::paillier::PaillierPublicKey,
    pub peer_aux: AuxRsaParams,
    /// Recovery material for the offline party, kept by both parties.
    pub rec_p1: SealedBox,
    pub rec_p2: SealedBox,
    pub recovery_pk: GroupPoint,
    pub share_points: SharePoints,
    pub vss_commitments: VssCommitments,
    /// Committed sigma_31 B and sigma_32 B.
    pub sigma3_points: (GroupPoint, GroupPoint),
    pub paillier_bits: u64,
}

impl std::fmt::Debug for KeyShareRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "KeyShareRecord(role: {:?}, public_key: {:?}, <secrets redacted>)",
            self.role, self.public_key
        )
    }
}
