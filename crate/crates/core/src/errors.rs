use thiserror::Error;

/// Errors from the arithmetic and encoding layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("scalar out of range")]
    InvalidScalar,
    #[error("invalid curve point encoding")]
    InvalidPoint,
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("r or s is zero for the supplied nonce")]
    ZeroSignatureComponent,
    #[error("distinct evaluation points required")]
    EqualEvaluationPoints,
    #[error("unsupported curve or hash")]
    UnsupportedConfig,
    #[error("plaintext out of range")]
    PlaintextOutOfRange,
    #[error("randomness is not a unit modulo N")]
    NotAUnit,
    #[error("ciphertext invalid under this key")]
    InvalidCiphertext,
    #[error("multiplier out of range")]
    MultiplierOutOfRange,
    #[error("key size {0} below the secure minimum; use the insecure override for tests")]
    InsecureKeySize(u64),
    #[error("key size {0} too small to be usable")]
    UnusableKeySize(u64),
    #[error("proof parameters violate (N - phi)lB < A < N")]
    BadProofParameters,
    #[error("with-check mode requires the public multiplier point")]
    MissingCheckPoint,
    #[error("malformed encoding: {0}")]
    Malformed(&'static str),
    #[error("authenticated decryption failed")]
    DecryptionFailed,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Machine-readable protocol abort reasons. Every detectable misbehaviour or
/// failure maps to exactly one code so transcripts and exit statuses can be
/// asserted mechanically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbortReason {
    CommitmentMismatch,
    VssShareInvalid,
    VssCommitmentInconsistent,
    SchnorrProofInvalid,
    FactorizationProofInvalid,
    RangeProofInvalid,
    RangeProofMissing,
    PhaseProofInvalid,
    MutualCheckFailed,
    FinalSignatureInvalid,
    DeltaNotInvertible,
    NonceRestart,
    RecoveryDecryptionFailed,
    RecoveryDataInconsistent,
    PaillierKeyInvalid,
    MalformedMessage,
    UnexpectedMessage,
    PeerMessageMissing,
    Timeout,
    ConnectionLost,
    FrameTooLarge,
    SessionMismatch,
    Internal,
}

impl AbortReason {
    /// Stable snake_case code, used in CLI output and transcript assertions.
    pub fn code(&self) -> &'static str {
        match self {
            AbortReason::CommitmentMismatch => "commitment_mismatch",
            AbortReason::VssShareInvalid => "vss_share_invalid",
            AbortReason::VssCommitmentInconsistent => "vss_commitment_inconsistent",
            AbortReason::SchnorrProofInvalid => "schnorr_proof_invalid",
            AbortReason::FactorizationProofInvalid => "factorization_proof_invalid",
            AbortReason::RangeProofInvalid => "range_proof_invalid",
            AbortReason::RangeProofMissing => "range_proof_missing",
            AbortReason::PhaseProofInvalid => "phase_proof_invalid",
            AbortReason::MutualCheckFailed => "mutual_check_failed",
            AbortReason::FinalSignatureInvalid => "final_signature_invalid",
            AbortReason::DeltaNotInvertible => "delta_not_invertible",
            AbortReason::NonceRestart => "nonce_restart",
            AbortReason::RecoveryDecryptionFailed => "recovery_decryption_failed",
            AbortReason::RecoveryDataInconsistent => "recovery_data_inconsistent",
            AbortReason::PaillierKeyInvalid => "paillier_key_invalid",
            AbortReason::MalformedMessage => "malformed_message",
            AbortReason::UnexpectedMessage => "unexpected_message",
            AbortReason::PeerMessageMissing => "peer_message_missing",
            AbortReason::Timeout => "timeout",
            AbortReason::ConnectionLost => "connection_lost",
            AbortReason::FrameTooLarge => "frame_too_large",
            AbortReason::SessionMismatch => "session_mismatch",
            AbortReason::Internal => "internal",
        }
    }

    /// Aborts caused by a zero r, s or delta are bad luck, not misbehaviour;
    /// the session may be restarted with fresh nonces.
    pub fn is_restartable(&self) -> bool {
        matches!(self, AbortReason::NonceRestart)
    }
}

impl std::fmt::Display for AbortReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

impl std::error::Error for AbortReason {}
