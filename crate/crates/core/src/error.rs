use thiserror::Error;

/// Errors raised by the threshold trapdoor toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus is not an odd prime")]
    NotPrime,
    #[error("operands live in different moduli")]
    ModulusMismatch,
    #[error("group parameters differ between operands")]
    ParamsMismatch,
    #[error("element has no inverse")]
    NotInvertible,
    #[error("interpolation node {0} appears twice")]
    DuplicateNode(u64),
    #[error("lagrange coefficient bound violated: {0}")]
    BoundViolation(String),
    #[error("bad threshold: need 2 <= t <= n < modulus (t = {t}, n = {n})")]
    BadThreshold { n: u64, t: usize },
    #[error("identity 0 is reserved for the secret")]
    ZeroIdentity,
    #[error("identity {id} outside the identity space [1, {max}]")]
    IdentityOutOfRange { id: u64, max: u64 },
    #[error("expected {expected} shares, got {got}")]
    WrongCount { expected: usize, got: usize },
    #[error("target identity {0} collides with a provided share")]
    TargetCollision(u64),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("output width {out_bits} exceeds input width {in_bits}")]
    OutTooWide { in_bits: usize, out_bits: usize },
    #[error("insufficient entropy: lossiness {k} bits cannot support extraction at 2^-{epsilon_log2}")]
    InsufficientEntropy { k: usize, epsilon_log2: usize },
    #[error("value is not in the order-p subgroup")]
    NotInGroup,
    #[error("value is not in the image of the function")]
    NotInImage,
    #[error("inconsistent parameters: {0}")]
    InconsistentParams(String),
    #[error("share scale {0} is not 1")]
    ScaleMismatch(String),
    #[error("identity {0} is revoked in this ciphertext")]
    RevokedKey(u64),
    #[error("identity {0} is reserved for padding")]
    ReservedIdentity(u64),
    #[error("scheme tag mismatch: expected {expected:#04x}, got {got:#04x}")]
    SchemeMismatch { expected: u8, got: u8 },
    #[error("decode error: {0}")]
    Decode(String),
}

pub type Result<T> = std::result::Result<T, Error>;
