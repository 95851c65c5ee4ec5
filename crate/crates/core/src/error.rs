use alloc::string::String;

use crate::arith::{HalfInteger, Rational};

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("degenerate module: gram matrix is singular")]
    DegenerateModule,
    #[error("vector is not in the dual lattice")]
    NotInDual,
    #[error("index mismatch: {0}")]
    IndexMismatch(String),
    #[error("element does not belong to this module")]
    ForeignElement,
    #[error("weight {weight} has the wrong parity for signature {signature}")]
    WrongParity { weight: HalfInteger, signature: u8 },
    #[error("unsupported weight {0}")]
    UnsupportedWeight(HalfInteger),
    #[error("Gauss sum phase {phase} is not within tolerance of an eighth root of unity")]
    InconsistentSignature { phase: f64 },
    #[error("numeric inconsistency: residual {residual} exceeds tolerance")]
    NumericInconsistency { residual: f64 },
    #[error("local density at p = {prime} did not stabilize by level {level}")]
    StabilizationFailure { prime: u64, level: u32 },
    #[error("cusp space exhausted: rank {rank} of {dim} after indices up to m = {cutoff}")]
    Exhaustion { rank: usize, dim: usize, cutoff: Rational },
    #[error("unsupported module: {0}")]
    UnsupportedModule(String),
    #[error("unsupported norm {0}: only norms coprime to 5 carry witnesses")]
    UnsupportedNorm(u64),
    #[error("module mismatch: {0}")]
    ModuleMismatch(String),
    #[error("input precision {prec} does not cover exponent {missing}")]
    Precision { prec: Rational, missing: Rational },
    #[error("lattice is not Lorentzian of signature (1, l-1): {0}")]
    NotLorentzian(String),
    #[error("math invariant violated: {0}")]
    Invariant(String),
    #[error("overflow: {0}")]
    Overflow(String),
}

impl Error {
    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}
