use thiserror::Error;

/// Violations of the structural invariants of the in-memory model, raised by
/// the constructors of [`crate::Segment`], [`crate::EDText`] and
/// [`crate::SourceSequence`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("segment has no variants")]
    EmptySegment,
    #[error("a deterministic segment's variant must be non-empty")]
    EmptyDeterministic,
    #[error("a non-deterministic segment needs at least two variants")]
    TooFewVariants,
    #[error("duplicate variant within a segment")]
    DuplicateVariant,
    #[error("symbol 0x{0:02X} in segment {1} is not in the alphabet")]
    IllegalSymbol(u8, usize),
    #[error("individual count {0} out of range 1..=16383")]
    IndividualsOutOfRange(usize),
    #[error("source set width {found} does not match individual count {expected}")]
    SetWidthMismatch { expected: usize, found: usize },
    #[error("non-deterministic segment ordinal {0} out of range (have {1})")]
    NdOrdinalOutOfRange(usize, usize),
}
