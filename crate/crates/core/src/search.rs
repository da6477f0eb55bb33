//! Stage 1: bit-parallel Shift-Or over the ED text.
//!
//! The state vector keeps one bit per pattern prefix; a clear bit `i` means
//! the prefix of length `i+1` currently matches. Deterministic segments are
//! scanned in a straight line. A non-deterministic segment runs each variant
//! from a copy of the incoming state, and the outgoing state is the AND of
//! the per-variant results: clear bits survive if any variant keeps them
//! alive, ε contributing the incoming state unchanged.
//!
//! Candidates emitted here are end positions of occurrences along *any* path
//! through the text, including paths no individual realizes; the verify
//! stage rejects those.

use crate::alphabet::Alphabet;
use crate::text::EDText;
use thiserror::Error;

/// Bit width of the state vector, and the maximum supported pattern length.
pub const WORD_SIZE: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("pattern is empty")]
    Empty,
    #[error("pattern length {len} exceeds the word size {max}")]
    TooLong { len: usize, max: usize },
    #[error("pattern symbol 0x{0:02X} is not in the alphabet")]
    IllegalSymbol(u8),
}

/// A validated search pattern of length 1..=[`WORD_SIZE`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    symbols: Vec<u8>,
}

impl Pattern {
    pub fn new(symbols: impl Into<Vec<u8>>, alphabet: &Alphabet) -> Result<Self, PatternError> {
        Pattern::with_word_size(symbols, alphabet, WORD_SIZE)
    }

    /// Like [`Pattern::new`] but capping the length at `word_size`
    /// (at most [`WORD_SIZE`]). Patterns longer than the word size are
    /// rejected rather than split across words.
    pub fn with_word_size(
        symbols: impl Into<Vec<u8>>,
        alphabet: &Alphabet,
        word_size: usize,
    ) -> Result<Self, PatternError> {
        let symbols = symbols.into();
        let max = word_size.min(WORD_SIZE);
        if symbols.is_empty() {
            return Err(PatternError::Empty);
        }
        if symbols.len() > max {
            return Err(PatternError::TooLong {
                len: symbols.len(),
                max,
            });
        }
        if let Some(&bad) = symbols.iter().find(|&&c| !alphabet.contains(c)) {
            return Err(PatternError::IllegalSymbol(bad));
        }
        Ok(Pattern { symbols })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false // never: constructors reject empty patterns
    }

    #[inline]
    pub fn as_bytes(&self) -> &[u8] {
        &self.symbols
    }
}

/// Per-symbol Shift-Or masks: bit `i` of `mask(c)` is clear iff the pattern
/// has `c` at position `i`. Symbols absent from the pattern map to the
/// all-ones mask.
pub struct MaskTable {
    masks: [u64; 256],
    len: usize,
}

impl MaskTable {
    pub fn build(pattern: &Pattern) -> Self {
        let mut masks = [!0u64; 256];
        for (i, &c) in pattern.as_bytes().iter().enumerate() {
            masks[c as usize] &= !(1u64 << i);
        }
        MaskTable {
            masks,
            len: pattern.len(),
        }
    }

    #[inline]
    pub fn mask(&self, symbol: u8) -> u64 {
        self.masks[symbol as usize]
    }

    /// The bit that signals a full match after a step.
    #[inline]
    pub fn accept_bit(&self) -> u64 {
        1u64 << (self.len - 1)
    }
}

/// An end position reported by stage 1: the last matched symbol sits at
/// `offset` within the given variant (`variant` is `None` in deterministic
/// segments). Ordered by text position, then variant, then offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MatchCandidate {
    pub segment: usize,
    pub variant: Option<usize>,
    pub offset: usize,
}

impl MatchCandidate {
    pub fn deterministic(segment: usize, offset: usize) -> Self {
        MatchCandidate {
            segment,
            variant: None,
            offset,
        }
    }

    pub fn in_variant(segment: usize, variant: usize, offset: usize) -> Self {
        MatchCandidate {
            segment,
            variant: Some(variant),
            offset,
        }
    }
}

impl std::fmt::Display for MatchCandidate {
    /// `segment:variant:offset`, with `-` for deterministic segments.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.variant {
            Some(v) => write!(f, "{}:{}:{}", self.segment, v, self.offset),
            None => write!(f, "{}:-:{}", self.segment, self.offset),
        }
    }
}

/// Runs Shift-Or over the whole text and returns every candidate end
/// position, in text order, then variant order, then offset order.
pub fn search_ed(text: &EDText, pattern: &Pattern) -> Vec<MatchCandidate> {
    let masks = MaskTable::build(pattern);
    let accept = masks.accept_bit();
    let mut out = Vec::new();
    let mut state = !0u64;
    for (si, seg) in text.segments().iter().enumerate() {
        if seg.is_deterministic() {
            for (offset, &c) in seg.variants()[0].iter().enumerate() {
                state = (state << 1) | masks.mask(c);
                if state & accept == 0 {
                    out.push(MatchCandidate::deterministic(si, offset));
                }
            }
        } else {
            let incoming = state;
            let mut merged = !0u64;
            for (vi, variant) in seg.variants().iter().enumerate() {
                let mut local = incoming;
                for (offset, &c) in variant.iter().enumerate() {
                    local = (local << 1) | masks.mask(c);
                    if local & accept == 0 {
                        out.push(MatchCandidate::in_variant(si, vi, offset));
                    }
                }
                merged &= local;
            }
            state = merged;
        }
    }
    out
}
