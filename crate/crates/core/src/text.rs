//! The elastic-degenerate text model: segments, the text, derived counts.

use crate::alphabet::Alphabet;
use crate::error::ModelError;

/// One segment of an ED text: either deterministic (exactly one non-empty
/// variant) or non-deterministic (two or more pairwise-distinct variants, of
/// which at most one may be the empty string ε).
#[derive(Clone, PartialEq, Eq)]
pub struct Segment {
    variants: Vec<Vec<u8>>,
}

impl Segment {
    /// A deterministic segment holding `text` as its single variant.
    pub fn deterministic(text: impl Into<Vec<u8>>) -> Result<Self, ModelError> {
        let text = text.into();
        if text.is_empty() {
            return Err(ModelError::EmptyDeterministic);
        }
        Ok(Segment {
            variants: vec![text],
        })
    }

    /// A non-deterministic segment over the given variants, kept in order.
    /// An empty variant denotes ε.
    pub fn non_deterministic(variants: Vec<Vec<u8>>) -> Result<Self, ModelError> {
        match variants.len() {
            0 => return Err(ModelError::EmptySegment),
            1 => return Err(ModelError::TooFewVariants),
            _ => {}
        }
        let mut seen: Vec<&[u8]> = variants.iter().map(|v| v.as_slice()).collect();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(ModelError::DuplicateVariant);
        }
        Ok(Segment { variants })
    }

    #[inline]
    pub fn is_deterministic(&self) -> bool {
        self.variants.len() == 1
    }

    #[inline]
    pub fn variants(&self) -> &[Vec<u8>] {
        &self.variants
    }

    #[inline]
    pub fn variant_count(&self) -> usize {
        self.variants.len()
    }

    pub fn has_epsilon(&self) -> bool {
        self.variants.iter().any(|v| v.is_empty())
    }

    /// Character count of the segment, with ε counted as 1.
    pub fn size(&self) -> usize {
        self.variants.iter().map(|v| v.len().max(1)).sum()
    }
}

impl std::fmt::Debug for Segment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_deterministic() {
            write!(f, "{}", String::from_utf8_lossy(&self.variants[0]))
        } else {
            write!(f, "{{")?;
            for (i, v) in self.variants.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", String::from_utf8_lossy(v))?;
            }
            write!(f, "}}")
        }
    }
}

/// Segment and character counts of an ED text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stats {
    /// Number of segments (the text's length, n).
    pub segments: usize,
    /// Total character count with ε counted as 1 (the text's size, N).
    pub size: usize,
    /// Number of non-deterministic segments (n′).
    pub nd_segments: usize,
    /// Number of deterministic segments (n″).
    pub det_segments: usize,
}

/// An elastic-degenerate text: an ordered sequence of segments over an
/// alphabet. A path through the text picks one variant per segment and
/// concatenates them.
///
/// Immutable after construction; safe to share across concurrent readers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EDText {
    segments: Vec<Segment>,
    alphabet: Alphabet,
    stats: Stats,
    // segment index per non-deterministic ordinal, and the reverse map
    // (usize::MAX marks deterministic segments).
    nd_to_segment: Vec<usize>,
    segment_to_nd: Vec<usize>,
}

impl EDText {
    /// Validates every variant symbol against `alphabet` and builds the text.
    pub fn new(segments: Vec<Segment>, alphabet: Alphabet) -> Result<Self, ModelError> {
        let mut nd_to_segment = Vec::new();
        let mut segment_to_nd = vec![usize::MAX; segments.len()];
        let mut size = 0;
        for (si, seg) in segments.iter().enumerate() {
            for v in seg.variants() {
                for &c in v {
                    if !alphabet.contains(c) {
                        return Err(ModelError::IllegalSymbol(c, si));
                    }
                }
            }
            size += seg.size();
            if !seg.is_deterministic() {
                segment_to_nd[si] = nd_to_segment.len();
                nd_to_segment.push(si);
            }
        }
        let stats = Stats {
            segments: segments.len(),
            size,
            nd_segments: nd_to_segment.len(),
            det_segments: segments.len() - nd_to_segment.len(),
        };
        Ok(EDText {
            segments,
            alphabet,
            stats,
            nd_to_segment,
            segment_to_nd,
        })
    }

    #[inline]
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    #[inline]
    pub fn segment(&self, index: usize) -> &Segment {
        &self.segments[index]
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Number of segments (n).
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Segment and character counts: n, N, n′, n″.
    pub fn stats(&self) -> Stats {
        self.stats
    }

    /// Number of non-deterministic segments (n′).
    pub fn nd_count(&self) -> usize {
        self.nd_to_segment.len()
    }

    /// Ordinal of `segment_index` among the non-deterministic segments, if it
    /// is one.
    pub fn nd_ordinal(&self, segment_index: usize) -> Option<usize> {
        match self.segment_to_nd.get(segment_index) {
            Some(&ord) if ord != usize::MAX => Some(ord),
            _ => None,
        }
    }

    /// Segment index of the `ordinal`-th non-deterministic segment.
    pub fn nd_segment_index(&self, ordinal: usize) -> Option<usize> {
        self.nd_to_segment.get(ordinal).copied()
    }
}
