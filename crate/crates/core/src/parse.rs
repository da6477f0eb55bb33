//! The human-readable file formats.
//!
//! `.eds` holds the ED text: deterministic stretches as bare symbols and
//! non-deterministic segments as brace groups, e.g.
//! `G{AA,AG,}A{CTG,CAA,AC}A{G,}CA`. An empty entry inside a group denotes ε.
//! A brace group with a single non-empty entry is accepted on input and
//! treated as deterministic.
//!
//! `.edss` holds the sources: one outer brace group per non-deterministic
//! segment, e.g. `{0}{{0,2}{3}}`. A bare integer list means the segment has a
//! single explicit set (two variants); otherwise nested groups give one set
//! per non-reference variant. Indexes are ascending and 0-based.
//!
//! Both formats are byte-oriented ASCII. Newlines and carriage returns
//! between segments are ignored; any other whitespace is an error. Lowercase
//! symbols are folded to uppercase.

use crate::alphabet::Alphabet;
use crate::bitset::SourceSet;
use crate::error::ModelError;
use crate::sources::SourceSequence;
use crate::text::{EDText, Segment};
use thiserror::Error;

/// A parse failure, with the byte offset it was detected at.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("byte {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn new(offset: usize, kind: ParseErrorKind) -> Self {
        ParseError { offset, kind }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unterminated brace group")]
    UnterminatedBrace,
    #[error("empty braces")]
    EmptyBraces,
    #[error("illegal symbol 0x{0:02X}")]
    IllegalSymbol(u8),
    #[error("closing brace outside a group")]
    UnexpectedClosingBrace,
    #[error("comma outside a group")]
    UnexpectedComma,
    #[error("duplicate variant within a segment")]
    DuplicateVariant,
    #[error("expected a brace group")]
    ExpectedGroup,
    #[error("expected a digit")]
    ExpectedDigit,
    #[error("sources give {found} groups but the text has {expected} non-deterministic segments")]
    GroupCountMismatch { expected: usize, found: usize },
    #[error("segment needs {expected} explicit sets, got {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("index {index} out of range for {individuals} individuals")]
    IndexOutOfRange { index: u64, individuals: usize },
    #[error("indexes within a set must be strictly increasing")]
    NonIncreasingIndex,
    #[error("{0}")]
    Model(ModelError),
}

/// Parses an `.eds` byte stream over the default DNA alphabet.
pub fn parse_ed_text(input: &[u8]) -> Result<EDText, ParseError> {
    parse_ed_text_with(input, &Alphabet::dna())
}

/// Parses an `.eds` byte stream over a caller-chosen alphabet.
pub fn parse_ed_text_with(input: &[u8], alphabet: &Alphabet) -> Result<EDText, ParseError> {
    let mut segments = Vec::new();
    let mut run: Vec<u8> = Vec::new();
    let mut i = 0;

    let flush_run = |segments: &mut Vec<Segment>, run: &mut Vec<u8>| {
        if !run.is_empty() {
            segments.push(Segment::deterministic(std::mem::take(run)).expect("run non-empty"));
        }
    };

    while i < input.len() {
        match input[i] {
            b'\n' | b'\r' => i += 1,
            b'{' => {
                flush_run(&mut segments, &mut run);
                let open = i;
                i += 1;
                let mut variants: Vec<Vec<u8>> = Vec::new();
                let mut entry: Vec<u8> = Vec::new();
                let mut closed = false;
                while i < input.len() {
                    match input[i] {
                        b',' => {
                            variants.push(std::mem::take(&mut entry));
                            i += 1;
                        }
                        b'}' => {
                            variants.push(std::mem::take(&mut entry));
                            i += 1;
                            closed = true;
                            break;
                        }
                        c => {
                            let up = c.to_ascii_uppercase();
                            if !alphabet.contains(up) {
                                return Err(ParseError::new(i, ParseErrorKind::IllegalSymbol(c)));
                            }
                            entry.push(up);
                            i += 1;
                        }
                    }
                }
                if !closed {
                    return Err(ParseError::new(open, ParseErrorKind::UnterminatedBrace));
                }
                if variants.len() == 1 {
                    let single = variants.pop().expect("one entry");
                    if single.is_empty() {
                        return Err(ParseError::new(open, ParseErrorKind::EmptyBraces));
                    }
                    segments.push(Segment::deterministic(single).expect("non-empty"));
                } else {
                    let seg = Segment::non_deterministic(variants).map_err(|e| {
                        let kind = match e {
                            ModelError::DuplicateVariant => ParseErrorKind::DuplicateVariant,
                            other => ParseErrorKind::Model(other),
                        };
                        ParseError::new(open, kind)
                    })?;
                    segments.push(seg);
                }
            }
            b'}' => return Err(ParseError::new(i, ParseErrorKind::UnexpectedClosingBrace)),
            b',' => return Err(ParseError::new(i, ParseErrorKind::UnexpectedComma)),
            c => {
                let up = c.to_ascii_uppercase();
                if !alphabet.contains(up) {
                    return Err(ParseError::new(i, ParseErrorKind::IllegalSymbol(c)));
                }
                run.push(up);
                i += 1;
            }
        }
    }
    flush_run(&mut segments, &mut run);
    EDText::new(segments, alphabet.clone())
        .map_err(|e| ParseError::new(input.len(), ParseErrorKind::Model(e)))
}

/// Writes the canonical `.eds` form: deterministic segments as bare symbols,
/// non-deterministic segments as brace groups with variants in stored order
/// and ε as an empty entry.
pub fn write_ed_text(text: &EDText) -> Vec<u8> {
    let mut out = Vec::with_capacity(text.stats().size + 2 * text.len());
    for seg in text.segments() {
        if seg.is_deterministic() {
            out.extend_from_slice(&seg.variants()[0]);
        } else {
            out.push(b'{');
            for (vi, v) in seg.variants().iter().enumerate() {
                if vi > 0 {
                    out.push(b',');
                }
                out.extend_from_slice(v);
            }
            out.push(b'}');
        }
    }
    out
}

struct SourceCursor<'a> {
    input: &'a [u8],
    pos: usize,
}

impl<'a> SourceCursor<'a> {
    fn skip_newlines(&mut self) {
        while let Some(&c) = self.input.get(self.pos) {
            if c == b'\n' || c == b'\r' {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    /// Parses a comma-separated ascending index list terminated by `}`
    /// (consumed). An empty list yields the empty set.
    fn index_list(&mut self, individuals: usize) -> Result<SourceSet, ParseError> {
        let mut set = SourceSet::empty(individuals);
        let mut last: Option<u64> = None;
        loop {
            match self.peek() {
                Some(b'}') => {
                    if last.is_none() {
                        // `{}`: the empty set
                        self.pos += 1;
                        return Ok(set);
                    }
                    self.pos += 1;
                    return Ok(set);
                }
                Some(c) if c.is_ascii_digit() => {
                    let value = self.number()?;
                    if let Some(prev) = last {
                        if value <= prev {
                            return Err(ParseError::new(
                                self.pos,
                                ParseErrorKind::NonIncreasingIndex,
                            ));
                        }
                    }
                    if value >= individuals as u64 {
                        return Err(ParseError::new(
                            self.pos,
                            ParseErrorKind::IndexOutOfRange {
                                index: value,
                                individuals,
                            },
                        ));
                    }
                    set.insert(value as usize);
                    last = Some(value);
                    match self.peek() {
                        Some(b',') => {
                            self.pos += 1;
                            if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                                return Err(ParseError::new(
                                    self.pos,
                                    ParseErrorKind::ExpectedDigit,
                                ));
                            }
                        }
                        Some(b'}') => {}
                        Some(_) | None => {
                            return Err(ParseError::new(
                                self.pos,
                                ParseErrorKind::UnterminatedBrace,
                            ));
                        }
                    }
                }
                Some(_) => {
                    return Err(ParseError::new(self.pos, ParseErrorKind::ExpectedDigit));
                }
                None => {
                    return Err(ParseError::new(self.pos, ParseErrorKind::UnterminatedBrace));
                }
            }
        }
    }

    fn number(&mut self) -> Result<u64, ParseError> {
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                value = value
                    .saturating_mul(10)
                    .saturating_add(u64::from(c - b'0'));
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(ParseError::new(start, ParseErrorKind::ExpectedDigit));
        }
        Ok(value)
    }
}

/// Parses an `.edss` byte stream for `individuals` individuals against the
/// companion text (which supplies group count and per-segment arities).
pub fn parse_sources_text(
    input: &[u8],
    individuals: usize,
    text: &EDText,
) -> Result<SourceSequence, ParseError> {
    if individuals == 0 || individuals > crate::sources::MAX_INDIVIDUALS {
        return Err(ParseError::new(
            0,
            ParseErrorKind::Model(ModelError::IndividualsOutOfRange(individuals)),
        ));
    }
    let expected_groups = text.nd_count();
    let mut cur = SourceCursor { input, pos: 0 };
    let mut entries: Vec<Vec<SourceSet>> = Vec::with_capacity(expected_groups);

    for ord in 0..expected_groups {
        cur.skip_newlines();
        let open = cur.pos;
        match cur.peek() {
            Some(b'{') => cur.pos += 1,
            Some(_) => return Err(ParseError::new(cur.pos, ParseErrorKind::ExpectedGroup)),
            None => {
                return Err(ParseError::new(
                    cur.pos,
                    ParseErrorKind::GroupCountMismatch {
                        expected: expected_groups,
                        found: ord,
                    },
                ));
            }
        }
        let segment_index = text.nd_segment_index(ord).expect("ordinal in range");
        let expected_sets = text.segment(segment_index).variant_count() - 1;
        let mut sets: Vec<SourceSet> = Vec::with_capacity(expected_sets);
        if matches!(cur.peek(), Some(b'{')) {
            // nested form: one inner group per explicit set
            while matches!(cur.peek(), Some(b'{')) {
                cur.pos += 1;
                sets.push(cur.index_list(individuals)?);
            }
            match cur.peek() {
                Some(b'}') => cur.pos += 1,
                Some(_) => {
                    return Err(ParseError::new(cur.pos, ParseErrorKind::ExpectedGroup));
                }
                None => {
                    return Err(ParseError::new(open, ParseErrorKind::UnterminatedBrace));
                }
            }
        } else {
            // bare form: a single explicit set
            sets.push(cur.index_list(individuals)?);
        }
        if sets.len() != expected_sets {
            return Err(ParseError::new(
                open,
                ParseErrorKind::ArityMismatch {
                    expected: expected_sets,
                    found: sets.len(),
                },
            ));
        }
        entries.push(sets);
    }
    cur.skip_newlines();
    if cur.pos != input.len() {
        // count how many extra groups follow for the error message
        let mut found = expected_groups;
        let mut probe = cur.pos;
        while probe < input.len() {
            if input[probe] == b'{' {
                found += 1;
                let mut depth = 1;
                probe += 1;
                while probe < input.len() && depth > 0 {
                    match input[probe] {
                        b'{' => depth += 1,
                        b'}' => depth -= 1,
                        _ => {}
                    }
                    probe += 1;
                }
            } else {
                probe += 1;
            }
        }
        return Err(ParseError::new(
            cur.pos,
            ParseErrorKind::GroupCountMismatch {
                expected: expected_groups,
                found,
            },
        ));
    }
    SourceSequence::new(individuals, entries)
        .map_err(|e| ParseError::new(input.len(), ParseErrorKind::Model(e)))
}

/// Writes the `.edss` form: a bare index list when an entry has exactly one
/// non-empty explicit set, nested groups otherwise.
pub fn write_sources_text(sources: &SourceSequence) -> Vec<u8> {
    let mut out = Vec::new();
    for entry in sources.entries() {
        out.push(b'{');
        let bare = entry.len() == 1 && !entry[0].is_empty();
        for set in entry {
            if !bare {
                out.push(b'{');
            }
            let mut first = true;
            for idx in set.iter() {
                if !first {
                    out.push(b',');
                }
                first = false;
                out.extend_from_slice(idx.to_string().as_bytes());
            }
            if !bare {
                out.push(b'}');
            }
        }
        out.push(b'}');
    }
    out
}
