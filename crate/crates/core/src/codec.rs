//! The binary sources format (`.edsc`).
//!
//! Layout: the magic `EDS1`, the individual count, then one block per
//! non-deterministic segment. Each block starts with the flag byte `0xFF`,
//! followed by one run per explicit set: the member count, the first index
//! as-is, and every further index as the (strictly positive) difference from
//! its predecessor. Reference sets are never stored.
//!
//! Numbers occupy one byte (`0x00..=0x7F`) for values up to 127 and two
//! bytes otherwise, with lead bytes `0x80..=0xBF`. The byte `0xFF` is
//! reserved for the segment flag and never appears inside a number, so a
//! block start is unambiguous; this caps the representable value at 16,383
//! and hence the individual count.
//!
//! The stream may additionally be wrapped in a zstd frame; readers
//! auto-detect the frame by its magic number and accept the raw stream
//! transparently.

use crate::bitset::SourceSet;
use crate::error::ModelError;
use crate::sources::SourceSequence;
use crate::text::EDText;
use std::borrow::Cow;
use thiserror::Error;

/// Magic prefix of the raw binary stream.
pub const MAGIC: [u8; 4] = *b"EDS1";
/// Marks the start of a segment block.
pub const SEGMENT_FLAG: u8 = 0xFF;
/// Largest value the number encoding can carry.
pub const MAX_NUMBER: u16 = 16_383;
/// Magic prefix of a zstd frame (RFC 8878).
pub const ZSTD_MAGIC: [u8; 4] = [0x28, 0xB5, 0x2F, 0xFD];

// Two-byte numbers hold 128 + (lead − 0x80) · 255 + trailer, with the
// trailer in 0x00..=0xFE. Keeping 0xFF out of the trailer is what reserves
// the flag byte.
const TWO_BYTE_BASE: u16 = 128;
const TRAILER_RANGE: u16 = 255;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("value {0} exceeds the encodable maximum {MAX_NUMBER}")]
    ValueOutOfRange(u32),
    #[error("invalid number lead byte 0x{0:02X}")]
    InvalidLeadByte(u8),
    #[error("invalid number trailer byte 0x{0:02X}")]
    InvalidTrailerByte(u8),
    #[error("truncated stream")]
    Truncated,
    #[error("bad magic: expected EDS1")]
    BadMagic,
    #[error("expected segment flag 0xFF, found 0x{found:02X} (segment {segment})")]
    FlagMismatch { segment: usize, found: u8 },
    #[error("indexes must be strictly increasing (zero delta in segment {segment})")]
    NonIncreasingIndex { segment: usize },
    #[error("index {index} out of range for {individuals} individuals")]
    IndexOutOfRange { index: u32, individuals: usize },
    #[error("trailing bytes after the last segment")]
    TrailingBytes,
    #[error("{0}")]
    Model(#[from] ModelError),
    #[error("zstd: {0}")]
    Zstd(#[from] std::io::Error),
}

/// Appends the 1–2 byte encoding of `value` (0..=16,383) to `out`.
pub fn encode_number(value: u16, out: &mut Vec<u8>) -> Result<(), CodecError> {
    if value > MAX_NUMBER {
        return Err(CodecError::ValueOutOfRange(u32::from(value)));
    }
    if value < TWO_BYTE_BASE {
        out.push(value as u8);
    } else {
        let t = value - TWO_BYTE_BASE;
        out.push(0x80 + (t / TRAILER_RANGE) as u8);
        out.push((t % TRAILER_RANGE) as u8);
    }
    Ok(())
}

/// Decodes one number from the front of `bytes`, returning it and the byte
/// count consumed.
pub fn decode_number(bytes: &[u8]) -> Result<(u16, usize), CodecError> {
    let &lead = bytes.first().ok_or(CodecError::Truncated)?;
    match lead {
        0x00..=0x7F => Ok((u16::from(lead), 1)),
        0x80..=0xBF => {
            let &trailer = bytes.get(1).ok_or(CodecError::Truncated)?;
            if trailer == SEGMENT_FLAG {
                return Err(CodecError::InvalidTrailerByte(trailer));
            }
            let value =
                TWO_BYTE_BASE + u16::from(lead - 0x80) * TRAILER_RANGE + u16::from(trailer);
            if value > MAX_NUMBER {
                return Err(CodecError::ValueOutOfRange(u32::from(value)));
            }
            Ok((value, 2))
        }
        _ => Err(CodecError::InvalidLeadByte(lead)),
    }
}

/// Encodes a source sequence into the raw binary stream.
pub fn encode_sources(sources: &SourceSequence) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 4 * sources.nd_count());
    out.extend_from_slice(&MAGIC);
    // the constructor caps the individual count at MAX_NUMBER
    encode_number(sources.individuals() as u16, &mut out).expect("individual count in range");
    for entry in sources.entries() {
        out.push(SEGMENT_FLAG);
        for set in entry {
            encode_number(set.len() as u16, &mut out).expect("count in range");
            let mut prev: Option<usize> = None;
            for idx in set.iter() {
                let stored = match prev {
                    None => idx,
                    Some(p) => idx - p,
                };
                encode_number(stored as u16, &mut out).expect("index in range");
                prev = Some(idx);
            }
        }
    }
    out
}

/// Decodes a raw binary stream against the companion text, which supplies
/// the block count and per-segment arities.
pub fn decode_sources(bytes: &[u8], text: &EDText) -> Result<SourceSequence, CodecError> {
    if bytes.len() < MAGIC.len() || bytes[..MAGIC.len()] != MAGIC {
        return Err(CodecError::BadMagic);
    }
    let mut pos = MAGIC.len();
    let (individuals, used) = decode_number(&bytes[pos..])?;
    pos += used;
    let individuals = individuals as usize;
    if individuals == 0 {
        return Err(CodecError::Model(ModelError::IndividualsOutOfRange(0)));
    }

    let mut entries = Vec::with_capacity(text.nd_count());
    for ord in 0..text.nd_count() {
        match bytes.get(pos) {
            Some(&SEGMENT_FLAG) => pos += 1,
            Some(&found) => {
                return Err(CodecError::FlagMismatch {
                    segment: ord,
                    found,
                })
            }
            None => return Err(CodecError::Truncated),
        }
        let segment_index = text.nd_segment_index(ord).expect("ordinal in range");
        let set_count = text.segment(segment_index).variant_count() - 1;
        let mut sets = Vec::with_capacity(set_count);
        for _ in 0..set_count {
            let (count, used) = decode_number(&bytes[pos..])?;
            pos += used;
            let mut set = SourceSet::empty(individuals);
            let mut prev: Option<u32> = None;
            for _ in 0..count {
                let (stored, used) = decode_number(&bytes[pos..])?;
                pos += used;
                let index = match prev {
                    None => u32::from(stored),
                    Some(p) => {
                        if stored == 0 {
                            return Err(CodecError::NonIncreasingIndex { segment: ord });
                        }
                        p + u32::from(stored)
                    }
                };
                if index as usize >= individuals {
                    return Err(CodecError::IndexOutOfRange {
                        index,
                        individuals,
                    });
                }
                set.insert(index as usize);
                prev = Some(index);
            }
            sets.push(set);
        }
        entries.push(sets);
    }
    if pos != bytes.len() {
        return Err(CodecError::TrailingBytes);
    }
    Ok(SourceSequence::new(individuals, entries)?)
}

/// Compresses a payload into a zstd frame.
pub fn wrap_container(payload: &[u8]) -> Result<Vec<u8>, CodecError> {
    Ok(zstd::stream::encode_all(payload, 3)?)
}

/// Decompresses `bytes` if they form a zstd frame; otherwise passes them
/// through unchanged.
pub fn unwrap_container(bytes: &[u8]) -> Result<Cow<'_, [u8]>, CodecError> {
    if bytes.len() >= ZSTD_MAGIC.len() && bytes[..ZSTD_MAGIC.len()] == ZSTD_MAGIC {
        Ok(Cow::Owned(zstd::stream::decode_all(bytes)?))
    } else {
        Ok(Cow::Borrowed(bytes))
    }
}
