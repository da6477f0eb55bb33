//! Brute-force ground truth for the search pipeline, used by the test
//! suites: per-individual haplotype materialization with coordinate maps,
//! and exhaustive path enumeration.
//!
//! Nothing here shares code with the search engine or the verifier — the
//! haystacks are concatenated explicitly and scanned naively — so agreement
//! between the two is evidence, not tautology.

use crate::bitset::SourceSet;
use crate::search::MatchCandidate;
use crate::sources::SourceSequence;
use crate::text::EDText;
use crate::verify::{VerificationResult, VerifiedMatch};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Path-enumeration guard: instances with more paths than this are rejected.
pub const MAX_PATHS: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("individual {0} out of range for {1} individuals")]
    IndividualOutOfRange(usize, usize),
    #[error("sources do not pair with the text (entry count or arity)")]
    SourcesMismatch,
    #[error("instance has {0} paths, more than the enumeration guard {MAX_PATHS}")]
    TooManyPaths(u128),
}

/// The linear sequence of one individual, with a map from every sequence
/// position back to the (segment, variant, offset) it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Haplotype {
    pub individual: usize,
    pub sequence: Vec<u8>,
    pub coords: Vec<MatchCandidate>,
}

/// Concatenates, per segment, the deterministic text or the unique variant
/// whose explicit or implied source set contains `individual`. ε variants
/// contribute no symbols (and hence own no coordinates).
pub fn materialize_haplotype(
    text: &EDText,
    sources: &SourceSequence,
    individual: usize,
) -> Result<Haplotype, OracleError> {
    if individual >= sources.individuals() {
        return Err(OracleError::IndividualOutOfRange(
            individual,
            sources.individuals(),
        ));
    }
    if sources.nd_count() != text.nd_count() {
        return Err(OracleError::SourcesMismatch);
    }
    let mut sequence = Vec::new();
    let mut coords = Vec::new();
    for (si, seg) in text.segments().iter().enumerate() {
        let (vi, variant) = if seg.is_deterministic() {
            (None, seg.variants()[0].as_slice())
        } else {
            let ord = text.nd_ordinal(si).expect("non-deterministic segment");
            let entry = sources.entry(ord);
            if entry.len() + 1 != seg.variant_count() {
                return Err(OracleError::SourcesMismatch);
            }
            let vi = entry
                .iter()
                .position(|set| set.contains(individual))
                .unwrap_or(entry.len()); // reference variant
            (Some(vi), seg.variants()[vi].as_slice())
        };
        for (offset, &c) in variant.iter().enumerate() {
            sequence.push(c);
            coords.push(MatchCandidate {
                segment: si,
                variant: vi,
                offset,
            });
        }
    }
    Ok(Haplotype {
        individual,
        sequence,
        coords,
    })
}

/// All end positions of `needle` in `haystack`, found by naive scanning.
fn scan_ends<'a>(haystack: &'a [u8], needle: &'a [u8]) -> impl Iterator<Item = usize> + 'a {
    let m = needle.len();
    (0..haystack.len().saturating_sub(m - 1))
        .filter(move |&q| &haystack[q..q + m] == needle)
        .map(move |q| q + m - 1)
}

/// Ground truth for full-mode search: scans every individual's haplotype,
/// maps match ends back through the coordinate map, and groups individuals
/// by end position. Output is sorted in candidate order.
pub fn oracle_search(
    text: &EDText,
    sources: &SourceSequence,
    pattern: &[u8],
) -> Result<Vec<VerifiedMatch>, OracleError> {
    let individuals = sources.individuals();
    let mut grouped: BTreeMap<MatchCandidate, SourceSet> = BTreeMap::new();
    for j in 0..individuals {
        let hap = materialize_haplotype(text, sources, j)?;
        if pattern.is_empty() || hap.sequence.len() < pattern.len() {
            continue;
        }
        for end in scan_ends(&hap.sequence, pattern) {
            grouped
                .entry(hap.coords[end])
                .or_insert_with(|| SourceSet::empty(individuals))
                .insert(j);
        }
    }
    Ok(grouped
        .into_iter()
        .map(|(candidate, set)| VerifiedMatch {
            candidate,
            result: VerificationResult {
                genuine: true,
                sources: Some(set),
            },
        })
        .collect())
}

/// Ground truth for stage 1: enumerates every variant choice, scans each
/// concatenation, and maps ends back. Guarded against large instances.
pub fn oracle_candidates(
    text: &EDText,
    pattern: &[u8],
) -> Result<Vec<MatchCandidate>, OracleError> {
    let mut paths: u128 = 1;
    let nd_segments: Vec<usize> = (0..text.nd_count())
        .map(|ord| text.nd_segment_index(ord).expect("ordinal in range"))
        .collect();
    for &si in &nd_segments {
        paths = paths.saturating_mul(text.segment(si).variant_count() as u128);
        if paths > MAX_PATHS {
            return Err(OracleError::TooManyPaths(paths));
        }
    }

    let mut out: BTreeSet<MatchCandidate> = BTreeSet::new();
    let mut choice = vec![0usize; nd_segments.len()];
    loop {
        // build this path's string and coordinate map
        let mut sequence = Vec::new();
        let mut coords = Vec::new();
        for (si, seg) in text.segments().iter().enumerate() {
            let (vi, variant) = if seg.is_deterministic() {
                (None, seg.variants()[0].as_slice())
            } else {
                let ord = text.nd_ordinal(si).expect("non-deterministic segment");
                (Some(choice[ord]), seg.variants()[choice[ord]].as_slice())
            };
            for (offset, &c) in variant.iter().enumerate() {
                sequence.push(c);
                coords.push(MatchCandidate {
                    segment: si,
                    variant: vi,
                    offset,
                });
            }
        }
        if !pattern.is_empty() && sequence.len() >= pattern.len() {
            for end in scan_ends(&sequence, pattern) {
                out.insert(coords[end]);
            }
        }

        // advance the odometer
        let mut advanced = false;
        for (ord, slot) in choice.iter_mut().enumerate() {
            let count = text.segment(nd_segments[ord]).variant_count();
            if *slot + 1 < count {
                *slot += 1;
                advanced = true;
                break;
            }
            *slot = 0;
        }
        if !advanced {
            break;
        }
    }
    Ok(out.into_iter().collect())
}
