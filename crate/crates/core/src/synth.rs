//! Deterministic generator of synthetic text/sources pairs.
//!
//! The regime matches the synthetic datasets used for throughput testing:
//! `positions` segments in total, of which a fixed fraction are
//! non-deterministic and the rest are single-letter deterministic segments.
//! Variant counts and lengths are uniform within their caps, one variant may
//! be ε, and each individual picks a uniform variant per segment.
//!
//! All randomness is drawn from per-segment ChaCha streams derived from
//! `(seed, segment index)`, so output is stable regardless of generation
//! order and byte-identical across runs.

use crate::alphabet::Alphabet;
use crate::bitset::SourceSet;
use crate::error::ModelError;
use crate::sources::{SourceSequence, MAX_INDIVIDUALS};
use crate::text::{EDText, Segment};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

const LETTERS: [u8; 4] = *b"ACGT";
// stream id reserved for choosing which positions are non-deterministic
const POSITION_STREAM: u64 = u64::MAX;
const EPSILON_PROBABILITY: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    /// Total segment count; deterministic segments hold one letter each.
    pub positions: usize,
    /// Fraction of positions that are non-deterministic (default 0.10).
    pub nd_fraction: f64,
    /// Cap on variants per non-deterministic segment (default 10).
    pub max_variants: usize,
    /// Cap on variant length (default 10).
    pub max_variant_len: usize,
    /// Individual count r.
    pub individuals: usize,
    pub seed: u64,
}

impl SynthParams {
    pub fn new(positions: usize, individuals: usize, seed: u64) -> Self {
        SynthParams {
            positions,
            nd_fraction: 0.10,
            max_variants: 10,
            max_variant_len: 10,
            individuals,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("positions must be at least 1")]
    NoPositions,
    #[error("nd_fraction must lie strictly between 0 and 1")]
    BadFraction,
    #[error("max_variants must be at least 2")]
    MaxVariantsTooSmall,
    #[error("max_variant_len must be at least 1")]
    MaxVariantLenZero,
    #[error("{0}")]
    Model(#[from] ModelError),
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Number of distinct non-empty variants available under a length cap,
/// saturating well above any realistic `max_variants`.
fn variant_space(max_len: usize) -> usize {
    let mut total = 0usize;
    let mut per_len = 1usize;
    for _ in 0..max_len.min(16) {
        per_len = per_len.saturating_mul(4);
        total = total.saturating_add(per_len);
    }
    total
}

/// Generates a text/sources pair for `params`. The same parameters always
/// produce the same pair.
pub fn generate_ed(params: &SynthParams) -> Result<(EDText, SourceSequence), SynthError> {
    if params.positions == 0 {
        return Err(SynthError::NoPositions);
    }
    if !(params.nd_fraction > 0.0 && params.nd_fraction < 1.0) {
        return Err(SynthError::BadFraction);
    }
    if params.max_variants < 2 {
        return Err(SynthError::MaxVariantsTooSmall);
    }
    if params.max_variant_len == 0 {
        return Err(SynthError::MaxVariantLenZero);
    }
    if params.individuals == 0 || params.individuals > MAX_INDIVIDUALS {
        return Err(SynthError::Model(ModelError::IndividualsOutOfRange(
            params.individuals,
        )));
    }

    let nd_count = ((params.positions as f64 * params.nd_fraction).round() as usize)
        .min(params.positions);
    let mut is_nd = vec![false; params.positions];
    let mut position_rng = rng_for(params.seed, POSITION_STREAM);
    for p in sample(&mut position_rng, params.positions, nd_count) {
        is_nd[p] = true;
    }

    let space = variant_space(params.max_variant_len);
    let mut segments = Vec::with_capacity(params.positions);
    let mut entries = Vec::with_capacity(nd_count);
    for position in 0..params.positions {
        let mut rng = rng_for(params.seed, position as u64);
        if !is_nd[position] {
            let letter = LETTERS[rng.gen_range(0..LETTERS.len())];
            segments.push(Segment::deterministic(vec![letter])?);
            continue;
        }

        let wanted = rng.gen_range(2..=params.max_variants);
        let epsilon = rng.gen_bool(EPSILON_PROBABILITY);
        // an ε variant substitutes for one of the non-empty ones
        let non_empty = if epsilon {
            (wanted - 1).max(1)
        } else {
            wanted
        }
        .min(space);
        let mut variants: Vec<Vec<u8>> = Vec::with_capacity(non_empty + 1);
        while variants.len() < non_empty {
            let len = rng.gen_range(1..=params.max_variant_len);
            let candidate: Vec<u8> =
                (0..len).map(|_| LETTERS[rng.gen_range(0..4)]).collect();
            if !variants.contains(&candidate) {
                variants.push(candidate);
            }
        }
        if epsilon {
            let slot = rng.gen_range(0..=variants.len());
            variants.insert(slot, Vec::new());
        }

        let variant_count = variants.len();
        let mut explicit = vec![SourceSet::empty(params.individuals); variant_count - 1];
        for individual in 0..params.individuals {
            let pick = rng.gen_range(0..variant_count);
            if pick < variant_count - 1 {
                explicit[pick].insert(individual);
            }
        }

        segments.push(Segment::non_deterministic(variants)?);
        entries.push(explicit);
    }

    let text = EDText::new(segments, Alphabet::dna())?;
    let sources = SourceSequence::new(params.individuals, entries)?;
    Ok((text, sources))
}
