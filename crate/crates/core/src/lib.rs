//! Pattern search over an elastic-degenerate (ED) pan-genome text whose
//! non-deterministic segments carry, per variant, the set of individuals
//! (sources) the variant occurs in.
//!
//! Searching runs in two stages. A bit-parallel Shift-Or scan over the ED
//! text yields match candidates, which include end positions reachable only
//! along paths no individual realizes. A backward verification walk then
//! intersects the source sets of the variants along every path that could
//! spell the match, keeping a candidate only if at least one individual
//! carries the whole path — and, in full mode, reporting exactly which
//! individuals do.
//!
//! The crate also provides the text formats (`.eds`, `.edss`), the binary
//! sources codec (`.edsc`), a deterministic synthetic-data generator, a
//! FASTA+VCF converter, and a brute-force oracle used by the test suites.

pub mod alphabet;
pub mod bitset;
pub mod codec;
mod error;
pub mod ingest;
pub mod oracle;
pub mod parse;
pub mod search;
pub mod sources;
pub mod synth;
pub mod text;
pub mod verify;

pub use alphabet::Alphabet;
pub use bitset::SourceSet;
pub use error::ModelError;
pub use parse::{
    parse_ed_text, parse_sources_text, write_ed_text, write_sources_text, ParseError,
};
pub use search::{search_ed, MaskTable, MatchCandidate, Pattern, PatternError, WORD_SIZE};
pub use sources::{validate, SourceSequence, ValidationReport, MAX_INDIVIDUALS};
pub use text::{EDText, Segment, Stats};
pub use verify::{
    search_with_sources, verify_candidate, Mode, SearchReport, VerificationResult, VerifiedMatch,
    Verifier,
};
