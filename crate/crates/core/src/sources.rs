//! Source sequences: which individuals carry which variant, and validation
//! of a text/sources pair.

use crate::bitset::SourceSet;
use crate::error::ModelError;
use crate::text::EDText;

/// Upper bound on the individual count, imposed by the two-byte number
/// encoding of the binary sources format.
pub const MAX_INDIVIDUALS: usize = 16_383;

/// Per-variant source sets for the non-deterministic segments of a companion
/// ED text.
///
/// Entry `i` belongs to the `i`-th non-deterministic segment in text order
/// and holds one explicit set per variant except the last: the last variant
/// is the reference, whose set is implied as the complement of the explicit
/// sets' union. Explicit sets plus the implied set partition
/// `{0, …, individuals−1}`, so each individual follows exactly one variant
/// per segment.
///
/// Immutable after construction; safe to share across concurrent readers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceSequence {
    individuals: usize,
    entries: Vec<Vec<SourceSet>>,
}

impl SourceSequence {
    /// Builds a source sequence. Enforces the individual-count range and that
    /// every set has width `individuals`; disjointness and arity versus the
    /// companion text are checked by [`validate`], which reports violations
    /// as data rather than failing.
    pub fn new(individuals: usize, entries: Vec<Vec<SourceSet>>) -> Result<Self, ModelError> {
        if individuals == 0 || individuals > MAX_INDIVIDUALS {
            return Err(ModelError::IndividualsOutOfRange(individuals));
        }
        for entry in &entries {
            for set in entry {
                if set.width() != individuals {
                    return Err(ModelError::SetWidthMismatch {
                        expected: individuals,
                        found: set.width(),
                    });
                }
            }
        }
        Ok(SourceSequence {
            individuals,
            entries,
        })
    }

    /// The individual count r.
    #[inline]
    pub fn individuals(&self) -> usize {
        self.individuals
    }

    /// One entry per non-deterministic segment, in text order.
    #[inline]
    pub fn entries(&self) -> &[Vec<SourceSet>] {
        &self.entries
    }

    /// Explicit sets of the `nd_ordinal`-th non-deterministic segment.
    #[inline]
    pub fn entry(&self, nd_ordinal: usize) -> &[SourceSet] {
        &self.entries[nd_ordinal]
    }

    pub fn nd_count(&self) -> usize {
        self.entries.len()
    }

    /// The implied source set of the reference (last) variant of the
    /// `nd_ordinal`-th non-deterministic segment: the complement of the
    /// union of that entry's explicit sets. May be empty.
    pub fn reference_set(&self, nd_ordinal: usize) -> Result<SourceSet, ModelError> {
        let entry = self
            .entries
            .get(nd_ordinal)
            .ok_or(ModelError::NdOrdinalOutOfRange(nd_ordinal, self.entries.len()))?;
        let mut union = SourceSet::empty(self.individuals);
        for set in entry {
            union.union_with(set);
        }
        Ok(union.complement())
    }
}

/// A broken invariant of a text/sources pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Entry count differs from the text's non-deterministic segment count.
    EntryCountMismatch { expected: usize, found: usize },
    /// An entry's explicit set count is not (variant count − 1).
    EntryArityMismatch {
        segment: usize,
        expected: usize,
        found: usize,
    },
    /// Two explicit sets of one entry share an individual.
    ExplicitSetsNotDisjoint { segment: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::EntryCountMismatch { expected, found } => write!(
                f,
                "entry count mismatch: text has {expected} non-deterministic segments, sources have {found} entries"
            ),
            Violation::EntryArityMismatch {
                segment,
                expected,
                found,
            } => write!(
                f,
                "entry arity mismatch at segment {segment}: expected {expected} explicit sets, found {found}"
            ),
            Violation::ExplicitSetsNotDisjoint { segment } => {
                write!(f, "explicit sets not disjoint at segment {segment}")
            }
        }
    }
}

/// A suspicious but permitted property of a text/sources pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Warning {
    /// An alternate variant nobody carries.
    EmptyExplicitSet { segment: usize, variant: usize },
    /// Every individual carries an alternate; the reference set is empty.
    EmptyReferenceSet { segment: usize },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::EmptyExplicitSet { segment, variant } => {
                write!(f, "empty explicit set at segment {segment}, variant {variant}")
            }
            Warning::EmptyReferenceSet { segment } => {
                write!(f, "empty implied reference set at segment {segment}")
            }
        }
    }
}

/// Outcome of [`validate`]: every violated invariant, with the text segment
/// index it concerns, plus non-fatal warnings.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    /// True iff no invariant is violated (warnings are allowed).
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a text/sources pair against the pairing invariants. Violations are
/// reported as data, not failures; an empty violation list means the pair is
/// well-formed.
pub fn validate(text: &EDText, sources: &SourceSequence) -> ValidationReport {
    let mut report = ValidationReport::default();
    let nd = text.nd_count();
    if sources.nd_count() != nd {
        report.violations.push(Violation::EntryCountMismatch {
            expected: nd,
            found: sources.nd_count(),
        });
    }
    for (ord, entry) in sources.entries().iter().enumerate() {
        let Some(segment_index) = text.nd_segment_index(ord) else {
            break;
        };
        let expected = text.segment(segment_index).variant_count() - 1;
        if entry.len() != expected {
            report.violations.push(Violation::EntryArityMismatch {
                segment: segment_index,
                expected,
                found: entry.len(),
            });
        }
        let mut union = SourceSet::empty(sources.individuals());
        let mut disjoint = true;
        for (vi, set) in entry.iter().enumerate() {
            if !union.is_disjoint(set) {
                disjoint = false;
            }
            union.union_with(set);
            if set.is_empty() {
                report.warnings.push(Warning::EmptyExplicitSet {
                    segment: segment_index,
                    variant: vi,
                });
            }
        }
        if !disjoint {
            report
                .violations
                .push(Violation::ExplicitSetsNotDisjoint {
                    segment: segment_index,
                });
        }
        if union.len() == sources.individuals() {
            report.warnings.push(Warning::EmptyReferenceSet {
                segment: segment_index,
            });
        }
    }
    report
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::text::Segment;

    /// `AA{AG,G}{CG,N,TT}` with sources `{0}{{0,2}{3}}` over 4 individuals.
    pub(crate) fn example_b() -> (EDText, SourceSequence) {
        let text = EDText::new(
            vec![
                Segment::deterministic(*b"AA").unwrap(),
                Segment::non_deterministic(vec![b"AG".to_vec(), b"G".to_vec()]).unwrap(),
                Segment::non_deterministic(vec![b"CG".to_vec(), b"N".to_vec(), b"TT".to_vec()])
                    .unwrap(),
            ],
            Alphabet::dna(),
        )
        .unwrap();
        let sources = SourceSequence::new(
            4,
            vec![
                vec![SourceSet::from_members(4, [0])],
                vec![
                    SourceSet::from_members(4, [0, 2]),
                    SourceSet::from_members(4, [3]),
                ],
            ],
        )
        .unwrap();
        (text, sources)
    }

    #[test]
    fn example_b_is_clean() {
        let (text, sources) = example_b();
        let report = validate(&text, &sources);
        assert!(report.is_clean(), "{report:?}");
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn reference_sets_of_example_b() {
        let (_, sources) = example_b();
        assert_eq!(
            sources.reference_set(0).unwrap(),
            SourceSet::from_members(4, [1, 2, 3])
        );
        assert_eq!(
            sources.reference_set(1).unwrap(),
            SourceSet::from_members(4, [1])
        );
        assert!(matches!(
            sources.reference_set(2),
            Err(ModelError::NdOrdinalOutOfRange(2, 2))
        ));
    }

    #[test]
    fn reference_set_may_be_empty() {
        let sources = SourceSequence::new(
            2,
            vec![vec![SourceSet::from_members(2, [0, 1])]],
        )
        .unwrap();
        assert!(sources.reference_set(0).unwrap().is_empty());
    }

    #[test]
    fn arity_mismatch_reported() {
        let (text, _) = example_b();
        // the 3-variant segment gets only one explicit set
        let bad = SourceSequence::new(
            4,
            vec![
                vec![SourceSet::from_members(4, [0])],
                vec![SourceSet::from_members(4, [0, 2])],
            ],
        )
        .unwrap();
        let report = validate(&text, &bad);
        assert_eq!(
            report.violations,
            vec![Violation::EntryArityMismatch {
                segment: 2,
                expected: 2,
                found: 1
            }]
        );
    }

    #[test]
    fn overlapping_sets_reported() {
        let (text, _) = example_b();
        let bad = SourceSequence::new(
            4,
            vec![
                vec![SourceSet::from_members(4, [0])],
                vec![
                    SourceSet::from_members(4, [0, 1]),
                    SourceSet::from_members(4, [1]),
                ],
            ],
        )
        .unwrap();
        let report = validate(&text, &bad);
        assert_eq!(
            report.violations,
            vec![Violation::ExplicitSetsNotDisjoint { segment: 2 }]
        );
    }

    #[test]
    fn entry_count_mismatch_reported() {
        let (text, _) = example_b();
        let bad = SourceSequence::new(4, vec![vec![SourceSet::from_members(4, [0])]]).unwrap();
        let report = validate(&text, &bad);
        assert_eq!(
            report.violations,
            vec![Violation::EntryCountMismatch {
                expected: 2,
                found: 1
            }]
        );
    }

    #[test]
    fn empty_sets_warn_but_pass() {
        let text = EDText::new(
            vec![Segment::non_deterministic(vec![b"A".to_vec(), b"C".to_vec()]).unwrap()],
            Alphabet::dna(),
        )
        .unwrap();
        let sources = SourceSequence::new(2, vec![vec![SourceSet::empty(2)]]).unwrap();
        let report = validate(&text, &sources);
        assert!(report.is_clean());
        assert_eq!(
            report.warnings,
            vec![Warning::EmptyExplicitSet {
                segment: 0,
                variant: 0
            }]
        );

        let full = SourceSequence::new(
            2,
            vec![vec![SourceSet::from_members(2, [0, 1])]],
        )
        .unwrap();
        let report = validate(&text, &full);
        assert!(report.is_clean());
        assert_eq!(
            report.warnings,
            vec![Warning::EmptyReferenceSet { segment: 0 }]
        );
    }

    #[test]
    fn individual_count_bounds() {
        assert!(matches!(
            SourceSequence::new(0, Vec::new()),
            Err(ModelError::IndividualsOutOfRange(0))
        ));
        assert!(matches!(
            SourceSequence::new(16_384, Vec::new()),
            Err(ModelError::IndividualsOutOfRange(16_384))
        ));
        assert!(SourceSequence::new(16_383, Vec::new()).is_ok());
    }
}
