//! Stage 2: candidate verification against the source sets.
//!
//! A candidate is genuine if some path spelling the match is carried end to
//! end by at least one individual. Verification walks segments right to left
//! from the candidate's end variant, keeping a frontier of nodes
//! `(remaining pattern length, accumulated sources)`. Stepping into a variant
//! intersects the accumulated sources with the variant's set; nodes whose
//! sets empty out are pruned, and nodes that land on the same remaining
//! length are merged by set union. Because intersection distributes over
//! union, the merged frontier computes exactly the union over partial paths
//! of their per-path intersections.
//!
//! The walk completes when a variant (or a deterministic stretch) covers the
//! rest of the pattern. Verify mode stops at the first completion; full mode
//! keeps going and unions every completion into the final source set.

use crate::bitset::SourceSet;
use crate::search::{search_ed, MatchCandidate, Pattern};
use crate::sources::SourceSequence;
use crate::text::EDText;
use thiserror::Error;

/// How much the caller wants to know about a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// A true/false check: is there at least one matching individual?
    Verify,
    /// Compute the exact set of matching individuals.
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("candidate segment {0} out of range")]
    SegmentOutOfRange(usize),
    #[error("candidate variant {variant} out of range in segment {segment}")]
    VariantOutOfRange { segment: usize, variant: usize },
    #[error("candidate names a variant in a deterministic segment (or vice versa)")]
    KindMismatch,
    #[error("candidate offset {offset} out of range for a variant of length {len}")]
    OffsetOutOfRange { offset: usize, len: usize },
    #[error("pattern does not match the text at the candidate position")]
    PatternMismatch,
    #[error("sources have {found} entries but the text has {expected} non-deterministic segments")]
    SourcesMismatch { expected: usize, found: usize },
    #[error("entry for segment {segment} has {found} explicit sets, expected {expected}")]
    ArityMismatch {
        segment: usize,
        expected: usize,
        found: usize,
    },
}

/// Verification outcome for one candidate. In full mode `sources` holds the
/// union, over all realizable paths, of each path's source intersection, and
/// `genuine` is true exactly when that set is non-empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationResult {
    pub genuine: bool,
    pub sources: Option<SourceSet>,
}

/// A candidate that survived verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifiedMatch {
    pub candidate: MatchCandidate,
    pub result: VerificationResult,
}

/// Everything a search run produced: all stage-1 candidates (their count is
/// occ′) and the genuine matches among them, in candidate order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub candidates: Vec<MatchCandidate>,
    pub verified: Vec<VerifiedMatch>,
}

impl SearchReport {
    /// Number of stage-1 candidates (occ′).
    pub fn candidate_count(&self) -> usize {
        self.candidates.len()
    }
}

/// Verifies candidates over one loaded `(text, sources)` pair.
///
/// Construction checks the sources against the text and precomputes the
/// implied reference set of every non-deterministic segment — the in-memory
/// sources map — so that verifying a candidate costs
/// `O(m · (segment size + ⌈r/64⌉))` on average. A `Verifier` is immutable
/// and may be shared across threads; build one per dataset and reuse it for
/// every pattern.
pub struct Verifier<'a> {
    text: &'a EDText,
    sources: &'a SourceSequence,
    reference_sets: Vec<SourceSet>,
}

/// One frontier level: nodes keyed by remaining pattern length, merged by
/// source-set union on insertion. At most `m` nodes, so linear lookup.
fn frontier_push(nodes: &mut Vec<(usize, SourceSet)>, remaining: usize, sources: SourceSet) {
    debug_assert!(remaining >= 1);
    debug_assert!(!sources.is_empty());
    match nodes.iter_mut().find(|(k, _)| *k == remaining) {
        Some((_, existing)) => existing.union_with(&sources),
        None => nodes.push((remaining, sources)),
    }
}

impl<'a> Verifier<'a> {
    pub fn new(text: &'a EDText, sources: &'a SourceSequence) -> Result<Self, VerifyError> {
        if sources.nd_count() != text.nd_count() {
            return Err(VerifyError::SourcesMismatch {
                expected: text.nd_count(),
                found: sources.nd_count(),
            });
        }
        let mut reference_sets = Vec::with_capacity(text.nd_count());
        for ord in 0..text.nd_count() {
            let segment = text.nd_segment_index(ord).expect("ordinal in range");
            let expected = text.segment(segment).variant_count() - 1;
            let found = sources.entry(ord).len();
            if found != expected {
                return Err(VerifyError::ArityMismatch {
                    segment,
                    expected,
                    found,
                });
            }
            reference_sets.push(sources.reference_set(ord).expect("ordinal in range"));
        }
        Ok(Verifier {
            text,
            sources,
            reference_sets,
        })
    }

    /// The source set of variant `vi` of the `ord`-th non-deterministic
    /// segment (the implied reference set for the last variant).
    fn variant_sources(&self, ord: usize, vi: usize) -> &SourceSet {
        let entry = self.sources.entry(ord);
        if vi < entry.len() {
            &entry[vi]
        } else {
            &self.reference_sets[ord]
        }
    }

    /// Verifies one candidate produced by [`search_ed`] for `pattern` on the
    /// same text.
    pub fn verify(
        &self,
        pattern: &Pattern,
        candidate: &MatchCandidate,
        mode: Mode,
    ) -> Result<VerificationResult, VerifyError> {
        let individuals = self.sources.individuals();
        let pattern = pattern.as_bytes();
        let m = pattern.len();

        let segment = self
            .text
            .segments()
            .get(candidate.segment)
            .ok_or(VerifyError::SegmentOutOfRange(candidate.segment))?;
        let (variant, initial_sources): (&[u8], SourceSet) = match candidate.variant {
            None => {
                if !segment.is_deterministic() {
                    return Err(VerifyError::KindMismatch);
                }
                (&segment.variants()[0], SourceSet::full(individuals))
            }
            Some(vi) => {
                if segment.is_deterministic() {
                    return Err(VerifyError::KindMismatch);
                }
                let variant = segment.variants().get(vi).ok_or(
                    VerifyError::VariantOutOfRange {
                        segment: candidate.segment,
                        variant: vi,
                    },
                )?;
                let ord = self
                    .text
                    .nd_ordinal(candidate.segment)
                    .expect("non-deterministic segment");
                (variant.as_slice(), self.variant_sources(ord, vi).clone())
            }
        };

        let end = candidate.offset;
        if end >= variant.len() {
            return Err(VerifyError::OffsetOutOfRange {
                offset: end,
                len: variant.len(),
            });
        }

        if end + 1 >= m {
            // the whole match lies inside the end variant
            let start = end + 1 - m;
            if variant[start..=end] != *pattern {
                return Err(VerifyError::PatternMismatch);
            }
            let genuine = !initial_sources.is_empty();
            return Ok(match mode {
                Mode::Verify => VerificationResult {
                    genuine,
                    sources: None,
                },
                Mode::Full => VerificationResult {
                    genuine,
                    sources: Some(initial_sources),
                },
            });
        }

        // the match extends left of the end variant, so it covers the
        // variant's prefix 0..=end
        let remaining = m - (end + 1);
        if variant[..=end] != pattern[remaining..] {
            return Err(VerifyError::PatternMismatch);
        }

        // two buffers swapped per level, so the walk does not reallocate
        let mut frontier: Vec<(usize, SourceSet)> = Vec::new();
        let mut next: Vec<(usize, SourceSet)> = Vec::new();
        if !initial_sources.is_empty() {
            frontier.push((remaining, initial_sources));
        }
        let mut accumulated: Option<SourceSet> = None;
        let complete = |sources: SourceSet, accumulated: &mut Option<SourceSet>| -> bool {
            // returns true when verify mode can stop early
            match mode {
                Mode::Verify => true,
                Mode::Full => {
                    match accumulated {
                        Some(acc) => acc.union_with(&sources),
                        None => *accumulated = Some(sources),
                    }
                    false
                }
            }
        };

        for si in (0..candidate.segment).rev() {
            if frontier.is_empty() {
                break;
            }
            let seg = self.text.segment(si);
            next.clear();
            if seg.is_deterministic() {
                // no source filtering: every individual traverses it
                let t = seg.variants()[0].as_slice();
                for (k, sources) in frontier.drain(..) {
                    if t.len() >= k {
                        if t[t.len() - k..] == pattern[..k]
                            && complete(sources, &mut accumulated)
                        {
                            return Ok(VerificationResult {
                                genuine: true,
                                sources: None,
                            });
                        }
                    } else if pattern[k - t.len()..k] == *t {
                        frontier_push(&mut next, k - t.len(), sources);
                    }
                }
            } else {
                let ord = self.text.nd_ordinal(si).expect("non-deterministic segment");
                for (k, sources) in frontier.drain(..) {
                    for (vi, variant) in seg.variants().iter().enumerate() {
                        let variant_set = self.variant_sources(ord, vi);
                        if sources.is_disjoint(variant_set) {
                            continue; // no shared source: prune this branch
                        }
                        let narrowed = sources.intersection(variant_set);
                        if variant.is_empty() {
                            frontier_push(&mut next, k, narrowed);
                        } else if variant.len() >= k {
                            if variant[variant.len() - k..] == pattern[..k]
                                && complete(narrowed, &mut accumulated)
                            {
                                return Ok(VerificationResult {
                                    genuine: true,
                                    sources: None,
                                });
                            }
                        } else if pattern[k - variant.len()..k] == variant[..] {
                            frontier_push(&mut next, k - variant.len(), narrowed);
                        }
                    }
                }
            }
            std::mem::swap(&mut frontier, &mut next);
        }
        // nodes still alive here ran out of text with pattern left: dead ends

        match mode {
            Mode::Verify => Ok(VerificationResult {
                genuine: false,
                sources: None,
            }),
            Mode::Full => {
                let sources = accumulated.unwrap_or_else(|| SourceSet::empty(individuals));
                Ok(VerificationResult {
                    genuine: !sources.is_empty(),
                    sources: Some(sources),
                })
            }
        }
    }

    /// Runs stage 1 for `pattern` and verifies every candidate, keeping the
    /// genuine ones in candidate order.
    pub fn search(&self, pattern: &Pattern, mode: Mode) -> Result<SearchReport, VerifyError> {
        let candidates = search_ed(self.text, pattern);
        let mut verified = Vec::new();
        for candidate in &candidates {
            let result = self.verify(pattern, candidate, mode)?;
            if result.genuine {
                verified.push(VerifiedMatch {
                    candidate: *candidate,
                    result,
                });
            }
        }
        Ok(SearchReport {
            candidates,
            verified,
        })
    }
}

/// Verifies a single candidate. For many candidates or patterns over the
/// same inputs, build one [`Verifier`] instead.
pub fn verify_candidate(
    text: &EDText,
    sources: &SourceSequence,
    pattern: &Pattern,
    candidate: &MatchCandidate,
    mode: Mode,
) -> Result<VerificationResult, VerifyError> {
    Verifier::new(text, sources)?.verify(pattern, candidate, mode)
}

/// Runs stage 1 and verifies every candidate, keeping the genuine ones in
/// candidate order. Convenience wrapper over [`Verifier::search`].
pub fn search_with_sources(
    text: &EDText,
    sources: &SourceSequence,
    pattern: &Pattern,
    mode: Mode,
) -> Result<SearchReport, VerifyError> {
    Verifier::new(text, sources)?.search(pattern, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::sources::tests::example_b;

    fn pat(s: &[u8]) -> Pattern {
        Pattern::new(s, &Alphabet::dna()).unwrap()
    }

    fn members(set: &SourceSet) -> Vec<usize> {
        set.iter().collect()
    }

    #[test]
    fn genuine_match_with_sources() {
        let (text, sources) = example_b();
        let p = pat(b"AGCG");
        let cand = MatchCandidate::in_variant(2, 0, 1);
        let res = verify_candidate(&text, &sources, &p, &cand, Mode::Full).unwrap();
        assert!(res.genuine);
        assert_eq!(members(res.sources.as_ref().unwrap()), vec![0, 2]);
    }

    #[test]
    fn false_positive_rejected() {
        // AA·AG·N exists in the text but no individual carries AG and N
        let (text, sources) = example_b();
        let p = pat(b"AAAGN");
        let cand = MatchCandidate::in_variant(2, 1, 0);
        let res = verify_candidate(&text, &sources, &p, &cand, Mode::Verify).unwrap();
        assert!(!res.genuine);
        assert_eq!(res.sources, None);
        let res = verify_candidate(&text, &sources, &p, &cand, Mode::Full).unwrap();
        assert!(!res.genuine);
        assert!(res.sources.unwrap().is_empty());
    }

    #[test]
    fn match_inside_one_variant_uses_reference_complement() {
        let (text, sources) = example_b();
        let p = pat(b"TT");
        let cand = MatchCandidate::in_variant(2, 2, 1);
        let res = verify_candidate(&text, &sources, &p, &cand, Mode::Full).unwrap();
        assert!(res.genuine);
        assert_eq!(members(res.sources.as_ref().unwrap()), vec![1]);
    }

    #[test]
    fn report_keeps_candidates_and_genuine_matches() {
        let (text, sources) = example_b();

        let report = search_with_sources(&text, &sources, &pat(b"AGCG"), Mode::Full).unwrap();
        assert_eq!(report.candidate_count(), 1);
        assert_eq!(report.verified.len(), 1);
        assert_eq!(
            report.verified[0].candidate,
            MatchCandidate::in_variant(2, 0, 1)
        );
        assert_eq!(
            members(report.verified[0].result.sources.as_ref().unwrap()),
            vec![0, 2]
        );

        let report = search_with_sources(&text, &sources, &pat(b"AAAGN"), Mode::Verify).unwrap();
        assert_eq!(report.candidate_count(), 1);
        assert!(report.verified.is_empty());

        let report = search_with_sources(&text, &sources, &pat(b"GGGG"), Mode::Full).unwrap();
        assert_eq!(report.candidate_count(), 0);
        assert!(report.verified.is_empty());
    }

    #[test]
    fn verify_agrees_with_full_on_every_candidate() {
        let (text, sources) = example_b();
        let verifier = Verifier::new(&text, &sources).unwrap();
        for needle in [&b"AG"[..], b"AAAGN", b"AGCG", b"AAG", b"GTT", b"AAGCG", b"N"] {
            let p = pat(needle);
            for cand in search_ed(&text, &p) {
                let quick = verifier.verify(&p, &cand, Mode::Verify).unwrap();
                let full = verifier.verify(&p, &cand, Mode::Full).unwrap();
                assert_eq!(quick.genuine, full.genuine, "{needle:?} {cand:?}");
                assert_eq!(full.genuine, !full.sources.unwrap().is_empty());
            }
        }
    }

    #[test]
    fn deterministic_candidates_are_always_genuine() {
        let (text, sources) = example_b();
        let p = pat(b"AA");
        let report = search_with_sources(&text, &sources, &p, Mode::Full).unwrap();
        let det = report
            .verified
            .iter()
            .find(|v| v.candidate == MatchCandidate::deterministic(0, 1))
            .expect("match at the start");
        assert_eq!(members(det.result.sources.as_ref().unwrap()), vec![0, 1, 2, 3]);
    }

    #[test]
    fn inconsistent_candidates_are_errors() {
        let (text, sources) = example_b();
        let p = pat(b"AGCG");
        let verifier = Verifier::new(&text, &sources).unwrap();
        assert!(matches!(
            verifier.verify(&p, &MatchCandidate::in_variant(9, 0, 0), Mode::Full),
            Err(VerifyError::SegmentOutOfRange(9))
        ));
        assert!(matches!(
            verifier.verify(&p, &MatchCandidate::in_variant(0, 0, 0), Mode::Full),
            Err(VerifyError::KindMismatch)
        ));
        assert!(matches!(
            verifier.verify(&p, &MatchCandidate::deterministic(2, 0), Mode::Full),
            Err(VerifyError::KindMismatch)
        ));
        assert!(matches!(
            verifier.verify(&p, &MatchCandidate::in_variant(2, 5, 0), Mode::Full),
            Err(VerifyError::VariantOutOfRange { .. })
        ));
        assert!(matches!(
            verifier.verify(&p, &MatchCandidate::in_variant(2, 0, 7), Mode::Full),
            Err(VerifyError::OffsetOutOfRange { .. })
        ));
        assert!(matches!(
            verifier.verify(&p, &MatchCandidate::in_variant(2, 1, 0), Mode::Full),
            Err(VerifyError::PatternMismatch)
        ));
    }

    #[test]
    fn mismatched_sources_are_rejected_up_front() {
        let (text, _) = example_b();
        let wrong_count = SourceSequence::new(
            4,
            vec![vec![SourceSet::from_members(4, [0])]],
        )
        .unwrap();
        assert!(matches!(
            Verifier::new(&text, &wrong_count),
            Err(VerifyError::SourcesMismatch {
                expected: 2,
                found: 1
            })
        ));
        let wrong_arity = SourceSequence::new(
            4,
            vec![
                vec![SourceSet::from_members(4, [0])],
                vec![SourceSet::from_members(4, [0, 2])],
            ],
        )
        .unwrap();
        assert!(matches!(
            Verifier::new(&text, &wrong_arity),
            Err(VerifyError::ArityMismatch {
                segment: 2,
                expected: 2,
                found: 1
            })
        ));
    }
}
