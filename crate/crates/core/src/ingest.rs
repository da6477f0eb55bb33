//! Converts a reference sequence plus variant calls into a text/sources
//! pair.
//!
//! Each diploid sample contributes two individuals (its haploid copies), so
//! r = 2 × sample count. Reference stretches between records become
//! deterministic segments; each record becomes one non-deterministic segment
//! whose variants are the alternate alleles followed by the reference
//! allele, after trimming their longest common prefix into the preceding
//! deterministic segment (a fully trimmed allele becomes ε). The haploid
//! index sets carrying each alternate become the explicit source sets; the
//! reference allele is last, its set implied.
//!
//! Scope is deliberately narrow: sorted, non-overlapping, fully genotyped
//! records with plain sequence alleles. Overlapping records, symbolic
//! alleles and missing genotypes are skipped with counted warnings.

use crate::alphabet::Alphabet;
use crate::bitset::SourceSet;
use crate::error::ModelError;
use crate::sources::{SourceSequence, MAX_INDIVIDUALS};
use crate::text::{EDText, Segment};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("FASTA line {line}: {message}")]
    Fasta { line: usize, message: String },
    #[error("VCF line {line}: {message}")]
    Vcf { line: usize, message: String },
    #[error("records are not sorted: position {position} after {previous}")]
    UnsortedInput { position: u64, previous: u64 },
    #[error("reference allele at position {position} does not match the reference sequence")]
    ReferenceMismatch { position: u64 },
    #[error("record at position {position} reaches past the reference end")]
    PastReferenceEnd { position: u64 },
    #[error("record at position {position} has {found} genotypes, expected {expected}")]
    SampleCountMismatch {
        position: u64,
        expected: usize,
        found: usize,
    },
    #[error("malformed genotype for sample {sample} at position {position}")]
    MalformedGenotype { position: u64, sample: usize },
    #[error("allele index {allele} out of range at position {position}")]
    AlleleOutOfRange { position: u64, allele: usize },
    #[error("no samples in the input")]
    NoSamples,
    #[error("{0}")]
    Model(#[from] ModelError),
}

/// One variant call: a 1-based reference position, the reference allele, the
/// alternate alleles, and per sample the two haploid allele indexes
/// (0 = reference, i = i-th alternate).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariantRecord {
    pub position: u64,
    pub ref_allele: Vec<u8>,
    pub alt_alleles: Vec<Vec<u8>>,
    pub genotypes: Vec<[usize; 2]>,
}

/// Conversion result plus the overlap-skip counter.
#[derive(Debug)]
pub struct Converted {
    pub text: EDText,
    pub sources: SourceSequence,
    /// Records dropped because they overlapped the previous record's
    /// reference span.
    pub skipped_overlapping: usize,
}

/// Converts one reference sequence and its position-sorted records.
pub fn convert(
    reference: &[u8],
    sample_count: usize,
    records: &[VariantRecord],
) -> Result<Converted, IngestError> {
    if sample_count == 0 {
        return Err(IngestError::NoSamples);
    }
    let individuals = 2 * sample_count;
    if individuals > MAX_INDIVIDUALS {
        return Err(IngestError::Model(ModelError::IndividualsOutOfRange(
            individuals,
        )));
    }

    let mut segments = Vec::new();
    let mut entries = Vec::new();
    let mut pending: Vec<u8> = Vec::new(); // deterministic bytes not yet emitted
    let mut cursor = 0usize; // 0-based position after the last consumed reference byte
    let mut previous_position = 0u64;
    let mut skipped_overlapping = 0usize;

    let flush_pending = |segments: &mut Vec<Segment>, pending: &mut Vec<u8>| -> Result<(), IngestError> {
        if !pending.is_empty() {
            segments.push(Segment::deterministic(std::mem::take(pending))?);
        }
        Ok(())
    };

    for record in records {
        if record.position < previous_position {
            return Err(IngestError::UnsortedInput {
                position: record.position,
                previous: previous_position,
            });
        }
        previous_position = record.position;
        if record.position == 0 {
            return Err(IngestError::Vcf {
                line: 0,
                message: "position must be 1-based".into(),
            });
        }
        let start = (record.position - 1) as usize;
        if start < cursor {
            skipped_overlapping += 1;
            continue;
        }
        let end = start + record.ref_allele.len();
        if end > reference.len() {
            return Err(IngestError::PastReferenceEnd {
                position: record.position,
            });
        }
        if reference[start..end] != record.ref_allele[..] {
            return Err(IngestError::ReferenceMismatch {
                position: record.position,
            });
        }
        if record.genotypes.len() != sample_count {
            return Err(IngestError::SampleCountMismatch {
                position: record.position,
                expected: sample_count,
                found: record.genotypes.len(),
            });
        }
        for gt in &record.genotypes {
            for &allele in gt {
                if allele > record.alt_alleles.len() {
                    return Err(IngestError::AlleleOutOfRange {
                        position: record.position,
                        allele,
                    });
                }
            }
        }

        pending.extend_from_slice(&reference[cursor..start]);

        // trim the common prefix of the reference and all alternates into
        // the preceding deterministic stretch
        let mut trim = 0usize;
        'trim: while trim < record.ref_allele.len() {
            let c = record.ref_allele[trim];
            for alt in &record.alt_alleles {
                if trim >= alt.len() || alt[trim] != c {
                    break 'trim;
                }
            }
            trim += 1;
        }
        pending.extend_from_slice(&record.ref_allele[..trim]);

        let mut variants: Vec<Vec<u8>> = record
            .alt_alleles
            .iter()
            .map(|alt| alt[trim..].to_vec())
            .collect();
        variants.push(record.ref_allele[trim..].to_vec());

        let mut explicit = vec![SourceSet::empty(individuals); record.alt_alleles.len()];
        for (sample, gt) in record.genotypes.iter().enumerate() {
            for (copy, &allele) in gt.iter().enumerate() {
                if allele > 0 {
                    explicit[allele - 1].insert(2 * sample + copy);
                }
            }
        }

        flush_pending(&mut segments, &mut pending)?;
        segments.push(Segment::non_deterministic(variants)?);
        entries.push(explicit);
        cursor = end;
    }

    pending.extend_from_slice(&reference[cursor..]);
    flush_pending(&mut segments, &mut pending)?;

    let text = EDText::new(segments, Alphabet::dna())?;
    let sources = SourceSequence::new(individuals, entries)?;
    Ok(Converted {
        text,
        sources,
        skipped_overlapping,
    })
}

/// Opens a file, transparently decompressing gzip input (detected by its
/// magic bytes, not the extension).
pub fn open_maybe_gzip(path: &Path) -> Result<Box<dyn BufRead>, IngestError> {
    let mut file = File::open(path)?;
    let mut magic = [0u8; 2];
    let n = file.read(&mut magic)?;
    let file = File::open(path)?; // reopen from the start
    if n == 2 && magic == [0x1F, 0x8B] {
        Ok(Box::new(BufReader::new(flate2::read::MultiGzDecoder::new(
            file,
        ))))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

/// Reads FASTA records: header lines starting with `>` followed by sequence
/// lines. Sequences are uppercased; the record name is the first word of the
/// header.
pub fn read_fasta(reader: impl BufRead) -> Result<Vec<(String, Vec<u8>)>, IngestError> {
    let mut records: Vec<(String, Vec<u8>)> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('>') {
            let name = header.split_whitespace().next().unwrap_or("").to_string();
            if name.is_empty() {
                return Err(IngestError::Fasta {
                    line: lineno + 1,
                    message: "empty record name".into(),
                });
            }
            records.push((name, Vec::new()));
        } else {
            let Some(last) = records.last_mut() else {
                return Err(IngestError::Fasta {
                    line: lineno + 1,
                    message: "sequence before the first header".into(),
                });
            };
            last.1
                .extend(line.bytes().map(|b| b.to_ascii_uppercase()));
        }
    }
    if records.is_empty() {
        return Err(IngestError::Fasta {
            line: 0,
            message: "no records".into(),
        });
    }
    Ok(records)
}

/// Parsed variant file: sample names, per-chromosome records, and skip
/// counters for out-of-scope content.
#[derive(Debug, Default)]
pub struct VcfData {
    pub samples: Vec<String>,
    pub records: Vec<(String, VariantRecord)>,
    pub skipped_symbolic: usize,
    pub skipped_missing_genotype: usize,
    pub unphased_genotypes: usize,
}

fn is_symbolic(allele: &[u8]) -> bool {
    allele.is_empty()
        || allele
            .iter()
            .any(|&c| !matches!(c.to_ascii_uppercase(), b'A' | b'C' | b'G' | b'T' | b'N'))
}

/// Reads a tab-separated VCF layout: meta lines (`##`), the `#CHROM` header
/// naming the samples, then records. Only CHROM, POS, REF, ALT and the GT
/// field are consulted. Records with symbolic or non-sequence alleles, or
/// with missing genotype calls, are skipped and counted.
pub fn read_vcf(reader: impl BufRead) -> Result<VcfData, IngestError> {
    let mut data = VcfData::default();
    let mut saw_header = false;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        if line.starts_with("##") || line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            let columns: Vec<&str> = header.split('\t').collect();
            if columns.len() < 10 {
                return Err(IngestError::Vcf {
                    line: lineno,
                    message: "header has no sample columns".into(),
                });
            }
            data.samples = columns[9..].iter().map(|s| s.to_string()).collect();
            saw_header = true;
            continue;
        }
        if !saw_header {
            return Err(IngestError::Vcf {
                line: lineno,
                message: "record before the #CHROM header".into(),
            });
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 9 + data.samples.len() {
            return Err(IngestError::Vcf {
                line: lineno,
                message: format!(
                    "expected {} columns, found {}",
                    9 + data.samples.len(),
                    fields.len()
                ),
            });
        }
        let chrom = fields[0].to_string();
        let position: u64 = fields[1].parse().map_err(|_| IngestError::Vcf {
            line: lineno,
            message: format!("bad POS {:?}", fields[1]),
        })?;
        let ref_allele = fields[3].as_bytes().to_ascii_uppercase();
        let alt_field = fields[4];
        let alt_alleles: Vec<Vec<u8>> = alt_field
            .split(',')
            .map(|a| a.as_bytes().to_ascii_uppercase())
            .collect();
        if alt_field == "." || is_symbolic(&ref_allele) || alt_alleles.iter().any(|a| is_symbolic(a))
        {
            data.skipped_symbolic += 1;
            continue;
        }

        let format: Vec<&str> = fields[8].split(':').collect();
        let Some(gt_slot) = format.iter().position(|&f| f == "GT") else {
            return Err(IngestError::Vcf {
                line: lineno,
                message: "FORMAT has no GT field".into(),
            });
        };

        let mut genotypes = Vec::with_capacity(data.samples.len());
        let mut missing = false;
        for (sample, cell) in fields[9..].iter().enumerate() {
            let gt = cell.split(':').nth(gt_slot).ok_or(IngestError::Vcf {
                line: lineno,
                message: format!("sample {sample} has no GT value"),
            })?;
            let (sep, phased) = if gt.contains('|') {
                ('|', true)
            } else {
                ('/', false)
            };
            let parts: Vec<&str> = gt.split(sep).collect();
            if parts.iter().any(|p| p.starts_with('.')) {
                missing = true;
                break;
            }
            if parts.len() != 2 {
                return Err(IngestError::MalformedGenotype {
                    position,
                    sample,
                });
            }
            if !phased {
                data.unphased_genotypes += 1;
            }
            let mut pair = [0usize; 2];
            for (slot, part) in parts.iter().enumerate() {
                pair[slot] = part.parse().map_err(|_| IngestError::MalformedGenotype {
                    position,
                    sample,
                })?;
                if pair[slot] > alt_alleles.len() {
                    return Err(IngestError::AlleleOutOfRange {
                        position,
                        allele: pair[slot],
                    });
                }
            }
            genotypes.push(pair);
        }
        if missing {
            data.skipped_missing_genotype += 1;
            continue;
        }

        data.records.push((
            chrom,
            VariantRecord {
                position,
                ref_allele,
                alt_alleles,
                genotypes,
            },
        ));
    }
    if !saw_header {
        return Err(IngestError::Vcf {
            line: 0,
            message: "no #CHROM header".into(),
        });
    }
    Ok(data)
}
