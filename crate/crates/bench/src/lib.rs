//! Shared helpers for the criterion benches.

use edspang::synth::{generate_ed, SynthParams};
use edspang::{EDText, SourceSequence};

/// A small synthetic dataset sized for micro-benchmarks.
pub fn bench_dataset(positions: usize, individuals: usize) -> (EDText, SourceSequence) {
    generate_ed(&SynthParams::new(positions, individuals, 0xED5))
        .expect("valid bench parameters")
}
