//! Shared inputs for the benchmarks.

use sidelobe::{random_unimodular, UnimodularSequence};

/// Sequence lengths swept by every kernel benchmark.
pub const SIZES: [usize; 4] = [64, 256, 1024, 4096];

/// Fixed-seed random start of length `n`.
pub fn input(n: usize) -> UnimodularSequence {
    random_unimodular(n, 0x5eed).expect("benchmark sizes are nonzero")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inputs_are_deterministic() {
        for n in SIZES {
            assert_eq!(input(n), input(n));
            assert_eq!(input(n).len(), n);
        }
    }
}
