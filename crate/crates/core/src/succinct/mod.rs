//! Succinct building blocks: rank/select bitvectors, a small-alphabet
//! wavelet sequence, and balanced-parentheses trees.

pub mod bitseq;
pub mod bp;
pub mod wavelet;

pub use bitseq::{BitSeq, BitSeqBuilder};
pub use bp::BpTree;
pub use wavelet::WaveletSeq;

/// Per-thread count of primitive rank/select/tree calls.
///
/// Used to check that navigation performs a bounded number of primitive
/// operations regardless of index size.
pub mod probe {
    use std::cell::Cell;

    thread_local! {
        static CALLS: Cell<u64> = const { Cell::new(0) };
    }

    #[inline]
    pub(crate) fn hit() {
        CALLS.with(|c| c.set(c.get() + 1));
    }

    pub fn reset() {
        CALLS.with(|c| c.set(0));
    }

    pub fn calls() -> u64 {
        CALLS.with(|c| c.get())
    }
}
