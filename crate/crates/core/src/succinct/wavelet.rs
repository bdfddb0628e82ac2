//! Wavelet matrix over a small alphabet (at most 8 symbols).

use super::bitseq::{BitSeq, BitSeqBuilder};
use super::probe;
use crate::error::{Error, Result};

pub const MAX_SYMBOLS: u8 = 8;
const LEVELS: usize = 3;

/// Static sequence over `0..8` with `access`, `rank` and `select`.
///
/// Same 1-based conventions as [`BitSeq`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WaveletSeq {
    len: usize,
    levels: Vec<BitSeq>,
    zeros: Vec<usize>,
}

impl WaveletSeq {
    pub fn new(symbols: &[u8]) -> Result<Self> {
        if let Some(&bad) = symbols.iter().find(|&&s| s >= MAX_SYMBOLS) {
            return Err(Error::Argument(format!("symbol {bad} outside alphabet 0..{MAX_SYMBOLS}")));
        }
        let mut cur = symbols.to_vec();
        let mut levels = Vec::with_capacity(LEVELS);
        let mut zeros = Vec::with_capacity(LEVELS);
        for l in 0..LEVELS {
            let shift = LEVELS - 1 - l;
            let mut b = BitSeqBuilder::new();
            let (mut left, mut right) = (Vec::with_capacity(cur.len()), Vec::new());
            for &s in &cur {
                let bit = (s >> shift) & 1 == 1;
                b.push(bit);
                if bit {
                    right.push(s);
                } else {
                    left.push(s);
                }
            }
            zeros.push(left.len());
            left.extend_from_slice(&right);
            cur = left;
            levels.push(b.build());
        }
        Ok(WaveletSeq { len: symbols.len(), levels, zeros })
    }

    pub(crate) fn from_levels(len: usize, levels: Vec<BitSeq>) -> Result<Self> {
        if levels.len() != LEVELS || levels.iter().any(|l| l.len() != len) {
            return Err(Error::Format("wavelet levels do not match sequence length".into()));
        }
        let zeros = levels.iter().map(|l| l.count_zeros()).collect();
        Ok(WaveletSeq { len, levels, zeros })
    }

    pub(crate) fn levels(&self) -> &[BitSeq] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Symbol at 1-based position `i`. Panics if out of range.
    pub fn access(&self, i: usize) -> u8 {
        assert!(i >= 1 && i <= self.len, "sequence position {i} out of 1..={}", self.len);
        probe::hit();
        let mut pos = i - 1;
        let mut sym = 0u8;
        for (l, bits) in self.levels.iter().enumerate() {
            let bit = bits.get0(pos);
            pos = if bit { self.zeros[l] + bits.rank1_0(pos) } else { pos - bits.rank1_0(pos) };
            sym = (sym << 1) | bit as u8;
        }
        sym
    }

    /// Returns `(start, end)` of `sym`'s block at the bottom level for prefix `[0, i)`.
    fn descend(&self, sym: u8, i: usize) -> (usize, usize) {
        let (mut start, mut end) = (0usize, i);
        for (l, bits) in self.levels.iter().enumerate() {
            let bit = (sym >> (LEVELS - 1 - l)) & 1 == 1;
            if bit {
                start = self.zeros[l] + bits.rank1_0(start);
                end = self.zeros[l] + bits.rank1_0(end);
            } else {
                start -= bits.rank1_0(start);
                end -= bits.rank1_0(end);
            }
        }
        (start, end)
    }

    /// Occurrences of `sym` in positions `1..=i`. Panics if `i > len`.
    pub fn rank(&self, sym: u8, i: usize) -> usize {
        assert!(i <= self.len, "rank position {i} exceeds length {}", self.len);
        probe::hit();
        if sym >= MAX_SYMBOLS {
            return 0;
        }
        let (s, e) = self.descend(sym, i);
        e - s
    }

    /// 1-based position of the `j`-th occurrence of `sym`, if any.
    pub fn select(&self, sym: u8, j: usize) -> Option<usize> {
        probe::hit();
        if sym >= MAX_SYMBOLS || j == 0 {
            return None;
        }
        let (s, e) = self.descend(sym, self.len);
        if j > e - s {
            return None;
        }
        let mut pos = s + j - 1;
        for l in (0..LEVELS).rev() {
            let bits = &self.levels[l];
            let bit = (sym >> (LEVELS - 1 - l)) & 1 == 1;
            pos = if bit {
                bits.select1_0(pos - self.zeros[l])?
            } else {
                bits.select0_0(pos)?
            };
        }
        Some(pos + 1)
    }

    pub fn checked_access(&self, i: usize) -> Result<u8> {
        if i == 0 || i > self.len {
            return Err(Error::Range { what: "sequence access", index: i, bound: self.len });
        }
        Ok(self.access(i))
    }

    pub fn checked_rank(&self, sym: u8, i: usize) -> Result<usize> {
        if i > self.len {
            return Err(Error::Range { what: "sequence rank", index: i, bound: self.len });
        }
        Ok(self.rank(sym, i))
    }

    pub fn checked_select(&self, sym: u8, j: usize) -> Result<usize> {
        self.select(sym, j)
            .ok_or_else(|| Error::NotFound(format!("select of symbol {sym} occurrence {j}")))
    }

    pub fn size_in_bits(&self) -> usize {
        self.levels.iter().map(|l| l.size_in_bits()).sum::<usize>() + 64 * LEVELS
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tiny_sequence() {
        // A C G Ā T with A=0 C=1 G=2 T=3 and flagged = +4
        let w = WaveletSeq::new(&[0, 1, 2, 4, 3]).unwrap();
        assert_eq!(w.rank(4, 5), 1);
        assert_eq!(w.select(3, 1), Some(5));
        assert_eq!(w.access(4), 4);
        assert_eq!(w.select(4, 2), None);
        assert!(w.checked_access(6).is_err());
        assert!(WaveletSeq::new(&[8]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn matches_linear_scan(seq in prop::collection::vec(0u8..8, 0..2000)) {
            let w = WaveletSeq::new(&seq).unwrap();
            let mut counts = [0usize; 8];
            for (i, &s) in seq.iter().enumerate() {
                prop_assert_eq!(w.access(i + 1), s);
                counts[s as usize] += 1;
                prop_assert_eq!(w.select(s, counts[s as usize]), Some(i + 1));
                for c in 0..8u8 {
                    prop_assert_eq!(w.rank(c, i + 1), counts[c as usize]);
                }
            }
            prop_assert_eq!((0..8u8).map(|c| w.rank(c, seq.len())).sum::<usize>(), seq.len());
        }
    }
}
