//! Static bitvectors with rank and select.
//!
//! Positions are 1-based: `rank1(i)` counts ones in `1..=i` and `select1(j)`
//! returns the 1-based position of the `j`-th one. Two representations are
//! available: a plain word array with superblock rank samples, and an
//! Elias-Fano encoding for sparse vectors. Both answer identically.

use super::probe;
use crate::error::{Error, Result};

const WORD: usize = 64;
/// Words per rank superblock.
const SUPER_WORDS: usize = 8;
const SUPER_BITS: usize = WORD * SUPER_WORDS;

/// Plain bitvector with cumulative popcounts every 512 bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct PlainBits {
    words: Vec<u64>,
    len: usize,
    /// `supers[s]` = ones in bits `[0, s * SUPER_BITS)`; one trailing entry.
    supers: Vec<u64>,
}

impl PlainBits {
    pub(crate) fn new(words: Vec<u64>, len: usize) -> Self {
        debug_assert!(words.len() == len.div_ceil(WORD));
        let mut supers = Vec::with_capacity(words.len() / SUPER_WORDS + 2);
        let mut acc = 0u64;
        for (w, word) in words.iter().enumerate() {
            if w % SUPER_WORDS == 0 {
                supers.push(acc);
            }
            acc += word.count_ones() as u64;
        }
        supers.push(acc);
        PlainBits { words, len, supers }
    }

    #[inline]
    pub(crate) fn get0(&self, i: usize) -> bool {
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    /// Ones in `[0, i)`.
    #[inline]
    pub(crate) fn rank1_0(&self, i: usize) -> usize {
        let s = i / SUPER_BITS;
        let mut r = self.supers[s] as usize;
        let w_end = i / WORD;
        for w in s * SUPER_WORDS..w_end {
            r += self.words[w].count_ones() as usize;
        }
        let rem = i % WORD;
        if rem > 0 {
            r += (self.words[w_end] & ((1u64 << rem) - 1)).count_ones() as usize;
        }
        r
    }

    pub(crate) fn ones(&self) -> usize {
        *self.supers.last().unwrap() as usize
    }

    /// 0-based position of the one with 0-based rank `k`.
    pub(crate) fn select1_0(&self, k: usize) -> Option<usize> {
        if k >= self.ones() {
            return None;
        }
        // last superblock whose prefix count is <= k
        let n_sup = self.supers.len() - 1;
        let (mut lo, mut hi) = (0usize, n_sup);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.supers[mid] as usize <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut remaining = k - self.supers[lo] as usize;
        let mut w = lo * SUPER_WORDS;
        loop {
            let c = self.words[w].count_ones() as usize;
            if remaining < c {
                return Some(w * WORD + select_in_word(self.words[w], remaining));
            }
            remaining -= c;
            w += 1;
        }
    }

    /// 0-based position of the zero with 0-based rank `k`.
    pub(crate) fn select0_0(&self, k: usize) -> Option<usize> {
        if k >= self.len - self.ones() {
            return None;
        }
        let n_sup = self.supers.len() - 1;
        let zeros_before = |s: usize| s * SUPER_BITS - self.supers[s] as usize;
        let (mut lo, mut hi) = (0usize, n_sup);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if zeros_before(mid) <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut remaining = k - zeros_before(lo);
        let mut w = lo * SUPER_WORDS;
        loop {
            let inv = !self.words[w];
            let c = inv.count_ones() as usize;
            if remaining < c {
                return Some(w * WORD + select_in_word(inv, remaining));
            }
            remaining -= c;
            w += 1;
        }
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    fn directory_bits(&self) -> usize {
        self.supers.len() * 64
    }
}

/// Position of the `k`-th (0-based) set bit of `w`.
#[inline]
pub(crate) fn select_in_word(mut w: u64, k: usize) -> usize {
    for _ in 0..k {
        w &= w - 1;
    }
    w.trailing_zeros() as usize
}

/// Elias-Fano encoding of the positions of the ones.
#[derive(Clone, Debug, PartialEq, Eq)]
struct EliasFano {
    low_width: u32,
    lows: Vec<u64>,
    highs: PlainBits,
    ones: usize,
}

impl EliasFano {
    fn from_positions(positions: &[usize], len: usize) -> Self {
        let ones = positions.len();
        let low_width = if ones == 0 || len <= ones {
            0
        } else {
            usize::BITS - 1 - (len / ones).leading_zeros()
        };
        let high_len = ones + (len >> low_width) + 1;
        let mut high_words = vec![0u64; high_len.div_ceil(WORD)];
        let mut lows = vec![0u64; (ones * low_width as usize).div_ceil(WORD).max(1)];
        let mask = if low_width == 0 { 0 } else { (1u64 << low_width) - 1 };
        for (j, &p) in positions.iter().enumerate() {
            let h = (p >> low_width) + j;
            high_words[h / WORD] |= 1 << (h % WORD);
            if low_width > 0 {
                let bit = j * low_width as usize;
                let v = p as u64 & mask;
                lows[bit / WORD] |= v << (bit % WORD);
                if bit % WORD + low_width as usize > WORD {
                    lows[bit / WORD + 1] |= v >> (WORD - bit % WORD);
                }
            }
        }
        EliasFano { low_width, lows, highs: PlainBits::new(high_words, high_len), ones }
    }

    fn low(&self, j: usize) -> usize {
        if self.low_width == 0 {
            return 0;
        }
        let w = self.low_width as usize;
        let bit = j * w;
        let mut v = self.lows[bit / WORD] >> (bit % WORD);
        if bit % WORD + w > WORD {
            v |= self.lows[bit / WORD + 1] << (WORD - bit % WORD);
        }
        (v & ((1u64 << w) - 1)) as usize
    }

    fn select1_0(&self, k: usize) -> Option<usize> {
        if k >= self.ones {
            return None;
        }
        let h = self.highs.select1_0(k)? - k;
        Some((h << self.low_width) | self.low(k))
    }

    /// Ones in `[0, i)`.
    fn rank1_0(&self, i: usize) -> usize {
        let bucket = i >> self.low_width;
        let low = i & ((1usize << self.low_width) - 1);
        // ones in buckets < bucket
        let start = if bucket == 0 {
            0
        } else {
            match self.highs.select0_0(bucket - 1) {
                Some(p) => p + 1 - bucket,
                None => return self.ones,
            }
        };
        let mut r = start;
        let mut hp = start + bucket;
        while r < self.ones && hp < self.highs.len && self.highs.get0(hp) {
            if self.low(r) >= low {
                break;
            }
            r += 1;
            hp += 1;
        }
        r
    }

    fn directory_bits(&self) -> usize {
        self.lows.len() * 64 + self.highs.words.len() * 64 + self.highs.directory_bits()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    Plain(PlainBits),
    Sparse(EliasFano),
}

/// A static bitvector supporting `rank`, `select` and `access`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitSeq {
    repr: Repr,
    len: usize,
    ones: usize,
}

impl BitSeq {
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut b = BitSeqBuilder::new();
        for bit in bits {
            b.push(bit);
        }
        b.build()
    }

    /// Parses a string of `0`/`1` characters, ignoring anything else.
    pub fn from_str01(s: &str) -> Self {
        Self::from_bits(s.chars().filter_map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        }))
    }

    pub(crate) fn from_words(words: Vec<u64>, len: usize) -> Self {
        let plain = PlainBits::new(words, len);
        let ones = plain.ones();
        BitSeq { repr: Repr::Plain(plain), len, ones }
    }

    /// Re-encodes the same bits with Elias-Fano.
    pub fn to_sparse(&self) -> Self {
        let positions: Vec<usize> = (0..self.ones).map(|k| self.select1_0(k).unwrap()).collect();
        let ef = EliasFano::from_positions(&positions, self.len);
        BitSeq { repr: Repr::Sparse(ef), len: self.len, ones: self.ones }
    }

    pub fn to_plain(&self) -> Self {
        match &self.repr {
            Repr::Plain(_) => self.clone(),
            Repr::Sparse(_) => Self::from_bits((1..=self.len).map(|i| self.get(i))),
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.repr, Repr::Sparse(_))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count_ones(&self) -> usize {
        self.ones
    }

    pub fn count_zeros(&self) -> usize {
        self.len - self.ones
    }

    #[inline]
    pub(crate) fn get0(&self, i: usize) -> bool {
        match &self.repr {
            Repr::Plain(p) => p.get0(i),
            Repr::Sparse(e) => e.rank1_0(i + 1) > e.rank1_0(i),
        }
    }

    /// Bit at 1-based position `i`. Panics if out of range.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i >= 1 && i <= self.len, "bit position {i} out of 1..={}", self.len);
        probe::hit();
        self.get0(i - 1)
    }

    #[inline]
    pub(crate) fn rank1_0(&self, i: usize) -> usize {
        match &self.repr {
            Repr::Plain(p) => p.rank1_0(i),
            Repr::Sparse(e) => e.rank1_0(i),
        }
    }

    pub(crate) fn select1_0(&self, k: usize) -> Option<usize> {
        match &self.repr {
            Repr::Plain(p) => p.select1_0(k),
            Repr::Sparse(e) => e.select1_0(k),
        }
    }

    pub(crate) fn select0_0(&self, k: usize) -> Option<usize> {
        match &self.repr {
            Repr::Plain(p) => p.select0_0(k),
            Repr::Sparse(_) => {
                if k >= self.count_zeros() {
                    return None;
                }
                // smallest i with rank0(i + 1) = k + 1
                let (mut lo, mut hi) = (0usize, self.len);
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    if mid + 1 - self.rank1_0(mid + 1) > k {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                Some(lo)
            }
        }
    }

    /// Ones in positions `1..=i`. Panics if `i > len`.
    #[inline]
    pub fn rank1(&self, i: usize) -> usize {
        assert!(i <= self.len, "rank position {i} exceeds length {}", self.len);
        probe::hit();
        self.rank1_0(i)
    }

    /// Zeros in positions `1..=i`. Panics if `i > len`.
    #[inline]
    pub fn rank0(&self, i: usize) -> usize {
        i - self.rank1(i)
    }

    /// 1-based position of the `j`-th one, `j >= 1`. `select1(0)` is 0.
    #[inline]
    pub fn select1(&self, j: usize) -> Option<usize> {
        probe::hit();
        if j == 0 {
            return Some(0);
        }
        self.select1_0(j - 1).map(|p| p + 1)
    }

    /// 1-based position of the `j`-th zero. `select0(0)` is 0.
    #[inline]
    pub fn select0(&self, j: usize) -> Option<usize> {
        probe::hit();
        if j == 0 {
            return Some(0);
        }
        self.select0_0(j - 1).map(|p| p + 1)
    }

    /// Checked rank for either bit value.
    pub fn rank(&self, bit: bool, i: usize) -> Result<usize> {
        if i > self.len {
            return Err(Error::Range { what: "bit rank", index: i, bound: self.len });
        }
        Ok(if bit { self.rank1(i) } else { self.rank0(i) })
    }

    /// Checked select for either bit value; `j` must be in `1..=count`.
    pub fn select(&self, bit: bool, j: usize) -> Result<usize> {
        let total = if bit { self.ones } else { self.count_zeros() };
        if j == 0 || j > total {
            return Err(Error::NotFound(format!(
                "select{}({j}) with only {total} occurrences",
                bit as u8
            )));
        }
        let p = if bit { self.select1(j) } else { self.select0(j) };
        Ok(p.expect("select within bounds"))
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get0(i))
    }

    /// Raw little-endian words of the plain encoding.
    pub(crate) fn raw_words(&self) -> Vec<u64> {
        match &self.repr {
            Repr::Plain(p) => p.words().to_vec(),
            Repr::Sparse(_) => match self.to_plain().repr {
                Repr::Plain(p) => p.words,
                Repr::Sparse(_) => unreachable!(),
            },
        }
    }

    pub(crate) fn plain(&self) -> Option<&PlainBits> {
        match &self.repr {
            Repr::Plain(p) => Some(p),
            Repr::Sparse(_) => None,
        }
    }

    /// Payload bits (the raw vector or, for sparse mode, the encoded arrays).
    pub fn payload_bits(&self) -> usize {
        match &self.repr {
            Repr::Plain(_) => self.len,
            Repr::Sparse(e) => e.ones * e.low_width as usize + e.highs.len,
        }
    }

    /// Total footprint in bits including rank/select directories.
    pub fn size_in_bits(&self) -> usize {
        match &self.repr {
            Repr::Plain(p) => p.words.len() * 64 + p.directory_bits(),
            Repr::Sparse(e) => e.directory_bits(),
        }
    }
}

impl std::fmt::Display for BitSeq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Default)]
pub struct BitSeqBuilder {
    words: Vec<u64>,
    len: usize,
}

impl BitSeqBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_len(len: usize) -> Self {
        BitSeqBuilder { words: vec![0; len.div_ceil(WORD)], len }
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / WORD] |= 1 << (self.len % WORD);
        }
        self.len += 1;
    }

    /// Sets the 1-based position `i`.
    pub fn set(&mut self, i: usize, bit: bool) {
        let p = i - 1;
        if bit {
            self.words[p / WORD] |= 1 << (p % WORD);
        } else {
            self.words[p / WORD] &= !(1 << (p % WORD));
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn build(self) -> BitSeq {
        BitSeq::from_words(self.words, self.len)
    }
}
