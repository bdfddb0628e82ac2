//! Balanced-parentheses ordinal trees.
//!
//! A node is identified by the 1-based position of its open parenthesis.
//! Navigation runs on a two-level range-min structure over the excess
//! sequence: per-block minima plus a segment tree over the blocks. The leaf
//! pattern `()` has its own sampled rank directory.

use super::bitseq::{select_in_word, BitSeq};
use super::probe;
use crate::error::{Error, Result};

const BLOCK_WORDS: usize = 4;
const BLOCK: usize = 64 * BLOCK_WORDS;

/// Min segment tree over block minima.
#[derive(Clone, Debug, PartialEq, Eq)]
struct MinTree {
    size: usize,
    n: usize,
    tree: Vec<i64>,
}

impl MinTree {
    fn new(values: &[i64]) -> Self {
        let n = values.len();
        let size = n.next_power_of_two().max(1);
        let mut tree = vec![i64::MAX; 2 * size];
        tree[size..size + n].copy_from_slice(values);
        for i in (1..size).rev() {
            tree[i] = tree[2 * i].min(tree[2 * i + 1]);
        }
        MinTree { size, n, tree }
    }

    /// First block index `>= from` whose minimum is `<= t`.
    fn first_leq(&self, from: usize, t: i64) -> Option<usize> {
        if from >= self.n {
            return None;
        }
        self.first_leq_rec(1, 0, self.size, from, t)
    }

    fn first_leq_rec(&self, node: usize, lo: usize, hi: usize, from: usize, t: i64) -> Option<usize> {
        if hi <= from || self.tree[node] > t {
            return None;
        }
        if hi - lo == 1 {
            return Some(lo);
        }
        let mid = (lo + hi) / 2;
        self.first_leq_rec(2 * node, lo, mid, from, t)
            .or_else(|| self.first_leq_rec(2 * node + 1, mid, hi, from, t))
    }

    /// Last block index `< until` whose minimum is `<= t`.
    fn last_leq(&self, until: usize, t: i64) -> Option<usize> {
        if until == 0 {
            return None;
        }
        self.last_leq_rec(1, 0, self.size, until, t)
    }

    fn last_leq_rec(&self, node: usize, lo: usize, hi: usize, until: usize, t: i64) -> Option<usize> {
        if lo >= until || self.tree[node] > t {
            return None;
        }
        if hi - lo == 1 {
            return Some(lo);
        }
        let mid = (lo + hi) / 2;
        self.last_leq_rec(2 * node + 1, mid, hi, until, t)
            .or_else(|| self.last_leq_rec(2 * node, lo, mid, until, t))
    }

    /// Block with the minimum value in `[l, r)`, leftmost on ties.
    fn argmin(&self, l: usize, r: usize) -> Option<(usize, i64)> {
        if l >= r {
            return None;
        }
        let best = self.min_rec(1, 0, self.size, l, r);
        self.first_leq(l, best)
            .filter(|&b| b < r)
            .map(|b| (b, best))
    }

    fn min_rec(&self, node: usize, lo: usize, hi: usize, l: usize, r: usize) -> i64 {
        if hi <= l || r <= lo {
            return i64::MAX;
        }
        if l <= lo && hi <= r {
            return self.tree[node];
        }
        let mid = (lo + hi) / 2;
        self.min_rec(2 * node, lo, mid, l, r)
            .min(self.min_rec(2 * node + 1, mid, hi, l, r))
    }
}

/// A static ordinal tree in balanced-parentheses form (`1` = `(`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BpTree {
    parens: BitSeq,
    /// Excess after the last bit of each block.
    block_end: Vec<i64>,
    /// Minimum excess reached inside each block.
    mins: MinTree,
    block_min: Vec<i64>,
    /// Leaves (pattern `10`) starting before each 512-bit superblock.
    leaf_supers: Vec<u64>,
    leaves: usize,
}

impl BpTree {
    pub fn new(parens: BitSeq) -> Result<Self> {
        if parens.is_sparse() {
            return Err(Error::Argument("parentheses must use the plain encoding".into()));
        }
        let len = parens.len();
        let n_blocks = len.div_ceil(BLOCK);
        let mut block_end = Vec::with_capacity(n_blocks);
        let mut block_min = Vec::with_capacity(n_blocks);
        let mut e = 0i64;
        for b in 0..n_blocks {
            let mut mn = i64::MAX;
            for i in b * BLOCK..((b + 1) * BLOCK).min(len) {
                e += if parens.get0(i) { 1 } else { -1 };
                if e < 0 {
                    return Err(Error::Argument(format!("unbalanced parentheses at position {}", i + 1)));
                }
                mn = mn.min(e);
            }
            block_end.push(e);
            block_min.push(mn);
        }
        if e != 0 {
            return Err(Error::Argument(format!("parentheses leave excess {e}")));
        }
        let words = parens.plain().expect("plain").words();
        let mut leaf_supers = Vec::with_capacity(words.len() / 8 + 2);
        let mut acc = 0u64;
        for w in 0..words.len() {
            if w % 8 == 0 {
                leaf_supers.push(acc);
            }
            acc += leaf_word(words, w).count_ones() as u64;
        }
        leaf_supers.push(acc);
        let mins = MinTree::new(&block_min);
        Ok(BpTree { parens, block_end, mins, block_min, leaf_supers, leaves: acc as usize })
    }

    pub fn from_parens(s: &str) -> Result<Self> {
        Self::new(BitSeq::from_bits(s.chars().filter_map(|c| match c {
            '(' => Some(true),
            ')' => Some(false),
            _ => None,
        })))
    }

    pub fn parens(&self) -> &BitSeq {
        &self.parens
    }

    /// Length in parentheses (bits).
    pub fn len(&self) -> usize {
        self.parens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parens.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.parens.count_ones()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves
    }

    pub fn root(&self) -> usize {
        1
    }

    pub fn is_open(&self, v: usize) -> bool {
        v >= 1 && v <= self.len() && self.parens.get0(v - 1)
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.is_open(v) && v < self.len() && !self.parens.get0(v)
    }

    fn check_open(&self, v: usize) -> Result<()> {
        if self.is_open(v) {
            Ok(())
        } else {
            Err(Error::Argument(format!("position {v} is not an open parenthesis")))
        }
    }

    /// Excess after 0-based position `i`; `i = -1` is the empty prefix.
    fn excess0(&self, i: isize) -> i64 {
        if i < 0 {
            return 0;
        }
        let n = i as usize + 1;
        2 * self.parens.rank1_0(n) as i64 - n as i64
    }

    fn block_start_excess(&self, b: usize) -> i64 {
        if b == 0 {
            0
        } else {
            self.block_end[b - 1]
        }
    }

    /// First 0-based `j > i` with excess `<= t`.
    fn fwd_leq(&self, i: usize, t: i64) -> Option<usize> {
        let len = self.len();
        let mut e = self.excess0(i as isize);
        let b = i / BLOCK;
        let end = ((b + 1) * BLOCK).min(len);
        for j in i + 1..end {
            e += if self.parens.get0(j) { 1 } else { -1 };
            if e <= t {
                return Some(j);
            }
        }
        let nb = self.mins.first_leq(b + 1, t)?;
        let mut e = self.block_start_excess(nb);
        for j in nb * BLOCK..((nb + 1) * BLOCK).min(len) {
            e += if self.parens.get0(j) { 1 } else { -1 };
            if e <= t {
                return Some(j);
            }
        }
        unreachable!("block minimum promised a hit")
    }

    /// Last 0-based `j < i` with excess `<= t`, or -1 for the empty prefix.
    fn bwd_leq(&self, i: usize, t: i64) -> isize {
        if i == 0 {
            return -1;
        }
        let b = i / BLOCK;
        if i > b * BLOCK {
            let mut e = self.excess0(i as isize - 1);
            let mut j = i - 1;
            loop {
                if e <= t {
                    return j as isize;
                }
                if j == b * BLOCK {
                    break;
                }
                e -= if self.parens.get0(j) { 1 } else { -1 };
                j -= 1;
            }
        }
        match self.mins.last_leq(b, t) {
            None => -1,
            Some(pb) => {
                let mut e = self.block_end[pb];
                let mut j = ((pb + 1) * BLOCK).min(self.len()) - 1;
                loop {
                    if e <= t {
                        return j as isize;
                    }
                    e -= if self.parens.get0(j) { 1 } else { -1 };
                    j -= 1;
                }
            }
        }
    }

    /// Matching close parenthesis of the open parenthesis at `v`.
    pub fn close(&self, v: usize) -> Result<usize> {
        self.check_open(v)?;
        probe::hit();
        Ok(self.close_unchecked(v))
    }

    fn close_unchecked(&self, v: usize) -> usize {
        let o = v - 1;
        let t = self.excess0(o as isize) - 1;
        self.fwd_leq(o, t).expect("balanced sequence") + 1
    }

    /// Parent of `v`, or `None` when `v` is the root.
    pub fn enclose(&self, v: usize) -> Result<Option<usize>> {
        self.check_open(v)?;
        probe::hit();
        Ok(self.enclose_unchecked(v))
    }

    fn enclose_unchecked(&self, v: usize) -> Option<usize> {
        let o = v - 1;
        let t = self.excess0(o as isize) - 2;
        if t < 0 {
            return None;
        }
        let j = self.bwd_leq(o, t);
        Some((j + 2) as usize)
    }

    /// Lowest common ancestor of the nodes at `u` and `v`.
    pub fn lca(&self, u: usize, v: usize) -> Result<usize> {
        self.check_open(u)?;
        self.check_open(v)?;
        probe::hit();
        let (u, v) = if u <= v { (u, v) } else { (v, u) };
        if u == v || v <= self.close_unchecked(u) {
            return Ok(u);
        }
        let m = self.argmin_excess(u - 1, v - 1);
        // m + 1 is the open parenthesis of a child of the lca
        Ok(self.enclose_unchecked(m + 2).expect("non-root child"))
    }

    /// Some 0-based position of minimum excess in `[l, r]`.
    fn argmin_excess(&self, l: usize, r: usize) -> usize {
        let (bl, br) = (l / BLOCK, r / BLOCK);
        let scan = |from: usize, to: usize, best: &mut (i64, usize)| {
            let mut e = self.excess0(from as isize);
            if e < best.0 {
                *best = (e, from);
            }
            for j in from + 1..=to {
                e += if self.parens.get0(j) { 1 } else { -1 };
                if e < best.0 {
                    *best = (e, j);
                }
            }
        };
        let mut best = (i64::MAX, l);
        if bl == br {
            scan(l, r, &mut best);
            return best.1;
        }
        scan(l, (bl + 1) * BLOCK - 1, &mut best);
        if let Some((b, mn)) = self.mins.argmin(bl + 1, br) {
            if mn < best.0 {
                let mut inner = (i64::MAX, b * BLOCK);
                scan(b * BLOCK, (b + 1) * BLOCK - 1, &mut inner);
                debug_assert_eq!(inner.0, self.block_min[b]);
                best = inner;
            }
        }
        scan(br * BLOCK, r, &mut best);
        best.1
    }

    /// Number of children of `v`.
    pub fn children(&self, v: usize) -> Result<usize> {
        Ok(self.child_iter(v)?.count())
    }

    /// Open positions of the children of `v`, left to right.
    pub fn child_iter(&self, v: usize) -> Result<impl Iterator<Item = usize> + '_> {
        self.check_open(v)?;
        probe::hit();
        let mut next = v + 1;
        Ok(std::iter::from_fn(move || {
            if next <= self.len() && self.parens.get0(next - 1) {
                let c = next;
                next = self.close_unchecked(c) + 1;
                Some(c)
            } else {
                None
            }
        }))
    }

    /// Leaves whose open parenthesis lies in `1..=i`.
    pub fn rank_leaf(&self, i: usize) -> usize {
        assert!(i <= self.len());
        probe::hit();
        self.rank_leaf0(i)
    }

    fn rank_leaf0(&self, i: usize) -> usize {
        let words = self.parens.plain().expect("plain").words();
        let s = i / 512;
        let mut r = self.leaf_supers[s] as usize;
        let w_end = i / 64;
        for w in s * 8..w_end {
            r += leaf_word(words, w).count_ones() as usize;
        }
        let rem = i % 64;
        if rem > 0 {
            r += (leaf_word(words, w_end) & ((1u64 << rem) - 1)).count_ones() as usize;
        }
        r
    }

    /// Open position of the `j`-th leaf, left to right.
    pub fn select_leaf(&self, j: usize) -> Result<usize> {
        probe::hit();
        if j == 0 || j > self.leaves {
            return Err(Error::NotFound(format!("leaf {j} of {}", self.leaves)));
        }
        let k = j - 1;
        let words = self.parens.plain().expect("plain").words();
        let n_sup = self.leaf_supers.len() - 1;
        let (mut lo, mut hi) = (0usize, n_sup);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.leaf_supers[mid] as usize <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut remaining = k - self.leaf_supers[lo] as usize;
        let mut w = lo * 8;
        loop {
            let lw = leaf_word(words, w);
            let c = lw.count_ones() as usize;
            if remaining < c {
                return Ok(w * 64 + select_in_word(lw, remaining) + 1);
            }
            remaining -= c;
            w += 1;
        }
    }

    /// Preorder rank of the node at `v` (1 for the root).
    pub fn preorder_rank(&self, v: usize) -> usize {
        self.parens.rank1(v)
    }

    /// Depth of `v` (root has depth 1).
    pub fn depth(&self, v: usize) -> usize {
        self.excess0(v as isize - 1) as usize
    }

    pub fn size_in_bits(&self) -> usize {
        self.parens.size_in_bits()
            + 64 * (self.block_end.len() + self.block_min.len() + self.mins.tree.len())
            + 64 * self.leaf_supers.len()
    }
}

/// Bits marking each `1` immediately followed by a `0`.
#[inline]
fn leaf_word(words: &[u64], w: usize) -> u64 {
    let cur = words[w];
    let next_low = words.get(w + 1).map_or(0, |n| n & 1);
    let shifted = (cur >> 1) | (next_low << 63);
    cur & !shifted
}

impl std::fmt::Display for BpTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for b in self.parens.iter() {
            f.write_str(if b { "(" } else { ")" })?;
        }
        Ok(())
    }
}
