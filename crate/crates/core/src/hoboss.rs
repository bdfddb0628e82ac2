//! Hidden-order BOSS: the order-K index plus the balanced-parentheses
//! topology `F` of the m-pruned compact trie of reversed K-mers.
//!
//! A variable-order node is addressed either by its open parenthesis in `F`
//! (its id) or by the span of colex leaf ranks below it (a [`NodeRange`]).
//! String depths are never stored.

use std::fmt;

use crate::alphabet::{EdgeSym, BASES, SIGMA};
use crate::boss::BossIndex;
use crate::error::{Error, Result};
use crate::ingest::{build_boss_arrays, build_lcs, extract_kmers, EdgeTable, LcsArray, ReadSet};
use crate::succinct::{BitSeqBuilder, BpTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeRange {
    pub lo: usize,
    pub hi: usize,
}

impl NodeRange {
    pub fn new(lo: usize, hi: usize) -> Self {
        NodeRange { lo, hi }
    }

    pub fn leaf(j: usize) -> Self {
        NodeRange { lo: j, hi: j }
    }

    pub fn len(&self) -> usize {
        self.hi + 1 - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }

    pub fn is_single(&self) -> bool {
        self.lo == self.hi
    }
}

impl fmt::Display for NodeRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// Distinct outgoing symbols of a node range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OutSymbols {
    DollarOnly,
    Unique(u8),
    Branching(Vec<u8>),
}

/// BP topology of the compact trie over reversed K-mers, keeping only
/// internal nodes of string depth `>= m` below an always-present root.
pub fn build_topology(lcs: &LcsArray, k: usize, m: usize) -> Result<BpTree> {
    if m == 0 || m > k {
        return Err(Error::Config(format!("minimum order {m} must lie in 1..={k}")));
    }
    let n = lcs.len();
    let mut closes = vec![0u32; n + 1];
    let mut opens = vec![0u32; n + 2];
    let keep = |d: usize| d >= m;

    // an l-interval ends at leaf i-1 when the boundary LCS[i] drops below l
    let mut stack: Vec<usize> = vec![0];
    for i in 2..=n + 1 {
        let l = if i <= n { lcs.get(i) } else { 0 };
        while *stack.last().unwrap() > l {
            let d = stack.pop().unwrap();
            if keep(d) {
                closes[i - 1] += 1;
            }
        }
        if *stack.last().unwrap() < l {
            stack.push(l);
        }
    }
    stack.clear();
    stack.push(0);
    for j in (1..=n).rev() {
        let l = if j >= 2 { lcs.get(j) } else { 0 };
        while *stack.last().unwrap() > l {
            let d = stack.pop().unwrap();
            if keep(d) {
                opens[j] += 1;
            }
        }
        if *stack.last().unwrap() < l {
            stack.push(l);
        }
    }

    let mut f = BitSeqBuilder::new();
    f.push(true);
    for i in 1..=n {
        for _ in 0..opens[i] {
            f.push(true);
        }
        f.push(true);
        f.push(false);
        for _ in 0..closes[i] {
            f.push(false);
        }
    }
    f.push(false);
    BpTree::new(f.build())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HoBossIndex {
    boss: BossIndex,
    topo: BpTree,
    m: usize,
}

impl HoBossIndex {
    pub fn build(reads: &ReadSet, k: usize, m: usize) -> Result<Self> {
        if m == 0 || m > k {
            return Err(Error::Config(format!("minimum order {m} must lie in 1..={k}")));
        }
        Self::from_table(&extract_kmers(reads, k)?, m)
    }

    pub fn from_table(t: &EdgeTable, m: usize) -> Result<Self> {
        let boss = BossIndex::from_arrays(build_boss_arrays(t)?)?;
        let topo = build_topology(&build_lcs(t), t.k(), m)?;
        Self::from_parts(boss, topo, m)
    }

    pub fn from_parts(boss: BossIndex, topo: BpTree, m: usize) -> Result<Self> {
        let n = boss.n_nodes();
        if topo.leaf_count() != n {
            return Err(Error::Invariant(format!("F has {} leaves for {n} nodes", topo.leaf_count())));
        }
        if topo.len() > 4 * n {
            return Err(Error::Invariant(format!("F uses {} bits for {n} nodes, over 4n", topo.len())));
        }
        if m == 0 || m > boss.k() {
            return Err(Error::Config(format!("minimum order {m} must lie in 1..={}", boss.k())));
        }
        Ok(HoBossIndex { boss, topo, m })
    }

    pub fn boss(&self) -> &BossIndex {
        &self.boss
    }

    pub fn topology(&self) -> &BpTree {
        &self.topo
    }

    pub fn k(&self) -> usize {
        self.boss.k()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n_nodes(&self) -> usize {
        self.boss.n_nodes()
    }

    pub fn root_range(&self) -> NodeRange {
        NodeRange::new(1, self.n_nodes())
    }

    fn check_range(&self, r: NodeRange) -> Result<()> {
        if r.lo == 0 || r.lo > r.hi || r.hi > self.n_nodes() {
            return Err(Error::Range { what: "node range", index: r.hi.max(r.lo), bound: self.n_nodes() });
        }
        Ok(())
    }

    pub fn id2range(&self, v: usize) -> Result<NodeRange> {
        let c = self.topo.close(v)?;
        Ok(NodeRange::new(self.topo.rank_leaf(v - 1) + 1, self.topo.rank_leaf(c)))
    }

    pub fn range2id(&self, r: NodeRange) -> Result<usize> {
        self.check_range(r)?;
        let a = self.topo.select_leaf(r.lo)?;
        if r.is_single() {
            return Ok(a);
        }
        self.topo.lca(a, self.topo.select_leaf(r.hi)?)
    }

    /// Parent context of `r`, or `None` once the context would fall below
    /// the minimum order (the parent is the dummy root).
    pub fn shorter(&self, r: NodeRange) -> Result<Option<NodeRange>> {
        let v = self.range2id(r)?;
        match self.topo.enclose(v)? {
            Some(p) if p != self.topo.root() => Ok(Some(self.id2range(p)?)),
            _ => Ok(None),
        }
    }

    /// Repeats [`shorter`](Self::shorter) until the out-symbol set changes.
    pub fn shorter_until_new_edges(&self, r: NodeRange) -> Result<Option<NodeRange>> {
        let base = self.out_symbols(r)?;
        let mut cur = r;
        loop {
            match self.shorter(cur)? {
                None => return Ok(None),
                Some(p) => {
                    if self.out_symbols(p)? != base {
                        return Ok(Some(p));
                    }
                    cur = p;
                }
            }
        }
    }

    /// Range of the context `P·a` where `r` is the context `P`.
    pub fn vo_forward(&self, r: NodeRange, a: u8) -> Result<NodeRange> {
        self.check_range(r)?;
        if !BASES.contains(&a) {
            return Err(Error::Argument(format!("edge label {a} is not a base")));
        }
        let (p, q) = self.boss.rows_of(r.lo, r.hi);
        let plain = EdgeSym::Plain(a);
        let sp = self.boss.e_rank_unchecked(plain, p - 1) + 1;
        let ep = self.boss.e_rank_unchecked(plain, q);
        let (i2, j2) = if ep >= sp {
            let i2 = self.boss.counts()[a as usize] + sp;
            (i2, i2 + (ep - sp))
        } else {
            let flagged = EdgeSym::Flagged(a);
            if self.boss.e_rank_unchecked(flagged, q) == self.boss.e_rank_unchecked(flagged, p - 1) {
                return Err(Error::NotFound(format!("range {r} has no out-edge {plain}")));
            }
            // only flagged copies: the target is the primary edge's target
            let i2 = self.boss.counts()[a as usize] + sp - 1;
            (i2, i2)
        };
        let vi = self.topo.select_leaf(i2)?;
        let vj = if j2 == i2 { vi } else { self.topo.select_leaf(j2)? };
        self.id2range(self.topo.lca(vi, vj)?)
    }

    pub fn out_symbols(&self, r: NodeRange) -> Result<OutSymbols> {
        self.check_range(r)?;
        let (p, q) = self.boss.rows_of(r.lo, r.hi);
        let be = self.boss.non_dollar_bits();
        let (r0, r1) = (be.rank1(p - 1), be.rank1(q));
        if r0 == r1 {
            return Ok(OutSymbols::DollarOnly);
        }
        let e = self.boss.reduced_edges();
        let first = EdgeSym::from_reduced(e.access(r0 + 1)).base();
        let count = |b: u8| {
            let (pl, fl) = (EdgeSym::Plain(b).reduced_code().unwrap(), EdgeSym::Flagged(b).reduced_code().unwrap());
            e.rank(pl, r1) - e.rank(pl, r0) + e.rank(fl, r1) - e.rank(fl, r0)
        };
        if count(first) == r1 - r0 {
            return Ok(OutSymbols::Unique(first));
        }
        Ok(OutSymbols::Branching(BASES.iter().copied().filter(|&b| count(b) > 0).collect()))
    }

    /// Leaf spans of the children of `r`'s trie node; empty for a leaf.
    pub fn children_ranges(&self, r: NodeRange) -> Result<Vec<NodeRange>> {
        let v = self.range2id(r)?;
        if self.topo.is_leaf(v) {
            return Ok(Vec::new());
        }
        self.topo.child_iter(v)?.map(|c| self.id2range(c)).collect()
    }

    /// Number of distinct left extensions of the context of `r`.
    ///
    /// For a leaf this is its in-degree in the order-K graph; for an internal
    /// node it is the number of trie children.
    pub fn in_count(&self, r: NodeRange) -> Result<usize> {
        let v = self.range2id(r)?;
        if self.topo.is_leaf(v) {
            self.boss.indegree(r.lo)
        } else {
            self.topo.children(v)
        }
    }

    /// All F node ids in preorder.
    pub fn preorder_ids(&self) -> impl Iterator<Item = usize> + '_ {
        let f = self.topo.parens();
        (1..=f.count_ones()).map(move |j| f.select1(j).unwrap())
    }

    /// Bits used by each component: `[B, BE, E', C, F]`.
    pub fn component_bits(&self) -> [usize; 5] {
        [
            self.boss.last_bits().size_in_bits(),
            self.boss.non_dollar_bits().size_in_bits(),
            self.boss.reduced_edges().size_in_bits(),
            64 * (SIGMA + 1),
            self.topo.size_in_bits(),
        ]
    }

    pub fn size_in_bits(&self) -> usize {
        self.component_bits().iter().sum()
    }

}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{decode_str, encode_str, A, C, G, T};
    use crate::succinct::probe;
    use proptest::prelude::*;

    fn tiny(m: usize) -> HoBossIndex {
        HoBossIndex::build(&ReadSet::from_sequences(&["TACGT"]), 3, m).unwrap()
    }

    /// Parenthesis string of the trie built by explicit interval enumeration.
    fn naive_topology(lcs: &[usize], n: usize, m: usize) -> String {
        // intervals [i,j] with depth d = min LCS over (i,j], maximal for d
        let mut ivs: Vec<(usize, usize)> = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                let d = (i + 1..=j).map(|x| lcs[x]).min().unwrap();
                let left_ok = i == 1 || lcs[i] < d;
                let right_ok = j == n || lcs[j + 1] < d;
                if d >= m && left_ok && right_ok {
                    ivs.push((i, j));
                }
            }
        }
        let mut s = String::from("(");
        for i in 1..=n {
            s.extend(std::iter::repeat_n('(', ivs.iter().filter(|iv| iv.0 == i).count()));
            s.push_str("()");
            s.extend(std::iter::repeat_n(')', ivs.iter().filter(|iv| iv.1 == i).count()));
        }
        s.push(')');
        s
    }

    #[test]
    fn tiny_topology() {
        assert_eq!(tiny(1).topology().to_string(), "(()()()()(()()))");
        assert_eq!(tiny(2).topology().to_string(), "(()()()()()())");
        let star = build_topology(&LcsArray::from_values(vec![0; 5]), 4, 1).unwrap();
        assert_eq!(star.to_string(), "(()()()()())");
        assert!(matches!(build_topology(&LcsArray::from_values(vec![0; 5]), 4, 5), Err(Error::Config(_))));
    }

    #[test]
    fn tiny_navigation() {
        let h = tiny(1);
        let t = h.topology();
        for j in 1..=6 {
            assert_eq!(h.id2range(t.select_leaf(j).unwrap()).unwrap(), NodeRange::leaf(j));
            assert_eq!(h.range2id(NodeRange::leaf(j)).unwrap(), t.select_leaf(j).unwrap());
        }
        assert_eq!(h.id2range(1).unwrap(), NodeRange::new(1, 6));
        assert_eq!(h.range2id(NodeRange::new(1, 6)).unwrap(), 1);
        assert_eq!(h.id2range(10).unwrap(), NodeRange::new(5, 6));
        assert_eq!(h.shorter(NodeRange::leaf(5)).unwrap(), Some(NodeRange::new(5, 6)));
        assert_eq!(h.shorter(NodeRange::new(5, 6)).unwrap(), None);
        assert_eq!(h.vo_forward(NodeRange::new(5, 6), A).unwrap(), NodeRange::leaf(2));
        assert_eq!(h.vo_forward(NodeRange::leaf(3), G).unwrap(), NodeRange::leaf(4));
        assert!(matches!(h.vo_forward(NodeRange::leaf(3), C), Err(Error::NotFound(_))));
        assert_eq!(h.out_symbols(NodeRange::leaf(3)).unwrap(), OutSymbols::Unique(G));
        assert_eq!(h.out_symbols(NodeRange::leaf(6)).unwrap(), OutSymbols::DollarOnly);
        let kids = h.children_ranges(h.root_range()).unwrap();
        assert_eq!(
            kids,
            vec![NodeRange::leaf(1), NodeRange::leaf(2), NodeRange::leaf(3), NodeRange::leaf(4), NodeRange::new(5, 6)]
        );
        assert!(h.children_ranges(NodeRange::leaf(2)).unwrap().is_empty());
        assert!(h.range2id(NodeRange::new(0, 2)).is_err());
        assert!(h.range2id(NodeRange::new(3, 7)).is_err());
    }

    #[test]
    fn vo_forward_from_root_spans_symbol_block() {
        let h = HoBossIndex::build(&ReadSet::from_sequences(&["ACGTTGCAACG", "GGTACCA"]), 4, 1).unwrap();
        let labels: Vec<Vec<u8>> = (1..=h.n_nodes()).map(|v| h.boss().label(v).unwrap()).collect();
        for a in BASES {
            let r = h.vo_forward(h.root_range(), a).unwrap();
            let ending: Vec<usize> = (1..=h.n_nodes()).filter(|&v| *labels[v - 1].last().unwrap() == a).collect();
            assert_eq!(r, NodeRange::new(ending[0], *ending.last().unwrap()));
        }
    }

    #[test]
    fn branching_out_symbols() {
        let h = HoBossIndex::build(&ReadSet::from_sequences(&["TACGT", "TACGA"]), 3, 1).unwrap();
        let acg = encode_str("ACG").unwrap();
        let v = (1..=h.n_nodes()).find(|&v| h.boss().label(v).unwrap() == acg).unwrap();
        assert_eq!(h.out_symbols(NodeRange::leaf(v)).unwrap(), OutSymbols::Branching(vec![A, T]));
    }

    #[test]
    fn vo_forward_uses_constant_primitive_calls() {
        let mut counts = Vec::new();
        for len in [50usize, 5000] {
            let g = crate::sim::random_genome(len, 7);
            let h = HoBossIndex::build(&ReadSet::from_sequences(&[g]), 12, 3).unwrap();
            let mut worst = 0;
            for v in (1..=h.n_nodes()).step_by(7) {
                let r = NodeRange::leaf(v);
                if let Ok(OutSymbols::Unique(a)) = h.out_symbols(r) {
                    probe::reset();
                    h.vo_forward(r, a).unwrap();
                    worst = worst.max(probe::calls());
                    probe::reset();
                    h.shorter(r).unwrap();
                    worst = worst.max(probe::calls());
                }
            }
            counts.push(worst);
        }
        assert!(counts[0] > 0 && counts[1] <= 16, "{counts:?}");
        assert_eq!(counts[0], counts[1]);
    }

    #[test]
    fn child_edges_are_subset_of_parent() {
        let h = HoBossIndex::build(&ReadSet::from_sequences(&["ACGTACGGATCCA", "TTACGGA", "CGGATT"]), 5, 1).unwrap();
        let set = |r| match h.out_symbols(r).unwrap() {
            OutSymbols::DollarOnly => vec![],
            OutSymbols::Unique(a) => vec![a],
            OutSymbols::Branching(s) => s,
        };
        for v in h.preorder_ids().skip(1) {
            let r = h.id2range(v).unwrap();
            if let Some(p) = h.shorter(r).unwrap() {
                let parent = set(p);
                assert!(set(r).iter().all(|a| parent.contains(a)), "{r} vs {p}");
            }
        }
        let _ = decode_str(&[]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn topology_matches_interval_oracle(
            reads in prop::collection::vec("[ACGT]{1,30}", 1..8),
            k in 2usize..7,
            m_off in 0usize..3,
        ) {
            let m = 1 + m_off.min(k - 1);
            let t = extract_kmers(&ReadSet::from_sequences(&reads), k).unwrap();
            let lcs = build_lcs(&t);
            let n = lcs.len();
            let vals: Vec<usize> = std::iter::once(0).chain((1..=n).map(|i| lcs.get(i))).chain([0]).collect();
            let f = build_topology(&lcs, k, m).unwrap();
            prop_assert_eq!(f.to_string(), naive_topology(&vals, n, m));
            prop_assert!(f.len() <= 4 * n);
            prop_assert_eq!(f.leaf_count(), n);
            let h = HoBossIndex::from_table(&t, m).unwrap();
            for v in h.preorder_ids() {
                let r = h.id2range(v).unwrap();
                prop_assert_eq!(h.range2id(r).unwrap(), v);
                if v != 1 && !f.is_leaf(v) {
                    prop_assert!(f.children(v).unwrap() >= 2);
                }
                let kids = h.children_ranges(r).unwrap();
                if !kids.is_empty() {
                    prop_assert_eq!(kids[0].lo, r.lo);
                    prop_assert_eq!(kids.last().unwrap().hi, r.hi);
                    for w in kids.windows(2) { prop_assert_eq!(w[0].hi + 1, w[1].lo); }
                }
            }
        }
    }
}
