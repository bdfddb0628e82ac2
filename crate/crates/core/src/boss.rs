//! Order-K BOSS de Bruijn graph with fixed-order navigation.
//!
//! Nodes are 1-based colex ranks of the distinct K-mers; rows are 1-based
//! positions in `B` and the virtual edge column `E`, which is stored split
//! into `BE` (non-`$` marks) and the reduced wavelet sequence `E'`.

use crate::alphabet::{EdgeSym, BASES, DOLLAR, SIGMA};
use crate::error::{Error, Result};
use crate::ingest::{build_boss_arrays, BossArrays, EdgeTable};
use crate::succinct::{BitSeq, WaveletSeq};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BossIndex {
    k: usize,
    last: BitSeq,
    non_dollar: BitSeq,
    reduced: WaveletSeq,
    counts: [usize; SIGMA + 1],
    n_nodes: usize,
}

impl BossIndex {
    pub fn from_table(t: &EdgeTable) -> Result<Self> {
        Self::from_arrays(build_boss_arrays(t)?)
    }

    pub fn from_arrays(a: BossArrays) -> Result<Self> {
        let n_nodes = a.last.count_ones();
        if a.reduced.len() != a.non_dollar.count_ones() || a.last.len() != a.non_dollar.len() {
            return Err(Error::Invariant("BOSS array lengths disagree".into()));
        }
        if a.counts[SIGMA] != n_nodes || a.counts.windows(2).any(|w| w[0] > w[1]) || a.counts[0] != 0 {
            return Err(Error::Invariant("C array inconsistent with B".into()));
        }
        Ok(BossIndex {
            k: a.k,
            last: a.last,
            non_dollar: a.non_dollar,
            reduced: a.reduced,
            counts: a.counts,
            n_nodes,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.last.len()
    }

    pub fn last_bits(&self) -> &BitSeq {
        &self.last
    }

    pub fn non_dollar_bits(&self) -> &BitSeq {
        &self.non_dollar
    }

    pub fn reduced_edges(&self) -> &WaveletSeq {
        &self.reduced
    }

    pub fn counts(&self) -> &[usize; SIGMA + 1] {
        &self.counts
    }

    fn check_node(&self, v: usize) -> Result<()> {
        if v == 0 || v > self.n_nodes {
            Err(Error::Range { what: "node", index: v, bound: self.n_nodes })
        } else {
            Ok(())
        }
    }

    fn check_row(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n_edges() {
            Err(Error::Range { what: "edge row", index: i, bound: self.n_edges() })
        } else {
            Ok(())
        }
    }

    /// Rows `p..=q` holding the out-edges of nodes `lo..=hi`.
    pub fn rows_of(&self, lo: usize, hi: usize) -> (usize, usize) {
        let p = self.last.select1(lo - 1).expect("node in range") + 1;
        let q = self.last.select1(hi).expect("node in range");
        (p, q)
    }

    /// Node owning row `i`.
    pub fn node_of_row(&self, i: usize) -> usize {
        self.last.rank1(i - 1) + 1
    }

    /// `E[i]`.
    pub fn e_access(&self, i: usize) -> Result<EdgeSym> {
        self.check_row(i)?;
        Ok(self.e_access_unchecked(i))
    }

    fn e_access_unchecked(&self, i: usize) -> EdgeSym {
        if !self.non_dollar.get(i) {
            EdgeSym::Dollar
        } else {
            EdgeSym::from_reduced(self.reduced.access(self.non_dollar.rank1(i)))
        }
    }

    /// Occurrences of `sym` in `E[1..=i]`.
    pub fn e_rank(&self, sym: EdgeSym, i: usize) -> Result<usize> {
        if i > self.n_edges() {
            return Err(Error::Range { what: "edge rank", index: i, bound: self.n_edges() });
        }
        Ok(self.e_rank_unchecked(sym, i))
    }

    #[inline]
    pub(crate) fn e_rank_unchecked(&self, sym: EdgeSym, i: usize) -> usize {
        match sym.reduced_code() {
            None => self.non_dollar.rank0(i),
            Some(c) => self.reduced.rank(c, self.non_dollar.rank1(i)),
        }
    }

    /// Row of the `j`-th occurrence of `sym` in `E`.
    pub fn e_select(&self, sym: EdgeSym, j: usize) -> Result<usize> {
        let found = match sym.reduced_code() {
            None => self.non_dollar.select0(j).filter(|_| j >= 1),
            Some(c) => self.reduced.select(c, j).and_then(|r| self.non_dollar.select1(r)),
        };
        found.ok_or_else(|| Error::NotFound(format!("occurrence {j} of {sym} in E")))
    }

    /// Out-edges of `v`, including a terminal `$` edge.
    pub fn outdegree(&self, v: usize) -> Result<usize> {
        self.check_node(v)?;
        let (p, q) = self.rows_of(v, v);
        Ok(q - p + 1)
    }

    /// Out-edges of `v` that lead to a node (labels other than `$`).
    pub fn outdegree_non_dollar(&self, v: usize) -> Result<usize> {
        self.check_node(v)?;
        let (p, q) = self.rows_of(v, v);
        Ok(self.non_dollar.rank1(q) - self.non_dollar.rank1(p - 1))
    }

    /// Edge symbols of `v` in row order.
    pub fn out_edges(&self, v: usize) -> Result<Vec<EdgeSym>> {
        self.check_node(v)?;
        let (p, q) = self.rows_of(v, v);
        Ok((p..=q).map(|i| self.e_access_unchecked(i)).collect())
    }

    /// Last symbol of node `v`'s K-mer.
    pub fn last_symbol(&self, v: usize) -> Result<u8> {
        self.check_node(v)?;
        Ok(self.last_symbol_unchecked(v))
    }

    fn last_symbol_unchecked(&self, v: usize) -> u8 {
        (0..SIGMA).rev().find(|&a| self.counts[a] < v).unwrap() as u8
    }

    /// Node reached from `v` by the edge labelled `a`.
    pub fn forward_k(&self, v: usize, a: u8) -> Result<usize> {
        self.check_node(v)?;
        if !BASES.contains(&a) {
            return Err(Error::Argument(format!("edge label {a} is not a base")));
        }
        let (p, q) = self.rows_of(v, v);
        let plain = EdgeSym::Plain(a);
        let before = self.e_rank_unchecked(plain, p - 1);
        let upto = self.e_rank_unchecked(plain, q);
        let r = if upto > before {
            upto
        } else if self.e_rank_unchecked(EdgeSym::Flagged(a), q) > self.e_rank_unchecked(EdgeSym::Flagged(a), p - 1) {
            // the unflagged twin precedes this node inside the same suffix run
            before
        } else {
            return Err(Error::NotFound(format!("node {v} has no out-edge {}", EdgeSym::Plain(a))));
        };
        Ok(self.counts[a as usize] + r)
    }

    /// Rows of the edges entering `v`: the unflagged twin and its flagged copies.
    fn in_rows(&self, v: usize) -> Vec<usize> {
        let a = self.last_symbol_unchecked(v);
        if a == DOLLAR {
            return Vec::new();
        }
        let r = v - self.counts[a as usize];
        let plain = EdgeSym::Plain(a);
        let flagged = EdgeSym::Flagged(a);
        let first = self.e_select(plain, r).expect("every base-ending node has an in-edge");
        let stop = self.e_select(plain, r + 1).map(|x| x - 1).unwrap_or(self.n_edges());
        let mut rows = vec![first];
        let f0 = self.e_rank_unchecked(flagged, first);
        let f1 = self.e_rank_unchecked(flagged, stop);
        for j in f0 + 1..=f1 {
            rows.push(self.e_select(flagged, j).expect("counted"));
        }
        rows
    }

    pub fn indegree(&self, v: usize) -> Result<usize> {
        self.check_node(v)?;
        Ok(self.in_rows(v).len())
    }

    /// Nodes with an out-edge into `v`, in increasing order.
    pub fn backward(&self, v: usize) -> Result<Vec<usize>> {
        self.check_node(v)?;
        Ok(self.in_rows(v).into_iter().map(|i| self.node_of_row(i)).collect())
    }

    /// The K-mer of `v`, `$`-padded for dummy nodes.
    pub fn label(&self, v: usize) -> Result<Vec<u8>> {
        self.check_node(v)?;
        let mut out = vec![DOLLAR; self.k];
        let mut cur = v;
        for pos in (0..self.k).rev() {
            let a = self.last_symbol_unchecked(cur);
            if a == DOLLAR {
                break;
            }
            out[pos] = a;
            let row = self.e_select(EdgeSym::Plain(a), cur - self.counts[a as usize])?;
            cur = self.node_of_row(row);
        }
        Ok(out)
    }

    /// True when the K-mer of `v` contains `$`.
    pub fn is_dummy(&self, v: usize) -> Result<bool> {
        Ok(self.label(v)?[0] == DOLLAR)
    }

    pub fn size_in_bits(&self) -> usize {
        self.last.size_in_bits() + self.non_dollar.size_in_bits() + self.reduced.size_in_bits() + 64 * (SIGMA + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{decode_str, encode_str, A, C, G, T};
    use crate::ingest::{extract_kmers, ReadSet};

    fn build(reads: &[&str], k: usize) -> BossIndex {
        BossIndex::from_table(&extract_kmers(&ReadSet::from_sequences(reads), k).unwrap()).unwrap()
    }

    fn node(ix: &BossIndex, s: &str) -> usize {
        let want = encode_str(s).unwrap();
        (1..=ix.n_nodes()).find(|&v| ix.label(v).unwrap() == want).unwrap()
    }

    #[test]
    fn tiny_index() {
        let ix = build(&["TACGT"], 3);
        assert_eq!(ix.n_nodes(), 6);
        assert_eq!(ix.e_access(6).unwrap(), EdgeSym::Dollar);
        assert_eq!(ix.e_access(1).unwrap(), EdgeSym::Plain(T));
        assert_eq!(ix.e_rank(EdgeSym::Dollar, 6).unwrap(), 1);
        assert_eq!(ix.e_select(EdgeSym::Plain(T), 2).unwrap(), 4);
        assert!(ix.e_access(7).is_err());
        assert_eq!(decode_str(&ix.label(3).unwrap()), "TAC");
        assert_eq!(decode_str(&ix.label(1).unwrap()), "$$$");
        let labels: Vec<String> = (1..=6).map(|v| decode_str(&ix.label(v).unwrap())).collect();
        assert_eq!(labels, vec!["$$$", "$TA", "TAC", "ACG", "$$T", "CGT"]);
        assert_eq!(ix.outdegree(3).unwrap(), 1);
        assert_eq!(ix.forward_k(3, G).unwrap(), 4);
        assert!(matches!(ix.forward_k(3, A), Err(Error::NotFound(_))));
        assert_eq!(ix.indegree(1).unwrap(), 0);
        assert!(ix.outdegree(0).is_err());
        assert!(ix.label(7).is_err());
        for v in 1..=6 {
            assert_eq!(ix.outdegree(v).unwrap(), 1);
        }
    }

    #[test]
    fn chain_walk_reconstructs_read() {
        let ix = build(&["GATTACAGG"], 4);
        let mut v = node(&ix, "GATT");
        let mut s = decode_str(&ix.label(v).unwrap());
        while ix.outdegree_non_dollar(v).unwrap() == 1 {
            let a = ix.out_edges(v).unwrap()[0].base();
            s.push(crate::alphabet::decode(a) as char);
            v = ix.forward_k(v, a).unwrap();
        }
        assert_eq!(s, "GATTACAGG");
    }

    #[test]
    fn branching_and_merging() {
        let ix = build(&["TACGT", "TACGA"], 3);
        assert_eq!(ix.outdegree(node(&ix, "ACG")).unwrap(), 2);
        let ix = build(&["TACG", "AACG"], 3);
        let acg = node(&ix, "ACG");
        assert_eq!(ix.indegree(acg).unwrap(), 2);
        let mut preds = ix.backward(acg).unwrap();
        preds.sort();
        let mut want = vec![node(&ix, "TAC"), node(&ix, "AAC")];
        want.sort();
        assert_eq!(preds, want);
        // TAC's G edge is flagged but still resolves to ACG
        assert_eq!(ix.forward_k(node(&ix, "TAC"), G).unwrap(), acg);
        assert_eq!(ix.forward_k(node(&ix, "AAC"), G).unwrap(), acg);
        let _ = C;
    }

    #[test]
    fn reconstructed_e_matches_rank_select() {
        let ix = build(&["ACGTACGGA", "CGTTACG", "GGACGT"], 3);
        let e: Vec<EdgeSym> = (1..=ix.n_edges()).map(|i| ix.e_access(i).unwrap()).collect();
        let mut syms = vec![EdgeSym::Dollar];
        for b in BASES {
            syms.push(EdgeSym::Plain(b));
            syms.push(EdgeSym::Flagged(b));
        }
        for &s in &syms {
            for i in 0..=e.len() {
                assert_eq!(ix.e_rank(s, i).unwrap(), e[..i].iter().filter(|&&x| x == s).count());
            }
            let positions: Vec<usize> = (0..e.len()).filter(|&i| e[i] == s).map(|i| i + 1).collect();
            for (j, &p) in positions.iter().enumerate() {
                assert_eq!(ix.e_select(s, j + 1).unwrap(), p);
            }
            assert!(ix.e_select(s, positions.len() + 1).is_err());
        }
    }
}
