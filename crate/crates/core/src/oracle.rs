//! Brute-force reference built from plain strings.
//!
//! Nothing here reads index internals: the graph is re-derived from the reads
//! by slicing, sorting reversed strings, and scanning sets. Cross-checks at
//! the bottom compare an index against it and collect every disagreement.

use std::collections::{BTreeSet, HashMap};

use crate::hoboss::{HoBossIndex, NodeRange, OutSymbols};
use crate::ingest::ReadSet;

/// Out-symbols of a context, with bases as ASCII.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NaiveOut {
    DollarOnly,
    Unique(u8),
    Branching(Vec<u8>),
}

#[derive(Clone, Debug)]
pub struct NaiveGraph {
    pub k: usize,
    pub m: usize,
    /// Distinct padded `(K+1)`-mers.
    pub kmer_set: BTreeSet<String>,
    /// K-mers in colex order; node `j` is `nodes[j - 1]`.
    pub nodes: Vec<String>,
    rank: HashMap<String, usize>,
    /// Every suffix (including the empty one) of every node, mapped to the
    /// contiguous colex span of nodes ending with it.
    suffix_span: HashMap<String, (usize, usize)>,
    /// Edge symbols leaving each node (index `j - 1`), `$` included.
    out_edges: Vec<Vec<u8>>,
    preds: Vec<Vec<usize>>,
}

impl NaiveGraph {
    pub fn new<S: AsRef<str>>(reads: &[S], k: usize, m: usize) -> Self {
        let mut kmer_set = BTreeSet::new();
        for read in reads {
            for frag in read.as_ref().split(|c: char| !"ACGT".contains(c)) {
                if frag.is_empty() {
                    continue;
                }
                let padded = format!("{}{}", "$".repeat(k), frag);
                let b = padded.as_bytes();
                for w in b.windows(k + 1) {
                    kmer_set.insert(String::from_utf8(w.to_vec()).unwrap());
                }
                kmer_set.insert(format!("{}$", &padded[padded.len() - k..]));
            }
        }
        let mut nodes: Vec<String> = kmer_set.iter().map(|r| r[..k].to_string()).collect();
        nodes.sort_by_key(|s| s.chars().rev().collect::<String>());
        nodes.dedup();
        let rank: HashMap<String, usize> = nodes.iter().enumerate().map(|(i, s)| (s.clone(), i + 1)).collect();
        let mut suffix_span: HashMap<String, (usize, usize)> = HashMap::new();
        for (i, s) in nodes.iter().enumerate() {
            for l in 0..=k {
                let e = suffix_span.entry(s[k - l..].to_string()).or_insert((i + 1, i + 1));
                e.0 = e.0.min(i + 1);
                e.1 = e.1.max(i + 1);
            }
        }
        let mut out_edges = vec![Vec::new(); nodes.len()];
        let mut preds = vec![Vec::new(); nodes.len()];
        for r in &kmer_set {
            let j = rank[&r[..k]];
            out_edges[j - 1].push(r.as_bytes()[k]);
            if let Some(&t) = rank.get(&r[1..]) {
                preds[t - 1].push(j);
            }
        }
        for p in preds.iter_mut() {
            p.sort();
        }
        NaiveGraph { k, m, kmer_set, nodes, rank, suffix_span, out_edges, preds }
    }

    pub fn from_read_set(rs: &ReadSet, k: usize, m: usize) -> Self {
        let reads: Vec<String> = rs.reads.iter().map(|r| r.iter().map(|&c| b"$ACGT"[c as usize] as char).collect()).collect();
        Self::new(&reads, k, m)
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_rank(&self, s: &str) -> Option<usize> {
        self.rank.get(s).copied()
    }

    fn members(&self, suffix: &str) -> Option<(usize, usize)> {
        self.suffix_span.get(suffix).copied()
    }

    fn lcs_of(&self, lo: usize, hi: usize) -> String {
        let first = &self.nodes[lo - 1];
        let mut l = self.k;
        for s in &self.nodes[lo..hi] {
            let c = first.bytes().rev().zip(s.bytes().rev()).take_while(|(a, b)| a == b).count();
            l = l.min(c);
        }
        first[self.k - l..].to_string()
    }

    /// Trie node for suffix `s`: the longest common suffix of all nodes ending
    /// with `s`, or the root (empty string) when that is shorter than `m`.
    pub fn locus(&self, s: &str) -> Option<String> {
        let (lo, hi) = self.members(s)?;
        let c = self.lcs_of(lo, hi);
        Some(if c.len() < self.m { String::new() } else { c })
    }

    /// Colex span of the nodes ending with `ctx`.
    pub fn span(&self, ctx: &str) -> Option<NodeRange> {
        self.members(ctx).map(|(lo, hi)| NodeRange::new(lo, hi))
    }

    /// Context string of every trie node, root first.
    pub fn trie_nodes(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for s in self.suffix_span.keys() {
            out.insert(self.locus(s).unwrap());
        }
        out
    }

    /// Parent context, or `None` at or below the minimum order.
    pub fn naive_shorter(&self, ctx: &str) -> Option<String> {
        let (lo, hi) = self.members(ctx)?;
        for l in (0..ctx.len()).rev() {
            let suf = &ctx[ctx.len() - l..];
            let (a, b) = self.members(suf).unwrap();
            if (a, b) != (lo, hi) {
                let p = self.lcs_of(a, b);
                return if p.len() < self.m { None } else { Some(p) };
            }
        }
        None
    }

    /// Edge symbols of all nodes ending with `ctx`.
    fn edges_from(&self, ctx: &str) -> Vec<u8> {
        match self.members(ctx) {
            None => Vec::new(),
            Some((lo, hi)) => self.out_edges[lo - 1..hi].iter().flatten().copied().collect(),
        }
    }

    pub fn naive_out_symbols(&self, ctx: &str) -> NaiveOut {
        let syms: BTreeSet<u8> = self.edges_from(ctx).into_iter().filter(|&c| c != b'$').collect();
        match syms.len() {
            0 => NaiveOut::DollarOnly,
            1 => NaiveOut::Unique(*syms.iter().next().unwrap()),
            _ => NaiveOut::Branching(syms.into_iter().collect()),
        }
    }

    /// Context reached from `ctx` by appending `a` (ASCII base).
    pub fn naive_vo_forward(&self, ctx: &str, a: u8) -> Option<String> {
        if !self.edges_from(ctx).contains(&a) {
            return None;
        }
        let ext = format!("{}{}", ctx, a as char);
        let t = &ext[ext.len().saturating_sub(self.k)..];
        self.locus(t)
    }

    pub fn outdegree(&self, node: &str) -> usize {
        self.rank.get(node).map_or(0, |&j| self.out_edges[j - 1].len())
    }

    pub fn outdegree_non_dollar(&self, node: &str) -> usize {
        self.rank.get(node).map_or(0, |&j| self.out_edges[j - 1].iter().filter(|&&c| c != b'$').count())
    }

    pub fn predecessors(&self, node: &str) -> Vec<usize> {
        self.rank.get(node).map_or(Vec::new(), |&j| self.preds[j - 1].clone())
    }

    /// Distinct left extensions of a context (in-degree for full K-mers).
    pub fn in_count(&self, ctx: &str) -> usize {
        if ctx.len() == self.k {
            return self.predecessors(ctx).len();
        }
        let (lo, hi) = self.members(ctx).unwrap();
        let at = self.k - ctx.len() - 1;
        self.nodes[lo - 1..hi].iter().map(|s| s.as_bytes()[at]).collect::<BTreeSet<_>>().len()
    }

    pub fn is_pm(&self, ctx: &str) -> bool {
        !ctx.is_empty() && !matches!(self.naive_out_symbols(ctx), NaiveOut::Branching(_)) && self.in_count(ctx) >= 2
    }

    pub fn starters(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .filter(|s| !s.contains('$') && self.outdegree_non_dollar(s) <= 1)
            .filter(|s| self.predecessors(s).iter().all(|&u| self.outdegree_non_dollar(&self.nodes[u - 1]) >= 2))
            .map(|s| self.rank[s])
            .collect()
    }

    /// Walk policy of the assembler over strings, without any sharing.
    /// Returns the spelled string and whether the step cap was hit.
    pub fn naive_rm_walk(&self, start: &str) -> (String, bool) {
        let cap = 10 * self.kmer_set.len();
        let mut ctx = start.to_string();
        let mut out: String = start.chars().filter(|&c| c != '$').collect();
        for _ in 0..cap {
            while self.naive_out_symbols(&ctx) == NaiveOut::DollarOnly {
                match self.naive_shorter(&ctx) {
                    Some(p) => ctx = p,
                    None => return (out, false),
                }
            }
            match self.naive_out_symbols(&ctx) {
                NaiveOut::Unique(a) => {
                    out.push(a as char);
                    ctx = self.naive_vo_forward(&ctx, a).expect("edge exists");
                }
                _ => return (out, false),
            }
        }
        (out, true)
    }

    /// Maximal unitigs by direct string scanning.
    pub fn unitigs(&self) -> Vec<String> {
        let real: Vec<&String> = self.nodes.iter().filter(|s| !s.contains('$')).collect();
        let next = |s: &str| -> Option<String> {
            if self.outdegree_non_dollar(s) != 1 {
                return None;
            }
            let a = *self.out_edges[self.rank[s] - 1].iter().find(|&&c| c != b'$')?;
            let w = format!("{}{}", &s[1..], a as char);
            (self.predecessors(&w).len() == 1).then_some(w)
        };
        let joined: BTreeSet<String> = real.iter().filter_map(|s| next(s)).collect();
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let walk = |s: &String, seen: &mut BTreeSet<String>| {
            let mut u = s.clone();
            let mut cur = s.clone();
            seen.insert(cur.clone());
            while let Some(w) = next(&cur) {
                if seen.contains(&w) {
                    break;
                }
                u.push(w.as_bytes()[self.k - 1] as char);
                seen.insert(w.clone());
                cur = w;
            }
            u
        };
        for s in &real {
            if !joined.contains(*s) {
                out.push(walk(s, &mut seen));
            }
        }
        for s in &real {
            if !seen.contains(*s) {
                out.push(walk(s, &mut seen));
            }
        }
        out
    }
}

/// Outcome of an equivalence run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: usize,
    pub mismatches: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    fn check<T: PartialEq + std::fmt::Debug>(&mut self, what: impl FnOnce() -> String, got: T, want: T) {
        self.checks += 1;
        if got != want && self.mismatches.len() < 50 {
            self.mismatches.push(format!("{}: index {:?}, oracle {:?}", what(), got, want));
        }
    }

    pub fn merge(&mut self, other: Report) {
        self.checks += other.checks;
        for m in other.mismatches {
            if self.mismatches.len() < 50 {
                self.mismatches.push(m);
            }
        }
    }
}

fn to_naive(o: OutSymbols) -> NaiveOut {
    let c = |b: u8| b"$ACGT"[b as usize];
    match o {
        OutSymbols::DollarOnly => NaiveOut::DollarOnly,
        OutSymbols::Unique(a) => NaiveOut::Unique(c(a)),
        OutSymbols::Branching(v) => NaiveOut::Branching(v.into_iter().map(c).collect()),
    }
}

/// Compares every trie node and every K-mer of `h` against `g`.
pub fn check_navigation(h: &HoBossIndex, g: &NaiveGraph) -> Report {
    let mut rep = Report::default();
    rep.check(|| "node count".into(), h.n_nodes(), g.n_nodes());
    if h.n_nodes() != g.n_nodes() {
        return rep;
    }
    let ctx_of = |r: NodeRange| -> String {
        if r == h.root_range() {
            String::new()
        } else {
            g.lcs_of(r.lo, r.hi)
        }
    };
    let mut index_nodes = BTreeSet::new();
    for v in h.preorder_ids() {
        let r = match h.id2range(v) {
            Ok(r) => r,
            Err(e) => {
                rep.check(|| format!("id2range({v})"), Err::<(), _>(e.to_string()), Ok(()));
                continue;
            }
        };
        let ctx = ctx_of(r);
        index_nodes.insert(ctx.clone());
        if !ctx.is_empty() {
            rep.check(|| format!("span of {ctx:?}"), Some(r), g.span(&ctx));
            let got = h.shorter(r).ok().map(|p| p.map(ctx_of));
            rep.check(|| format!("shorter({ctx:?})"), got, Some(g.naive_shorter(&ctx)));
        }
        let out = h.out_symbols(r).map(to_naive).ok();
        rep.check(|| format!("out_symbols({ctx:?})"), out, Some(g.naive_out_symbols(&ctx)));
        for (code, a) in [(1u8, b'A'), (2, b'C'), (3, b'G'), (4, b'T')] {
            let got = h.vo_forward(r, code).ok().map(ctx_of);
            rep.check(|| format!("vo_forward({ctx:?}, {})", a as char), got, g.naive_vo_forward(&ctx, a));
        }
        if !ctx.is_empty() {
            rep.check(|| format!("in_count({ctx:?})"), h.in_count(r).ok(), Some(g.in_count(&ctx)));
        }
    }
    rep.check(|| "trie node set".into(), index_nodes, g.trie_nodes());
    let ix = h.boss();
    for v in 1..=g.n_nodes() {
        let s = &g.nodes[v - 1];
        let label: Option<String> = ix.label(v).ok().map(|l| l.iter().map(|&c| b"$ACGT"[c as usize] as char).collect());
        rep.check(|| format!("label({v})"), label, Some(s.clone()));
        rep.check(|| format!("outdegree({s})"), ix.outdegree(v).ok(), Some(g.outdegree(s)));
        rep.check(|| format!("indegree({s})"), ix.indegree(v).ok(), Some(g.predecessors(s).len()));
        let mut back = ix.backward(v).unwrap_or_default();
        back.sort();
        rep.check(|| format!("backward({s})"), back, g.predecessors(s));
    }
    rep
}

/// Compares starters, PM marks and omnitig strings in both modes.
pub fn check_assembly(h: &HoBossIndex, g: &NaiveGraph) -> Report {
    use crate::assembler::{assemble_all, assemble_cycle_only, find_starters, mark_pm_nodes, Stop};
    let mut rep = Report::default();
    let starters = find_starters(h.boss()).unwrap_or_default();
    rep.check(|| "starters".into(), starters.clone(), g.starters());
    if let Ok(pm) = mark_pm_nodes(h) {
        for (i, v) in h.preorder_ids().enumerate() {
            let r = h.id2range(v).unwrap();
            let ctx = if i == 0 { String::new() } else { g.lcs_of(r.lo, r.hi) };
            rep.check(|| format!("pm({ctx:?})"), pm.get(i + 1), g.is_pm(&ctx));
        }
    }
    let (link, cyc) = match (assemble_all(h), assemble_cycle_only(h)) {
        (Ok(a), Ok(b)) => (a, b),
        (a, b) => {
            rep.check(|| "assembly runs".into(), (a.is_ok(), b.is_ok()), (true, true));
            return rep;
        }
    };
    rep.check(|| "link traversed <= omnitig nodes".into(), true, {
        let total: usize = (0..link.len()).map(|i| link.tail_symbols(i).map(|t| t.len()).unwrap_or(0)).sum();
        link.forward_calls() <= total
    });
    for (i, o) in link.omnitigs().iter().enumerate() {
        let (walk, capped) = g.naive_rm_walk(&g.nodes[o.start - 1]);
        if capped {
            continue;
        }
        let c = &cyc.omnitigs()[i];
        rep.check(|| format!("cycle-only stop for start {}", o.start), c.stop == Stop::Budget, false);
        rep.check(|| format!("link omnitig from {}", walk), link.materialize(i).ok(), Some(walk.clone()));
        let what = format!("cycle-only omnitig from {walk}");
        rep.check(|| what, cyc.materialize(i).ok(), Some(walk));
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_strings() {
        let g = NaiveGraph::new(&["TACGT"], 3, 1);
        assert_eq!(g.nodes, vec!["$$$", "$TA", "TAC", "ACG", "$$T", "CGT"]);
        // "TA" only occurs in $TA, so its trie node is that leaf
        assert_eq!(g.naive_vo_forward("T", b'A'), Some("$TA".to_string()));
        assert_eq!(g.span("TA"), Some(NodeRange::leaf(2)));
        assert_eq!(g.naive_vo_forward("TAC", b'G'), Some("ACG".to_string()));
        assert_eq!(g.naive_vo_forward("TAC", b'C'), None);
        assert_eq!(g.naive_shorter("CGT"), Some("T".to_string()));
        assert_eq!(g.naive_shorter("T"), None);
        assert_eq!(g.naive_out_symbols("ACG"), NaiveOut::Unique(b'T'));
        // at m=1 the dead end CGT falls back to context "T" and wraps around
        assert_eq!(g.naive_rm_walk("TAC"), ("TACGTACGTACGTACGTACGTACGTACGTACGTACGTACGTACGTACGTACGTACGTACGTAC".to_string(), true));
        let g2 = NaiveGraph::new(&["TACGT"], 3, 2);
        assert_eq!(g2.naive_rm_walk("TAC"), ("TACGT".to_string(), false));
        assert_eq!(g.unitigs(), vec!["TACGT"]);
        let g = NaiveGraph::new(&["TACGT", "TACGA"], 3, 1);
        assert_eq!(g.naive_out_symbols("ACG"), NaiveOut::Branching(vec![b'A', b'T']));
        assert_eq!(g.naive_rm_walk("TAC").0, "TACG");
    }

    #[test]
    fn matches_index_on_fixtures() {
        for (reads, k, m) in [
            (vec!["TACGT"], 3, 1),
            (vec!["TACGT", "TACGA"], 3, 1),
            (vec!["TACG", "AACG"], 3, 2),
            (vec!["ACGTTGCAACGTAGGACGTT", "CGTAGGT", "TTGCAA"], 5, 2),
        ] {
            let rs = ReadSet::from_sequences(&reads);
            let h = HoBossIndex::build(&rs, k, m).unwrap();
            let g = NaiveGraph::new(&reads, k, m);
            let mut rep = check_navigation(&h, &g);
            rep.merge(check_assembly(&h, &g));
            assert!(rep.passed(), "{reads:?} k={k} m={m}: {:#?}", rep.mismatches);
            let mut u = crate::assembler::extract_unitigs(h.boss()).unwrap();
            let mut nu = g.unitigs();
            u.sort();
            nu.sort();
            assert_eq!(u, nu);
        }
    }
}
