//! Right-maximal omnitig assembly over a [`HoBossIndex`], plus unitigs.
//!
//! Omnitigs live in one arena of singly linked list nodes. Each omnitig owns
//! a head sentinel followed by the symbols it appended; a [`Link::Jump`] at
//! its tail continues after a node of an earlier list, which is how walks
//! that merge into an already generated path share its suffix.

use std::collections::HashSet;
use std::time::Instant;

use rayon::prelude::*;

use crate::alphabet::{decode, DOLLAR};
use crate::boss::BossIndex;
use crate::error::{Error, Result};
use crate::hoboss::{HoBossIndex, NodeRange, OutSymbols};
use crate::succinct::{BitSeq, BitSeqBuilder};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Path-merging nodes remember where they were first passed; later
    /// walks link there instead of re-traversing.
    Link,
    /// Each walk keeps its own visited set and stops on a revisit.
    CycleOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Link {
    End,
    Next(usize),
    /// Continue with whatever follows the given arena node.
    Jump(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct ListNode {
    sym: u8,
    link: Link,
}

/// Why a walk stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stop {
    Branching,
    MinOrder,
    Linked,
    Revisit,
    Budget,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Omnitig {
    /// Colex rank of the starter K-mer.
    pub start: usize,
    /// Starter label as symbol codes, possibly `$`-padded.
    pub seed: Vec<u8>,
    pub head: usize,
    /// Symbols appended by this walk itself.
    pub appended: usize,
    pub stop: Stop,
}

impl Omnitig {
    pub fn linked(&self) -> bool {
        self.stop == Stop::Linked
    }
}

#[derive(Clone, Debug)]
pub struct OmnitigStore {
    mode: Mode,
    arena: Vec<ListNode>,
    omnitigs: Vec<Omnitig>,
    pm: BitSeq,
    v: Vec<Option<usize>>,
    forward_calls: usize,
    elapsed_us: f64,
}

/// Non-dummy leaves with at most one non-`$` out-edge whose in-neighbours
/// all have at least two non-`$` out-edges (vacuous without in-neighbours).
pub fn find_starters(ix: &BossIndex) -> Result<Vec<usize>> {
    let dummy = dummy_flags(ix)?;
    let mut out = Vec::new();
    for (v, &is_dummy) in dummy.iter().enumerate().skip(1) {
        if is_dummy || ix.outdegree_non_dollar(v)? > 1 {
            continue;
        }
        let mut ok = true;
        for u in ix.backward(v)? {
            if ix.outdegree_non_dollar(u)? < 2 {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(v);
        }
    }
    Ok(out)
}

/// `dummy[v]` is true when node `v`'s label contains `$` (index 0 unused).
fn dummy_flags(ix: &BossIndex) -> Result<Vec<bool>> {
    let mut flags = vec![false; ix.n_nodes() + 1];
    for (v, f) in flags.iter_mut().enumerate().skip(1) {
        *f = ix.label(v)?[0] == DOLLAR;
    }
    Ok(flags)
}

/// Path-merging marks over `F` in preorder: the node's out-symbols are not
/// branching and at least two distinct left extensions reach it.
pub fn mark_pm_nodes(h: &HoBossIndex) -> Result<BitSeq> {
    let mut b = BitSeqBuilder::new();
    for (i, v) in h.preorder_ids().enumerate() {
        if i == 0 {
            b.push(false);
            continue;
        }
        let r = h.id2range(v)?;
        let pm = !matches!(h.out_symbols(r)?, OutSymbols::Branching(_)) && h.in_count(r)? >= 2;
        b.push(pm);
    }
    Ok(b.build())
}

struct Walk {
    syms: Vec<u8>,
    stop: Stop,
    forwards: usize,
}

/// One step of the walk: shorten past `$`-only contexts, then take the
/// unique out-symbol. `Err(stop)` ends the walk.
fn step(h: &HoBossIndex, range: NodeRange) -> Result<std::result::Result<(u8, NodeRange), Stop>> {
    let mut r = range;
    let mut out = h.out_symbols(r)?;
    while out == OutSymbols::DollarOnly {
        match h.shorter(r)? {
            Some(p) => r = p,
            None => return Ok(Err(Stop::MinOrder)),
        }
        out = h.out_symbols(r)?;
    }
    match out {
        OutSymbols::Unique(a) => Ok(Ok((a, h.vo_forward(r, a)?))),
        _ => Ok(Err(Stop::Branching)),
    }
}

fn cycle_walk(h: &HoBossIndex, start: usize, budget: usize, visited: &mut [bool]) -> Result<Walk> {
    let f = h.topology().parens();
    let mut touched = Vec::new();
    let mut range = NodeRange::leaf(start);
    let mut syms = Vec::new();
    let mut forwards = 0;
    let stop = loop {
        let rank = f.rank1(h.range2id(range)?);
        if visited[rank] {
            break Stop::Revisit;
        }
        visited[rank] = true;
        touched.push(rank);
        if syms.len() >= budget {
            break Stop::Budget;
        }
        match step(h, range)? {
            Ok((a, next)) => {
                syms.push(a);
                forwards += 1;
                range = next;
            }
            Err(s) => break s,
        }
    };
    for r in touched {
        visited[r] = false;
    }
    Ok(Walk { syms, stop, forwards })
}

impl OmnitigStore {
    fn empty(mode: Mode, pm: BitSeq) -> Self {
        let v = vec![None; pm.count_ones()];
        OmnitigStore { mode, arena: Vec::new(), omnitigs: Vec::new(), pm, v, forward_calls: 0, elapsed_us: 0.0 }
    }

    fn push_node(&mut self, sym: u8) -> usize {
        self.arena.push(ListNode { sym, link: Link::End });
        self.arena.len() - 1
    }

    fn append(&mut self, tail: usize, sym: u8) -> usize {
        let id = self.push_node(sym);
        self.arena[tail].link = Link::Next(id);
        id
    }

    /// Walks from starter `start` in link mode and records the omnitig.
    pub fn extend_omnitig(&mut self, h: &HoBossIndex, start: usize) -> Result<usize> {
        let budget = 10 * h.n_nodes();
        let f = h.topology().parens();
        let head = self.push_node(DOLLAR);
        let mut tail = head;
        let mut range = NodeRange::leaf(start);
        let mut appended = 0;
        let stop = loop {
            let rank = f.rank1(h.range2id(range)?);
            if self.pm.get(rank) {
                let p = self.pm.rank1(rank) - 1;
                match self.v[p] {
                    Some(t) => {
                        self.arena[tail].link = Link::Jump(t);
                        break Stop::Linked;
                    }
                    None => self.v[p] = Some(tail),
                }
            }
            if appended >= budget {
                break Stop::Budget;
            }
            match step(h, range)? {
                Ok((a, next)) => {
                    tail = self.append(tail, a);
                    appended += 1;
                    self.forward_calls += 1;
                    range = next;
                }
                Err(s) => break s,
            }
        };
        self.omnitigs.push(Omnitig { start, seed: h.boss().label(start)?, head, appended, stop });
        Ok(self.omnitigs.len() - 1)
    }

    fn push_walk(&mut self, h: &HoBossIndex, start: usize, w: Walk) -> Result<()> {
        let head = self.push_node(DOLLAR);
        let mut tail = head;
        for &a in &w.syms {
            tail = self.append(tail, a);
        }
        self.forward_calls += w.forwards;
        let seed = h.boss().label(start)?;
        self.omnitigs.push(Omnitig { start, seed, head, appended: w.syms.len(), stop: w.stop });
        Ok(())
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn omnitigs(&self) -> &[Omnitig] {
        &self.omnitigs
    }

    pub fn len(&self) -> usize {
        self.omnitigs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omnitigs.is_empty()
    }

    pub fn pm(&self) -> &BitSeq {
        &self.pm
    }

    /// Entries of `V` that were filled.
    pub fn v_filled(&self) -> usize {
        self.v.iter().filter(|x| x.is_some()).count()
    }

    /// Number of `vo_forward` steps actually performed.
    pub fn forward_calls(&self) -> usize {
        self.forward_calls
    }

    pub fn elapsed_us(&self) -> f64 {
        self.elapsed_us
    }

    /// Symbols of omnitig `idx` after its seed, following links.
    pub fn tail_symbols(&self, idx: usize) -> Result<Vec<u8>> {
        let o = self
            .omnitigs
            .get(idx)
            .ok_or(Error::Range { what: "omnitig", index: idx, bound: self.omnitigs.len() })?;
        let mut out = Vec::new();
        let mut emitted = HashSet::new();
        let mut link = self.arena[o.head].link;
        loop {
            let next = match link {
                Link::End => break,
                Link::Next(i) => i,
                Link::Jump(t) => {
                    let node = self.arena.get(t).ok_or_else(|| Error::Invariant(format!("dangling omnitig link to {t}")))?;
                    link = node.link;
                    continue;
                }
            };
            if !emitted.insert(next) {
                break;
            }
            let node = self.arena.get(next).ok_or_else(|| Error::Invariant(format!("dangling list node {next}")))?;
            out.push(node.sym);
            link = node.link;
        }
        Ok(out)
    }

    /// The omnitig as `ACGT` text: seed with `$` stripped, then its symbols.
    pub fn materialize(&self, idx: usize) -> Result<String> {
        let tail = self.tail_symbols(idx)?;
        let seed = &self.omnitigs[idx].seed;
        Ok(seed.iter().chain(tail.iter()).filter(|&&c| c != DOLLAR).map(|&c| decode(c) as char).collect())
    }

    pub fn materialize_all(&self) -> Result<Vec<String>> {
        (0..self.len()).map(|i| self.materialize(i)).collect()
    }
}

/// Link-mode assembly from every starter in colex order.
pub fn assemble_all(h: &HoBossIndex) -> Result<OmnitigStore> {
    let t0 = Instant::now();
    let starters = find_starters(h.boss())?;
    let mut store = OmnitigStore::empty(Mode::Link, mark_pm_nodes(h)?);
    for s in starters {
        store.extend_omnitig(h, s)?;
    }
    store.elapsed_us = t0.elapsed().as_secs_f64() * 1e6;
    Ok(store)
}

/// Assembly without suffix sharing; each walk guards only against itself.
pub fn assemble_cycle_only(h: &HoBossIndex) -> Result<OmnitigStore> {
    let t0 = Instant::now();
    let starters = find_starters(h.boss())?;
    let budget = 10 * h.n_nodes();
    let n_f = h.topology().node_count();
    let walks: Vec<Result<Walk>> = starters
        .par_iter()
        .map_init(|| vec![false; n_f + 1], |visited, &s| cycle_walk(h, s, budget, visited))
        .collect();
    let mut store = OmnitigStore::empty(Mode::CycleOnly, mark_pm_nodes(h)?);
    for (s, w) in starters.into_iter().zip(walks) {
        store.push_walk(h, s, w?)?;
    }
    store.elapsed_us = t0.elapsed().as_secs_f64() * 1e6;
    Ok(store)
}

pub fn assemble(h: &HoBossIndex, mode: Mode) -> Result<OmnitigStore> {
    match mode {
        Mode::Link => assemble_all(h),
        Mode::CycleOnly => assemble_cycle_only(h),
    }
}

/// Maximal non-branching paths of non-dummy nodes, spelled with K-1 overlaps.
///
/// An edge `u -> w` is interior to a unitig when `u` has exactly one non-`$`
/// out-edge and `w` exactly one in-edge. Isolated cycles are emitted once,
/// starting at their smallest node.
pub fn extract_unitigs(ix: &BossIndex) -> Result<Vec<String>> {
    let n = ix.n_nodes();
    let dummy = dummy_flags(ix)?;
    let mut succ = vec![0usize; n + 1];
    let mut joins_prev = vec![false; n + 1];
    for v in 1..=n {
        if dummy[v] || ix.outdegree_non_dollar(v)? != 1 {
            continue;
        }
        let a = ix.out_edges(v)?.into_iter().find(|e| e.base() != DOLLAR).unwrap().base();
        let w = ix.forward_k(v, a)?;
        if ix.indegree(w)? == 1 {
            succ[v] = w;
            joins_prev[w] = true;
        }
    }
    let spell = |path: &[usize]| -> Result<String> {
        let mut s: Vec<u8> = ix.label(path[0])?;
        for &w in &path[1..] {
            s.push(ix.last_symbol(w)?);
        }
        Ok(s.into_iter().map(|c| decode(c) as char).collect())
    };
    let mut seen = vec![false; n + 1];
    let mut out = Vec::new();
    for v in 1..=n {
        if dummy[v] || joins_prev[v] {
            continue;
        }
        let mut path = vec![v];
        seen[v] = true;
        let mut cur = v;
        while succ[cur] != 0 {
            cur = succ[cur];
            seen[cur] = true;
            path.push(cur);
        }
        out.push(spell(&path)?);
    }
    for v in 1..=n {
        if dummy[v] || seen[v] {
            continue;
        }
        let mut path = vec![v];
        seen[v] = true;
        let mut cur = succ[v];
        while cur != 0 && !seen[cur] {
            seen[cur] = true;
            path.push(cur);
            cur = succ[cur];
        }
        out.push(spell(&path)?);
    }
    Ok(out)
}

/// Summary of one assembly run.
#[derive(Clone, Debug, PartialEq)]
pub struct AssemblyStats {
    pub n_kmers: usize,
    pub n_starters: usize,
    pub n_pm_nodes: usize,
    pub max_omnitig: usize,
    pub max_unitig: usize,
    pub traversed_nodes: usize,
    pub omnitig_nodes: usize,
    pub pct_reduction: f64,
    pub us_per_node: f64,
}

impl AssemblyStats {
    pub const COLUMNS: [&'static str; 9] = [
        "n_kmers",
        "n_starters",
        "n_pm_nodes",
        "max_omnitig",
        "max_unitig",
        "traversed_nodes",
        "omnitig_nodes",
        "pct_reduction",
        "us_per_node",
    ];

    pub fn compute(h: &HoBossIndex, store: &OmnitigStore, unitigs: &[String]) -> Result<Self> {
        let mut max_omnitig = 0;
        let mut omnitig_nodes = 0;
        for i in 0..store.len() {
            max_omnitig = max_omnitig.max(store.materialize(i)?.len());
            omnitig_nodes += store.tail_symbols(i)?.len();
        }
        let traversed = store.forward_calls();
        let pct = if omnitig_nodes == 0 {
            0.0
        } else {
            (omnitig_nodes as f64 - traversed as f64) / omnitig_nodes as f64 * 100.0
        };
        Ok(AssemblyStats {
            n_kmers: h.n_nodes(),
            n_starters: store.len(),
            n_pm_nodes: store.pm().count_ones(),
            max_omnitig,
            max_unitig: unitigs.iter().map(String::len).max().unwrap_or(0),
            traversed_nodes: traversed,
            omnitig_nodes,
            pct_reduction: pct,
            us_per_node: if traversed == 0 { 0.0 } else { store.elapsed_us() / traversed as f64 },
        })
    }

    pub fn tsv_header() -> String {
        Self::COLUMNS.join("\t")
    }

    pub fn tsv_row(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.4}\t{:.4}",
            self.n_kmers,
            self.n_starters,
            self.n_pm_nodes,
            self.max_omnitig,
            self.max_unitig,
            self.traversed_nodes,
            self.omnitig_nodes,
            self.pct_reduction,
            self.us_per_node
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::encode_str;
    use crate::ingest::ReadSet;

    fn index(reads: &[&str], k: usize, m: usize) -> HoBossIndex {
        HoBossIndex::build(&ReadSet::from_sequences(reads), k, m).unwrap()
    }

    fn node(h: &HoBossIndex, s: &str) -> usize {
        let want = encode_str(s).unwrap();
        (1..=h.n_nodes()).find(|&v| h.boss().label(v).unwrap() == want).unwrap()
    }

    #[test]
    fn starters_on_branching_fixture() {
        let h = index(&["TACGT", "TACGA"], 3, 1);
        let s = find_starters(h.boss()).unwrap();
        assert!(s.contains(&node(&h, "CGT")) && s.contains(&node(&h, "CGA")));
        assert!(!s.contains(&node(&h, "ACG")));
        let h = index(&["TACGT"], 3, 1);
        let s = find_starters(h.boss()).unwrap();
        assert!(!s.contains(&node(&h, "TAC")));
        assert!(s.is_empty());
    }

    #[test]
    fn pm_marks() {
        let h = index(&["TACG", "AACG"], 3, 1);
        let pm = mark_pm_nodes(&h).unwrap();
        let f = h.topology().parens();
        let leaf = h.topology().select_leaf(node(&h, "ACG")).unwrap();
        assert!(pm.get(f.rank1(leaf)));
        assert!(!pm.get(1));

        let h = index(&["GATTACAGGT"], 4, 2);
        let pm = mark_pm_nodes(&h).unwrap();
        for j in 1..=h.n_nodes() {
            if !h.boss().is_dummy(j).unwrap() {
                let rank = h.topology().parens().rank1(h.topology().select_leaf(j).unwrap());
                assert!(!pm.get(rank));
            }
        }
    }

    #[test]
    fn materialize_follows_links_and_guards_cycles() {
        let mut store = OmnitigStore::empty(Mode::Link, BitSeq::from_str01("0"));
        let h0 = store.push_node(DOLLAR);
        let a = store.append(h0, 3);
        store.append(a, 4);
        store.omnitigs.push(Omnitig { start: 1, seed: encode_str("TAC").unwrap(), head: h0, appended: 2, stop: Stop::Branching });
        assert_eq!(store.materialize(0).unwrap(), "TACGT");

        let h1 = store.push_node(DOLLAR);
        let b = store.append(h1, 1);
        store.arena[b].link = Link::Jump(a);
        store.omnitigs.push(Omnitig { start: 2, seed: encode_str("$CC").unwrap(), head: h1, appended: 1, stop: Stop::Linked });
        assert_eq!(store.materialize(1).unwrap(), "CCAT");

        let h2 = store.push_node(DOLLAR);
        let c = store.append(h2, 2);
        let d = store.append(c, 3);
        store.arena[d].link = Link::Jump(h2);
        store.omnitigs.push(Omnitig { start: 3, seed: encode_str("AAA").unwrap(), head: h2, appended: 2, stop: Stop::Linked });
        assert_eq!(store.materialize(2).unwrap(), "AAACG");

        store.arena[d].link = Link::Jump(999);
        assert!(matches!(store.materialize(2), Err(Error::Invariant(_))));
    }

    #[test]
    fn shared_suffix_is_linked() {
        // AAC and GGC both branch; their T-successors merge at CTT
        let h = index(&["AACTTGACCATG", "AACG", "GGCTTGACCATG", "GGCA"], 3, 3);
        let link = assemble_all(&h).unwrap();
        let cyc = assemble_cycle_only(&h).unwrap();
        let mut ls = link.materialize_all().unwrap();
        let mut cs = cyc.materialize_all().unwrap();
        assert_eq!(ls, cs);
        ls.sort();
        cs.sort();
        assert_eq!(ls, vec!["ACG", "ACTTGACCATG", "GCA", "GCTTGACCATG"]);
        assert_eq!(link.omnitigs().iter().filter(|o| o.linked()).count(), 1);
        assert_eq!(link.forward_calls() + 7, cyc.forward_calls());
    }

    #[test]
    fn self_link_stops_at_revisit() {
        let h = index(&["AACTTGACCATGACCA", "AACG"], 3, 3);
        let link = assemble_all(&h).unwrap();
        let cyc = assemble_cycle_only(&h).unwrap();
        assert_eq!(link.materialize_all().unwrap(), cyc.materialize_all().unwrap());
    }

    #[test]
    fn unitigs() {
        let h = index(&["GATTACAGGT"], 4, 1);
        assert_eq!(extract_unitigs(h.boss()).unwrap(), vec!["GATTACAGGT".to_string()]);
        let h = index(&["TACGT", "TACGA"], 3, 1);
        let mut u = extract_unitigs(h.boss()).unwrap();
        u.sort();
        assert_eq!(u, vec!["CGA", "CGT", "TACG"]);
        // a pure cycle is emitted once
        let h = index(&["ACGTTACGTT"], 4, 1);
        let u = extract_unitigs(h.boss()).unwrap();
        assert!(u.iter().any(|s| s.len() >= 8));
    }

    #[test]
    fn stats_columns() {
        let h = index(&["TACGT", "TACGA"], 3, 1);
        let store = assemble_all(&h).unwrap();
        let st = AssemblyStats::compute(&h, &store, &extract_unitigs(h.boss()).unwrap()).unwrap();
        assert_eq!(st.n_kmers, h.n_nodes());
        assert_eq!(st.n_starters, 2);
        assert!(st.traversed_nodes <= st.omnitig_nodes);
        assert_eq!(AssemblyStats::tsv_header().split('\t').count(), st.tsv_row().split('\t').count());
    }
}
