//! Reading sequence files and building the sorted edge table, the BOSS
//! arrays and the longest-common-suffix array.

use std::cmp::Ordering;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::alphabet::{encode_base, EdgeSym, DOLLAR, SIGMA};
use crate::error::{Error, Result};
use crate::succinct::{BitSeq, BitSeqBuilder, WaveletSeq};

pub const DEFAULT_MAX_K: usize = 64;

/// Reads over `{A,C,G,T}`, stored as symbol codes `1..=4`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReadSet {
    pub reads: Vec<Vec<u8>>,
    pub sources: Vec<PathBuf>,
}

impl ReadSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a read set from raw sequences, splitting at non-ACGT characters.
    pub fn from_sequences<S: AsRef<[u8]>>(seqs: &[S]) -> Self {
        let mut rs = ReadSet::new();
        for s in seqs {
            rs.push_sequence(s.as_ref(), 1);
        }
        rs
    }

    /// Appends the ACGT fragments of `seq` that are at least `min_len` long.
    pub fn push_sequence(&mut self, seq: &[u8], min_len: usize) {
        let mut cur = Vec::new();
        for &ch in seq {
            match encode_base(ch) {
                Some(c) => cur.push(c),
                None => {
                    if !cur.is_empty() && cur.len() >= min_len {
                        self.reads.push(std::mem::take(&mut cur));
                    }
                    cur.clear();
                }
            }
        }
        if !cur.is_empty() && cur.len() >= min_len {
            self.reads.push(cur);
        }
    }

    pub fn len(&self) -> usize {
        self.reads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reads.is_empty()
    }

    pub fn total_bases(&self) -> usize {
        self.reads.iter().map(Vec::len).sum()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ParseOptions {
    /// Fragments shorter than this are dropped.
    pub min_read_len: usize,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { min_read_len: 1 }
    }
}

/// Loads every record from FASTA/FASTQ files (plain or gzip).
pub fn parse_reads<P: AsRef<Path>>(paths: &[P], opts: ParseOptions) -> Result<ReadSet> {
    let mut rs = ReadSet::new();
    for p in paths {
        let path = p.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        parse_into(file, path, opts, &mut rs)?;
        rs.sources.push(path.to_path_buf());
    }
    Ok(rs)
}

/// Parses one FASTA/FASTQ stream, transparently decompressing gzip.
pub fn parse_into<R: Read>(reader: R, name: &Path, opts: ParseOptions, rs: &mut ReadSet) -> Result<()> {
    let mut buf = BufReader::new(reader);
    let head = buf.fill_buf().map_err(|e| Error::io(name, e))?;
    if head.starts_with(&[0x1f, 0x8b]) {
        let dec = BufReader::new(flate2::read::MultiGzDecoder::new(buf));
        parse_records(dec, name, opts, rs)
    } else {
        parse_records(buf, name, opts, rs)
    }
}

fn parse_records<R: BufRead>(reader: R, name: &Path, opts: ParseOptions, rs: &mut ReadSet) -> Result<()> {
    let perr = |line: usize, msg: &str| Error::Parse { path: name.to_path_buf(), line, msg: msg.to_string() };
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next_line = || -> Result<Option<(usize, String)>> {
        match lines.next() {
            None => Ok(None),
            Some((n, Ok(l))) => Ok(Some((n, l.trim_end_matches('\r').to_string()))),
            Some((_, Err(e))) => Err(Error::io(name, e)),
        }
    };

    let mut pending: Option<(usize, String)> = None;
    let mut fasta_seq: Option<Vec<u8>> = None;
    loop {
        let item = match pending.take() {
            Some(x) => Some(x),
            None => next_line()?,
        };
        let Some((n, line)) = item else { break };
        if line.is_empty() {
            continue;
        }
        match line.as_bytes()[0] {
            b'>' => {
                if let Some(seq) = fasta_seq.take() {
                    rs.push_sequence(&seq, opts.min_read_len);
                }
                fasta_seq = Some(Vec::new());
            }
            b'@' if fasta_seq.is_none() => {
                let (sn, seq) = next_line()?.ok_or_else(|| perr(n, "FASTQ record truncated after header"))?;
                let (pn, plus) = next_line()?.ok_or_else(|| perr(sn, "FASTQ record missing '+' line"))?;
                if !plus.starts_with('+') {
                    return Err(perr(pn, "expected '+' separator line"));
                }
                let (qn, qual) = next_line()?.ok_or_else(|| perr(pn, "FASTQ record missing quality line"))?;
                if qual.len() != seq.len() {
                    return Err(perr(qn, "quality length differs from sequence length"));
                }
                rs.push_sequence(seq.as_bytes(), opts.min_read_len);
            }
            _ => match fasta_seq.as_mut() {
                Some(seq) => seq.extend_from_slice(line.trim().as_bytes()),
                None => return Err(perr(n, "expected a '>' or '@' record header")),
            },
        }
    }
    if let Some(seq) = fasta_seq.take() {
        rs.push_sequence(&seq, opts.min_read_len);
    }
    Ok(())
}

/// Colex-sorted distinct padded `(K+1)`-mers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeTable {
    k: usize,
    rows: Vec<Vec<u8>>,
}

/// Compares two `(K+1)`-mers: first `k` symbols right to left, then symbol `k+1`.
pub fn colex_row_cmp(a: &[u8], b: &[u8], k: usize) -> Ordering {
    for i in (0..k).rev() {
        match a[i].cmp(&b[i]) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    a[k].cmp(&b[k])
}

impl EdgeTable {
    /// Builds a table from arbitrary rows, sorting and deduplicating them.
    pub fn from_rows(k: usize, mut rows: Vec<Vec<u8>>) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != k + 1) {
            return Err(Error::Argument(format!("row of length {} for K={k}", r.len())));
        }
        rows.par_sort_unstable_by(|a, b| colex_row_cmp(a, b, k));
        rows.dedup();
        Ok(EdgeTable { k, rows })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The distinct K-mers (nodes), in colex order.
    pub fn nodes(&self) -> impl Iterator<Item = &[u8]> + '_ {
        let k = self.k;
        self.rows.iter().enumerate().filter_map(move |(i, r)| {
            let last = i + 1 == self.rows.len() || self.rows[i + 1][..k] != r[..k];
            last.then(|| &r[..k])
        })
    }

    fn check_sorted(&self) -> Result<()> {
        for w in self.rows.windows(2) {
            if colex_row_cmp(&w[0], &w[1], self.k) != Ordering::Less {
                return Err(Error::Invariant("edge table rows are not strictly colex-sorted".into()));
            }
        }
        Ok(())
    }
}

/// Pads each read with `K` leading `$`, emits all `(K+1)`-windows plus one
/// terminal `(last K-mer)$` row per read, then sorts and deduplicates.
pub fn extract_kmers(rs: &ReadSet, k: usize) -> Result<EdgeTable> {
    extract_kmers_with_max(rs, k, DEFAULT_MAX_K)
}

pub fn extract_kmers_with_max(rs: &ReadSet, k: usize, max_k: usize) -> Result<EdgeTable> {
    if k < 2 {
        return Err(Error::Config(format!("K must be at least 2, got {k}")));
    }
    if k > max_k {
        return Err(Error::Config(format!("K={k} exceeds the maximum {max_k}")));
    }
    if rs.reads.iter().any(|r| r.is_empty()) {
        return Err(Error::Argument("empty read".into()));
    }
    let mut rows: Vec<Vec<u8>> = rs
        .reads
        .par_iter()
        .flat_map_iter(|read| {
            let mut padded = vec![DOLLAR; k];
            padded.extend_from_slice(read);
            let mut out: Vec<Vec<u8>> = padded.windows(k + 1).map(<[u8]>::to_vec).collect();
            let mut terminal = padded[padded.len() - k..].to_vec();
            terminal.push(DOLLAR);
            out.push(terminal);
            out
        })
        .collect();
    rows.par_sort_unstable_by(|a, b| colex_row_cmp(a, b, k));
    rows.dedup();
    Ok(EdgeTable { k, rows })
}

/// The BOSS arrays: `B`, `BE`, the reduced edge string `E'`, and `C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BossArrays {
    pub k: usize,
    /// `B[i] = 1` iff row `i` is the last out-edge of its node.
    pub last: BitSeq,
    /// `BE[i] = 1` iff `E[i] != $`.
    pub non_dollar: BitSeq,
    /// `E'`: the non-`$` edge symbols with flags, as reduced codes.
    pub reduced: WaveletSeq,
    /// `C[a]` = nodes whose last symbol is `< a`; `C[SIGMA]` = node count.
    pub counts: [usize; SIGMA + 1],
}

/// Computes the edge column with minus flags and splits it into `BE`/`E'`.
pub fn build_boss_arrays(t: &EdgeTable) -> Result<BossArrays> {
    t.check_sorted()?;
    let k = t.k;
    let rows = &t.rows;
    let mut last = BitSeqBuilder::new();
    let mut non_dollar = BitSeqBuilder::new();
    let mut reduced = Vec::with_capacity(rows.len());
    let mut counts = [0usize; SIGMA + 1];
    let mut seen = [false; SIGMA];
    for (i, row) in rows.iter().enumerate() {
        let new_run = i == 0 || rows[i - 1][1..k] != row[1..k];
        if new_run {
            seen = [false; SIGMA];
        }
        let is_last = i + 1 == rows.len() || rows[i + 1][..k] != row[..k];
        last.push(is_last);
        if is_last {
            counts[row[k - 1] as usize + 1] += 1;
        }
        let a = row[k];
        if a == DOLLAR {
            non_dollar.push(false);
        } else {
            non_dollar.push(true);
            let sym = if seen[a as usize] { EdgeSym::Flagged(a) } else { EdgeSym::Plain(a) };
            seen[a as usize] = true;
            reduced.push(sym.reduced_code().unwrap());
        }
    }
    for a in 1..=SIGMA {
        counts[a] += counts[a - 1];
    }
    Ok(BossArrays {
        k,
        last: last.build(),
        non_dollar: non_dollar.build(),
        reduced: WaveletSeq::new(&reduced)?,
        counts,
    })
}

/// Longest common suffix of each node with its colex predecessor.
///
/// 1-based: `get(i)` for `2 <= i <= n`; `get(1)` is 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LcsArray {
    values: Vec<u32>,
}

impl LcsArray {
    pub fn from_values(values: Vec<u32>) -> Self {
        let mut v = Vec::with_capacity(values.len() + 1);
        v.push(0);
        v.extend(values);
        LcsArray { values: v }
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> usize {
        self.values[i] as usize
    }

    pub fn values(&self) -> &[u32] {
        &self.values[1..]
    }
}

pub fn build_lcs(t: &EdgeTable) -> LcsArray {
    let nodes: Vec<&[u8]> = t.nodes().collect();
    let mut values = Vec::with_capacity(nodes.len());
    for (i, node) in nodes.iter().enumerate() {
        if i == 0 {
            values.push(0);
            continue;
        }
        let prev = nodes[i - 1];
        let l = node.iter().rev().zip(prev.iter().rev()).take_while(|(a, b)| a == b).count();
        values.push(l as u32);
    }
    LcsArray::from_values(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{decode_str, encode_str};

    fn rows_str(t: &EdgeTable) -> Vec<String> {
        t.rows().iter().map(|r| decode_str(r)).collect()
    }

    /// Brute-force colex order: sort by the reversed K-prefix, then the edge symbol.
    fn brute_rows(reads: &[&str], k: usize) -> Vec<String> {
        let mut set = std::collections::BTreeSet::new();
        for r in reads {
            let padded = format!("{}{}", "$".repeat(k), r);
            let b = padded.as_bytes();
            for i in 0..=b.len() - (k + 1) {
                set.insert(padded[i..i + k + 1].to_string());
            }
            set.insert(format!("{}$", &padded[padded.len() - k..]));
        }
        let mut v: Vec<String> = set.into_iter().collect();
        let key = |s: &String| {
            let mut key: Vec<u8> = encode_str(&s[..k]).unwrap().into_iter().rev().collect();
            key.push(encode_str(&s[k..]).unwrap()[0]);
            key
        };
        v.sort_by_key(key);
        v
    }

    #[test]
    fn tiny_read_rows() {
        let rs = ReadSet::from_sequences(&["TACGT"]);
        let t = extract_kmers(&rs, 3).unwrap();
        assert_eq!(rows_str(&t), vec!["$$$T", "$TAC", "TACG", "ACGT", "$$TA", "CGT$"]);
        assert_eq!(rows_str(&t), brute_rows(&["TACGT"], 3));
    }

    #[test]
    fn single_base_read() {
        let t = extract_kmers(&ReadSet::from_sequences(&["A"]), 2).unwrap();
        assert_eq!(rows_str(&t), vec!["$$A", "$A$"]);
        let arr = build_boss_arrays(&t).unwrap();
        assert_eq!(arr.non_dollar.count_zeros(), 1);
    }

    #[test]
    fn duplicates_collapse() {
        let one = extract_kmers(&ReadSet::from_sequences(&["ACGGT"]), 3).unwrap();
        let two = extract_kmers(&ReadSet::from_sequences(&["ACGGT", "ACGGT"]), 3).unwrap();
        assert_eq!(one, two);
    }

    #[test]
    fn k_bounds() {
        let rs = ReadSet::from_sequences(&["ACGT"]);
        assert!(matches!(extract_kmers(&rs, 1), Err(Error::Config(_))));
        assert!(matches!(extract_kmers(&rs, 65), Err(Error::Config(_))));
        assert!(extract_kmers(&rs, 64).is_ok());
    }

    #[test]
    fn tiny_boss_arrays() {
        let t = extract_kmers(&ReadSet::from_sequences(&["TACGT"]), 3).unwrap();
        let a = build_boss_arrays(&t).unwrap();
        assert_eq!(a.last.to_string(), "111111");
        assert_eq!(a.non_dollar.to_string(), "111110");
        let e: String = (1..=a.reduced.len())
            .map(|i| EdgeSym::from_reduced(a.reduced.access(i)).to_string())
            .collect();
        assert_eq!(e, "TCGTA");
        assert_eq!(&a.counts[..5], &[0, 1, 2, 3, 4]);
        assert_eq!(a.counts[5], 6);
    }

    #[test]
    fn branching_node_has_two_rows() {
        let t = extract_kmers(&ReadSet::from_sequences(&["TACGT", "TACGA"]), 3).unwrap();
        let rows = rows_str(&t);
        let acg: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].starts_with("ACG")).collect();
        assert_eq!(acg.len(), 2);
        let a = build_boss_arrays(&t).unwrap();
        assert!(!a.last.get(acg[0] + 1));
        assert!(a.last.get(acg[1] + 1));
    }

    #[test]
    fn flags_mark_repeats_within_suffix_runs() {
        // GAC and TAC share suffix AC and both continue with G
        let t = extract_kmers(&ReadSet::from_sequences(&["GACG", "TACG"]), 3).unwrap();
        let a = build_boss_arrays(&t).unwrap();
        let rows = rows_str(&t);
        let syms: Vec<EdgeSym> = {
            let mut out = Vec::new();
            let mut j = 0;
            for i in 1..=rows.len() {
                if a.non_dollar.get(i) {
                    j += 1;
                    out.push(EdgeSym::from_reduced(a.reduced.access(j)));
                } else {
                    out.push(EdgeSym::Dollar);
                }
            }
            out
        };
        let gac = rows.iter().position(|r| r == "GACG").unwrap();
        let tac = rows.iter().position(|r| r == "TACG").unwrap();
        assert!(gac < tac);
        assert_eq!(syms[gac], EdgeSym::Plain(crate::alphabet::G));
        assert_eq!(syms[tac], EdgeSym::Flagged(crate::alphabet::G));
        // every flagged symbol has an unflagged twin earlier in its run
        for (i, s) in syms.iter().enumerate() {
            if let EdgeSym::Flagged(b) = s {
                let run = &rows[i][1..3];
                assert!((0..i).any(|j| &rows[j][1..3] == run && syms[j] == EdgeSym::Plain(*b)));
            }
        }
    }

    #[test]
    fn lcs_of_tiny_index() {
        let t = extract_kmers(&ReadSet::from_sequences(&["TACGT"]), 3).unwrap();
        let l = build_lcs(&t);
        assert_eq!(l.values(), &[0, 0, 0, 0, 0, 1]);
    }

    #[test]
    fn lcs_matches_pairwise_scan() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = rng.gen_range(1..8);
            let reads: Vec<String> = (0..n)
                .map(|_| (0..rng.gen_range(1..20)).map(|_| b"ACGT"[rng.gen_range(0..4)] as char).collect())
                .collect();
            let k = rng.gen_range(2..7);
            let t = extract_kmers(&ReadSet::from_sequences(&reads), k).unwrap();
            let nodes: Vec<String> = t.nodes().map(decode_str).collect();
            let l = build_lcs(&t);
            assert_eq!(l.len(), nodes.len());
            for i in 1..nodes.len() {
                let (a, b) = (nodes[i - 1].as_bytes(), nodes[i].as_bytes());
                let mut s = 0;
                while s < k && a[k - 1 - s] == b[k - 1 - s] {
                    s += 1;
                }
                assert_eq!(l.get(i + 1), s);
                assert!(s < k);
                if s == k - 1 {
                    assert_ne!(a[0], b[0]);
                }
            }
            // shuffled rows re-sort to the same table
            let mut shuffled = t.rows().to_vec();
            for i in (1..shuffled.len()).rev() {
                shuffled.swap(i, rng.gen_range(0..=i));
            }
            assert_eq!(EdgeTable::from_rows(k, shuffled).unwrap(), t);
            let a = build_boss_arrays(&t).unwrap();
            assert_eq!(a.last.count_ones(), nodes.len());
            let distinct_reads: std::collections::BTreeSet<&String> = reads.iter().collect();
            assert!(a.non_dollar.count_zeros() <= distinct_reads.len());
        }
    }

    #[test]
    fn parse_fasta_and_fastq() {
        let dir = tempfile::tempdir().unwrap();
        let fa = dir.path().join("r.fa");
        std::fs::write(&fa, ">r1\nTAC\nGT\n>r2\nACNGT\n").unwrap();
        let rs = parse_reads(&[&fa], ParseOptions::default()).unwrap();
        assert_eq!(rs.reads.len(), 3);
        assert_eq!(decode_str(&rs.reads[0]), "TACGT");
        assert_eq!(decode_str(&rs.reads[1]), "AC");
        assert_eq!(decode_str(&rs.reads[2]), "GT");

        let fq = dir.path().join("r.fq");
        std::fs::write(&fq, "@r1\nTACGT\n+\nIIIII\n@r2\nACNGT\n+\nIIIII\n").unwrap();
        let rq = parse_reads(&[&fq], ParseOptions::default()).unwrap();
        assert_eq!(rq.reads, rs.reads);

        let gz = dir.path().join("r.fq.gz");
        let mut enc = flate2::write::GzEncoder::new(Vec::new(), flate2::Compression::default());
        std::io::Write::write_all(&mut enc, &std::fs::read(&fq).unwrap()).unwrap();
        std::fs::write(&gz, enc.finish().unwrap()).unwrap();
        assert_eq!(parse_reads(&[&gz], ParseOptions::default()).unwrap().reads, rs.reads);

        let long = parse_reads(&[&fa], ParseOptions { min_read_len: 3 }).unwrap();
        assert_eq!(long.reads.len(), 1);
    }

    #[test]
    fn malformed_records_report_lines() {
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("bad.fq");
        std::fs::write(&bad, "@r1\nACGT\n+\nIII\n").unwrap();
        match parse_reads(&[&bad], ParseOptions::default()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        let junk = dir.path().join("junk.fa");
        std::fs::write(&junk, "ACGT\n").unwrap();
        assert!(matches!(parse_reads(&[&junk], ParseOptions::default()), Err(Error::Parse { line: 1, .. })));
        let missing = dir.path().join("missing.fa");
        assert!(matches!(parse_reads(&[&missing], ParseOptions::default()), Err(Error::Io { .. })));
    }
}
