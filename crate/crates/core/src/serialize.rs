//! The `.hoboss` container.
//!
//! ```text
//! "HOBS" | u16 version | u16 K | u16 m
//! "BLST" bits        B
//! "BEDG" bits        BE
//! "EPRM" u64 len | u8 levels | levels x ("WLVL" bits)     E'
//! "CCNT" u64 count | count x u64                            C
//! "FTOP" bits        F
//! "META" u64 bytes | UTF-8 "key=value\n" lines
//!
//! bits := u64 bit length | u64 word count | words | u8 mode | u8 rebuild
//! ```
//!
//! All integers are little-endian. `mode` is 0 for plain and 1 for the
//! sparse encoding; `rebuild` is always 1 because rank/select directories
//! are recomputed on load rather than stored.

use std::fs;
use std::path::Path;

use crate::alphabet::SIGMA;
use crate::boss::BossIndex;
use crate::error::{Error, Result};
use crate::hoboss::HoBossIndex;
use crate::ingest::BossArrays;
use crate::succinct::{BitSeq, BpTree, WaveletSeq};

pub const MAGIC: &[u8; 4] = b"HOBS";
pub const VERSION: u16 = 1;

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u8(&mut self, x: u8) {
        self.buf.push(x);
    }
    fn u16(&mut self, x: u16) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }
    fn u64(&mut self, x: u64) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }
    fn tag(&mut self, t: &[u8; 4]) {
        self.buf.extend_from_slice(t);
    }
    fn bits(&mut self, tag: &[u8; 4], b: &BitSeq) {
        self.tag(tag);
        let words = b.raw_words();
        self.u64(b.len() as u64);
        self.u64(words.len() as u64);
        for w in words {
            self.u64(w);
        }
        self.u8(b.is_sparse() as u8);
        self.u8(1);
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::Format(format!("truncated at byte {}", self.pos)));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::Format("length overflows usize".into()))
    }
    fn expect_tag(&mut self, t: &[u8; 4]) -> Result<()> {
        let at = self.pos;
        let got = self.take(4)?;
        if got != t {
            return Err(Error::Format(format!(
                "expected section {} at byte {at}, found {:?}",
                String::from_utf8_lossy(t),
                String::from_utf8_lossy(got)
            )));
        }
        Ok(())
    }
    fn bits(&mut self, tag: &[u8; 4]) -> Result<BitSeq> {
        self.expect_tag(tag)?;
        let len = self.usize()?;
        let n_words = self.usize()?;
        if n_words != len.div_ceil(64) {
            return Err(Error::Format(format!("{} words for {len} bits", n_words)));
        }
        let bytes = self.take(n_words.checked_mul(8).ok_or_else(|| Error::Format("word count overflow".into()))?)?;
        let words: Vec<u64> = bytes.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect();
        if len % 64 != 0 && words.last().is_some_and(|w| w >> (len % 64) != 0) {
            return Err(Error::Format("set bits past the end of a bit vector".into()));
        }
        let mode = self.u8()?;
        let rebuild = self.u8()?;
        if rebuild != 1 {
            return Err(Error::Format("stored rank/select directories are not supported".into()));
        }
        let b = BitSeq::from_words(words, len);
        match mode {
            0 => Ok(b),
            1 => Ok(b.to_sparse()),
            x => Err(Error::Format(format!("unknown bit vector mode {x}"))),
        }
    }
}

pub fn to_bytes(h: &HoBossIndex) -> Vec<u8> {
    let mut w = Writer { buf: Vec::new() };
    let ix = h.boss();
    w.buf.extend_from_slice(MAGIC);
    w.u16(VERSION);
    w.u16(h.k() as u16);
    w.u16(h.m() as u16);
    w.bits(b"BLST", ix.last_bits());
    w.bits(b"BEDG", ix.non_dollar_bits());
    w.tag(b"EPRM");
    let e = ix.reduced_edges();
    w.u64(e.len() as u64);
    w.u8(e.levels().len() as u8);
    for l in e.levels() {
        w.bits(b"WLVL", l);
    }
    w.tag(b"CCNT");
    w.u64(ix.counts().len() as u64);
    for &c in ix.counts() {
        w.u64(c as u64);
    }
    w.bits(b"FTOP", h.topology().parens());
    w.tag(b"META");
    let meta = format!("n_nodes={}\nn_edges={}\n", ix.n_nodes(), ix.n_edges());
    w.u64(meta.len() as u64);
    w.buf.extend_from_slice(meta.as_bytes());
    w.buf
}

pub fn from_bytes(bytes: &[u8]) -> Result<HoBossIndex> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(4).map_err(|_| Error::Format("file too short for header".into()))? != MAGIC {
        return Err(Error::Format("bad magic, not a .hoboss file".into()));
    }
    let version = r.u16()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}, expected {VERSION}")));
    }
    let k = r.u16()? as usize;
    let m = r.u16()? as usize;
    let last = r.bits(b"BLST")?;
    let non_dollar = r.bits(b"BEDG")?;
    r.expect_tag(b"EPRM")?;
    let e_len = r.usize()?;
    let n_levels = r.u8()? as usize;
    let levels = (0..n_levels).map(|_| r.bits(b"WLVL")).collect::<Result<Vec<_>>>()?;
    let reduced = WaveletSeq::from_levels(e_len, levels)?;
    r.expect_tag(b"CCNT")?;
    if r.usize()? != SIGMA + 1 {
        return Err(Error::Format("C section has the wrong length".into()));
    }
    let mut counts = [0usize; SIGMA + 1];
    for c in counts.iter_mut() {
        *c = r.usize()?;
    }
    let f = r.bits(b"FTOP")?;
    r.expect_tag(b"META")?;
    let meta_len = r.usize()?;
    let meta = std::str::from_utf8(r.take(meta_len)?).map_err(|_| Error::Format("metadata is not UTF-8".into()))?;
    if r.pos != bytes.len() {
        return Err(Error::Format(format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    if non_dollar.len() != last.len() {
        return Err(Error::Format("B and BE lengths differ".into()));
    }
    let boss = BossIndex::from_arrays(BossArrays { k, last, non_dollar, reduced, counts })
        .map_err(|e| Error::Format(e.to_string()))?;
    for line in meta.lines() {
        let (key, val) = line.split_once('=').ok_or_else(|| Error::Format(format!("bad metadata line {line:?}")))?;
        let want = match key {
            "n_nodes" => boss.n_nodes(),
            "n_edges" => boss.n_edges(),
            _ => continue,
        };
        if val.parse::<usize>().ok() != Some(want) {
            return Err(Error::Format(format!("metadata {key}={val} disagrees with the arrays ({want})")));
        }
    }
    let topo = BpTree::new(f).map_err(|e| Error::Format(e.to_string()))?;
    HoBossIndex::from_parts(boss, topo, m).map_err(|e| Error::Format(e.to_string()))
}

pub fn save(h: &HoBossIndex, path: &Path) -> Result<()> {
    fs::write(path, to_bytes(h)).map_err(|e| Error::io(path, e))
}

pub fn load(path: &Path) -> Result<HoBossIndex> {
    from_bytes(&fs::read(path).map_err(|e| Error::io(path, e))?)
}
