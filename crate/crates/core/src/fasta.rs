//! FASTA writers for omnitigs, unitigs and simulated reads.

use std::io::{self, Write};

use crate::alphabet::decode_str;
use crate::assembler::OmnitigStore;
use crate::error::Result;

const WIDTH: usize = 80;

fn write_seq<W: Write>(w: &mut W, seq: &[u8]) -> io::Result<()> {
    for chunk in seq.chunks(WIDTH) {
        w.write_all(chunk)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_record<W: Write>(w: &mut W, header: &str, seq: &[u8]) -> io::Result<()> {
    writeln!(w, ">{header}")?;
    write_seq(w, seq)
}

/// `>omni_<idx> start=<kmer> len=<L> linked=<0|1>`, 1-based, in starter order.
pub fn write_omnitigs<W: Write>(w: &mut W, store: &OmnitigStore) -> Result<()> {
    for (i, o) in store.omnitigs().iter().enumerate() {
        let s = store.materialize(i)?;
        let header = format!("omni_{} start={} len={} linked={}", i + 1, decode_str(&o.seed), s.len(), o.linked() as u8);
        write_record(w, &header, s.as_bytes()).map_err(|e| crate::error::Error::io("<output>", e))?;
    }
    Ok(())
}

/// `>uni_<idx> len=<L>`, 1-based.
pub fn write_unitigs<W: Write>(w: &mut W, unitigs: &[String]) -> io::Result<()> {
    for (i, u) in unitigs.iter().enumerate() {
        write_record(w, &format!("uni_{} len={}", i + 1, u.len()), u.as_bytes())?;
    }
    Ok(())
}

pub fn write_reads<W: Write, S: AsRef<[u8]>>(w: &mut W, reads: &[S]) -> io::Result<()> {
    for (i, r) in reads.iter().enumerate() {
        write_record(w, &format!("read_{}", i + 1), r.as_ref())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wraps_and_numbers() {
        let mut out = Vec::new();
        write_unitigs(&mut out, &["A".repeat(100), "CG".into()]).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert_eq!(s, format!(">uni_1 len=100\n{}\n{}\n>uni_2 len=2\nCG\n", "A".repeat(80), "A".repeat(20)));
    }
}
