use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use hoboss::assembler::{assemble, extract_unitigs, AssemblyStats, Mode};
use hoboss::hoboss::{NodeRange, OutSymbols};
use hoboss::oracle::{check_assembly, check_navigation, NaiveGraph, Report};
use hoboss::{fasta, serialize, sim, HoBossIndex, ParseOptions, ReadSet};

#[derive(Parser)]
#[command(name = "hoboss", version, about = "Succinct variable-order de Bruijn graph index and omnitig assembler")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a .hoboss index from FASTA/FASTQ reads (optionally gzipped).
    Build {
        #[arg(required = true)]
        reads: Vec<PathBuf>,
        #[arg(short = 'k', long)]
        k: usize,
        #[arg(short = 'm', long, default_value_t = 1)]
        m: usize,
        #[arg(short = 'o', long)]
        out: PathBuf,
        /// Drop read fragments shorter than this after splitting at non-ACGT.
        #[arg(long, default_value_t = 1)]
        min_read_len: usize,
    },
    /// Assemble right-maximal omnitigs from an index.
    Assemble {
        index: PathBuf,
        #[arg(short = 'o', long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Link)]
        mode: ModeArg,
        /// Also write unitigs of the order-K graph here.
        #[arg(long)]
        unitigs: Option<PathBuf>,
        /// Stats destination (default: stdout).
        #[arg(long)]
        stats: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Per-structure space breakdown of an index.
    Stats {
        index: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Cross-check an index against the brute-force oracle.
    Verify {
        reads: Vec<PathBuf>,
        #[arg(short = 'k', long)]
        k: Option<usize>,
        #[arg(short = 'm', long, default_value_t = 1)]
        m: usize,
        /// Check this index file instead of building one from the reads.
        #[arg(long)]
        index: Option<PathBuf>,
        /// Random read sets to check when no reads are given.
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Sample error-free reads from a genome.
    Simulate {
        genome: PathBuf,
        #[arg(long, default_value_t = 10.0)]
        coverage: f64,
        #[arg(long, default_value_t = 150)]
        read_len: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Treat each genome record as circular.
        #[arg(long)]
        circular: bool,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Time navigation primitives and assembly on an index.
    Bench {
        index: PathBuf,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Link,
    CycleOnly,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Link => Mode::Link,
            ModeArg::CycleOnly => Mode::CycleOnly,
        }
    }
}

struct Usage(String);

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(path: &Path) -> Result<HoBossIndex> {
    serialize::load(path).with_context(|| format!("loading index {}", path.display()))
}

fn check_orders(k: usize, m: usize) -> std::result::Result<(), Usage> {
    if !(1..=64).contains(&k) || k < 2 {
        return Err(Usage(format!("-k must lie in 2..=64, got {k}")));
    }
    if m == 0 || m > k {
        return Err(Usage(format!("-m must lie in 1..=K ({k}), got {m}")));
    }
    Ok(())
}

fn cmd_build(reads: &[PathBuf], k: usize, m: usize, out: &Path, min_read_len: usize) -> Result<()> {
    let rs = hoboss::parse_reads(reads, ParseOptions { min_read_len })?;
    if rs.is_empty() {
        bail!("no usable reads in the input");
    }
    let h = HoBossIndex::build(&rs, k, m)?;
    serialize::save(&h, out)?;
    let n_edges = h.boss().n_edges();
    println!("n_kmers\t{}", h.n_nodes());
    println!("n_edges\t{n_edges}");
    println!("bits_per_edge\t{:.3}", h.size_in_bits() as f64 / n_edges as f64);
    Ok(())
}

fn cmd_assemble(
    index: &Path,
    out: &Path,
    mode: Mode,
    unitigs_out: Option<&Path>,
    stats_out: Option<&Path>,
    as_json: bool,
) -> Result<()> {
    let h = load(index)?;
    let store = assemble(&h, mode)?;
    let mut w = output(Some(out))?;
    fasta::write_omnitigs(&mut w, &store)?;
    w.flush()?;
    let unitigs = extract_unitigs(h.boss())?;
    if let Some(p) = unitigs_out {
        let mut w = output(Some(p))?;
        fasta::write_unitigs(&mut w, &unitigs)?;
        w.flush()?;
    }
    let st = AssemblyStats::compute(&h, &store, &unitigs)?;
    let mut w = output(stats_out)?;
    if as_json {
        let v = json!({
            "n_kmers": st.n_kmers,
            "n_starters": st.n_starters,
            "n_pm_nodes": st.n_pm_nodes,
            "max_omnitig": st.max_omnitig,
            "max_unitig": st.max_unitig,
            "traversed_nodes": st.traversed_nodes,
            "omnitig_nodes": st.omnitig_nodes,
            "pct_reduction": st.pct_reduction,
            "us_per_node": st.us_per_node,
        });
        writeln!(w, "{}", serde_json::to_string_pretty(&v)?)?;
    } else {
        writeln!(w, "{}", AssemblyStats::tsv_header())?;
        writeln!(w, "{}", st.tsv_row())?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_stats(index: &Path, as_json: bool) -> Result<()> {
    let h = load(index)?;
    let names = ["B", "BE", "E'", "C", "F"];
    let bits = h.component_bits();
    let total: usize = bits.iter().sum();
    let mut w = output(None)?;
    if as_json {
        let parts: Vec<_> = names
            .iter()
            .zip(bits)
            .map(|(n, b)| json!({"structure": n, "bits": b, "fraction": b as f64 / total as f64}))
            .collect();
        let v = json!({
            "k": h.k(), "m": h.m(), "n_nodes": h.n_nodes(), "n_edges": h.boss().n_edges(),
            "f_bits": h.topology().len(), "total_bits": total, "structures": parts,
        });
        writeln!(w, "{}", serde_json::to_string_pretty(&v)?)?;
    } else {
        writeln!(w, "structure\tbits\tfraction")?;
        for (n, b) in names.iter().zip(bits) {
            writeln!(w, "{n}\t{b}\t{:.6}", b as f64 / total as f64)?;
        }
        writeln!(w, "# k={} m={} n_nodes={} f_len={} (4n={})", h.k(), h.m(), h.n_nodes(), h.topology().len(), 4 * h.n_nodes())?;
    }
    w.flush()?;
    Ok(())
}

fn verify_one(h: &HoBossIndex, g: &NaiveGraph) -> Report {
    let mut rep = check_navigation(h, g);
    rep.merge(check_assembly(h, g));
    rep
}

fn cmd_verify(reads: &[PathBuf], k: Option<usize>, m: usize, index: Option<&Path>, trials: u64, seed: u64) -> Result<bool> {
    let mut total = Report::default();
    let mut failed_sets = 0u64;
    let sets = if !reads.is_empty() || index.is_some() {
        if reads.is_empty() {
            bail!("--index needs the reads it was built from");
        }
        let rs = hoboss::parse_reads(reads, ParseOptions::default())?;
        let h = match index {
            Some(p) => load(p)?,
            None => {
                let k = k.context("-k is required when verifying reads")?;
                HoBossIndex::build(&rs, k, m)?
            }
        };
        let g = NaiveGraph::from_read_set(&rs, h.k(), h.m());
        let rep = verify_one(&h, &g);
        failed_sets += !rep.passed() as u64;
        total.merge(rep);
        1
    } else {
        for t in 0..trials {
            let inst = sim::small_instance(seed.wrapping_mul(1_000_003).wrapping_add(t));
            let h = HoBossIndex::build(&ReadSet::from_sequences(&inst.reads), inst.k, inst.m)?;
            let g = NaiveGraph::new(&inst.reads, inst.k, inst.m);
            let rep = verify_one(&h, &g);
            if !rep.passed() {
                failed_sets += 1;
                total.mismatches.push(format!("trial {t}: reads={:?} k={} m={}", inst.reads, inst.k, inst.m));
            }
            total.merge(rep);
        }
        trials
    };
    let ok = total.passed();
    println!("sets\t{sets}");
    println!("checks\t{}", total.checks);
    println!("failed_sets\t{failed_sets}");
    for mm in total.mismatches.iter().take(20) {
        println!("mismatch\t{mm}");
    }
    println!("result\t{}", if ok { "PASS" } else { "FAIL" });
    Ok(ok)
}

fn cmd_simulate(genome: &Path, coverage: f64, read_len: usize, seed: u64, circular: bool, out: Option<&Path>) -> Result<()> {
    if coverage <= 0.0 || read_len == 0 {
        bail!("coverage and read length must be positive");
    }
    let g = hoboss::parse_reads(&[genome], ParseOptions::default())?;
    let mut reads = Vec::new();
    for (i, frag) in g.reads.iter().enumerate() {
        let text: Vec<u8> = frag.iter().map(|&c| hoboss::alphabet::decode(c)).collect();
        let s = seed.wrapping_add(i as u64);
        reads.extend(if circular {
            sim::simulate_circular_reads(&text, coverage, read_len, s)
        } else {
            sim::simulate_reads(&text, coverage, read_len, s)
        });
    }
    let mut w = output(out)?;
    fasta::write_reads(&mut w, &reads)?;
    w.flush()?;
    Ok(())
}

fn cmd_bench(index: &Path, repeats: usize) -> Result<()> {
    let h = load(index)?;
    let n = h.n_nodes();
    let mut w = output(None)?;
    writeln!(w, "op\tcalls\ttotal_us\tns_per_call")?;
    let row = |w: &mut Box<dyn Write>, op: &str, calls: usize, us: f64| -> Result<()> {
        let ns = if calls == 0 { 0.0 } else { us * 1000.0 / calls as f64 };
        writeln!(w, "{op}\t{calls}\t{us:.1}\t{ns:.1}")?;
        Ok(())
    };
    let leaves: Vec<NodeRange> = (1..=n).map(NodeRange::leaf).collect();
    let t = Instant::now();
    let mut uniques = Vec::new();
    for _ in 0..repeats {
        uniques.clear();
        for &r in &leaves {
            if let OutSymbols::Unique(a) = h.out_symbols(r)? {
                uniques.push((r, a));
            }
        }
    }
    row(&mut w, "out_symbols", repeats * n, t.elapsed().as_secs_f64() * 1e6)?;
    let t = Instant::now();
    for _ in 0..repeats {
        for &(r, a) in &uniques {
            std::hint::black_box(h.vo_forward(r, a)?);
        }
    }
    row(&mut w, "vo_forward", repeats * uniques.len(), t.elapsed().as_secs_f64() * 1e6)?;
    let t = Instant::now();
    for _ in 0..repeats {
        for &r in &leaves {
            std::hint::black_box(h.shorter(r)?);
        }
    }
    row(&mut w, "shorter", repeats * n, t.elapsed().as_secs_f64() * 1e6)?;
    for (name, mode) in [("assemble_link", Mode::Link), ("assemble_cycle_only", Mode::CycleOnly)] {
        let mut us = 0.0;
        let mut calls = 0;
        for _ in 0..repeats {
            let s = assemble(&h, mode)?;
            us += s.elapsed_us();
            calls += s.forward_calls();
        }
        row(&mut w, name, calls, us)?;
    }
    w.flush()?;
    Ok(())
}

fn configure_threads() {
    if let Some(n) = std::env::var("HOBOSS_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn run(cli: Cli) -> std::result::Result<bool, (u8, String)> {
    let rt = |e: anyhow::Error| (1u8, format!("{e:#}"));
    let usage = |u: Usage| (2u8, u.0);
    match cli.cmd {
        Cmd::Build { reads, k, m, out, min_read_len } => {
            check_orders(k, m).map_err(usage)?;
            cmd_build(&reads, k, m, &out, min_read_len).map_err(rt)?;
        }
        Cmd::Assemble { index, out, mode, unitigs, stats, json } => {
            cmd_assemble(&index, &out, mode.into(), unitigs.as_deref(), stats.as_deref(), json).map_err(rt)?;
        }
        Cmd::Stats { index, json } => cmd_stats(&index, json).map_err(rt)?,
        Cmd::Verify { reads, k, m, index, trials, seed } => {
            if let Some(k) = k {
                check_orders(k, m).map_err(usage)?;
            }
            return cmd_verify(&reads, k, m, index.as_deref(), trials, seed).map_err(rt);
        }
        Cmd::Simulate { genome, coverage, read_len, seed, circular, out } => {
            cmd_simulate(&genome, coverage, read_len, seed, circular, out.as_deref()).map_err(rt)?;
        }
        Cmd::Bench { index, repeats } => cmd_bench(&index, repeats).map_err(rt)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err((code, msg)) => {
            eprintln!("hoboss: {msg}");
            ExitCode::from(code)
        }
    }
}
