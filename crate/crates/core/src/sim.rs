//! Seeded synthetic genomes and error-free uniform read sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NUC: &[u8; 4] = b"ACGT";

/// Uniform random genome over `ACGT`.
pub fn random_genome(len: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| NUC[rng.gen_range(0..4)]).collect()
}

/// Number of reads giving `coverage` over a genome of `genome_len`.
pub fn read_count(genome_len: usize, coverage: f64, read_len: usize) -> usize {
    (coverage * genome_len as f64 / read_len as f64).round() as usize
}

/// Error-free reads with uniform start positions on a linear genome.
///
/// Reads are clamped to the genome when it is shorter than `read_len`.
pub fn simulate_reads(genome: &[u8], coverage: f64, read_len: usize, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if genome.is_empty() || read_len == 0 {
        return Vec::new();
    }
    let l = read_len.min(genome.len());
    let n = read_count(genome.len(), coverage, read_len);
    (0..n)
        .map(|_| {
            let s = rng.gen_range(0..=genome.len() - l);
            genome[s..s + l].to_vec()
        })
        .collect()
}

/// Like [`simulate_reads`] but on a circular genome, so reads may wrap.
pub fn simulate_circular_reads(genome: &[u8], coverage: f64, read_len: usize, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if genome.is_empty() || read_len == 0 {
        return Vec::new();
    }
    let n = read_count(genome.len(), coverage, read_len);
    (0..n)
        .map(|_| {
            let s = rng.gen_range(0..genome.len());
            (0..read_len).map(|i| genome[(s + i) % genome.len()]).collect()
        })
        .collect()
}

/// Reads tiling a circular genome with a fixed stride, covering every wrap.
pub fn tile_circular(genome: &[u8], read_len: usize, stride: usize) -> Vec<Vec<u8>> {
    let n = genome.len();
    (0..n)
        .step_by(stride.max(1))
        .map(|s| (0..read_len).map(|i| genome[(s + i) % n]).collect())
        .collect()
}

/// A small random read set for equivalence testing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmallInstance {
    pub reads: Vec<String>,
    pub k: usize,
    pub m: usize,
}

/// Up to 20 reads of length at most 50, K in 3..=8 and m in 1..=3.
///
/// Most reads are cut from a short shared genome so that the graph has
/// repeats, merges and branches; the rest are independent random strings.
pub fn small_instance(seed: u64) -> SmallInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(3..=8);
    let m = rng.gen_range(1..=3usize.min(k));
    let base_len = rng.gen_range(10..=80);
    let base: Vec<u8> = (0..base_len).map(|_| NUC[rng.gen_range(0..4)]).collect();
    let n_reads = rng.gen_range(1..=20);
    let reads = (0..n_reads)
        .map(|_| {
            let len = rng.gen_range(1..=50usize);
            let bytes: Vec<u8> = if rng.gen_bool(0.75) {
                let l = len.min(base.len());
                let s = rng.gen_range(0..=base.len() - l);
                base[s..s + l].to_vec()
            } else {
                (0..len).map(|_| NUC[rng.gen_range(0..4)]).collect()
            };
            String::from_utf8(bytes).unwrap()
        })
        .collect();
    SmallInstance { reads, k, m }
}
