use std::io::Write;

use ::hoboss::oracle::{check_assembly, check_navigation, NaiveGraph};
use ::hoboss::{
    assemble_all, assemble_cycle_only, extract_unitigs, fasta, parse_reads, serialize, sim, HoBossIndex, ParseOptions,
    ReadSet,
};
use proptest::prelude::*;

fn reads_strategy() -> impl Strategy<Value = (Vec<String>, usize, usize)> {
    (3usize..=7, 1usize..=3).prop_flat_map(|(k, m)| {
        let read = proptest::collection::vec(proptest::sample::select(vec!['A', 'C', 'G', 'T']), 1..30)
            .prop_map(|v| v.into_iter().collect::<String>());
        (proptest::collection::vec(read, 1..8), Just(k), Just(m.min(k)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn index_agrees_with_oracle((reads, k, m) in reads_strategy()) {
        let h = HoBossIndex::build(&ReadSet::from_sequences(&reads), k, m).unwrap();
        let g = NaiveGraph::new(&reads, k, m);
        let mut rep = check_navigation(&h, &g);
        rep.merge(check_assembly(&h, &g));
        prop_assert!(rep.passed(), "{:?}", rep.mismatches);
        prop_assert!(h.topology().len() <= 4 * h.n_nodes());
    }

    #[test]
    fn round_trip_preserves_everything((reads, k, m) in reads_strategy()) {
        let h = HoBossIndex::build(&ReadSet::from_sequences(&reads), k, m).unwrap();
        let bytes = serialize::to_bytes(&h);
        let back = serialize::from_bytes(&bytes).unwrap();
        prop_assert_eq!(serialize::to_bytes(&back), bytes);
        let a = assemble_all(&h).unwrap().materialize_all().unwrap();
        let b = assemble_all(&back).unwrap().materialize_all().unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn parses_fasta_fastq_and_gzip_alike() {
    let dir = tempfile::tempdir().unwrap();
    let fa = dir.path().join("r.fa");
    std::fs::write(&fa, ">a\nACGTAC\nGTT\n>b\nGGNNCA\n").unwrap();
    let fq = dir.path().join("r.fq");
    std::fs::write(&fq, "@a\nACGTACGTT\n+\nIIIIIIIII\n@b\nGGNNCA\n+\nIIIIII\n").unwrap();
    let gz = dir.path().join("r.fq.gz");
    let mut enc = flate2::write::GzEncoder::new(std::fs::File::create(&gz).unwrap(), flate2::Compression::default());
    enc.write_all(&std::fs::read(&fq).unwrap()).unwrap();
    enc.finish().unwrap();
    let sets: Vec<_> = [&fa, &fq, &gz].iter().map(|p| parse_reads(&[p], ParseOptions::default()).unwrap().reads).collect();
    assert_eq!(sets[0], sets[1]);
    assert_eq!(sets[1], sets[2]);
    assert_eq!(sets[0].len(), 3);
    let long_only = parse_reads(&[&fa], ParseOptions { min_read_len: 3 }).unwrap();
    assert_eq!(long_only.reads.len(), 1);
}

#[test]
fn circular_genome_assembles_to_substrings() {
    let g = sim::random_genome(4000, 9);
    let reads = sim::simulate_circular_reads(&g, 12.0, 150, 1);
    let h = HoBossIndex::build(&ReadSet::from_sequences(&reads), 10, 9).unwrap();
    let text = String::from_utf8([g.clone(), g].concat()).unwrap();
    let link = assemble_all(&h).unwrap();
    let cyc = assemble_cycle_only(&h).unwrap();
    let omni = link.materialize_all().unwrap();
    assert!(!omni.is_empty());
    assert!(omni.iter().all(|s| text.contains(s.as_str())));
    assert_eq!(omni, cyc.materialize_all().unwrap());
    let mut out = Vec::new();
    fasta::write_omnitigs(&mut out, &link).unwrap();
    assert_eq!(String::from_utf8(out).unwrap().matches('>').count(), omni.len());
    let longest_unitig = extract_unitigs(h.boss()).unwrap().iter().map(String::len).max().unwrap();
    assert!(omni.iter().map(String::len).max().unwrap() >= longest_unitig);
}
