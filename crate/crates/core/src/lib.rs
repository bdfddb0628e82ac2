//! Succinct variable-order de Bruijn graph index and right-maximal omnitig assembler.

pub mod alphabet;
pub mod assembler;
pub mod boss;
pub mod error;
pub mod fasta;
pub mod hoboss;
pub mod ingest;
pub mod oracle;
pub mod serialize;
pub mod sim;
pub mod succinct;

pub use alphabet::EdgeSym;
pub use assembler::{assemble, assemble_all, assemble_cycle_only, extract_unitigs, find_starters, AssemblyStats, Mode, OmnitigStore};
pub use boss::BossIndex;
pub use error::{Error, Result};
pub use hoboss::{HoBossIndex, NodeRange, OutSymbols};
pub use ingest::{extract_kmers, parse_reads, EdgeTable, ParseOptions, ReadSet};
