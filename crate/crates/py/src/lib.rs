//! Python bindings: index construction, navigation and assembly.

use pyo3::exceptions::{PyIOError, PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

use hoboss::alphabet::{decode, decode_str, encode_base};
use hoboss::oracle::{check_assembly, check_navigation, NaiveGraph, Report};
use hoboss::{
    assemble, extract_unitigs, serialize, sim, AssemblyStats, Error, HoBossIndex, Mode, NodeRange, OutSymbols,
    ReadSet,
};

fn err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(format!("{e}: {}", std::error::Error::source(&e).map(|s| s.to_string()).unwrap_or_default())),
        Error::NotFound(_) => PyKeyError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    match mode {
        "link" => Ok(Mode::Link),
        "cycle-only" | "cycle_only" => Ok(Mode::CycleOnly),
        _ => Err(PyValueError::new_err(format!("unknown mode {mode:?}, expected 'link' or 'cycle-only'"))),
    }
}

fn base_code(base: &str) -> PyResult<u8> {
    match base.as_bytes() {
        [b] => encode_base(*b).ok_or_else(|| PyValueError::new_err(format!("not a base: {base:?}"))),
        _ => Err(PyValueError::new_err("expected a single base")),
    }
}

type Range = (usize, usize);

fn range(r: Range) -> NodeRange {
    NodeRange::new(r.0, r.1)
}

/// A hidden-order BOSS index over a read set.
#[pyclass(name = "Index", module = "hoboss_py", frozen)]
pub struct PyIndex {
    inner: HoBossIndex,
}

#[pymethods]
impl PyIndex {
    /// Builds an index from DNA strings; non-ACGT characters split reads.
    #[staticmethod]
    #[pyo3(signature = (reads, k, m = 1))]
    fn build(reads: Vec<String>, k: usize, m: usize) -> PyResult<Self> {
        let rs = ReadSet::from_sequences(&reads);
        Ok(PyIndex { inner: HoBossIndex::build(&rs, k, m).map_err(err)? })
    }

    /// Builds an index from FASTA/FASTQ files (optionally gzipped).
    #[staticmethod]
    #[pyo3(signature = (paths, k, m = 1, min_read_len = 1))]
    fn from_files(paths: Vec<String>, k: usize, m: usize, min_read_len: usize) -> PyResult<Self> {
        let rs = hoboss::parse_reads(&paths, hoboss::ParseOptions { min_read_len }).map_err(err)?;
        Ok(PyIndex { inner: HoBossIndex::build(&rs, k, m).map_err(err)? })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyIndex { inner: serialize::load(path.as_ref()).map_err(err)? })
    }

    #[staticmethod]
    fn from_bytes(data: &[u8]) -> PyResult<Self> {
        Ok(PyIndex { inner: serialize::from_bytes(data).map_err(err)? })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        serialize::save(&self.inner, path.as_ref()).map_err(err)
    }

    fn to_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &serialize::to_bytes(&self.inner))
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn n_nodes(&self) -> usize {
        self.inner.n_nodes()
    }

    #[getter]
    fn n_edges(&self) -> usize {
        self.inner.boss().n_edges()
    }

    #[getter]
    fn topology_bits(&self) -> usize {
        self.inner.topology().len()
    }

    /// Bits per structure: B, BE, E', C and F.
    fn space<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for (name, bits) in ["B", "BE", "E'", "C", "F"].into_iter().zip(self.inner.component_bits()) {
            d.set_item(name, bits)?;
        }
        Ok(d)
    }

    fn root(&self) -> Range {
        let r = self.inner.root_range();
        (r.lo, r.hi)
    }

    /// Parent range, or None at the minimum order.
    fn shorter(&self, r: Range) -> PyResult<Option<Range>> {
        Ok(self.inner.shorter(range(r)).map_err(err)?.map(|p| (p.lo, p.hi)))
    }

    /// Range reached by appending `base`; raises KeyError when no such edge exists.
    fn vo_forward(&self, r: Range, base: &str) -> PyResult<Range> {
        let t = self.inner.vo_forward(range(r), base_code(base)?).map_err(err)?;
        Ok((t.lo, t.hi))
    }

    /// Distinct non-`$` out-symbols of the range, as a string ("" when only `$` leaves it).
    fn out_symbols(&self, r: Range) -> PyResult<String> {
        Ok(match self.inner.out_symbols(range(r)).map_err(err)? {
            OutSymbols::DollarOnly => String::new(),
            OutSymbols::Unique(a) => (decode(a) as char).to_string(),
            OutSymbols::Branching(v) => decode_str(&v),
        })
    }

    fn children(&self, r: Range) -> PyResult<Vec<Range>> {
        Ok(self.inner.children_ranges(range(r)).map_err(err)?.into_iter().map(|c| (c.lo, c.hi)).collect())
    }

    /// K-mer label of node `v` (1-based colex rank).
    fn label(&self, v: usize) -> PyResult<String> {
        Ok(decode_str(&self.inner.boss().label(v).map_err(err)?))
    }

    fn outdegree(&self, v: usize) -> PyResult<usize> {
        self.inner.boss().outdegree(v).map_err(err)
    }

    fn indegree(&self, v: usize) -> PyResult<usize> {
        self.inner.boss().indegree(v).map_err(err)
    }

    fn backward(&self, v: usize) -> PyResult<Vec<usize>> {
        self.inner.boss().backward(v).map_err(err)
    }

    /// Right-maximal omnitigs in starter order.
    #[pyo3(signature = (mode = "link"))]
    fn assemble(&self, py: Python<'_>, mode: &str) -> PyResult<Vec<String>> {
        let mode = parse_mode(mode)?;
        py.detach(|| assemble(&self.inner, mode).and_then(|s| s.materialize_all())).map_err(err)
    }

    /// Unitigs of the order-K graph.
    fn unitigs(&self) -> PyResult<Vec<String>> {
        extract_unitigs(self.inner.boss()).map_err(err)
    }

    /// The assembly statistics row as a dict.
    #[pyo3(signature = (mode = "link"))]
    fn stats<'py>(&self, py: Python<'py>, mode: &str) -> PyResult<Bound<'py, PyDict>> {
        let store = assemble(&self.inner, parse_mode(mode)?).map_err(err)?;
        let unitigs = extract_unitigs(self.inner.boss()).map_err(err)?;
        let st = AssemblyStats::compute(&self.inner, &store, &unitigs).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("n_kmers", st.n_kmers)?;
        d.set_item("n_starters", st.n_starters)?;
        d.set_item("n_pm_nodes", st.n_pm_nodes)?;
        d.set_item("max_omnitig", st.max_omnitig)?;
        d.set_item("max_unitig", st.max_unitig)?;
        d.set_item("traversed_nodes", st.traversed_nodes)?;
        d.set_item("omnitig_nodes", st.omnitig_nodes)?;
        d.set_item("pct_reduction", st.pct_reduction)?;
        d.set_item("us_per_node", st.us_per_node)?;
        Ok(d)
    }

    fn __len__(&self) -> usize {
        self.inner.n_nodes()
    }

    fn __repr__(&self) -> String {
        format!("Index(k={}, m={}, n_nodes={})", self.inner.k(), self.inner.m(), self.inner.n_nodes())
    }
}

fn report_tuple(rep: &Report) -> (bool, usize, Vec<String>) {
    (rep.passed(), rep.checks, rep.mismatches.clone())
}

/// Checks the index built from `reads` against the brute-force oracle.
///
/// Returns `(passed, checks, mismatches)`.
#[pyfunction]
#[pyo3(signature = (reads, k, m = 1))]
fn verify(reads: Vec<String>, k: usize, m: usize) -> PyResult<(bool, usize, Vec<String>)> {
    let h = HoBossIndex::build(&ReadSet::from_sequences(&reads), k, m).map_err(err)?;
    let g = NaiveGraph::new(&reads, k, m);
    let mut rep = check_navigation(&h, &g);
    rep.merge(check_assembly(&h, &g));
    Ok(report_tuple(&rep))
}

#[pyfunction]
fn random_genome(length: usize, seed: u64) -> String {
    String::from_utf8(sim::random_genome(length, seed)).unwrap()
}

/// Error-free reads with uniform starts; `circular` lets reads wrap.
#[pyfunction]
#[pyo3(signature = (genome, coverage, read_len = 150, seed = 1, circular = false))]
fn simulate(genome: &str, coverage: f64, read_len: usize, seed: u64, circular: bool) -> Vec<String> {
    let g = genome.as_bytes();
    let reads = if circular {
        sim::simulate_circular_reads(g, coverage, read_len, seed)
    } else {
        sim::simulate_reads(g, coverage, read_len, seed)
    };
    reads.into_iter().map(|r| String::from_utf8(r).unwrap()).collect()
}

#[pymodule]
fn hoboss_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyIndex>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(random_genome, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_and_bases_parse() {
        assert_eq!(parse_mode("link").unwrap(), Mode::Link);
        assert_eq!(parse_mode("cycle-only").unwrap(), Mode::CycleOnly);
        assert_eq!(base_code("G").unwrap(), 3);
    }
}
