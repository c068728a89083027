//! Per-step work traces emitted by training; the platform simulators replay
//! these instead of re-running the algorithm.

use std::io::{BufRead, Write};
use std::path::Path;

use super::GbtError;

/// Work at one tree vertex: step-1 binning (smaller child only), step-2 bin
/// scanning on the host, and step-3 partitioning when the vertex split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexTrace {
    pub tree: u32,
    pub vertex: u32,
    pub depth: u32,
    /// Records reaching this vertex.
    pub subset_size: u64,
    /// Fraction of all records reaching this vertex (memory-block
    /// contiguity descriptor: 1.0 at the root means contiguous streaming).
    pub selectivity: f64,
    pub contiguous: bool,
    /// Records actually histogram-binned here; zero when the histogram came
    /// from the parent by subtraction.
    pub binned_size: u64,
    /// Total bins scanned by the host split search at this vertex.
    pub bins_scanned: u64,
    /// Whether a split was applied (step 3 ran over `subset_size` records).
    pub split: bool,
}

/// Per-tree one-tree-traversal work (step 5) over all records.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeTrace {
    pub tree: u32,
    pub n_records: u64,
    pub fields_used: u64,
    pub avg_path_len: f64,
    pub max_depth: u32,
    pub n_nodes: u64,
}

/// Full training trace: everything the simulators need to charge cycles.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepTrace {
    pub n_records: u64,
    pub n_fields: u64,
    /// Padded row-major bytes per record.
    pub record_stride: u64,
    /// Total histogram bins across all fields.
    pub total_bins: u64,
    pub vertices: Vec<VertexTrace>,
    pub trees: Vec<TreeTrace>,
}

/// Aggregate work counts per algorithm step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WorkTotals {
    pub step1_records: u64,
    pub step1_bin_updates: u64,
    pub step2_bins_scanned: u64,
    pub step3_records: u64,
    pub step5_records: u64,
    pub step5_node_visits: u64,
    /// Bytes each layout would move for steps 1+3+5 reads.
    pub row_major_bytes: u64,
    pub column_major_bytes: u64,
}

impl StepTrace {
    pub fn totals(&self) -> WorkTotals {
        let mut t = WorkTotals::default();
        for v in &self.vertices {
            t.step1_records += v.binned_size;
            t.step1_bin_updates += v.binned_size * self.n_fields;
            t.step2_bins_scanned += v.bins_scanned;
            if v.split {
                t.step3_records += v.subset_size;
                t.row_major_bytes += v.subset_size * self.record_stride;
                t.column_major_bytes += v.subset_size;
            }
        }
        for tr in &self.trees {
            t.step5_records += tr.n_records;
            t.step5_node_visits += (tr.n_records as f64 * tr.avg_path_len).round() as u64;
            t.row_major_bytes += tr.n_records * self.record_stride;
            t.column_major_bytes += tr.n_records * tr.fields_used;
        }
        // step 1 always streams full records
        let step1_bytes: u64 = self
            .vertices
            .iter()
            .map(|v| v.binned_size * self.record_stride)
            .sum();
        t.row_major_bytes += step1_bytes;
        t.column_major_bytes += step1_bytes;
        t
    }

    /// Structured key-value records, one line per (tree, vertex, step).
    pub fn write(&self, path: &Path) -> Result<(), GbtError> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "booster-trace v1")?;
        writeln!(
            out,
            "n_records={} n_fields={} record_stride={} total_bins={}",
            self.n_records, self.n_fields, self.record_stride, self.total_bins
        )?;
        for v in &self.vertices {
            writeln!(
                out,
                "vertex tree={} vertex={} depth={} subset={} selectivity={} contiguous={} \
                 binned={} bins_scanned={} split={}",
                v.tree,
                v.vertex,
                v.depth,
                v.subset_size,
                v.selectivity,
                v.contiguous as u8,
                v.binned_size,
                v.bins_scanned,
                v.split as u8
            )?;
        }
        for t in &self.trees {
            writeln!(
                out,
                "tree tree={} n_records={} fields_used={} avg_path={} max_depth={} n_nodes={}",
                t.tree, t.n_records, t.fields_used, t.avg_path_len, t.max_depth, t.n_nodes
            )?;
        }
        Ok(())
    }

    pub fn read(path: &Path) -> Result<StepTrace, GbtError> {
        let bad = |msg: &str| GbtError::ModelFormat(format!("trace: {msg}"));
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut lines = file.lines();
        if lines.next().ok_or_else(|| bad("empty file"))?? != "booster-trace v1" {
            return Err(bad("not a booster-trace v1 file"));
        }
        let mut trace = StepTrace::default();
        let head = lines.next().ok_or_else(|| bad("missing header"))??;
        for kv in head.split_whitespace() {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad("bad header"))?;
            let v: u64 = v.parse().map_err(|_| bad("bad header value"))?;
            match k {
                "n_records" => trace.n_records = v,
                "n_fields" => trace.n_fields = v,
                "record_stride" => trace.record_stride = v,
                "total_bins" => trace.total_bins = v,
                _ => return Err(bad("unknown header key")),
            }
        }
        for line in lines {
            let line = line?;
            let mut toks = line.split_whitespace();
            let kind = match toks.next() {
                None => continue,
                Some(k) => k,
            };
            let mut get = std::collections::BTreeMap::new();
            for kv in toks {
                let (k, v) = kv.split_once('=').ok_or_else(|| bad("bad entry"))?;
                get.insert(k.to_string(), v.to_string());
            }
            let field = |k: &str| {
                get.get(k)
                    .cloned()
                    .ok_or_else(|| GbtError::ModelFormat(format!("trace: missing key {k}")))
            };
            match kind {
                "vertex" => trace.vertices.push(VertexTrace {
                    tree: field("tree")?.parse().map_err(|_| bad("tree"))?,
                    vertex: field("vertex")?.parse().map_err(|_| bad("vertex"))?,
                    depth: field("depth")?.parse().map_err(|_| bad("depth"))?,
                    subset_size: field("subset")?.parse().map_err(|_| bad("subset"))?,
                    selectivity: field("selectivity")?.parse().map_err(|_| bad("selectivity"))?,
                    contiguous: field("contiguous")? == "1",
                    binned_size: field("binned")?.parse().map_err(|_| bad("binned"))?,
                    bins_scanned: field("bins_scanned")?.parse().map_err(|_| bad("bins"))?,
                    split: field("split")? == "1",
                }),
                "tree" => trace.trees.push(TreeTrace {
                    tree: field("tree")?.parse().map_err(|_| bad("tree"))?,
                    n_records: field("n_records")?.parse().map_err(|_| bad("n_records"))?,
                    fields_used: field("fields_used")?.parse().map_err(|_| bad("fields_used"))?,
                    avg_path_len: field("avg_path")?.parse().map_err(|_| bad("avg_path"))?,
                    max_depth: field("max_depth")?.parse().map_err(|_| bad("max_depth"))?,
                    n_nodes: field("n_nodes")?.parse().map_err(|_| bad("n_nodes"))?,
                }),
                _ => return Err(bad("unknown record kind")),
            }
        }
        Ok(trace)
    }
}
