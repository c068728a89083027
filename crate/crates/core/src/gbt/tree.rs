//! Decision trees over bin indices, ensembles, and the text model format.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::data::QuantizedDataset;

use super::{GbtError, Loss};

/// Split predicate: records whose bin index is `<= bin_boundary` go left;
/// the field's missing bin goes to the side given by `missing_goes_left`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Predicate {
    pub field_id: u32,
    pub bin_boundary: u8,
    pub missing_goes_left: bool,
}

impl Predicate {
    /// True means "go left".
    #[inline]
    pub fn eval(&self, bin: u8, missing_bin: u8) -> bool {
        if bin == missing_bin {
            self.missing_goes_left
        } else {
            bin <= self.bin_boundary
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Split { predicate: Predicate, left: u32, right: u32 },
    Leaf { weight: f64 },
}

/// A binary decision tree stored as a node array with the root at index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf(weight: f64) -> Self {
        Tree { nodes: vec![Node::Leaf { weight }] }
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn max_depth(&self) -> usize {
        self.depth_from(0)
    }

    fn depth_from(&self, idx: u32) -> usize {
        match &self.nodes[idx as usize] {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => {
                1 + self.depth_from(*left).max(self.depth_from(*right))
            }
        }
    }

    /// Distinct fields referenced by the tree's predicates, ascending.
    pub fn fields_used(&self) -> Vec<u32> {
        let mut fields: Vec<u32> = self
            .nodes
            .iter()
            .filter_map(|n| match n {
                Node::Split { predicate, .. } => Some(predicate.field_id),
                Node::Leaf { .. } => None,
            })
            .collect();
        fields.sort_unstable();
        fields.dedup();
        fields
    }

    /// Traverse one record (column-major reads); returns the leaf weight and
    /// the path length in edges.
    pub fn traverse(&self, dataset: &QuantizedDataset, record: usize) -> (f64, usize) {
        let mut idx = 0u32;
        let mut path = 0usize;
        loop {
            match &self.nodes[idx as usize] {
                Node::Leaf { weight } => return (*weight, path),
                Node::Split { predicate, left, right } => {
                    let f = predicate.field_id as usize;
                    let bin = dataset.bin_column_major(record, f);
                    let missing = dataset.schema[f].missing_bin();
                    idx = if predicate.eval(bin, missing) { *left } else { *right };
                    path += 1;
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub trees: Vec<Tree>,
    pub learning_rate: f64,
    pub base_score: f64,
    pub loss: Loss,
}

impl Ensemble {
    pub fn predict(&self, dataset: &QuantizedDataset, record: usize) -> f64 {
        let mut score = self.base_score;
        for t in &self.trees {
            score += t.traverse(dataset, record).0;
        }
        score
    }

    pub fn batch_predict(&self, dataset: &QuantizedDataset) -> Vec<f64> {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            (0..dataset.n_records())
                .into_par_iter()
                .map(|r| self.predict(dataset, r))
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            (0..dataset.n_records()).map(|r| self.predict(dataset, r)).collect()
        }
    }

    /// Mean traversal path length per tree over all records (edges).
    pub fn mean_path_lengths(&self, dataset: &QuantizedDataset) -> Vec<f64> {
        let n = dataset.n_records().max(1);
        self.trees
            .iter()
            .map(|t| {
                let total: usize = (0..dataset.n_records())
                    .map(|r| t.traverse(dataset, r).1)
                    .sum();
                total as f64 / n as f64
            })
            .collect()
    }
}

/// Text model file: one node per line.
pub fn write_model(ensemble: &Ensemble, path: &Path) -> Result<(), GbtError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "booster-model v1")?;
    writeln!(
        out,
        "base_score={} learning_rate={} loss={} n_trees={}",
        ensemble.base_score,
        ensemble.learning_rate,
        match ensemble.loss {
            Loss::SquaredError => "squared_error",
            Loss::Logistic => "logistic",
        },
        ensemble.trees.len()
    )?;
    for (k, tree) in ensemble.trees.iter().enumerate() {
        writeln!(out, "tree {} nodes {}", k, tree.nodes.len())?;
        for (i, node) in tree.nodes.iter().enumerate() {
            match node {
                Node::Split { predicate, left, right } => writeln!(
                    out,
                    "{i} split field={} boundary={} missing_left={} left={left} right={right}",
                    predicate.field_id, predicate.bin_boundary, predicate.missing_goes_left as u8
                )?,
                Node::Leaf { weight } => writeln!(out, "{i} leaf weight={weight}")?,
            }
        }
    }
    Ok(())
}

pub fn read_model(path: &Path) -> Result<Ensemble, GbtError> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut lines = file.lines();
    let bad = |msg: &str| GbtError::ModelFormat(msg.to_string());

    let header = lines.next().ok_or_else(|| bad("empty model file"))??;
    if header != "booster-model v1" {
        return Err(bad("not a booster-model v1 file"));
    }
    let meta = lines.next().ok_or_else(|| bad("missing model metadata"))??;
    let mut base_score = 0.0;
    let mut learning_rate = 0.1;
    let mut loss = Loss::SquaredError;
    let mut n_trees = 0usize;
    for kv in meta.split_whitespace() {
        let (k, v) = kv.split_once('=').ok_or_else(|| bad("bad metadata entry"))?;
        match k {
            "base_score" => base_score = v.parse().map_err(|_| bad("bad base_score"))?,
            "learning_rate" => learning_rate = v.parse().map_err(|_| bad("bad learning_rate"))?,
            "loss" => {
                loss = match v {
                    "squared_error" => Loss::SquaredError,
                    "logistic" => Loss::Logistic,
                    _ => return Err(bad("unknown loss")),
                }
            }
            "n_trees" => n_trees = v.parse().map_err(|_| bad("bad n_trees"))?,
            _ => return Err(bad("unknown metadata key")),
        }
    }

    let mut trees = Vec::with_capacity(n_trees);
    for _ in 0..n_trees {
        let head = lines.next().ok_or_else(|| bad("missing tree header"))??;
        let parts: Vec<&str> = head.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != "tree" || parts[2] != "nodes" {
            return Err(bad("bad tree header"));
        }
        let n_nodes: usize = parts[3].parse().map_err(|_| bad("bad node count"))?;
        let mut nodes = Vec::with_capacity(n_nodes);
        for i in 0..n_nodes {
            let line = lines.next().ok_or_else(|| bad("missing node line"))??;
            let mut toks = line.split_whitespace();
            let idx: usize = toks
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| bad("bad node index"))?;
            if idx != i {
                return Err(bad("node lines out of order"));
            }
            let kind = toks.next().ok_or_else(|| bad("missing node kind"))?;
            let mut fields = std::collections::BTreeMap::new();
            for kv in toks {
                let (k, v) = kv.split_once('=').ok_or_else(|| bad("bad node field"))?;
                fields.insert(k.to_string(), v.to_string());
            }
            let get = |k: &str| {
                fields
                    .get(k)
                    .cloned()
                    .ok_or_else(|| GbtError::ModelFormat(format!("missing node field {k}")))
            };
            match kind {
                "split" => nodes.push(Node::Split {
                    predicate: Predicate {
                        field_id: get("field")?.parse().map_err(|_| bad("bad field"))?,
                        bin_boundary: get("boundary")?.parse().map_err(|_| bad("bad boundary"))?,
                        missing_goes_left: get("missing_left")? == "1",
                    },
                    left: get("left")?.parse().map_err(|_| bad("bad left"))?,
                    right: get("right")?.parse().map_err(|_| bad("bad right"))?,
                }),
                "leaf" => nodes.push(Node::Leaf {
                    weight: get("weight")?.parse().map_err(|_| bad("bad weight"))?,
                }),
                _ => return Err(bad("unknown node kind")),
            }
        }
        trees.push(Tree { nodes });
    }
    Ok(Ensemble { trees, learning_rate, base_score, loss })
}
