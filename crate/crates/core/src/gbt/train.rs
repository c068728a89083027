//! Tree growth and the training loop.

use serde::{Deserialize, Serialize};

use crate::data::QuantizedDataset;

use super::histogram::{bin_gradients, subtract_histograms, BinStats, Histogram};
use super::loss::{compute_gradients, GradPair, Loss};
use super::split::{find_best_split, leaf_weight};
use super::trace::{StepTrace, TreeTrace, VertexTrace};
use super::tree::{Ensemble, Node, Predicate, Tree};
use super::{GbtError, Layout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthOrder {
    VertexByVertex,
    LevelByLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    pub loss: Loss,
    /// Weight regularization (lambda >= 0).
    pub lambda: f64,
    /// Complexity penalty per split (gamma >= 0).
    pub gamma: f64,
    pub learning_rate: f64,
    pub growth_order: GrowthOrder,
    /// Which record layout training reads; results are identical either way.
    pub layout: Layout,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            n_trees: 10,
            max_depth: 6,
            loss: Loss::SquaredError,
            lambda: 1.0,
            gamma: 0.0,
            learning_rate: 0.1,
            growth_order: GrowthOrder::VertexByVertex,
            layout: Layout::ColumnMajor,
        }
    }
}

/// Apply a split predicate to a record subset, preserving relative order.
/// Returns (predicate-true, predicate-false) = (left, right).
pub fn partition_records(
    subset: &[u32],
    predicate: &Predicate,
    dataset: &QuantizedDataset,
    layout: Layout,
) -> (Vec<u32>, Vec<u32>) {
    let f = predicate.field_id as usize;
    let missing = dataset.schema[f].missing_bin();
    let mut left = Vec::new();
    let mut right = Vec::new();
    match layout {
        Layout::ColumnMajor => {
            let col = &dataset.columns[f];
            for &r in subset {
                if predicate.eval(col[r as usize], missing) {
                    left.push(r);
                } else {
                    right.push(r);
                }
            }
        }
        Layout::RowMajor => {
            for &r in subset {
                if predicate.eval(dataset.bin_row_major(r as usize, f), missing) {
                    left.push(r);
                } else {
                    right.push(r);
                }
            }
        }
    }
    (left, right)
}

struct NodeWork {
    temp_id: usize,
    depth: usize,
    subset: Vec<u32>,
    histograms: Vec<Histogram>,
    stats: BinStats,
    /// Zero when histograms came from the parent by subtraction.
    binned: u64,
    contiguous: bool,
}

enum TempNode {
    Pending,
    Leaf(f64),
    Split { predicate: Predicate, left: usize, right: usize },
}

/// Grow one tree over the given gradients; appends per-vertex trace entries.
pub fn grow_tree(
    dataset: &QuantizedDataset,
    grads: &[GradPair],
    config: &TrainConfig,
    tree_index: u32,
    trace: Option<&mut StepTrace>,
) -> Result<Tree, GbtError> {
    let n = dataset.n_records();
    let all: Vec<u32> = (0..n as u32).collect();
    let root_hists = bin_gradients(&all, dataset, grads, config.layout);
    let root_stats = total_stats(&root_hists);

    let mut temp: Vec<TempNode> = vec![TempNode::Pending];
    let mut events: Vec<VertexTrace> = Vec::new();
    let root = NodeWork {
        temp_id: 0,
        depth: 0,
        binned: n as u64,
        contiguous: true,
        subset: all,
        histograms: root_hists,
        stats: root_stats,
    };

    // DFS stack or BFS queue; the tree produced is order-independent because
    // each split depends only on its own subset.
    let mut frontier: std::collections::VecDeque<NodeWork> = std::collections::VecDeque::new();
    frontier.push_back(root);
    while let Some(work) = match config.growth_order {
        GrowthOrder::VertexByVertex => frontier.pop_back(),
        GrowthOrder::LevelByLevel => frontier.pop_front(),
    } {
        let splittable =
            work.depth < config.max_depth && work.stats.count >= 2 && work.stats.h > 0.0;
        let candidate = if splittable {
            find_best_split(&work.histograms, work.stats, config.lambda, config.gamma)
        } else {
            None
        };
        let bins_scanned = if splittable {
            work.histograms.iter().map(|h| h.bins.len() as u64).sum()
        } else {
            0
        };
        events.push(VertexTrace {
            tree: tree_index,
            vertex: work.temp_id as u32,
            depth: work.depth as u32,
            subset_size: work.subset.len() as u64,
            selectivity: work.subset.len() as f64 / n.max(1) as f64,
            contiguous: work.contiguous,
            binned_size: work.binned,
            bins_scanned,
            split: candidate.is_some(),
        });

        match candidate {
            None => {
                let w = leaf_weight(work.stats, config.lambda) * config.learning_rate;
                temp[work.temp_id] = TempNode::Leaf(w);
            }
            Some(split) => {
                let predicate = Predicate {
                    field_id: split.field_id,
                    bin_boundary: split.bin_boundary,
                    missing_goes_left: split.missing_goes_left,
                };
                let (left_set, right_set) =
                    partition_records(&work.subset, &predicate, dataset, config.layout);

                // bin only the smaller child; the larger child's histograms
                // come from the parent by subtraction
                let left_smaller = left_set.len() <= right_set.len();
                let small = if left_smaller { &left_set } else { &right_set };
                let small_hists = bin_gradients(small, dataset, grads, config.layout);
                let large_hists = subtract_histograms(&work.histograms, &small_hists)?;
                let (left_hists, right_hists) = if left_smaller {
                    (small_hists, large_hists)
                } else {
                    (large_hists, small_hists)
                };

                let left_id = temp.len();
                temp.push(TempNode::Pending);
                let right_id = temp.len();
                temp.push(TempNode::Pending);
                temp[work.temp_id] = TempNode::Split { predicate, left: left_id, right: right_id };

                let child = |temp_id: usize, subset: Vec<u32>, hists: Vec<Histogram>, stats, binned| {
                    NodeWork {
                        temp_id,
                        depth: work.depth + 1,
                        binned,
                        contiguous: false,
                        subset,
                        histograms: hists,
                        stats,
                    }
                };
                let left_binned = if left_smaller { left_set.len() as u64 } else { 0 };
                let right_binned = if left_smaller { 0 } else { right_set.len() as u64 };
                let left_work =
                    child(left_id, left_set, left_hists, split.left_stats, left_binned);
                let right_work =
                    child(right_id, right_set, right_hists, split.right_stats, right_binned);
                match config.growth_order {
                    // stack pops from the back: push right first, explore left first
                    GrowthOrder::VertexByVertex => {
                        frontier.push_back(right_work);
                        frontier.push_back(left_work);
                    }
                    GrowthOrder::LevelByLevel => {
                        frontier.push_back(left_work);
                        frontier.push_back(right_work);
                    }
                }
            }
        }
    }

    let tree = canonicalize(&temp);
    if let Some(tr) = trace {
        tr.vertices.extend(events);
    }
    Ok(tree)
}

fn total_stats(hists: &[Histogram]) -> BinStats {
    hists.first().map(|h| h.totals()).unwrap_or_default()
}

/// Renumber temp nodes into preorder so both growth orders produce the same
/// node array.
fn canonicalize(temp: &[TempNode]) -> Tree {
    fn emit(temp: &[TempNode], id: usize, nodes: &mut Vec<Node>) -> u32 {
        let my = nodes.len() as u32;
        match &temp[id] {
            TempNode::Leaf(w) => nodes.push(Node::Leaf { weight: *w }),
            TempNode::Split { predicate, left, right } => {
                nodes.push(Node::Leaf { weight: 0.0 }); // placeholder
                let l = emit(temp, *left, nodes);
                let r = emit(temp, *right, nodes);
                nodes[my as usize] = Node::Split { predicate: *predicate, left: l, right: r };
            }
            TempNode::Pending => unreachable!("unfinished node"),
        }
        my
    }
    let mut nodes = Vec::with_capacity(temp.len());
    emit(temp, 0, &mut nodes);
    Tree { nodes }
}

/// Training output: the model, the per-step work trace, and the loss after
/// each tree (index 0 is the base-score-only loss).
#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutput {
    pub ensemble: Ensemble,
    pub trace: StepTrace,
    pub losses: Vec<f64>,
}

/// Full gradient-boosting loop: per tree, compute gradients, grow, then
/// evaluate the new tree over all records.
pub fn train(dataset: &QuantizedDataset, config: &TrainConfig) -> Result<TrainOutput, GbtError> {
    let n = dataset.n_records();
    let base_score = config.loss.base_score(&dataset.labels);
    let mut preds = vec![base_score; n];
    let mut trace = StepTrace {
        n_records: n as u64,
        n_fields: dataset.n_fields() as u64,
        record_stride: dataset.record_stride() as u64,
        total_bins: dataset.schema.iter().map(|s| s.n_bins as u64).sum(),
        ..StepTrace::default()
    };
    let mut ensemble = Ensemble {
        trees: Vec::with_capacity(config.n_trees),
        learning_rate: config.learning_rate,
        base_score,
        loss: config.loss,
    };
    let mut losses = Vec::with_capacity(config.n_trees + 1);

    for k in 0..config.n_trees {
        let (grads, loss_now) = compute_gradients(&dataset.labels, &preds, config.loss)?;
        losses.push(loss_now);
        let tree = grow_tree(dataset, &grads, config, k as u32, Some(&mut trace))?;

        // step 5: evaluate the completed tree over all records
        let mut path_total = 0usize;
        for (r, pred) in preds.iter_mut().enumerate() {
            let (w, path) = tree.traverse(dataset, r);
            *pred += w;
            path_total += path;
        }
        trace.trees.push(TreeTrace {
            tree: k as u32,
            n_records: n as u64,
            fields_used: tree.fields_used().len() as u64,
            avg_path_len: path_total as f64 / n.max(1) as f64,
            max_depth: tree.max_depth() as u32,
            n_nodes: tree.n_nodes() as u64,
        });
        ensemble.trees.push(tree);
    }
    let (_, final_loss) = compute_gradients(&dataset.labels, &preds, config.loss)?;
    losses.push(final_loss);

    Ok(TrainOutput { ensemble, trace, losses })
}
