//! Flat per-vertex table for one-tree traversal and inference, with a dense
//! renumbering of the fields the tree actually tests.

use super::{ArchError, BoosterConfig};
use crate::data::QuantizedDataset;
use crate::gbt::{Node, Tree};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TableEntry {
    Split {
        /// Index into `field_remap`, not an original field id.
        field_ordinal: u16,
        bin_boundary: u8,
        missing_goes_left: bool,
        left: u16,
        right: u16,
    },
    Leaf { weight: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeTable {
    pub entries: Vec<TableEntry>,
    /// Original field id of each ordinal, ascending.
    pub field_remap: Vec<u32>,
}

impl TreeTable {
    pub fn bytes(&self, config: &BoosterConfig) -> usize {
        self.entries.len() * config.tree_entry_bytes
    }

    /// Walk a record through the table. Returns the leaf weight and the
    /// path length in edges, matching the engine's traversal.
    pub fn traverse(&self, dataset: &QuantizedDataset, record: usize) -> (f64, usize) {
        let mut idx = 0usize;
        let mut visited = 0usize;
        loop {
            match self.entries[idx] {
                TableEntry::Leaf { weight } => return (weight, visited),
                TableEntry::Split {
                    field_ordinal,
                    bin_boundary,
                    missing_goes_left,
                    left,
                    right,
                } => {
                    let field = self.field_remap[field_ordinal as usize] as usize;
                    let bin = dataset.bin_column_major(record, field);
                    let schema = &dataset.schema[field];
                    let missing = bin == schema.missing_bin();
                    let go_left = if missing { missing_goes_left } else { bin <= bin_boundary };
                    idx = if go_left { left as usize } else { right as usize };
                    visited += 1;
                }
            }
        }
    }

    pub fn dump(&self) -> String {
        let mut out = format!("remap {:?}\n", self.field_remap);
        for (i, e) in self.entries.iter().enumerate() {
            match e {
                TableEntry::Leaf { weight } => out.push_str(&format!("{i} leaf {weight}\n")),
                TableEntry::Split {
                    field_ordinal,
                    bin_boundary,
                    missing_goes_left,
                    left,
                    right,
                } => out.push_str(&format!(
                    "{i} split f{field_ordinal} <={bin_boundary} ml={missing_goes_left} {left} {right}\n"
                )),
            }
        }
        out
    }
}

pub fn encode_tree_table(tree: &Tree, config: &BoosterConfig) -> Result<TreeTable, ArchError> {
    let required = tree.nodes.len() * config.tree_entry_bytes;
    if required > config.sram_bytes {
        return Err(ArchError::TreeTooLarge {
            required,
            available: config.sram_bytes,
        });
    }
    let field_remap = tree.fields_used();
    let ordinal_of = |field_id: u32| -> u16 {
        field_remap.binary_search(&field_id).expect("field in remap") as u16
    };
    let entries = tree
        .nodes
        .iter()
        .map(|node| match node {
            Node::Leaf { weight } => TableEntry::Leaf { weight: *weight },
            Node::Split { predicate, left, right } => TableEntry::Split {
                field_ordinal: ordinal_of(predicate.field_id),
                bin_boundary: predicate.bin_boundary,
                missing_goes_left: predicate.missing_goes_left,
                left: *left as u16,
                right: *right as u16,
            },
        })
        .collect();
    Ok(TreeTable { entries, field_remap })
}
