//! Bin-to-SRAM placement. Group-by-field gives each field its own unit so a
//! record performs exactly one update per field per unit; naive first-fit
//! packing is the strawman it is compared against.

use super::{ArchError, BoosterConfig};
use crate::data::FieldSchema;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapStrategy {
    GroupByField,
    NaivePack,
}

/// Placement of one field: the unit (or contiguous unit group) that holds its
/// bins and the byte offset of its first bin within the first unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldPlacement {
    pub field_id: u32,
    pub first_bu: usize,
    /// Units spanned; 1 unless the field's bins exceed one SRAM.
    pub bu_span: usize,
    pub base_offset: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuOccupancy {
    pub fields: Vec<u32>,
    pub bytes_used: usize,
}

#[derive(Debug, Clone)]
pub struct SramMap {
    pub strategy: MapStrategy,
    pub placements: Vec<FieldPlacement>,
    pub occupancy: Vec<BuOccupancy>,
}

impl SramMap {
    pub fn placement(&self, field_id: u32) -> &FieldPlacement {
        self.placements
            .iter()
            .find(|p| p.field_id == field_id)
            .expect("field not mapped")
    }

    /// Serialization factor of the most loaded unit: the number of distinct
    /// fields a single unit must update per record.
    pub fn max_fields_per_bu(&self) -> usize {
        self.occupancy
            .iter()
            .map(|o| o.fields.len())
            .max()
            .unwrap_or(0)
    }

    /// Units that hold at least one bin.
    pub fn units_used(&self) -> usize {
        self.occupancy.iter().filter(|o| !o.fields.is_empty()).count()
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        for p in &self.placements {
            out.push_str(&format!(
                "field {} bu {}..{} offset {}\n",
                p.field_id,
                p.first_bu,
                p.first_bu + p.bu_span,
                p.base_offset
            ));
        }
        out
    }
}

fn check_capacity(schemas: &[FieldSchema], config: &BoosterConfig) -> Result<(), ArchError> {
    let required: usize = schemas
        .iter()
        .map(|s| s.n_bins as usize * config.bin_entry_bytes)
        .sum();
    let available = config.total_bus() * config.sram_bytes;
    if required > available {
        return Err(ArchError::CapacityExceeded { required, available });
    }
    Ok(())
}

/// One field per unit. A field too large for one SRAM spans a contiguous
/// group of units; each record still touches exactly one unit of the group.
pub fn map_group_by_field(
    schemas: &[FieldSchema],
    config: &BoosterConfig,
) -> Result<SramMap, ArchError> {
    check_capacity(schemas, config)?;
    let total_bus = config.total_bus();
    let mut occupancy = vec![BuOccupancy::default(); total_bus];
    let mut placements = Vec::with_capacity(schemas.len());
    let mut next_bu = 0usize;
    for schema in schemas {
        let bytes = schema.n_bins as usize * config.bin_entry_bytes;
        let span = bytes.div_ceil(config.sram_bytes).max(1);
        if next_bu + span > total_bus {
            // Wrap: with more fields than units a unit hosts several fields
            // in successive passes (field partitioning), still one at a time.
            next_bu = 0;
        }
        let first_bu = next_bu;
        for (i, occ) in occupancy[first_bu..first_bu + span].iter_mut().enumerate() {
            occ.fields.push(schema.field_id);
            let member_bytes = bytes - (i * config.sram_bytes).min(bytes);
            occ.bytes_used += member_bytes.min(config.sram_bytes);
        }
        placements.push(FieldPlacement {
            field_id: schema.field_id,
            first_bu,
            bu_span: span,
            base_offset: 0,
        });
        next_bu += span;
    }
    Ok(SramMap {
        strategy: MapStrategy::GroupByField,
        placements,
        occupancy,
    })
}

/// First-fit packing by capacity. Several fields can land in one unit, which
/// then serializes their per-record updates.
pub fn map_naive_pack(
    schemas: &[FieldSchema],
    config: &BoosterConfig,
) -> Result<SramMap, ArchError> {
    check_capacity(schemas, config)?;
    let total_bus = config.total_bus();
    let mut occupancy = vec![BuOccupancy::default(); total_bus];
    let mut placements = Vec::with_capacity(schemas.len());
    let mut bu = 0usize;
    let mut offset = 0usize;
    for schema in schemas {
        let mut bytes = schema.n_bins as usize * config.bin_entry_bytes;
        if bu >= total_bus {
            bu = 0;
        }
        let first_bu = bu;
        let base_offset = offset;
        let mut span = 0usize;
        while bytes > 0 {
            let room = config.sram_bytes - offset;
            let take = bytes.min(room);
            let occ = &mut occupancy[bu + span];
            occ.fields.push(schema.field_id);
            occ.bytes_used += take;
            offset += take;
            bytes -= take;
            if bytes > 0 {
                span += 1;
                offset = 0;
            } else if offset == config.sram_bytes {
                span += 1;
                offset = 0;
            }
        }
        let touched = span + usize::from(offset > 0);
        placements.push(FieldPlacement {
            field_id: schema.field_id,
            first_bu,
            bu_span: touched.max(1),
            base_offset,
        });
        bu += span;
    }
    Ok(SramMap {
        strategy: MapStrategy::NaivePack,
        placements,
        occupancy,
    })
}
