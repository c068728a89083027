//! On-disk formats: the binary dataset file and CSV ingestion.
//!
//! Binary layout (`BSTRDSv1`, little-endian lengths): magic, schema block,
//! row-major block section, column section, label section, grad section,
//! trailing FNV-1a checksum of everything before it.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::gbt::GradPair;

use super::dataset::{record_stride_for, QuantizedDataset, RawColumn, RawTable};
use super::schema::{BinMap, FieldKind, FieldSchema};
use super::DataError;

pub const MAGIC: &[u8; 8] = b"BSTRDSv1";

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], DataError> {
        if self.pos + n > self.buf.len() {
            return Err(DataError::Truncated);
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8, DataError> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32, DataError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64, DataError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64, DataError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn serialize_dataset(ds: &QuantizedDataset, path: &Path) -> Result<(), DataError> {
    let mut w = Writer { buf: Vec::new() };
    w.buf.extend_from_slice(MAGIC);
    w.u32(ds.schema.len() as u32);
    for (fs, map) in ds.schema.iter().zip(ds.bin_maps.iter()) {
        w.u32(fs.field_id);
        w.u8(match fs.kind {
            FieldKind::Numeric => 0,
            FieldKind::Categorical => 1,
        });
        w.u32(fs.n_categories);
        w.u32(fs.max_bins);
        w.u32(fs.start_feature);
        w.u32(fs.n_bins);
        match map {
            None => w.u32(u32::MAX),
            Some(m) => {
                w.u32(m.upper_boundaries.len() as u32);
                for &b in &m.upper_boundaries {
                    w.f64(b);
                }
                w.u8(m.missing_bin);
            }
        }
    }
    w.u64(ds.n_records() as u64);
    w.u64(ds.row_blocks.len() as u64);
    w.buf.extend_from_slice(&ds.row_blocks);
    for col in &ds.columns {
        w.buf.extend_from_slice(col);
    }
    for &y in &ds.labels {
        w.f64(y);
    }
    for g in &ds.grad_buffer {
        w.f64(g.g);
        w.f64(g.h);
    }
    let sum = fnv1a(&w.buf);
    w.u64(sum);
    std::fs::write(path, &w.buf)?;
    Ok(())
}

pub fn deserialize_dataset(path: &Path) -> Result<QuantizedDataset, DataError> {
    let buf = std::fs::read(path)?;
    if buf.len() < MAGIC.len() + 8 {
        return Err(DataError::Truncated);
    }
    let (body, tail) = buf.split_at(buf.len() - 8);
    let stored = u64::from_le_bytes(tail.try_into().unwrap());
    if &body[..8] != MAGIC {
        return Err(DataError::BadMagic);
    }
    if fnv1a(body) != stored {
        return Err(DataError::ChecksumMismatch);
    }
    let mut r = Reader { buf: body, pos: 8 };
    let n_fields = r.u32()? as usize;
    let mut schema = Vec::with_capacity(n_fields);
    let mut bin_maps = Vec::with_capacity(n_fields);
    for _ in 0..n_fields {
        let field_id = r.u32()?;
        let kind = match r.u8()? {
            0 => FieldKind::Numeric,
            1 => FieldKind::Categorical,
            k => {
                return Err(DataError::Corrupt(format!("unknown field kind {k}")));
            }
        };
        let n_categories = r.u32()?;
        let max_bins = r.u32()?;
        let start_feature = r.u32()?;
        let n_bins = r.u32()?;
        schema.push(FieldSchema {
            field_id,
            kind,
            n_categories,
            max_bins,
            start_feature,
            n_bins,
        });
        let n_bounds = r.u32()?;
        if n_bounds == u32::MAX {
            bin_maps.push(None);
        } else {
            let mut upper_boundaries = Vec::with_capacity(n_bounds as usize);
            for _ in 0..n_bounds {
                upper_boundaries.push(r.f64()?);
            }
            let missing_bin = r.u8()?;
            bin_maps.push(Some(BinMap {
                field_id,
                upper_boundaries,
                missing_bin,
            }));
        }
    }
    let n_records = r.u64()? as usize;
    let row_len = r.u64()? as usize;
    let stride = record_stride_for(n_fields);
    if n_records > 0 && row_len != n_records * stride {
        return Err(DataError::Corrupt(format!(
            "row section length {row_len} does not match {n_records} records of stride {stride}"
        )));
    }
    let row_blocks = r.take(row_len)?.to_vec();
    let mut columns = Vec::with_capacity(n_fields);
    for _ in 0..n_fields {
        columns.push(r.take(n_records)?.to_vec());
    }
    let mut labels = Vec::with_capacity(n_records);
    for _ in 0..n_records {
        labels.push(r.f64()?);
    }
    let mut grad_buffer = Vec::with_capacity(n_records);
    for _ in 0..n_records {
        let g = r.f64()?;
        let h = r.f64()?;
        grad_buffer.push(GradPair { g, h });
    }
    if r.pos != body.len() {
        return Err(DataError::Corrupt("trailing bytes after grad section".into()));
    }
    Ok(QuantizedDataset::from_parts(
        schema, bin_maps, row_blocks, columns, labels, grad_buffer, n_records, stride,
    ))
}

/// CSV input with a header row; missing cells are empty or "NA". The label
/// column is named `label`; `categorical` lists the categorical column names
/// (string values are dictionary-coded in sorted order).
pub fn read_csv(
    reader: impl Read,
    categorical: &[String],
    max_bins: u32,
) -> Result<(RawTable, Vec<FieldSchema>), DataError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| DataError::Csv(e.to_string()))?
        .iter()
        .map(|s| s.to_string())
        .collect();
    let label_idx = headers
        .iter()
        .position(|h| h == "label")
        .ok_or_else(|| DataError::Csv("missing required 'label' column".into()))?;

    let feat_idx: Vec<usize> = (0..headers.len()).filter(|&i| i != label_idx).collect();
    let is_cat: Vec<bool> = feat_idx
        .iter()
        .map(|&i| categorical.contains(&headers[i]))
        .collect();

    let mut cells: Vec<Vec<Option<String>>> = vec![Vec::new(); feat_idx.len()];
    let mut labels = Vec::new();
    for (row_no, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| DataError::Csv(e.to_string()))?;
        let y = rec
            .get(label_idx)
            .ok_or(DataError::Truncated)?
            .parse::<f64>()
            .map_err(|_| DataError::Csv(format!("row {row_no}: unparsable label")))?;
        labels.push(y);
        for (k, &i) in feat_idx.iter().enumerate() {
            let cell = rec.get(i).unwrap_or("");
            let missing = cell.is_empty() || cell == "NA";
            cells[k].push(if missing { None } else { Some(cell.to_string()) });
        }
    }

    let mut columns = Vec::with_capacity(feat_idx.len());
    let mut schemas = Vec::with_capacity(feat_idx.len());
    let mut names = Vec::with_capacity(feat_idx.len());
    for (k, &i) in feat_idx.iter().enumerate() {
        names.push(headers[i].clone());
        if is_cat[k] {
            let mut dict: BTreeMap<&str, u32> = BTreeMap::new();
            for c in cells[k].iter().flatten() {
                let next = dict.len() as u32;
                dict.entry(c.as_str()).or_insert(next);
            }
            // deterministic codes: sorted order of the distinct values
            let mut keys: Vec<&str> = dict.keys().copied().collect();
            keys.sort_unstable();
            let dict: BTreeMap<&str, u32> =
                keys.iter().enumerate().map(|(c, &k)| (k, c as u32)).collect();
            let col = cells[k]
                .iter()
                .map(|c| c.as_ref().map(|s| dict[s.as_str()]))
                .collect();
            columns.push(RawColumn::Categorical(col));
            schemas.push(FieldSchema::categorical(k as u32, dict.len() as u32));
        } else {
            let mut col = Vec::with_capacity(cells[k].len());
            for (row_no, c) in cells[k].iter().enumerate() {
                match c {
                    None => col.push(None),
                    Some(s) => col.push(Some(s.parse::<f64>().map_err(|_| {
                        DataError::Csv(format!(
                            "row {row_no}, column '{}': unparsable numeric value '{s}'",
                            headers[i]
                        ))
                    })?)),
                }
            }
            columns.push(RawColumn::Numeric(col));
            schemas.push(FieldSchema::numeric(k as u32, max_bins));
        }
    }

    Ok((RawTable { columns, labels, names }, schemas))
}

pub fn write_csv(table: &RawTable, mut out: impl Write) -> Result<(), DataError> {
    let mut header: Vec<&str> = table.names.iter().map(|s| s.as_str()).collect();
    header.push("label");
    writeln!(out, "{}", header.join(","))?;
    for r in 0..table.n_records() {
        let mut cells: Vec<String> = Vec::with_capacity(table.columns.len() + 1);
        for col in &table.columns {
            cells.push(match col {
                RawColumn::Numeric(v) => v[r].map(|x| format!("{x}")).unwrap_or_default(),
                RawColumn::Categorical(v) => v[r].map(|c| format!("c{c}")).unwrap_or_default(),
            });
        }
        cells.push(format!("{}", table.labels[r]));
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}
