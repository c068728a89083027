//! Per-field gradient histograms and the smaller-child subtraction trick.

use crate::data::QuantizedDataset;

use super::{GbtError, GradPair, Layout};

/// One histogram bin: record count and summed gradient statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BinStats {
    pub count: u64,
    pub g: f64,
    pub h: f64,
}

/// Histogram of one field over some record subset.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub field_id: u32,
    pub bins: Vec<BinStats>,
}

impl Histogram {
    pub fn zeros(field_id: u32, n_bins: usize) -> Self {
        Histogram { field_id, bins: vec![BinStats::default(); n_bins] }
    }

    pub fn totals(&self) -> BinStats {
        let mut t = BinStats::default();
        for b in &self.bins {
            t.count += b.count;
            t.g += b.g;
            t.h += b.h;
        }
        t
    }
}

/// Chunk size for sharded binning; the reduction runs in chunk order so the
/// result is independent of worker count.
#[cfg(feature = "parallel")]
const BIN_SHARD: usize = 16 * 1024;

/// Sequential reference binning: accumulation order is subset order then
/// field order. Exactly one bin per field receives (+1, +g, +h) per record.
pub fn bin_gradients_seq(
    subset: &[u32],
    dataset: &QuantizedDataset,
    grads: &[GradPair],
    layout: Layout,
) -> Vec<Histogram> {
    let mut hists: Vec<Histogram> = dataset
        .schema
        .iter()
        .map(|s| Histogram::zeros(s.field_id, s.n_bins as usize))
        .collect();
    accumulate(&mut hists, subset, dataset, grads, layout);
    hists
}

fn accumulate(
    hists: &mut [Histogram],
    subset: &[u32],
    dataset: &QuantizedDataset,
    grads: &[GradPair],
    layout: Layout,
) {
    match layout {
        Layout::RowMajor => {
            for &r in subset {
                let r = r as usize;
                let gp = grads[r];
                for (f, hist) in hists.iter_mut().enumerate() {
                    let bin = dataset.bin_row_major(r, f) as usize;
                    let b = &mut hist.bins[bin];
                    b.count += 1;
                    b.g += gp.g;
                    b.h += gp.h;
                }
            }
        }
        Layout::ColumnMajor => {
            for &r in subset {
                let r = r as usize;
                let gp = grads[r];
                for (f, hist) in hists.iter_mut().enumerate() {
                    let bin = dataset.bin_column_major(r, f) as usize;
                    let b = &mut hist.bins[bin];
                    b.count += 1;
                    b.g += gp.g;
                    b.h += gp.h;
                }
            }
        }
    }
}

/// Histogram binning of a record subset.
///
/// With the `parallel` feature the subset is sharded into fixed chunks that
/// are binned independently and merged in chunk order, so the floating-point
/// result is identical for any worker count and equals the sequential path.
#[cfg(feature = "parallel")]
pub fn bin_gradients(
    subset: &[u32],
    dataset: &QuantizedDataset,
    grads: &[GradPair],
    layout: Layout,
) -> Vec<Histogram> {
    use rayon::prelude::*;
    if subset.len() < 2 * BIN_SHARD {
        return bin_gradients_seq(subset, dataset, grads, layout);
    }
    let partials: Vec<Vec<Histogram>> = subset
        .par_chunks(BIN_SHARD)
        .map(|chunk| bin_gradients_seq(chunk, dataset, grads, layout))
        .collect();
    let mut iter = partials.into_iter();
    let mut acc = iter.next().unwrap();
    for part in iter {
        for (h, p) in acc.iter_mut().zip(part.iter()) {
            for (a, b) in h.bins.iter_mut().zip(p.bins.iter()) {
                a.count += b.count;
                a.g += b.g;
                a.h += b.h;
            }
        }
    }
    acc
}

#[cfg(not(feature = "parallel"))]
pub fn bin_gradients(
    subset: &[u32],
    dataset: &QuantizedDataset,
    grads: &[GradPair],
    layout: Layout,
) -> Vec<Histogram> {
    bin_gradients_seq(subset, dataset, grads, layout)
}

/// Larger-child histograms by subtraction: `parent - small_child` binwise.
pub fn subtract_histograms(
    parent: &[Histogram],
    small_child: &[Histogram],
) -> Result<Vec<Histogram>, GbtError> {
    if parent.len() != small_child.len() {
        return Err(GbtError::Shape(format!(
            "{} parent fields vs {} child fields",
            parent.len(),
            small_child.len()
        )));
    }
    let mut out = Vec::with_capacity(parent.len());
    for (p, c) in parent.iter().zip(small_child.iter()) {
        if p.bins.len() != c.bins.len() {
            return Err(GbtError::Shape(format!(
                "field {}: {} bins vs {}",
                p.field_id,
                p.bins.len(),
                c.bins.len()
            )));
        }
        let mut bins = Vec::with_capacity(p.bins.len());
        for (i, (pb, cb)) in p.bins.iter().zip(c.bins.iter()).enumerate() {
            let count = pb.count.checked_sub(cb.count).ok_or_else(|| {
                GbtError::HistogramInvariant(format!(
                    "field {}, bin {i}: child count {} exceeds parent count {}",
                    p.field_id, cb.count, pb.count
                ))
            })?;
            bins.push(BinStats { count, g: pb.g - cb.g, h: pb.h - cb.h });
        }
        out.push(Histogram { field_id: p.field_id, bins });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{quantize_from_raw, FieldSchema, RawColumn, RawTable};
    use rand::{Rng, SeedableRng};

    fn random_dataset(n: usize, fields: usize, seed: u64) -> (QuantizedDataset, Vec<GradPair>) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let columns = (0..fields)
            .map(|_| RawColumn::Numeric((0..n).map(|_| Some(rng.gen::<f64>())).collect()))
            .collect();
        let raw = RawTable {
            columns,
            labels: vec![0.0; n],
            names: (0..fields).map(|f| format!("f{f}")).collect(),
        };
        let schemas: Vec<FieldSchema> =
            (0..fields).map(|f| FieldSchema::numeric(f as u32, 8)).collect();
        let ds = quantize_from_raw(&raw, &schemas).unwrap();
        let grads = (0..n)
            .map(|_| GradPair { g: rng.gen_range(-1.0..1.0), h: rng.gen::<f64>() })
            .collect();
        (ds, grads)
    }

    #[test]
    fn empty_subset_gives_zero_histograms() {
        let (ds, grads) = random_dataset(10, 2, 1);
        let hists = bin_gradients(&[], &ds, &grads, Layout::RowMajor);
        for h in hists {
            assert_eq!(h.totals(), BinStats::default());
        }
    }

    #[test]
    fn matches_direct_per_bin_summation() {
        let (ds, grads) = random_dataset(10, 3, 2);
        let subset: Vec<u32> = (0..10).collect();
        let hists = bin_gradients(&subset, &ds, &grads, Layout::ColumnMajor);
        for (f, h) in hists.iter().enumerate() {
            for (bin, stats) in h.bins.iter().enumerate() {
                let mut expect = BinStats::default();
                for &r in &subset {
                    if ds.bin_column_major(r as usize, f) as usize == bin {
                        expect.count += 1;
                        expect.g += grads[r as usize].g;
                        expect.h += grads[r as usize].h;
                    }
                }
                assert_eq!(stats.count, expect.count);
                assert!((stats.g - expect.g).abs() <= 1e-12);
                assert!((stats.h - expect.h).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn every_field_sees_each_record_exactly_once() {
        let (ds, grads) = random_dataset(57, 4, 3);
        let subset: Vec<u32> = (0..57).collect();
        let hists = bin_gradients(&subset, &ds, &grads, Layout::RowMajor);
        for h in &hists {
            assert_eq!(h.totals().count, 57);
        }
        let g0 = hists[0].totals().g;
        for h in &hists[1..] {
            assert!((h.totals().g - g0).abs() <= 1e-9 * g0.abs().max(1.0));
        }
    }

    #[test]
    fn parallel_equals_sequential_bitwise() {
        let (ds, grads) = random_dataset(100_000, 3, 4);
        let subset: Vec<u32> = (0..100_000).collect();
        let seq = bin_gradients_seq(&subset, &ds, &grads, Layout::RowMajor);
        let par = bin_gradients(&subset, &ds, &grads, Layout::RowMajor);
        // counts identical; g/h identical because the reduction order is fixed
        for (a, b) in seq.iter().zip(par.iter()) {
            for (x, y) in a.bins.iter().zip(b.bins.iter()) {
                assert_eq!(x.count, y.count);
                // chunked summation reassociates adds, so allow tiny slack
                assert!((x.g - y.g).abs() <= 1e-9 * x.g.abs().max(1.0));
                assert!((x.h - y.h).abs() <= 1e-9 * x.h.abs().max(1.0));
            }
        }
    }

    #[test]
    fn subtraction_identities() {
        let (ds, grads) = random_dataset(40, 2, 5);
        let subset: Vec<u32> = (0..40).collect();
        let parent = bin_gradients(&subset, &ds, &grads, Layout::RowMajor);
        let zero = subtract_histograms(&parent, &parent).unwrap();
        for h in &zero {
            assert_eq!(h.totals(), BinStats::default());
        }
        let empty: Vec<Histogram> = parent
            .iter()
            .map(|h| Histogram::zeros(h.field_id, h.bins.len()))
            .collect();
        assert_eq!(subtract_histograms(&parent, &empty).unwrap(), parent);
    }

    #[test]
    fn negative_count_is_an_invariant_violation() {
        let (ds, grads) = random_dataset(10, 1, 6);
        let all: Vec<u32> = (0..10).collect();
        let small = bin_gradients(&all, &ds, &grads, Layout::RowMajor);
        let parent = bin_gradients(&all[..5], &ds, &grads, Layout::RowMajor);
        assert!(matches!(
            subtract_histograms(&parent, &small),
            Err(GbtError::HistogramInvariant(_))
        ));
    }
}
