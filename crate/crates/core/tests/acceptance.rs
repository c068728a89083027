//! Acceptance gate: twelve end-to-end checks on simulator identities,
//! model-vs-oracle equivalences, and paper-direction trends at desk scale.
//! Each test prints a single verdict line.

mod common;

use booster_core::arch::{encode_tree_table, BoosterConfig, MapStrategy};
use booster_core::baselines::{baseline_inference, baseline_step_cycles, BaselineConfig};
use booster_core::data::{
    quantize_from_raw, synth_dataset, FieldSchema, QuantizedDataset, DEFAULT_MAX_BINS,
};
use booster_core::energy::{energy_report, EnergyParams};
use booster_core::gbt::{
    bin_gradients_seq, compute_gradients, find_best_split, partition_records, subtract_histograms,
    train, BinStats, GradPair, Histogram, Layout, Loss, Node, Predicate, TrainConfig, TrainOutput,
    Tree,
};
use booster_core::report::synth_preset;
use booster_core::timing::{
    sim_batch_inference, sim_step1, sim_training, step1_crossover_bus, DramConfig, HostModel,
    MapProfile,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(number: u32, name: &str, pass: bool) {
    println!("[criterion {number:02}] {name}: {}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {number} ({name}) failed");
}

fn analog(preset: &str, n: usize, seed: u64) -> QuantizedDataset {
    let spec = synth_preset(preset, n, 28, seed).unwrap();
    let raw = synth_dataset(&spec);
    quantize_from_raw(&raw, &spec.schemas(DEFAULT_MAX_BINS)).unwrap()
}

fn train_trees(ds: &QuantizedDataset, n_trees: usize) -> TrainOutput {
    let config = TrainConfig { n_trees, ..TrainConfig::default() };
    train(ds, &config).unwrap()
}

/// Accelerator config used for cycle checks: SRAMs sized to hold a full
/// 256-bin field so one field maps to exactly one unit.
fn accel_cfg() -> BoosterConfig {
    BoosterConfig::default().with_sram_for_bins(256)
}

fn full_field_schemas(n: usize) -> Vec<FieldSchema> {
    (0..n)
        .map(|i| {
            let mut s = FieldSchema::numeric(i as u32, 256);
            s.n_bins = 256;
            s
        })
        .collect()
}

fn booster_report(
    out: &TrainOutput,
    ds: &QuantizedDataset,
    cfg: &BoosterConfig,
    strategy: MapStrategy,
) -> booster_core::timing::CycleReport {
    let profile = MapProfile::from_schemas(&ds.schema, strategy, cfg);
    sim_training(&out.trace, &profile, cfg, &DramConfig::default(), &HostModel::default())
}

fn baseline_report(out: &TrainOutput, cfg: &BaselineConfig) -> booster_core::timing::CycleReport {
    baseline_step_cycles(&out.trace, cfg, &DramConfig::default(), &HostModel::default()).unwrap()
}

#[test]
fn criterion_01_rate_match_identity() {
    let crossover = step1_crossover_bus(64, 64, &BoosterConfig::default(), &DramConfig::default());
    let mut exact = crossover == 3200.0;

    // Probe the simulator around the crossover: 49 clusters leave step 1
    // unit-bound, 50 rate-match it exactly, 51 make it DRAM-bound.
    let dram = DramConfig::default();
    let schemas = full_field_schemas(64);
    let n = 10_000_000u64;
    let mut sides = Vec::new();
    for clusters in [49usize, 50, 51] {
        let cfg = BoosterConfig { n_clusters: clusters, ..accel_cfg() };
        let profile = MapProfile::from_schemas(&schemas, MapStrategy::GroupByField, &cfg);
        let c = sim_step1(n, 64, true, 1.0, &profile, &cfg, &dram);
        sides.push((c.bu_cycles, c.dram.cycles));
    }
    exact &= sides[0].0 > sides[0].1;
    exact &= (sides[1].0 - sides[1].1).abs() < 1e-6;
    exact &= sides[2].0 < sides[2].1;
    verdict(1, "step-1 SRAM/DRAM crossover at exactly 3200 units", exact);
}

#[test]
fn criterion_02_sequential_breakdown() {
    let ds = analog("higgs", 1_000_000, 21);
    let out = train_trees(&ds, 3);
    let report = baseline_report(&out, &BaselineConfig::sequential());
    let total = report.total_cycles();
    let share = (report.step1_cycles + report.step3_cycles + report.step5_cycles) / total;
    println!("  steps 1+3+5 share of sequential time: {share:.4}");
    verdict(2, "steps 1+3+5 >= 90% of 1-way modeled time on 1M-record analog", share >= 0.90);
}

#[test]
fn criterion_03_platform_ordering() {
    let mut pass = true;
    for preset in ["higgs", "iot", "mq2008"] {
        let ds = analog(preset, 100_000, 33);
        let out = train_trees(&ds, 2);
        let booster = booster_report(&out, &ds, &accel_cfg(), MapStrategy::GroupByField);
        let gpu = baseline_report(&out, &BaselineConfig::ideal_gpu());
        let cpu = baseline_report(&out, &BaselineConfig::ideal32());
        let ordering = booster.wall_ns() < gpu.wall_ns() && gpu.wall_ns() < cpu.wall_ns();
        let ratio = cpu.wall_ns() / gpu.wall_ns();
        println!("  {preset}: booster {:.3e} ns, gpu {:.3e} ns, cpu {:.3e} ns, gpu speedup {ratio:.3}",
            booster.wall_ns(), gpu.wall_ns(), cpu.wall_ns());
        pass &= ordering && ratio > 1.0 && ratio <= 2.0;
    }
    verdict(3, "booster < ideal GPU < ideal 32-core; GPU speedup in (1, 2]", pass);
}

#[test]
fn criterion_04_scaling_improves_speedup() {
    let mut pass = true;
    for preset in ["higgs", "iot", "mq2008", "allstate", "flight"] {
        let base = analog(preset, 60_000, 9);
        let scaled = base.replicate(10);
        let speedup = |ds: &QuantizedDataset| {
            let out = train_trees(ds, 2);
            let booster = booster_report(&out, ds, &accel_cfg(), MapStrategy::GroupByField);
            let cpu = baseline_report(&out, &BaselineConfig::ideal32());
            cpu.wall_ns() / booster.wall_ns()
        };
        let s1 = speedup(&base);
        let s10 = speedup(&scaled);
        println!("  {preset}: speedup {s1:.2} -> {s10:.2} at 10x");
        pass &= s10 > s1;
    }
    verdict(4, "10x replication raises booster speedup on every analog", pass);
}

#[test]
fn criterion_05_mapping_isolation() {
    let cfg = accel_cfg();
    let mut pass = true;
    for preset in ["higgs", "mq2008"] {
        let ds = analog(preset, 100_000, 13);
        let out = train_trees(&ds, 2);
        let grouped = booster_report(&out, &ds, &cfg, MapStrategy::GroupByField);
        let naive = booster_report(&out, &ds, &cfg, MapStrategy::NaivePack);
        let equal = grouped.total_cycles() == naive.total_cycles();
        println!("  {preset} (all numeric): grouped == naive: {equal}");
        pass &= equal;
    }
    for preset in ["allstate", "flight"] {
        let ds = analog(preset, 100_000, 13);
        let out = train_trees(&ds, 2);
        let grouped = booster_report(&out, &ds, &cfg, MapStrategy::GroupByField);
        let naive = booster_report(&out, &ds, &cfg, MapStrategy::NaivePack);
        let better = grouped.total_cycles() < naive.total_cycles();
        println!(
            "  {preset} (categorical): grouped {:.3e} vs naive {:.3e}",
            grouped.total_cycles(),
            naive.total_cycles()
        );
        pass &= better;
    }
    verdict(5, "group-by-field helps categorical analogs, +-0% on numeric", pass);
}

#[test]
fn criterion_06_column_format_isolation() {
    let ds = analog("mq2008", 100_000, 17);
    assert_eq!(ds.record_stride(), 64);
    let out = train_trees(&ds, 3);
    let col_cfg = accel_cfg();
    let row_cfg = BoosterConfig { use_column_format: false, ..col_cfg };
    let col = booster_report(&out, &ds, &col_cfg, MapStrategy::GroupByField);
    let row = booster_report(&out, &ds, &row_cfg, MapStrategy::GroupByField);
    let step35 = |r: &booster_core::timing::CycleReport| {
        r.bytes.step3_read + r.bytes.step3_written + r.bytes.step5_read + r.bytes.step5_written
    };
    let ratio = step35(&row) as f64 / step35(&col) as f64;
    println!("  step 3+5 DRAM bytes: row {} col {} ratio {ratio:.2}", step35(&row), step35(&col));

    // The redundant format changes data movement only, never the model.
    let row_major = train(
        &ds,
        &TrainConfig { n_trees: 3, layout: Layout::RowMajor, ..TrainConfig::default() },
    )
    .unwrap();
    let identical = row_major.ensemble == out.ensemble;
    verdict(6, "column format cuts step 3+5 bytes >= 5x, model bit-identical", ratio >= 5.0 && identical);
}

#[test]
fn criterion_07_split_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let mut pass = true;
    for _ in 0..1000 {
        let n_fields = rng.gen_range(1..=4usize);
        let n_bins = rng.gen_range(2..=8usize);
        let n_records = rng.gen_range(1..=64usize);
        // Dyadic gradients (multiples of 1/4) keep every sum and gain exact,
        // so winner identity is checked without tolerance.
        let records: Vec<(Vec<usize>, f64, f64)> = (0..n_records)
            .map(|_| {
                let bins = (0..n_fields).map(|_| rng.gen_range(0..n_bins)).collect();
                let g = rng.gen_range(-8i32..=8) as f64 * 0.25;
                let h = rng.gen_range(0i32..=8) as f64 * 0.25;
                (bins, g, h)
            })
            .collect();
        let histograms: Vec<Histogram> = (0..n_fields)
            .map(|f| {
                let mut bins = vec![BinStats::default(); n_bins];
                for (record_bins, g, h) in &records {
                    let b = &mut bins[record_bins[f]];
                    b.count += 1;
                    b.g += g;
                    b.h += h;
                }
                Histogram { field_id: f as u32, bins }
            })
            .collect();
        let parent = histograms[0].totals();
        let engine = find_best_split(&histograms, parent, 1.0, 0.0);
        let oracle = common::exhaustive_best_split(&histograms, 1.0, 0.0);
        let agree = match (&engine, &oracle) {
            (None, None) => true,
            (Some(e), Some(o)) => {
                e.field_id == o.field_id
                    && e.bin_boundary == o.bin_boundary
                    && e.missing_goes_left == o.missing_goes_left
                    && e.gain == o.gain
            }
            _ => false,
        };
        if !agree {
            println!("  mismatch: engine {engine:?} oracle {oracle:?}");
            pass = false;
            break;
        }
    }
    verdict(7, "find_best_split matches exhaustive enumeration on 1000 instances", pass);
}

#[test]
fn criterion_08_subtraction_trick() {
    let ds = analog("higgs", 20_000, 5);
    let preds = vec![0.4; ds.n_records()];
    let (grads, _) = compute_gradients(&ds.labels, &preds, Loss::Logistic).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut pass = true;
    for _ in 0..1000 {
        let size = rng.gen_range(2..=2000usize);
        let mut subset: Vec<u32> = (0..size)
            .map(|_| rng.gen_range(0..ds.n_records() as u32))
            .collect();
        subset.sort_unstable();
        subset.dedup();
        let predicate = Predicate {
            field_id: rng.gen_range(0..ds.n_fields() as u32),
            bin_boundary: rng.gen_range(0..=254u8),
            missing_goes_left: rng.gen(),
        };
        let (left, right) = partition_records(&subset, &predicate, &ds, Layout::ColumnMajor);
        let parent = bin_gradients_seq(&subset, &ds, &grads, Layout::ColumnMajor);
        let left_hist = bin_gradients_seq(&left, &ds, &grads, Layout::ColumnMajor);
        let derived = subtract_histograms(&parent, &left_hist).unwrap();
        let direct = bin_gradients_seq(&right, &ds, &grads, Layout::ColumnMajor);
        for (d, x) in derived.iter().zip(&direct) {
            for (a, b) in d.bins.iter().zip(&x.bins) {
                let rel = |p: f64, q: f64| (p - q).abs() <= 1e-9 * q.abs().max(1.0);
                if a.count != b.count || !rel(a.g, b.g) || !rel(a.h, b.h) {
                    pass = false;
                }
            }
        }
        if !pass {
            break;
        }
    }
    verdict(8, "histogram subtraction equals direct child binning on 1000 splits", pass);
}

#[test]
fn criterion_09_gradient_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let delta = 1e-4;
    let mut pass = true;
    for loss in [Loss::SquaredError, Loss::Logistic] {
        for _ in 0..100 {
            let y = if matches!(loss, Loss::Logistic) {
                f64::from(rng.gen::<bool>())
            } else {
                rng.gen_range(-2.0..2.0)
            };
            let pred = rng.gen_range(-2.0..2.0f64);
            let GradPair { g, h } = loss.grad(pred, y);
            let f = |p: f64| loss.loss(p, y);
            let g_fd = (f(pred + delta) - f(pred - delta)) / (2.0 * delta);
            let h_fd = (f(pred + delta) - 2.0 * f(pred) + f(pred - delta)) / (delta * delta);
            pass &= (g - g_fd).abs() <= 1e-6 * g_fd.abs().max(1.0);
            pass &= (h - h_fd).abs() <= 1e-6 * h_fd.abs().max(1.0);
        }
    }
    verdict(9, "analytic g, h match central finite differences within 1e-6", pass);
}

#[test]
fn criterion_10_step1_utilization() {
    let cfg = accel_cfg();
    let profile =
        MapProfile::from_schemas(&full_field_schemas(64), MapStrategy::GroupByField, &cfg);
    let c = sim_step1(10_000_000, 64, true, 1.0, &profile, &cfg, &DramConfig::default());
    let sram_util = c.bu_cycles / c.cycles;
    let dram_util = c.dram.cycles / c.cycles;
    println!("  sram {sram_util:.5} dram {dram_util:.5}");
    verdict(10, "step-1 SRAM and DRAM utilization >= 0.99 when DRAM-bound", sram_util >= 0.99 && dram_util >= 0.99);
}

fn full_tree(depth: usize, n_fields: u32) -> Tree {
    fn build(nodes: &mut Vec<Node>, depth: usize, field: u32, n_fields: u32) -> u32 {
        let idx = nodes.len() as u32;
        if depth == 0 {
            nodes.push(Node::Leaf { weight: 0.1 });
            return idx;
        }
        nodes.push(Node::Leaf { weight: 0.0 }); // placeholder
        let left = build(nodes, depth - 1, (field + 1) % n_fields, n_fields);
        let right = build(nodes, depth - 1, (field + 1) % n_fields, n_fields);
        nodes[idx as usize] = Node::Split {
            predicate: Predicate { field_id: field, bin_boundary: 127, missing_goes_left: false },
            left,
            right,
        };
        idx
    }
    let mut nodes = Vec::new();
    build(&mut nodes, depth, 0, n_fields);
    Tree { nodes }
}

#[test]
fn criterion_11_inference_depth_trend() {
    let cfg = BoosterConfig::default();
    let dram = DramConfig::default();
    let deep = full_tree(6, 115);
    let shallow = full_tree(2, 115);
    // Both fit one unit's SRAM as encoded tables.
    encode_tree_table(&deep, &cfg).unwrap();
    encode_tree_table(&shallow, &cfg).unwrap();

    let n = 1_000_000u64;
    let stride = 128u64; // 115-field records
    let speedup = |tree: &Tree| {
        let paths = vec![tree.max_depth() as f64; 500];
        let booster = sim_batch_inference(&paths, n, stride, &cfg, &dram, 6).unwrap();
        let cpu = baseline_inference(&paths, n, stride, &BaselineConfig::ideal32(), &dram);
        cpu.wall_ns() / booster.wall_ns()
    };
    let deep_speedup = speedup(&deep);
    let shallow_speedup = speedup(&shallow);
    println!("  deep {deep_speedup:.2}x vs shallow {shallow_speedup:.2}x");
    verdict(11, "inference speedup higher for deep-tree ensemble", deep_speedup > shallow_speedup);
}

#[test]
fn criterion_12_energy_direction() {
    let ds = analog("higgs", 100_000, 3);
    let out = train_trees(&ds, 2);
    let params = EnergyParams::default();
    let booster = energy_report(&booster_report(&out, &ds, &accel_cfg(), MapStrategy::GroupByField), &params);
    let cpu = energy_report(&baseline_report(&out, &BaselineConfig::ideal32()), &params);
    let gpu = energy_report(&baseline_report(&out, &BaselineConfig::ideal_gpu()), &params);
    let sram_ok = booster.sram_energy < cpu.sram_energy && cpu.sram_energy < gpu.sram_energy;
    let dram_ok = booster.dram_energy < cpu.dram_energy && cpu.dram_energy == gpu.dram_energy;
    println!(
        "  sram: booster {:.3e} cpu {:.3e} gpu {:.3e}; dram bytes: booster {} cpu {} gpu {}",
        booster.sram_energy, cpu.sram_energy, gpu.sram_energy,
        booster.dram_bytes, cpu.dram_bytes, gpu.dram_bytes
    );
    verdict(12, "booster < cpu < gpu SRAM energy; booster < cpu == gpu DRAM energy", sram_ok && dram_ok);
}
