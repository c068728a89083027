//! Experiment harness: load a TOML spec, build the dataset, train the
//! reference engine, replay the trace on every requested platform, and emit
//! deterministic report files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::arch::{BoosterConfig, MapStrategy};
use crate::baselines::{
    baseline_step_cycles, speedup_table, BaselineConfig, BaselineError, SpeedupRow,
};
use crate::data::{
    deserialize_dataset, quantize_from_raw, read_csv, synth_dataset, DataError, QuantizedDataset,
    SynthSpec, DEFAULT_MAX_BINS,
};
use crate::energy::{energy_report, EnergyParams, EnergyReport};
use crate::gbt::{train, GbtError, TrainConfig, TrainOutput};
use crate::timing::{sim_training, CycleReport, DramConfig, HostModel, MapProfile};

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("invalid config key '{key}': {message}")]
    Config { key: String, message: String },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Gbt(#[from] GbtError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Where the records come from: a prepared file or a synthetic generator.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetSource {
    /// Binary dataset (.bst) or CSV path.
    pub path: Option<PathBuf>,
    /// Synthetic preset: all_numeric, higgs, iot, mq2008, allstate, flight.
    pub synth: Option<String>,
    pub n_records: usize,
    /// Field count for the all_numeric preset.
    pub numeric_fields: usize,
    /// Comma-separated categorical column names when loading CSV.
    pub categorical: Vec<String>,
}

impl DatasetSource {
    pub fn resolve(&self, seed: u64) -> Result<QuantizedDataset, ReportError> {
        if let Some(path) = &self.path {
            if path.extension().map(|e| e == "csv").unwrap_or(false) {
                let file = std::fs::File::open(path)?;
                let (raw, schemas) =
                    read_csv(std::io::BufReader::new(file), &self.categorical, DEFAULT_MAX_BINS)?;
                return Ok(quantize_from_raw(&raw, &schemas)?);
            }
            return Ok(deserialize_dataset(path)?);
        }
        let name = self.synth.as_deref().ok_or_else(|| ReportError::Config {
            key: "dataset".into(),
            message: "needs either 'path' or 'synth'".into(),
        })?;
        if self.n_records == 0 {
            return Err(ReportError::Config {
                key: "dataset.n_records".into(),
                message: "must be >= 1 for synthetic data".into(),
            });
        }
        let spec = synth_preset(name, self.n_records, self.numeric_fields, seed)?;
        let raw = synth_dataset(&spec);
        Ok(quantize_from_raw(&raw, &spec.schemas(DEFAULT_MAX_BINS))?)
    }
}

pub fn synth_preset(
    name: &str,
    n_records: usize,
    numeric_fields: usize,
    seed: u64,
) -> Result<SynthSpec, ReportError> {
    let spec = match name {
        "all_numeric" => SynthSpec::all_numeric(n_records, numeric_fields.max(1), seed),
        "higgs" => SynthSpec::higgs_analog(n_records, seed),
        "iot" => SynthSpec::iot_analog(n_records, seed),
        "mq2008" => SynthSpec::mq2008_analog(n_records, seed),
        "allstate" => SynthSpec::allstate_analog(n_records, seed),
        "flight" => SynthSpec::flight_analog(n_records, seed),
        other => {
            return Err(ReportError::Config {
                key: "dataset.synth".into(),
                message: format!("unknown preset '{other}'"),
            })
        }
    };
    Ok(spec)
}

fn default_platforms() -> Vec<String> {
    vec![
        "sequential".into(),
        "ideal32".into(),
        "ideal_gpu".into(),
        "inter_record".into(),
        "booster".into(),
    ]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentSpec {
    pub name: String,
    pub seed: u64,
    /// Dataset replication multiplier for scale-up runs.
    pub scale_factor: usize,
    pub dataset: DatasetSource,
    pub train: TrainConfig,
    pub platforms: Vec<String>,
    pub booster: BoosterConfig,
    pub dram: DramConfig,
    pub host: HostModel,
    pub energy: EnergyParams,
    pub naive_pack: bool,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            name: "experiment".into(),
            seed: 1,
            scale_factor: 1,
            dataset: DatasetSource::default(),
            train: TrainConfig::default(),
            platforms: default_platforms(),
            booster: BoosterConfig::default(),
            dram: DramConfig::default(),
            host: HostModel::default(),
            energy: EnergyParams::default(),
            naive_pack: false,
        }
    }
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<ExperimentSpec, ReportError> {
        let spec: ExperimentSpec = toml::from_str(text).map_err(|e| ReportError::Config {
            key: "toml".into(),
            message: e.to_string(),
        })?;
        if spec.platforms.is_empty() {
            return Err(ReportError::Config {
                key: "platforms".into(),
                message: "need at least one platform".into(),
            });
        }
        if spec.scale_factor == 0 {
            return Err(ReportError::Config {
                key: "scale_factor".into(),
                message: "must be >= 1".into(),
            });
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone)]
pub struct ReportBundle {
    pub name: String,
    pub n_records: usize,
    pub n_fields: usize,
    pub reports: Vec<CycleReport>,
    pub rows: Vec<SpeedupRow>,
    pub energy: Vec<EnergyReport>,
    /// Platforms that could not run, with the reason.
    pub infeasible: Vec<(String, String)>,
    pub final_loss: f64,
    /// Absent when the bundle was assembled from a pre-recorded trace.
    pub train_output: Option<TrainOutput>,
}

/// Replay a trace on every platform the spec requests. Infeasible platforms
/// are reported, not fatal.
pub fn platform_reports(
    trace: &crate::gbt::StepTrace,
    schemas: &[crate::data::FieldSchema],
    spec: &ExperimentSpec,
) -> Result<(Vec<CycleReport>, Vec<(String, String)>), ReportError> {
    let strategy = if spec.naive_pack { MapStrategy::NaivePack } else { MapStrategy::GroupByField };
    let profile = MapProfile::from_schemas(schemas, strategy, &spec.booster);
    let mut reports = Vec::new();
    let mut infeasible = Vec::new();
    for platform in &spec.platforms {
        match platform.as_str() {
            "booster" => {
                reports.push(sim_training(trace, &profile, &spec.booster, &spec.dram, &spec.host));
            }
            name => {
                let cfg = match name {
                    "sequential" => BaselineConfig::sequential(),
                    "ideal32" => BaselineConfig::ideal32(),
                    "ideal_gpu" => BaselineConfig::ideal_gpu(),
                    "inter_record" => BaselineConfig::inter_record(),
                    other => {
                        return Err(ReportError::Config {
                            key: "platforms".into(),
                            message: format!("unknown platform '{other}'"),
                        })
                    }
                };
                match baseline_step_cycles(trace, &cfg, &spec.dram, &spec.host) {
                    Ok(r) => reports.push(r),
                    Err(e @ BaselineError::Infeasible { .. }) => {
                        infeasible.push((name.to_string(), e.to_string()));
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
    }
    Ok((reports, infeasible))
}

/// Assemble a bundle from a pre-recorded trace (no training pass).
pub fn simulate_trace(
    trace: &crate::gbt::StepTrace,
    schemas: &[crate::data::FieldSchema],
    spec: &ExperimentSpec,
) -> Result<ReportBundle, ReportError> {
    let (reports, infeasible) = platform_reports(trace, schemas, spec)?;
    let rows = if reports.iter().any(|r| r.platform == "ideal32") {
        speedup_table(&reports)?
    } else {
        Vec::new()
    };
    let energy = reports.iter().map(|r| energy_report(r, &spec.energy)).collect();
    Ok(ReportBundle {
        name: spec.name.clone(),
        n_records: trace.n_records as usize,
        n_fields: trace.n_fields as usize,
        reports,
        rows,
        energy,
        infeasible,
        final_loss: f64::NAN,
        train_output: None,
    })
}

/// Quantize, train once on the reference engine, then replay the trace on
/// every requested platform.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ReportBundle, ReportError> {
    let mut dataset = spec.dataset.resolve(spec.seed)?;
    if spec.scale_factor > 1 {
        dataset = dataset.replicate(spec.scale_factor);
    }
    let out = train(&dataset, &spec.train)?;
    let (reports, infeasible) = platform_reports(&out.trace, &dataset.schema, spec)?;

    let rows = if reports.iter().any(|r| r.platform == "ideal32") {
        speedup_table(&reports)?
    } else {
        Vec::new()
    };
    let energy = reports.iter().map(|r| energy_report(r, &spec.energy)).collect();
    Ok(ReportBundle {
        name: spec.name.clone(),
        n_records: dataset.n_records(),
        n_fields: dataset.n_fields(),
        reports,
        rows,
        energy,
        infeasible,
        final_loss: *out.losses.last().unwrap_or(&f64::NAN),
        train_output: Some(out),
    })
}

/// Per-platform per-step cycle shares, each platform summing to 1.
pub fn emit_breakdown(bundle: &ReportBundle) -> Vec<(String, Vec<(&'static str, f64)>)> {
    bundle
        .reports
        .iter()
        .map(|r| {
            let total = r.total_cycles();
            let shares = r
                .step_cycles()
                .iter()
                .map(|&(name, c)| (name, if total > 0.0 { c / total } else { 0.0 }))
                .collect();
            (r.platform.clone(), shares)
        })
        .collect()
}

fn fmt_f(v: f64) -> String {
    format!("{v:.6}")
}

/// Write summary.txt, steps.csv, speedups.csv, breakdown.csv, energy.csv.
/// Output is byte-identical across runs of the same spec.
pub fn write_bundle(bundle: &ReportBundle, out_dir: &Path) -> Result<(), ReportError> {
    std::fs::create_dir_all(out_dir)?;

    let mut steps = String::from("platform,step,cycles,bytes_read,bytes_written\n");
    for r in &bundle.reports {
        let read = [
            r.bytes.step1_read,
            0,
            r.bytes.step3_read,
            r.bytes.step5_read,
            r.bytes.inference_read,
        ];
        let written = [0, 0, r.bytes.step3_written, r.bytes.step5_written, 0];
        for (i, (name, cycles)) in r.step_cycles().iter().enumerate() {
            let _ = writeln!(
                steps,
                "{},{},{},{},{}",
                r.platform,
                name,
                fmt_f(*cycles),
                read[i],
                written[i]
            );
        }
    }
    std::fs::write(out_dir.join("steps.csv"), steps)?;

    let mut speedups = String::from("platform,wall_ns,speedup\n");
    for row in &bundle.rows {
        let _ = writeln!(speedups, "{},{},{}", row.platform, fmt_f(row.wall_ns), fmt_f(row.speedup));
    }
    std::fs::write(out_dir.join("speedups.csv"), speedups)?;

    let mut breakdown = String::from("platform,step,share\n");
    for (platform, shares) in emit_breakdown(bundle) {
        for (step, share) in shares {
            let _ = writeln!(breakdown, "{platform},{step},{}", fmt_f(share));
        }
    }
    std::fs::write(out_dir.join("breakdown.csv"), breakdown)?;

    let mut energy = String::from("platform,sram_accesses,sram_energy,dram_bytes,dram_energy\n");
    for e in &bundle.energy {
        let _ = writeln!(
            energy,
            "{},{},{},{},{}",
            e.platform,
            e.sram_accesses,
            fmt_f(e.sram_energy),
            e.dram_bytes,
            fmt_f(e.dram_energy)
        );
    }
    std::fs::write(out_dir.join("energy.csv"), energy)?;

    let mut summary = String::new();
    let _ = writeln!(summary, "experiment: {}", bundle.name);
    let _ = writeln!(summary, "records: {}  fields: {}", bundle.n_records, bundle.n_fields);
    let _ = writeln!(summary, "final training loss: {}", fmt_f(bundle.final_loss));
    let _ = writeln!(summary);
    let _ = writeln!(summary, "platform        wall_ns         speedup_vs_ideal32");
    for row in &bundle.rows {
        let _ = writeln!(
            summary,
            "{:<15} {:<15} {}",
            row.platform,
            fmt_f(row.wall_ns),
            fmt_f(row.speedup)
        );
    }
    for (platform, reason) in &bundle.infeasible {
        let _ = writeln!(summary, "{platform}: infeasible ({reason})");
    }
    std::fs::write(out_dir.join("summary.txt"), summary)?;
    Ok(())
}
