use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use booster_core::data::{
    deserialize_dataset, quantize_from_raw, read_csv, serialize_dataset, synth_dataset, write_csv,
    DEFAULT_MAX_BINS,
};
use booster_core::gbt::{train, write_model, StepTrace, TrainConfig};
use booster_core::report::{
    run_experiment, simulate_trace, synth_preset, write_bundle, ExperimentSpec,
};

#[derive(Parser)]
#[command(name = "booster", about = "Gradient-boosting accelerator model and experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a CSV file into the binary dataset format.
    Prepare {
        /// Input CSV with a header row and a `label` column.
        input: PathBuf,
        /// Names of categorical columns.
        #[arg(long, value_delimiter = ',')]
        categorical: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic benchmark analog as CSV.
    Synth {
        /// Preset: all_numeric, higgs, iot, mq2008, allstate, flight.
        #[arg(long)]
        preset: String,
        #[arg(long)]
        records: usize,
        /// Field count for the all_numeric preset.
        #[arg(long, default_value_t = 28)]
        fields: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the reference engine; emits a model and a work trace.
    Train {
        /// Binary dataset produced by `prepare`.
        data: PathBuf,
        #[arg(long, default_value_t = 10)]
        trees: usize,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        trace: PathBuf,
    },
    /// Replay a recorded trace on the configured platforms.
    Simulate {
        /// Trace file from `train`.
        trace: PathBuf,
        /// Dataset the trace was recorded on (for the field schema).
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a full experiment from a TOML spec and write report tables.
    Report {
        #[arg(long)]
        config: PathBuf,
        /// Override the spec's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the spec's dataset replication factor.
        #[arg(long)]
        scale: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_spec(path: &PathBuf) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    Ok(ExperimentSpec::from_toml(&text)?)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Prepare { input, categorical, out } => {
            let file = std::fs::File::open(&input)
                .with_context(|| format!("opening {}", input.display()))?;
            let (raw, schemas) =
                read_csv(std::io::BufReader::new(file), &categorical, DEFAULT_MAX_BINS)?;
            let dataset = quantize_from_raw(&raw, &schemas)?;
            serialize_dataset(&dataset, &out)?;
            println!(
                "prepared {} records x {} fields -> {}",
                dataset.n_records(),
                dataset.n_fields(),
                out.display()
            );
        }
        Command::Synth { preset, records, fields, seed, out } => {
            if records == 0 {
                bail!("--records must be >= 1");
            }
            let spec = synth_preset(&preset, records, fields, seed)?;
            let raw = synth_dataset(&spec);
            let file = std::fs::File::create(&out)?;
            write_csv(&raw, std::io::BufWriter::new(file))?;
            println!("wrote {} records to {}", raw.n_records(), out.display());
        }
        Command::Train { data, trees, depth, model, trace } => {
            let dataset = deserialize_dataset(&data)?;
            let config = TrainConfig { n_trees: trees, max_depth: depth, ..TrainConfig::default() };
            let out = train(&dataset, &config)?;
            write_model(&out.ensemble, &model)?;
            out.trace.write(&trace)?;
            println!(
                "trained {} trees; final loss {:.6}",
                out.ensemble.trees.len(),
                out.losses.last().copied().unwrap_or(f64::NAN)
            );
        }
        Command::Simulate { trace, data, config, out } => {
            let trace = StepTrace::read(&trace)?;
            let dataset = deserialize_dataset(&data)?;
            let spec = match config {
                Some(path) => load_spec(&path)?,
                None => ExperimentSpec::default(),
            };
            let bundle = simulate_trace(&trace, &dataset.schema, &spec)?;
            write_bundle(&bundle, &out)?;
            println!("simulated {} platforms -> {}", bundle.reports.len(), out.display());
        }
        Command::Report { config, seed, scale, out } => {
            let mut spec = load_spec(&config)?;
            if let Some(seed) = seed {
                spec.seed = seed;
            }
            if let Some(scale) = scale {
                if scale == 0 {
                    bail!("--scale must be >= 1");
                }
                spec.scale_factor = scale;
            }
            let bundle = run_experiment(&spec)?;
            write_bundle(&bundle, &out)?;
            for row in &bundle.rows {
                println!("{:<14} {:>10.3}x", row.platform, row.speedup);
            }
            for (platform, reason) in &bundle.infeasible {
                println!("{platform}: {reason}");
            }
            println!("reports -> {}", out.display());
        }
    }
    Ok(())
}
