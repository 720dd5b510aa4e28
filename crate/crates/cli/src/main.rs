use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nlsid::io::{self, bundled, emit_report, read_record, write_record, ExperimentConfig, ReportKind, ResultBundle};
use nlsid::plant::System;
use nlsid::signal::MultisineRealization;
use nlsid::{Error, Result};
use serde::{Deserialize, Serialize};

const DESIGN_FILE: &str = "design.json";
const BUNDLE_FILE: &str = "bundle.json";

/// Identification of nonlinear systems with periodic multisine excitations.
///
/// Each stage reads the artifacts of the previous one from --out-dir and
/// writes its own there: design -> design.json, simulate -> level<i>.nlrec,
/// analyze / fit / closedloop -> bundle.json, report -> report/.
#[derive(Parser)]
#[command(name = "nlsid", version)]
struct Cli {
    /// Experiment config: a TOML file or a bundled name (duffing-sweep, linear-sanity, cubic-loop).
    #[arg(long, global = true)]
    config: Option<String>,
    /// Override the config's master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value = "nlsid-out")]
    out_dir: PathBuf,
    /// Worker threads for realization-level parallelism (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design the excitation of every RMS level.
    Design,
    /// Simulate steady-state records for the designed excitations.
    Simulate,
    /// Distortion reports and FRF estimates from the records.
    Analyze,
    /// Fit the configured rational model to every FRF.
    Fit,
    /// Indirect estimates and detection-line corrections for closed-loop records.
    Closedloop,
    /// Tables and SVG plots for one artifact kind.
    Report {
        /// distortion, frf, fit or closedloop
        kind: String,
    },
    /// All stages in one run, plus every available report.
    Pipeline,
}

#[derive(Serialize, Deserialize)]
struct DesignArtifact {
    config_hash: String,
    excitations: Vec<MultisineRealization>,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let Some(spec) = &cli.config else {
        return Err(Error::Config("--config is required for this subcommand".into()));
    };
    let text = match bundled(spec) {
        Some(text) => text.to_string(),
        None => fs::read_to_string(spec)
            .map_err(|e| Error::Config(format!("cannot read `{spec}`: {e} (bundled configs: {})", io::BUNDLED.join(", "))))?,
    };
    let mut config = ExperimentConfig::from_toml(&text)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, produced_by: &str) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|_| Error::MissingArtifact(format!("{} not found; run `{produced_by}` first", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents)?;
    println!("{}", path.display());
    Ok(())
}

fn record_path(dir: &Path, level: usize) -> PathBuf {
    dir.join(format!("level{level}.nlrec"))
}

fn check_hash(what: &str, found: &str, config: &ExperimentConfig) -> Result<()> {
    if found != config.hash() {
        return Err(Error::Config(format!(
            "{what} was produced from config {found}, current config is {}; rerun the earlier stages",
            config.hash()
        )));
    }
    Ok(())
}

fn load_design(dir: &Path, config: &ExperimentConfig) -> Result<Vec<MultisineRealization>> {
    let design: DesignArtifact = read_json(&dir.join(DESIGN_FILE), "design")?;
    check_hash(DESIGN_FILE, &design.config_hash, config)?;
    Ok(design.excitations)
}

fn load_records(dir: &Path, config: &ExperimentConfig) -> Result<Vec<nlsid::Record>> {
    (0..config.excitation.rms_levels.len())
        .map(|i| {
            let path = record_path(dir, i);
            if !path.exists() {
                return Err(Error::MissingArtifact(format!("{} not found; run `simulate` first", path.display())));
            }
            let rec = read_record(&path)?;
            check_hash(&path.display().to_string(), &rec.provenance.config_hash, config)?;
            Ok(rec)
        })
        .collect()
}

fn load_bundle(dir: &Path) -> Result<ResultBundle> {
    read_json(&dir.join(BUNDLE_FILE), "analyze")
}

fn save_bundle(dir: &Path, bundle: &ResultBundle) -> Result<()> {
    write_file(&dir.join(BUNDLE_FILE), &bundle.to_json()?)
}

fn report(dir: &Path, bundle: &ResultBundle, kind: ReportKind) -> Result<()> {
    for path in emit_report(bundle, kind, &dir.join("report"))? {
        println!("{}", path.display());
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("--threads: {e}")))?;
    }
    let dir = cli.out_dir.as_path();
    fs::create_dir_all(dir)?;
    match &cli.command {
        Command::Design => {
            let config = load_config(cli)?;
            let excitations = io::design(&config)?;
            let artifact = DesignArtifact {
                config_hash: config.hash(),
                excitations,
            };
            write_file(&dir.join(DESIGN_FILE), &serde_json::to_string_pretty(&artifact)?)?;
        }
        Command::Simulate => {
            let config = load_config(cli)?;
            let excitations = load_design(dir, &config)?;
            for (i, rec) in io::simulate(&config, &excitations)?.iter().enumerate() {
                let path = record_path(dir, i);
                write_record(rec, &path)?;
                println!("{}", path.display());
            }
        }
        Command::Analyze => {
            let config = load_config(cli)?;
            let records = load_records(dir, &config)?;
            save_bundle(dir, &io::analyze(&config, &records)?)?;
        }
        Command::Fit => {
            let config = load_config(cli)?;
            let mut bundle = load_bundle(dir)?;
            check_hash(BUNDLE_FILE, &bundle.provenance.config_hash, &config)?;
            io::fit(&config, &mut bundle)?;
            save_bundle(dir, &bundle)?;
        }
        Command::Closedloop => {
            let config = load_config(cli)?;
            if !matches!(config.system()?, System::Closed { .. }) {
                return Err(Error::Config("no [loop] section".into()));
            }
            let records = load_records(dir, &config)?;
            let mut bundle = load_bundle(dir)?;
            check_hash(BUNDLE_FILE, &bundle.provenance.config_hash, &config)?;
            io::closed_loop(&config, &records, &mut bundle)?;
            save_bundle(dir, &bundle)?;
        }
        Command::Report { kind } => {
            let kind: ReportKind = kind.parse()?;
            report(dir, &load_bundle(dir)?, kind)?;
        }
        Command::Pipeline => {
            let config = load_config(cli)?;
            let bundle = io::run_pipeline(&config)?;
            save_bundle(dir, &bundle)?;
            for kind in io::available_kinds(&bundle) {
                report(dir, &bundle, kind)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("error[usage]: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::FAILURE
        }
    }
}
