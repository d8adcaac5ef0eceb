//! Command-line front end for the sorting pipeline.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use electre_tri_me::config::{ConfigMap, PipelineConfig};
use electre_tri_me::{run_until, Error, Stage, Target};

#[derive(Parser)]
#[command(name = "electre-tri-me", version)]
#[command(about = "Non-compensatory level-of-satisfaction sorting (ELECTRE TRI ME)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute credibility degrees from raw evaluations.
    Credibility(Common),
    /// Assign every alternative to a category at one cut-level.
    Sort(Common),
    /// Build the cut-level sensitivity matrix.
    Sensitivity(Common),
    /// Group alternatives (clustering or override) and rank the groups.
    Group(Common),
    /// Per-group modes and Maintain / Improve / Priority recommendations.
    Diagnose(Common),
    /// Run every stage and write all reports.
    Pipeline(Common),
}

/// Flags shared by every subcommand. Flags override config file values.
#[derive(Args)]
struct Common {
    /// Plain `key = value` config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Entry point: raw-records, credibility-table or mode-table
    #[arg(long)]
    entry: Option<String>,
    /// CSV with header alternative,evaluator,criterion,grade
    #[arg(long)]
    evaluations: Option<PathBuf>,
    /// CSV with header evaluator,criterion,weight
    #[arg(long)]
    weights: Option<PathBuf>,
    /// CSV with header alternative,b1,b2,...
    #[arg(long)]
    credibility: Option<PathBuf>,
    /// CSV with header criterion,<group>...
    #[arg(long)]
    modes: Option<PathBuf>,
    /// Declared criteria, comma separated; undeclared criteria are rejected
    #[arg(long)]
    criteria: Option<String>,
    /// Uniform category floors, best first, e.g. 4.5,3.5,2.5,1.5
    #[arg(long)]
    boundaries: Option<String>,
    /// Cut-level for single-level sorting
    #[arg(long)]
    lambda: Option<String>,
    /// Cut-level grid as start:stop:step
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    k_groups: Option<String>,
    /// single, complete, average or exhaustive-small
    #[arg(long)]
    linkage: Option<String>,
    /// File of `label = id, id, ...` lines fixing the groups
    #[arg(long = "override")]
    override_file: Option<PathBuf>,
    /// Group order for the mode-table entry, comma separated
    #[arg(long)]
    ranking: Option<String>,
    /// Sensitivity matrix CSV to diff the computed one against
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Output directory; without it results go to stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn to_config(&self) -> Result<PipelineConfig, Error> {
        let mut map = match &self.config {
            Some(path) => ConfigMap::load(path)?,
            None => ConfigMap::default(),
        };
        let paths = [
            ("evaluations", &self.evaluations),
            ("weights", &self.weights),
            ("credibility", &self.credibility),
            ("modes", &self.modes),
            ("override", &self.override_file),
            ("reference", &self.reference),
            ("out", &self.out),
        ];
        for (key, value) in paths {
            if let Some(v) = value {
                map.set(key, v.to_string_lossy());
            }
        }
        let values = [
            ("entry", &self.entry),
            ("criteria", &self.criteria),
            ("boundaries", &self.boundaries),
            ("lambda", &self.lambda),
            ("grid", &self.grid),
            ("k_groups", &self.k_groups),
            ("linkage", &self.linkage),
            ("ranking", &self.ranking),
        ];
        for (key, value) in values {
            if let Some(v) = value {
                map.set(key, v.as_str());
            }
        }
        PipelineConfig::from_map(&map)
    }
}

fn run(command: Command) -> Result<(), Error> {
    let (target, common, primary) = match &command {
        Command::Credibility(c) => (Target::Credibility, c, "credibility.csv"),
        Command::Sort(c) => (Target::Sort, c, "assignments.csv"),
        Command::Sensitivity(c) => (Target::Sensitivity, c, "sensitivity.csv"),
        Command::Group(c) => (Target::Group, c, "groups.json"),
        Command::Diagnose(c) => (Target::Diagnose, c, "recommendations.csv"),
        Command::Pipeline(c) => (Target::All, c, "report.txt"),
    };
    let config = common.to_config().map_err(|e| e.at_stage(Stage::Config))?;
    let bundle = run_until(&config, target)?;
    match &config.out {
        Some(dir) => {
            bundle
                .write_to(dir)
                .map_err(|e| e.at_stage(Stage::Output))?;
            for (name, _) in &bundle.files {
                eprintln!("wrote {}", dir.join(name).display());
            }
        }
        None => {
            let text = bundle.file(primary).unwrap_or_default();
            print!("{text}");
            if let (Target::Sensitivity | Target::All, Some(diff)) =
                (target, &bundle.sensitivity_diff)
            {
                for d in diff {
                    eprintln!("differs from reference: {d}");
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
