use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use ccvi_core::AdminLevel;
use ccvi_service::fire::{self, FireRiskPaths};
use ccvi_service::ingest::{ingest, IngestInputs};
use ccvi_service::workspace::{self, ExportFormat};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "ccvi", version, about = "Climate-vulnerability assessment workspace tool")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Geojson,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Build a workspace from survey, admin boundaries and indicator rasters
    Ingest {
        #[arg(long)]
        survey: PathBuf,
        #[arg(long)]
        admin: PathBuf,
        /// Directory holding one `<CODE>.asc` grid per GIS indicator
        #[arg(long)]
        rasters: PathBuf,
        /// Indicator catalog (built-in catalog when omitted)
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Survey field schema (built-in schema when omitted)
        #[arg(long)]
        schema: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute indices for every level, with equal weights unless a weight file is given
    Compute {
        #[arg(long)]
        workspace: PathBuf,
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Fire-risk index, risk classes and class areas from four aligned grids
    FireRisk {
        #[arg(long)]
        landcover: PathBuf,
        #[arg(long)]
        dem: PathBuf,
        #[arg(long)]
        roads: PathBuf,
        #[arg(long)]
        settlements: PathBuf,
        #[arg(long)]
        tables: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the latest results for one level as GeoJSON or CSV
    Export {
        #[arg(long)]
        workspace: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        #[arg(long)]
        level: AdminLevel,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve the HTTP API over a computed workspace
    Serve {
        #[arg(long)]
        workspace: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
    /// Write the synthetic demonstration dataset
    Fixture {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = ccvi_service::fixture::DEFAULT_SEED)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { survey, admin, rasters, catalog, schema, out } => {
            let m = ingest(&IngestInputs { survey, admin, rasters, catalog, schema }, &out)?;
            println!("ingested {} files into {}", m.files.len(), out.display());
        }
        Command::Compute { workspace, weights } => {
            let r = workspace::compute(&workspace, weights.as_deref())?;
            println!(
                "computed {} villages, {} municipalities, {} departments ({})",
                r.village.units.len(),
                r.municipality.units.len(),
                r.department.units.len(),
                r.village.weight_config_id
            );
        }
        Command::FireRisk { landcover, dem, roads, settlements, tables, out } => {
            let r = fire::run(&FireRiskPaths { landcover, dem, roads, settlements, tables }, &out)?;
            println!("fire risk: {} valid cells written to {}", r.fri.valid_count(), out.display());
        }
        Command::Export { workspace, format, level, out } => {
            let format = match format {
                Format::Geojson => ExportFormat::Geojson,
                Format::Csv => ExportFormat::Csv,
            };
            std::fs::write(&out, workspace::export(&workspace, format, level)?)?;
        }
        Command::Serve { workspace, port } => {
            tokio::runtime::Runtime::new()?.block_on(ccvi_service::api::serve(&workspace, port))?;
        }
        Command::Fixture { out, seed } => ccvi_service::fixture::write(&out, seed)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
