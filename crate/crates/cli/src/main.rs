use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use gridsizer_core::exec::Execution;
use gridsizer_core::ipoc::IpocOptions;
use gridsizer_core::milp::{Backend, SolveOptions};
use gridsizer_core::report::{self, RunConfig};
use gridsizer_core::scenario::{write_profile_csv, DgMinMode, ResolutionMode, ScenarioParams};
use gridsizer_core::sizing::ModelKind;
use gridsizer_core::synthetic::{self, LoadTargets};
use gridsizer_core::{Error, ErrorClass};

#[derive(Parser)]
#[command(
    name = "gridsizer",
    version,
    about = "Size DG, PV and battery capacity for an islanded microgrid"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one or more sizing models and write a report directory.
    Run(RunArgs),
    /// Re-check a report directory against its own dispatch files.
    Verify {
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a seeded synthetic year of load and PV data plus parameters.
    Synth {
        #[arg(long, default_value = "data")]
        out_dir: PathBuf,
        #[arg(long, default_value_t = synthetic::DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Mgs,
    MgsIb,
    MgsNib,
    All,
}

impl ModelArg {
    fn kinds(self) -> Vec<ModelKind> {
        match self {
            ModelArg::Mgs => vec![ModelKind::Mgs],
            ModelArg::MgsIb => vec![ModelKind::MgsIb],
            ModelArg::MgsNib => vec![ModelKind::MgsNib],
            ModelArg::All => ModelKind::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ResolutionArg {
    #[value(name = "365day")]
    Full,
    #[value(name = "12day")]
    Typical,
    #[value(name = "1day")]
    Single,
}

impl From<ResolutionArg> for ResolutionMode {
    fn from(r: ResolutionArg) -> Self {
        match r {
            ResolutionArg::Full => ResolutionMode::Full365,
            ResolutionArg::Typical => ResolutionMode::Typical12,
            ResolutionArg::Single => ResolutionMode::Single1,
        }
    }
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long, value_enum, default_value = "all")]
    model: ModelArg,
    #[arg(long, value_enum, default_value = "1day")]
    resolution: ResolutionArg,
    /// Hourly load CSV (MW), 365 or fewer representative days.
    #[arg(long)]
    load: PathBuf,
    /// Hourly PV output per MW installed.
    #[arg(long)]
    pv: PathBuf,
    /// TOML parameter file; built-in defaults otherwise.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Run the degradation correction loop on MGS-NIB.
    #[arg(long)]
    ipoc: bool,
    #[arg(long, default_value_t = 10)]
    ipoc_max_iter: usize,
    #[arg(long, default_value_t = 0.0)]
    mip_gap: f64,
    /// Seconds per MILP solve.
    #[arg(long, default_value_t = 43_200.0)]
    time_limit: f64,
    /// Force DG output above its minimum in every hour.
    #[arg(long)]
    strict_dg_floor: bool,
    /// Override the big-M constant (MW).
    #[arg(long)]
    big_m: Option<f64>,
    /// Disable data-parallel evaluation.
    #[arg(long)]
    sequential: bool,
}

fn run(args: RunArgs) -> Result<()> {
    let exec = if args.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let solve = SolveOptions {
        mip_gap: args.mip_gap,
        time_limit: args.time_limit,
    };
    let cfg = RunConfig {
        models: args.model.kinds(),
        resolution: args.resolution.into(),
        load_path: args.load,
        pv_path: args.pv,
        params_path: args.params,
        out_dir: args.out,
        solve,
        ipoc: args.ipoc.then(|| IpocOptions {
            max_iter: args.ipoc_max_iter,
            solve,
            exec,
            ..IpocOptions::default()
        }),
        dg_min_mode: if args.strict_dg_floor {
            DgMinMode::Strict
        } else {
            DgMinMode::Committed
        },
        big_m: args.big_m,
        exec,
    };
    let solver = Backend::from_env()?.solver();
    let rep = report::run(&cfg, solver.as_ref())?;

    print!("{}", rep.cost_table().to_text());
    println!();
    print!("{}", rep.size_table().to_text());
    if let Some(ipoc) = &rep.ipoc {
        println!(
            "\ncorrection loop: {} after {} iteration(s)",
            ipoc.termination.label(),
            ipoc.iterations.len()
        );
    }
    println!("\nreport written to {}", cfg.out_dir.display());
    Ok(())
}

fn verify(out: &Path) -> Result<()> {
    let s = report::verify(out)?;
    let names: Vec<&str> = s.models.iter().map(|k| k.label()).collect();
    println!(
        "ok: {} ({} tables, {} correction rows), max residual {:.2e}, max objective gap {:.2e}",
        names.join(", "),
        s.tables_checked,
        s.ipoc_rows,
        s.max_residual,
        s.max_objective_gap
    );
    Ok(())
}

fn synth(dir: &Path, seed: u64) -> Result<()> {
    let profiles = synthetic::synthetic_year(seed, LoadTargets::default())?;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_profile_csv(&dir.join("load.csv"), profiles.load())?;
    write_profile_csv(&dir.join("pv.csv"), profiles.pv_unit())?;
    // peak load of the synthetic year; keeps the big-M rows tight
    let params = ScenarioParams {
        big_m: Some(profiles.peak_load()),
        ..ScenarioParams::default()
    };
    let path = dir.join("params.toml");
    std::fs::write(&path, params.to_toml_string()).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote load.csv, pv.csv and params.toml to {}", dir.display());
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>().map(Error::class) {
        Some(ErrorClass::Input) | None => 1,
        Some(ErrorClass::Infeasible) => 2,
        Some(ErrorClass::Timeout) => 3,
        Some(ErrorClass::Io) => 4,
        Some(ErrorClass::Integrity) => 5,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Verify { out } => verify(&out),
        Command::Synth { out_dir, seed } => synth(&out_dir, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
