use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gridclear::experiment::{
    self, default_penetrations, emit_csv, run_alpha_sweep, run_dispatch, run_penetration_sweep,
    run_settlement, FleetSource, RunConfig, SweepOutput, DEFAULT_ALPHA, DEFAULT_ALPHAS,
    DEFAULT_PENETRATION,
};
use gridclear::settlement::CostRecovery;
use gridclear::Error;

#[derive(Parser)]
#[command(
    name = "gridclear",
    version,
    about = "Risk-aware day-ahead market clearing experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Commitment, price and settlement across reliability levels.
    SweepAlpha(Common),
    /// Commitment, price and deviation cost across renewable penetration levels.
    SweepPenetration(Common),
    /// Committed dispatch and locational prices for one grid point.
    Dispatch(Common),
    /// Settlement report for every (alpha, penetration) pair.
    Settle(Common),
}

#[derive(Args)]
struct Common {
    /// Fleet CSV path or `builtin`.
    #[arg(long, default_value = "builtin")]
    fleet: String,
    /// Reliability levels, comma separated.
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<f64>,
    /// Renewable penetration levels as fractions of mean load, comma separated.
    #[arg(long, value_delimiter = ',')]
    penetration: Vec<f64>,
    #[arg(long, default_value_t = experiment::DEFAULT_SCENARIOS)]
    scenarios: usize,
    #[arg(long, default_value_t = experiment::DEFAULT_SEED)]
    seed: u64,
    /// Uniform line limit in MW, or `unlimited` for a single bus.
    #[arg(long, default_value = "unlimited")]
    line_limit: String,
    /// 1 recovers start, reserve and ramp costs through a per-MWh rate.
    #[arg(long, default_value_t = 1)]
    cost_recovery: u8,
    #[arg(long, default_value_t = 1)]
    horizon: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl Common {
    fn into_config(self, alphas: Vec<f64>, penetrations: Vec<f64>) -> Result<RunConfig, Error> {
        let line_limit = match self.line_limit.as_str() {
            "unlimited" => None,
            s => Some(s.parse::<f64>().map_err(|_| {
                Error::Config(format!(
                    "line limit must be a number or `unlimited`, got `{s}`"
                ))
            })?),
        };
        let pick =
            |given: Vec<f64>, default: Vec<f64>| if given.is_empty() { default } else { given };
        Ok(RunConfig {
            fleet: self.fleet.parse::<FleetSource>()?,
            alphas: pick(self.alpha, alphas),
            penetrations: pick(self.penetration, penetrations),
            n_scenarios: self.scenarios,
            seed: self.seed,
            line_limit,
            cost_recovery: CostRecovery::from_flag(self.cost_recovery)?,
            horizon: self.horizon,
            out_dir: self.out,
            ..RunConfig::default()
        })
    }
}

fn report<R>(out: &SweepOutput<R>) -> Result<(), Error> {
    for d in &out.diagnostics {
        eprintln!("skipped {d}");
    }
    if out.rows.is_empty() && !out.diagnostics.is_empty() {
        return Err(Error::Infeasible("every grid point was infeasible".into()));
    }
    Ok(())
}

#[derive(Clone, Copy)]
enum Kind {
    Alpha,
    Penetration,
    Dispatch,
    Settle,
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, Error> {
    let (kind, args, alphas, penetrations) = match cli.command {
        Command::SweepAlpha(a) => (
            Kind::Alpha,
            a,
            DEFAULT_ALPHAS.to_vec(),
            vec![DEFAULT_PENETRATION],
        ),
        Command::SweepPenetration(a) => (
            Kind::Penetration,
            a,
            vec![DEFAULT_ALPHA],
            default_penetrations(),
        ),
        Command::Dispatch(a) => (
            Kind::Dispatch,
            a,
            vec![DEFAULT_ALPHA],
            vec![DEFAULT_PENETRATION],
        ),
        Command::Settle(a) => (
            Kind::Settle,
            a,
            vec![DEFAULT_ALPHA],
            vec![DEFAULT_PENETRATION],
        ),
    };
    let config = args.into_config(alphas, penetrations)?;
    config.validate()?;
    fs::create_dir_all(&config.out_dir)
        .map_err(|e| Error::Io(format!("cannot create {}: {e}", config.out_dir.display())))?;
    let dir = &config.out_dir;
    let written = match kind {
        Kind::Alpha => {
            let out = run_alpha_sweep(&config)?;
            report(&out)?;
            let path = dir.join("alpha_sweep.csv");
            emit_csv(&out.rows, &path)?;
            vec![path]
        }
        Kind::Penetration => {
            let out = run_penetration_sweep(&config)?;
            report(&out)?;
            let path = dir.join("penetration_sweep.csv");
            emit_csv(&out.rows, &path)?;
            vec![path]
        }
        Kind::Dispatch => {
            let (rows, set) = run_dispatch(&config)?;
            let path = dir.join("dispatch.csv");
            emit_csv(&rows, &path)?;
            let dump = dir.join("scenarios.csv");
            let file = fs::File::create(&dump)
                .map_err(|e| Error::Io(format!("cannot write {}: {e}", dump.display())))?;
            set.write_csv(std::io::BufWriter::new(file))?;
            vec![path, dump]
        }
        Kind::Settle => {
            let out = run_settlement(&config)?;
            report(&out)?;
            let path = dir.join("settlement.csv");
            emit_csv(&out.rows, &path)?;
            vec![path]
        }
    };
    Ok(written)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("gridclear: {e}");
            match e {
                Error::Infeasible(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
