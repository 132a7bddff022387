use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use relay_outage::montecarlo::with_workers;
use relay_outage::sweep::discrepancy::{discrepancy_report, DiscrepancyGrid};
use relay_outage::sweep::plot::gnuplot_script;
use relay_outage::sweep::{
    find_optimum, run_point, run_sweep, Mode, Objective, RunConfig, SchemeSelect, SweepVariable,
    Table,
};
use relay_outage::Error;

/// Outage and efficiency analysis of a two-way energy-harvesting relay.
#[derive(Debug, Parser)]
#[command(name = "relay-outage", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep one parameter and write a CSV table.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        variable: Option<VariableArg>,
        #[arg(long, allow_hyphen_values = true)]
        start: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        stop: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        /// Also write a gnuplot script next to the CSV (requires --out).
        #[arg(long)]
        emit_plot: bool,
    },
    /// Evaluate the configured operating point.
    Point {
        #[command(flatten)]
        common: Common,
    },
    /// Locate the optimum of one column of a sweep CSV.
    Optimum {
        /// CSV produced by `sweep`.
        table: PathBuf,
        #[arg(long, default_value = "out_system")]
        column: String,
        /// Restrict to one scheme's rows.
        #[arg(long)]
        only: Option<String>,
        #[arg(long, value_enum)]
        objective: Option<ObjectiveArg>,
    },
    /// Compare both decode-link closed forms with simulation.
    Discrepancy {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add the interference-free reference rows.
    #[arg(long)]
    baseline_no_cci: bool,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchemeArg {
    Psr,
    Tsr,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Analytic,
    #[value(alias = "montecarlo")]
    Mc,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariableArg {
    Alpha,
    Rho,
    #[value(alias = "power_db")]
    PowerDb,
    #[value(alias = "relay_offset")]
    RelayOffset,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Min,
    Max,
}

impl Common {
    fn load(&self) -> Result<RunConfig, Error> {
        let mut run = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let s = &mut run.sweep;
        if let Some(v) = self.scheme {
            s.scheme = match v {
                SchemeArg::Psr => SchemeSelect::Psr,
                SchemeArg::Tsr => SchemeSelect::Tsr,
                SchemeArg::Both => SchemeSelect::Both,
            };
        }
        if let Some(m) = self.mode {
            s.mode = match m {
                ModeArg::Analytic => Mode::Analytic,
                ModeArg::Mc => Mode::Mc,
                ModeArg::Both => Mode::Both,
            };
        }
        if let Some(t) = self.trials {
            s.trials = t;
        }
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        s.baseline_no_cci |= self.baseline_no_cci;
        Ok(run)
    }

    fn in_pool<T: Send>(&self, f: impl FnOnce() -> Result<T, Error> + Send) -> Result<T, Error> {
        match self.workers {
            Some(n) => with_workers(n, f)?,
            None => f(),
        }
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text).map_err(Error::from),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(Error::from),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Sweep {
            common,
            variable,
            start,
            stop,
            steps,
            emit_plot,
        } => {
            let mut run = common.load()?;
            let s = &mut run.sweep;
            if let Some(v) = variable {
                s.variable = match v {
                    VariableArg::Alpha => SweepVariable::Alpha,
                    VariableArg::Rho => SweepVariable::Rho,
                    VariableArg::PowerDb => SweepVariable::PowerDb,
                    VariableArg::RelayOffset => SweepVariable::RelayOffset,
                };
            }
            s.start = start.unwrap_or(s.start);
            s.stop = stop.unwrap_or(s.stop);
            s.steps = steps.unwrap_or(s.steps);
            if emit_plot && common.out.is_none() {
                return Err(Error::InvalidConfig("--emit-plot needs --out".into()));
            }
            run.validate()?;
            let table = common.in_pool(|| run_sweep(&run))?;
            write_output(common.out.as_deref(), &table.to_csv_string()?)?;
            if let (true, Some(out)) = (emit_plot, &common.out) {
                let script = gnuplot_script(&table, &out.to_string_lossy());
                fs::write(out.with_extension("gp"), script)?;
            }
        }
        Command::Point { common } => {
            let run = common.load()?;
            let table = common.in_pool(|| run_point(&run))?;
            write_output(common.out.as_deref(), &table.to_csv_string()?)?;
        }
        Command::Optimum {
            table,
            column,
            only,
            objective,
        } => {
            let text = fs::read_to_string(&table)?;
            let mut t = Table::parse(&text)?;
            if let Some(scheme) = only {
                t = t.filter_scheme(&scheme)?;
            }
            let objective = match objective {
                Some(ObjectiveArg::Min) => Objective::Minimize,
                Some(ObjectiveArg::Max) => Objective::Maximize,
                None => Objective::for_column(&column),
            };
            let opt = find_optimum(&t, &column, objective)?;
            let arg = t.swept_column().unwrap_or("row");
            let mut line = format!("{column}={} row={}", opt.value, opt.row);
            if let Some(x) = opt.argument {
                line.push_str(&format!(" {arg}={x}"));
            }
            println!("{line}");
        }
        Command::Discrepancy { common } => {
            let run = common.load()?;
            run.system.validate()?;
            run.psr.validate()?;
            run.tsr.validate()?;
            let (trials, seed) = (run.sweep.trials, run.sweep.seed);
            let report = common.in_pool(|| {
                let grid = DiscrepancyGrid::default();
                discrepancy_report(&run.system, &run.psr, &run.tsr, &grid, trials, seed)
            })?;
            write_output(common.out.as_deref(), &report.to_table().to_csv_string()?)?;
            eprint!("{}", report.summary());
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Numerical(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
