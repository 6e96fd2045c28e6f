use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use adiasearch::{Shape, Strategy};
use adiasearch_cli::commands::{check, compare, run, sweep, to_json};
use adiasearch_cli::config::{default_n_values, RunConfig, SweepSpec, SweepVariable};
use adiasearch_cli::{oracle_cap, CliError, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "adiasearch",
    version,
    about = "Adiabatic quantum search simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate one schedule; writes trajectory.csv and result.json
    Run(RunArgs),
    /// Final losses over a range of one parameter, as CSV
    Sweep(SweepArgs),
    /// Local schedule against the equal-cost parallel schedule
    Compare(CompareArgs),
    /// Reduced two-level dynamics against full-space propagation
    Check(CheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Linear,
    Local,
    Parallel,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Linear => Strategy::Linear,
            StrategyArg::Local => Strategy::Local,
            StrategyArg::Parallel => Strategy::Parallel,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Tanh,
    Erf,
}

impl From<ShapeArg> for Shape {
    fn from(s: ShapeArg) -> Self {
        match s {
            ShapeArg::Tanh => Shape::Tanh,
            ShapeArg::Erf => Shape::Erf,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VariableArg {
    InvGamma,
    N,
    Epsilon,
}

impl From<VariableArg> for SweepVariable {
    fn from(v: VariableArg) -> Self {
        match v {
            VariableArg::InvGamma => SweepVariable::InvGamma,
            VariableArg::N => SweepVariable::N,
            VariableArg::Epsilon => SweepVariable::Epsilon,
        }
    }
}

/// RunConfig fields as flags; flags override values from `--config`.
#[derive(Args, Clone)]
struct ConfigArgs {
    /// JSON RunConfig to start from
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    /// Database size
    #[arg(long)]
    n: Option<u64>,
    /// Marked item index
    #[arg(long)]
    marked: Option<u64>,
    /// Coupling scale of linear and local schedules [default: 1]
    #[arg(long)]
    alpha: Option<f64>,
    /// Coupling scale of parallel schedules [default: 1]
    #[arg(long)]
    beta: Option<f64>,
    /// Adiabaticity parameter
    #[arg(long)]
    epsilon: Option<f64>,
    /// Characteristic duration (T_linear or T_parallel)
    #[arg(long = "T", visible_alias = "t")]
    t: Option<f64>,
    /// Inverse scaled duration of a parallel schedule
    #[arg(long)]
    gamma: Option<f64>,
    /// Truncation of the parallel window in units of T [default: 8]
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, value_enum)]
    shape: Option<ShapeArg>,
    /// Propagation steps [default: 200000]
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl ConfigArgs {
    fn resolve(&self, output: Option<PathBuf>) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                serde_json::from_str(&text).map_err(|source| CliError::ConfigFile {
                    path: path.clone(),
                    source,
                })?
            }
            None => {
                let strategy = self
                    .strategy
                    .ok_or_else(|| CliError::config("missing `--strategy`"))?;
                let n = self.n.ok_or_else(|| CliError::config("missing `--n`"))?;
                RunConfig::new(strategy.into(), n)
            }
        };
        if let Some(s) = self.strategy {
            cfg.strategy = s.into();
        }
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    cfg.$field = v.into();
                }
            )*};
        }
        set!(n, marked, r, steps, seed);
        macro_rules! set_opt {
            ($($field:ident),*) => {$(
                if self.$field.is_some() {
                    cfg.$field = self.$field;
                }
            )*};
        }
        set_opt!(alpha, beta, epsilon, t, gamma);
        if let Some(shape) = self.shape {
            cfg.shape = shape.into();
        }
        if output.is_some() {
            cfg.output = output;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Directory for trajectory.csv and result.json
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, value_enum)]
    variable: VariableArg,
    /// Comma-separated, strictly increasing sweep values
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    /// Evenly spaced values: start,stop,count
    #[arg(long, value_delimiter = ',', conflicts_with = "values")]
    linspace: Option<Vec<f64>>,
    /// Worker threads [default: all cores]
    #[arg(long)]
    threads: Option<usize>,
    /// CSV file [default: stdout]
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 12.0)]
    r: f64,
    #[arg(long)]
    n: u64,
    #[arg(long, value_enum, default_value = "tanh")]
    shape: ShapeArg,
    #[arg(long, default_value_t = 200_000)]
    steps: usize,
    /// JSON file [default: stdout]
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Database sizes
    #[arg(long = "n", value_delimiter = ',', default_values_t = check::DEFAULT_CHECK_NS)]
    ns: Vec<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200_000)]
    steps: usize,
    /// JSON file [default: stdout]
    #[arg(long)]
    output: Option<PathBuf>,
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<()> {
    match output {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
            }
            fs::write(path, text).map_err(|e| CliError::io(path, e))
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.config.resolve(args.output)?;
            let outcome = run::run(&cfg)?;
            if let Some(dir) = &cfg.output {
                run::write_outputs(&outcome, dir)?;
            }
            emit(&to_json(&outcome.result)?, None)
        }
        Command::Sweep(args) => {
            let fixed = args.config.resolve(None)?;
            let values = match (args.values, args.linspace) {
                (Some(values), _) => values,
                (None, Some(l)) => {
                    if l.len() != 3 || l[2] < 1.0 || l[2].fract() != 0.0 {
                        return Err(CliError::config("`--linspace` takes start,stop,count"));
                    }
                    adiasearch::numeric::linspace(l[0], l[1], l[2] as usize)
                }
                (None, None) => match args.variable {
                    VariableArg::N => default_n_values(),
                    _ => return Err(CliError::config("missing `--values` or `--linspace`")),
                },
            };
            let spec = SweepSpec {
                variable: args.variable.into(),
                values,
                fixed,
            };
            let rows = sweep::sweep(&spec, args.threads)?;
            let mut buf = Vec::new();
            sweep::write_csv(&rows, &mut buf).map_err(|e| CliError::config(e.to_string()))?;
            emit(&String::from_utf8_lossy(&buf), args.output.as_ref())
        }
        Command::Compare(args) => {
            let report =
                compare::compare(args.epsilon, args.r, args.n, args.shape.into(), args.steps)?;
            emit(&to_json(&report)?, args.output.as_ref())
        }
        Command::Check(args) => {
            let report = check::check(&args.ns, args.seed, args.steps, oracle_cap()?)?;
            emit(&to_json(&report)?, args.output.as_ref())?;
            if report.pass {
                Ok(())
            } else {
                Err(CliError::CheckFailed {
                    max_delta: report.max_delta,
                    tolerance: report.tolerance,
                    errors: report.errors,
                })
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
