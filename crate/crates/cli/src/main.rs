use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ub_core::cost::CostModel;
use ub_core::engine::Tuning;
use ub_core::experiment::{
    check_invariants, parse_field, root_lift, run_experiment, ExperimentSpec, RunMode, SystemSource,
};
use ub_core::solver::Method;
use ub_core::Error;

/// Broyden and Newton solving over Q_p and F_p((t)).
#[derive(Parser, Debug)]
#[command(name = "ub", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run methods on a system and write traces and reports.
    Run(RunArgs),
    /// Lift a residue root to precision N and print it.
    Lift(LiftArgs),
    /// Run the invariant suite.
    Check {
        #[arg(long, env = "UB_SEED", default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// qp or fpt
    #[arg(long, default_value = "qp")]
    field: String,
    #[arg(long, default_value_t = 17)]
    prime: u64,
    /// F1, F2, F3 or a system file
    #[arg(long)]
    system: String,
    /// The parameter is t = pi^k
    #[arg(long = "t-val", default_value_t = 1)]
    t_val: i64,
    /// N
    #[arg(long = "target-prec", default_value_t = 64)]
    target_prec: i64,
    /// Start residues, comma separated
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    /// Working precision of fixed-precision runs (default 3N)
    #[arg(long = "working-prec")]
    working_prec: Option<i64>,
    /// auto (2^{1/m}) or a number above 1
    #[arg(long, default_value = "auto")]
    alpha: String,
    /// adaptive or fixed
    #[arg(long, default_value = "adaptive")]
    tuning: String,
    /// nlogn, linear or quadratic
    #[arg(long = "cost-model", default_value = "nlogn")]
    cost_model: String,
    #[arg(long, env = "UB_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated list of broyden, newton, secant
    #[arg(long, default_value = "broyden,newton")]
    method: String,
    /// fixed, ideal or reality
    #[arg(long, default_value = "reality")]
    mode: String,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Also write gnuplot-ready (k, v_k) files
    #[arg(long)]
    tsv: bool,
}

#[derive(Args, Debug)]
struct LiftArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "newton")]
    method: String,
    #[arg(long, default_value = "fixed")]
    mode: String,
}

fn parse_list<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<Vec<T>, Error> {
    s.split(',').map(|p| p.trim()).filter(|p| !p.is_empty()).map(str::parse).collect()
}

fn build_spec(c: &Common, methods: &str, mode: &str) -> Result<ExperimentSpec, Error> {
    let mut spec = ExperimentSpec::new(c.system.parse::<SystemSource>()?);
    spec.field = parse_field(&c.field)?;
    spec.prime = c.prime;
    spec.t_val = c.t_val;
    spec.target = c.target_prec;
    spec.methods = parse_list::<Method>(methods)?;
    spec.mode = mode.parse::<RunMode>()?;
    spec.seed = c.seed;
    spec.working_prec = c.working_prec;
    spec.alpha = match c.alpha.as_str() {
        "auto" => None,
        a => Some(a.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad alpha '{a}'")))?),
    };
    spec.tuning = match c.tuning.as_str() {
        "adaptive" => Tuning::Adaptive,
        "fixed" => Tuning::Fixed,
        other => return Err(Error::InvalidArgument(format!("unknown tuning '{other}'"))),
    };
    spec.cost_model = match c.cost_model.as_str() {
        "nlogn" => CostModel::NLogN,
        "linear" => CostModel::Linear,
        "quadratic" => CostModel::Quadratic,
        other => return Err(Error::InvalidArgument(format!("unknown cost model '{other}'"))),
    };
    if let Some(x0) = &c.x0 {
        let v = x0
            .split(',')
            .map(|d| d.trim().parse::<i64>().map_err(|_| Error::InvalidArgument(format!("bad x0 entry '{d}'"))))
            .collect::<Result<Vec<_>, _>>()?;
        spec.x0 = Some(v);
    }
    spec.validate()?;
    Ok(spec)
}

fn exit_code(e: &Error) -> u8 {
    match e.root_cause() {
        Error::InvalidArgument(_) | Error::Parse { .. } | Error::InvalidPrime(_) | Error::InvalidPrecision(_) => 2,
        Error::Admissibility(_) | Error::SingularResidue => 3,
        Error::NonConvergence { .. } => 4,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Run(a) => {
            let mut spec = build_spec(&a.common, &a.method, &a.mode)?;
            spec.out = a.out;
            spec.tsv = a.tsv;
            let report = run_experiment(&spec)?;
            print!("{}", report.summary());
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Lift(a) => {
            if a.common.x0.is_none() {
                return Err(Error::InvalidArgument("lift needs --x0".into()));
            }
            let spec = build_spec(&a.common, &a.method, &a.mode)?;
            print!("{}", root_lift(&spec)?.render());
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { seed } => {
            let results = check_invariants(seed);
            for r in &results {
                println!("{} {}: {}", if r.ok { "PASS" } else { "FAIL" }, r.name, r.detail);
            }
            Ok(if results.iter().all(|r| r.ok) { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("ub: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
