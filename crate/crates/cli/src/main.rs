use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mfree::harness::{
    run_experiment, run_query, Columns, ConvergenceReport, ExperimentConfig, Query, QueryResult,
    ReportFormat,
};
use mfree::rational::parse_rational;
use mfree::{exec, Error, Execution, Result};

/// Block Gaussian ensembles: Monte Carlo estimates, exact limits and closed forms.
#[derive(Parser, Debug)]
#[command(name = "mfree", version)]
struct Cli {
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the ensemble seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (written atomically); stdout when absent or `-`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format: csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Worker threads for Monte Carlo trials.
    #[arg(long, global = true, env = "MFREE_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Block word, e.g. "S[2,1] S[1,2]"; overrides the config.
    #[arg(long)]
    word: Option<String>,
    /// Sector of the partial trace.
    #[arg(long)]
    q: Option<usize>,
    /// Matrix sizes (repeatable).
    #[arg(long = "n")]
    n_list: Vec<usize>,
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo estimates only.
    Simulate(ExperimentArgs),
    /// Monte Carlo, exact finite-n Wick value and exact limit for each n.
    Compare(ExperimentArgs),
    /// Exact limit moment of a block word.
    Exact {
        #[arg(long)]
        word: Option<String>,
        #[arg(long)]
        q: Option<usize>,
    },
    /// Multivariate Fuss-Narayana polynomial P_k(d0, ..., dp).
    FussNarayana {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        p: usize,
        /// Substitutions such as d0=1,d1=t.
        #[arg(long, value_delimiter = ',')]
        eval: Vec<String>,
    },
    /// Moments of the free Meixner law, via the Fock model and Jacobi parameters.
    Meixner {
        #[arg(long, allow_hyphen_values = true)]
        a1: String,
        #[arg(long, allow_hyphen_values = true)]
        a2: String,
        #[arg(long)]
        b1: String,
        #[arg(long)]
        b2: String,
        #[arg(long)]
        k: usize,
    },
    /// Moments of a free multiplicative convolution of Marchenko-Pastur laws.
    Boxtimes {
        /// Shape parameters (repeatable); numbers or variable names.
        #[arg(long = "t", required = true)]
        t: Vec<String>,
        #[arg(long)]
        k: usize,
    },
    /// Marchenko-Pastur moment.
    Mp {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        t: String,
        /// Also integrate the density numerically.
        #[arg(long)]
        quadrature: bool,
    },
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("this command needs --config".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.ensemble.seed = seed;
    }
    Ok(cfg)
}

fn format(cli: &Cli, cfg: Option<&ExperimentConfig>) -> Result<ReportFormat> {
    match (&cli.format, cfg) {
        (Some(f), _) => f.parse(),
        (None, Some(c)) => Ok(c.outputs.format),
        (None, None) => Ok(ReportFormat::Csv),
    }
}

fn emit(cli: &Cli, cfg: Option<&ExperimentConfig>, text: &str) -> Result<()> {
    let path = cli.out.clone().or_else(|| cfg.and_then(|c| c.outputs.path.clone()));
    match path {
        Some(p) if p.as_os_str() != "-" => mfree::harness::write_atomic(&p, text),
        _ => {
            print!("{text}");
            Ok(())
        }
    }
}

fn experiment(cli: &Cli, args: &ExperimentArgs, columns: Columns) -> Result<()> {
    let cfg = load_config(cli)?;
    let ensemble = cfg.ensemble.resolve()?;
    let base = cfg.experiment.as_ref();
    let word = args
        .word
        .clone()
        .or_else(|| base.map(|x| x.word.clone()))
        .ok_or_else(|| Error::Config("no word given".into()))?;
    let q = args
        .q
        .or_else(|| base.map(|x| x.q))
        .ok_or_else(|| Error::Config("no sector q given".into()))?;
    let n_list = if args.n_list.is_empty() {
        base.map(|x| x.n_list.clone()).unwrap_or_default()
    } else {
        args.n_list.clone()
    };
    if n_list.is_empty() {
        return Err(Error::Config("no matrix sizes given".into()));
    }
    let trials = args.trials.or_else(|| base.map(|x| x.trials)).unwrap_or(200);
    let x = ensemble.experiment(&word, q, n_list, trials)?;
    let report: ConvergenceReport = exec::with_threads(cli.threads, || {
        run_experiment(&ensemble, &x, columns, Execution::Parallel)
    })??;
    emit(cli, Some(&cfg), &report.render(format(cli, Some(&cfg))?)?)
}

fn query(cli: &Cli, q: Query) -> Result<()> {
    let res: QueryResult = run_query(&q)?;
    let text = match cli.format.as_deref() {
        Some("json") => format!("{}\n", res.to_json()),
        Some("csv") | None => {
            let mut s = format!("{}\n", res.value);
            for (k, v) in &res.details {
                s.push_str(&format!("{k} = {v}\n"));
            }
            s
        }
        Some(other) => return Err(Error::Config(format!("unknown format {other:?}"))),
    };
    emit(cli, None, &text)
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate(args) => experiment(cli, args, Columns::MC_ONLY),
        Command::Compare(args) => experiment(cli, args, Columns::ALL),
        Command::Exact { word, q } => {
            let cfg = load_config(cli)?;
            let base = cfg.experiment.as_ref();
            let word = word
                .clone()
                .or_else(|| base.map(|x| x.word.clone()))
                .ok_or_else(|| Error::Config("no word given".into()))?;
            let q = q.or_else(|| base.map(|x| x.q)).ok_or_else(|| Error::Config("no sector q given".into()))?;
            let query_ = Query::Exact { ensemble: cfg.ensemble.clone(), word, q };
            query(cli, query_)
        }
        Command::FussNarayana { k, p, eval } => {
            let eval = eval
                .iter()
                .map(|kv| {
                    kv.split_once('=')
                        .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
                        .ok_or_else(|| Error::InvalidParameter(format!("expected name=value, got {kv:?}")))
                })
                .collect::<Result<_>>()?;
            query(cli, Query::FussNarayana { k: *k, p: *p, eval })
        }
        Command::Meixner { a1, a2, b1, b2, k } => {
            let q = Query::Meixner {
                a1: parse_rational(a1)?,
                a2: parse_rational(a2)?,
                b1: parse_rational(b1)?,
                b2: parse_rational(b2)?,
                k: *k,
            };
            query(cli, q)
        }
        Command::Boxtimes { t, k } => query(cli, Query::Boxtimes { t: t.clone(), k: *k }),
        Command::Mp { k, t, quadrature } => {
            let q = Query::Mp { k: *k, t: parse_rational(t)?, quadrature: *quadrature };
            query(cli, q)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mfree: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
