//! `pcm`: evaluate and repair pairwise comparison matrices from the shell.
//!
//! Exit codes: 0 success, 2 invalid input, 3 environment (I/O, ports),
//! 4 solver or work limit.

mod render;

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use pcm_core::pcm::format::{self, MatrixFormat};
use pcm_core::reduce::{self, ReductionQuery, SearchLimits, SearchOptions, DEFAULT_WORK_BUDGET};
use pcm_core::{indices, ComparisonMatrix, Error, IndexKind, RandomIndexTable, ScaleBound};

#[derive(Parser)]
#[command(
    name = "pcm",
    version,
    about = "Inconsistency indices and minimal repairs of pairwise comparison matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit full-precision JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Print elapsed time to stderr.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Print index values of a matrix.
    Evaluate {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = IndexArg::All)]
        index: IndexArg,
    },
    /// Fewest cells to revise so the index meets a threshold.
    Reduce {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        index: Kind,
        #[arg(long)]
        threshold: f64,
        /// List every optimal set, not only the first.
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        search: Search,
    },
    /// Lowest index reachable by revising at most `budget` cells.
    Minimize {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        index: Kind,
        #[arg(long)]
        budget: usize,
        #[command(flatten)]
        search: Search,
    },
    /// Monte Carlo estimate of the random index.
    Ri {
        #[arg(long, value_parser = clap::value_parser!(u64).range(3..))]
        n: u64,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// JSON object mapping n to RI_n.
        #[arg(long)]
        ri_table: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_WORK_BUDGET)]
        work_budget: u64,
        #[arg(long, default_value_t = 60)]
        timeout_secs: u64,
        /// Allowed cross-origin caller; repeat for several. Any origin when omitted.
        #[arg(long)]
        cors_origin: Vec<String>,
    },
}

#[derive(Args)]
struct Input {
    /// Matrix file, or `-` for stdin.
    matrix: String,
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    format: FormatArg,
    /// JSON object mapping n to RI_n.
    #[arg(long)]
    ri_table: Option<PathBuf>,
}

#[derive(Args)]
struct Search {
    /// Entry bound M; entries must lie in [1/M, M].
    #[arg(long, default_value_t = 9.0)]
    bound: f64,
    /// Also report witnesses rounded to the 1/9..9 scale.
    #[arg(long)]
    round: bool,
    #[arg(long, default_value_t = DEFAULT_WORK_BUDGET)]
    work_budget: u64,
    #[arg(long)]
    timeout_secs: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Auto,
    Dense,
    Upper,
    Csv,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum IndexArg {
    Cr,
    Cm,
    Ci,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Cr,
    Cm,
    Ci,
}

impl From<Kind> for IndexKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Cr => IndexKind::Cr,
            Kind::Cm => IndexKind::Cm,
            Kind::Ci => IndexKind::Ci,
        }
    }
}

enum Failure {
    Core(Error),
    Environment(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Environment(_) => 3,
            Failure::Core(
                Error::WorkBudgetExceeded { .. }
                | Error::Timeout { .. }
                | Error::BranchLimit { .. }
                | Error::ConvergenceFailure { .. },
            ) => 4,
            Failure::Core(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => e.fmt(f),
            Failure::Environment(m) => f.write_str(m),
        }
    }
}

fn read_text(path: &str) -> Result<String, Failure> {
    let mut text = String::new();
    let res = if path == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| Failure::Environment(format!("cannot read {path}: {e}")))?;
    Ok(text)
}

fn load_ri(path: Option<&Path>) -> Result<RandomIndexTable, Failure> {
    match path {
        None => Ok(RandomIndexTable::default()),
        Some(p) => Ok(RandomIndexTable::from_json(&read_text(&p.to_string_lossy())?)?),
    }
}

impl Input {
    fn load(&self) -> Result<(ComparisonMatrix, RandomIndexTable), Failure> {
        let text = read_text(&self.matrix)?;
        let matrix = match self.format {
            FormatArg::Auto => format::parse_auto(&text),
            FormatArg::Dense => format::parse(&text, MatrixFormat::DenseJson),
            FormatArg::Upper => format::parse(&text, MatrixFormat::UpperJson),
            FormatArg::Csv => format::parse(&text, MatrixFormat::Csv),
        }?;
        Ok((matrix, load_ri(self.ri_table.as_deref())?))
    }
}

impl Search {
    fn query(
        &self,
        q: ReductionQuery,
        ri: RandomIndexTable,
    ) -> Result<(ReductionQuery, SearchOptions), Failure> {
        let mut limits = SearchLimits {
            max_subproblems: Some(self.work_budget),
            deadline: None,
        };
        if let Some(s) = self.timeout_secs {
            limits = limits.with_timeout(Duration::from_secs(s));
        }
        let opts = SearchOptions {
            limits,
            round_to_scale: self.round,
            ..SearchOptions::default()
        };
        Ok((q.with_bound(ScaleBound::new(self.bound)?).with_ri(ri), opts))
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Evaluate { input, index } => {
            let (a, ri) = input.load()?;
            let kinds: Vec<IndexKind> = match index {
                IndexArg::Cr => vec![IndexKind::Cr],
                IndexArg::Cm => vec![IndexKind::Cm],
                IndexArg::Ci => vec![IndexKind::Ci],
                IndexArg::All => IndexKind::ALL.to_vec(),
            };
            let reports = kinds
                .iter()
                .map(|&k| indices::evaluate(k, &a, &ri))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(if cli.json {
                render::reports_json(&reports)
            } else {
                render::reports(&a, &reports)
            })
        }
        Command::Reduce {
            input,
            index,
            threshold,
            all,
            search,
        } => {
            let (a, ri) = input.load()?;
            let (q, opts) = search.query(ReductionQuery::min_changes(a, (*index).into(), *threshold), ri)?;
            let r = if *all {
                reduce::enumerate_optimal(&q, &opts)?
            } else {
                reduce::min_changes(&q, &opts)?
            };
            Ok(if cli.json {
                render::json(&r)
            } else {
                render::reduction(&q, &r)
            })
        }
        Command::Minimize {
            input,
            index,
            budget,
            search,
        } => {
            let (a, ri) = input.load()?;
            let (q, opts) = search.query(ReductionQuery::min_index(a, (*index).into(), *budget), ri)?;
            let r = reduce::min_index(&q, &opts)?;
            Ok(if cli.json {
                render::json(&r)
            } else {
                render::minimization(&q, &r)
            })
        }
        Command::Ri { n, samples, seed } => {
            let ri = indices::estimate_ri(*n as usize, *samples as usize, *seed)?;
            Ok(if cli.json {
                render::json(&serde_json::json!({ "n": n, "samples": samples, "seed": seed, "ri": ri }))
            } else {
                format!("RI_{n} = {ri:.4} ({samples} samples, seed {seed})")
            })
        }
        Command::Serve {
            port,
            host,
            ri_table,
            work_budget,
            timeout_secs,
            cors_origin,
        } => {
            let config = pcm_api::Config {
                ri: load_ri(ri_table.as_deref())?,
                work_budget: *work_budget,
                timeout: Duration::from_secs(*timeout_secs),
                cors_origins: cors_origin.clone(),
            };
            serve(host, *port, config)?;
            Ok(String::new())
        }
    }
}

fn serve(host: &str, port: u16, config: pcm_api::Config) -> Result<(), Failure> {
    let env = |e: std::io::Error| Failure::Environment(e.to_string());
    let rt = tokio::runtime::Runtime::new().map_err(env)?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((host, port))
            .await
            .map_err(|e| Failure::Environment(format!("cannot bind {host}:{port}: {e}")))?;
        let addr = listener.local_addr().map_err(env)?;
        eprintln!("listening on http://{addr}");
        pcm_api::serve(listener, config).await.map_err(env)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = run(&cli);
    if cli.timing {
        eprintln!("time: {:.3} s", start.elapsed().as_secs_f64());
    }
    match result {
        Ok(out) => {
            if !out.is_empty() {
                println!("{out}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
