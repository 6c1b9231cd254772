//! `animals`: census, verification, percolation and analysis runs.
//!
//! Exit codes: 0 when no check fails, 1 when some check fails, 2 for
//! usage errors, 3 when a computation cannot be carried out.

mod analyze;
mod census;
mod config;
mod construct;
mod output;
mod percolate;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_count, Format, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(animals_core::Error),
}

impl From<animals_core::Error> for CliError {
    fn from(e: animals_core::Error) -> Self {
        use animals_core::Error as E;
        match e {
            E::InvalidDimension(_) | E::Parameter(_) | E::Domain(_) | E::BeyondCensus { .. } | E::OracleTooLarge { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Core(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

#[derive(Parser)]
#[command(name = "animals", version, about = "Edge lattice animals, their perimeters, and bond percolation")]
struct Cli {
    /// TOML file of run settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    parallelism: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate translation classes by (n, m) and write a census file.
    Census(CensusArgs),
    /// Run the verification checks.
    Verify(VerifyArgs),
    /// Monte Carlo cluster sizes against the exact census values.
    Percolate(PercolateArgs),
    /// Subcritical maximisers t_n of P_p(|C(0)| = n).
    Tn(TnArgs),
    /// Rate functions, the p_c bound, exponent probes and brackets.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Build a construction and emit it as fixture JSON.
    #[command(subcommand)]
    Construct(ConstructCommand),
}

fn dim_arg(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(d) if d >= 2 => Ok(d),
        Ok(d) => Err(format!("d must be at least 2, got {d}")),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_count(s: &str) -> Result<u64, String> {
    match parse_count(s)? {
        0 => Err("must be positive".into()),
        n => Ok(n),
    }
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long, value_parser = dim_arg)]
    d: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Census file (default: $ANIMALS_CENSUS_DIR/census-d<d>-n<n>.json).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated subset of: oracle, identities, delyon, table3,
    /// lemma62, flips, census, fixture.
    #[arg(long, value_delimiter = ',')]
    only: Option<Vec<String>>,
    #[arg(long, value_parser = dim_arg)]
    d: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Census file to load and validate.
    #[arg(long)]
    census: Option<PathBuf>,
    /// Stats fixture: animals with their expected statistics.
    #[arg(long)]
    fixture: Option<PathBuf>,
    /// Random pairs for the concatenation check.
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PercolateArgs {
    #[arg(long, value_parser = dim_arg)]
    d: Option<usize>,
    /// Bond probabilities, comma-separated.
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    #[arg(long, value_parser = positive_count)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    census: Option<PathBuf>,
    /// Largest cluster size in the series.
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    cluster_cap: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TnArgs {
    /// `a..b` (inclusive) or a single n.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    pc: Option<f64>,
    #[arg(long, value_parser = dim_arg)]
    d: Option<usize>,
    #[arg(long)]
    census: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum AnalyzeCommand {
    /// Lower bound on p_c from self-avoiding path counts.
    PcBound {
        #[arg(long, value_parser = dim_arg)]
        d: Option<usize>,
        #[arg(long)]
        k_max: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Identities of φ, ξ and Φ on a grid, and their expansions.
    RateFunctions {
        /// `default` (100 points per axis) or a point count.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cubic remainder of φ about the critical ratio.
    Lemma32 {
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        gammas: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exploratory fits of the scaling exponents.
    Probes {
        #[arg(long)]
        census: Option<PathBuf>,
        #[arg(long, value_parser = dim_arg)]
        d: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        pc: Option<f64>,
        #[arg(long)]
        n_lo: Option<usize>,
        #[arg(long)]
        n_hi: Option<usize>,
        /// Window width G.
        #[arg(long)]
        g: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        deltas: Option<Vec<f64>>,
        /// Probabilities below p_c for the decay-rate fit.
        #[arg(long, value_delimiter = ',')]
        rho_p: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-sided window brackets on P_p(|C(0)| = n) at p_c and t_n.
    Brackets {
        #[arg(long)]
        census: Option<PathBuf>,
        #[arg(long, value_parser = dim_arg)]
        d: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        pc: Option<f64>,
        /// Window width G.
        #[arg(long)]
        g: Option<f64>,
        /// Tail power K.
        #[arg(long)]
        k: Option<f64>,
        /// `max(f_nmax, f_n)` (default) or `delyon`.
        #[arg(long)]
        proxy: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ConstructCommand {
    /// Two-edge link R_2.
    R2 {
        #[arg(long, value_parser = dim_arg)]
        d: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Comb ρ_d with chamber bits a.
    Rho {
        #[arg(long, value_parser = dim_arg)]
        d: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// Bits, comma-separated (default all zero).
        #[arg(long, value_delimiter = ',')]
        a: Option<Vec<u8>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ladder S_k^i.
    S {
        #[arg(long, value_parser = dim_arg)]
        d: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        i: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Box φ with sides q.
    Phi {
        #[arg(long, value_delimiter = ',')]
        q: Option<Vec<usize>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Perimeter correction of γ1 * γ2 to the ratio β.
    Correction {
        /// `p/q`, a decimal, or an integer.
        #[arg(long)]
        beta: Option<String>,
        /// Fixture JSON of γ1.
        #[arg(long)]
        g1: Option<PathBuf>,
        /// Fixture JSON of γ2.
        #[arg(long)]
        g2: Option<PathBuf>,
        #[arg(long)]
        k_cap: Option<usize>,
        #[arg(long)]
        s_cap: Option<usize>,
        /// Skip the requirement m_i = ⌊β n_i⌋.
        #[arg(long)]
        any_ratio: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn flags(cmd: &Command) -> RunConfig {
    let mut c = RunConfig::default();
    match cmd {
        Command::Census(a) => {
            c.d = a.d;
            c.n_max = a.n_max;
            c.out = a.out.clone();
            c.csv = a.csv.clone();
        }
        Command::Verify(a) => {
            c.only = a.only.clone();
            c.d = a.d;
            c.n_max = a.n_max;
            c.census = a.census.clone();
            c.fixture = a.fixture.clone();
            c.pairs = a.pairs;
            c.seed = a.seed;
            c.out = a.out.clone();
        }
        Command::Percolate(a) => {
            c.d = a.d;
            c.p = a.p.clone();
            c.samples = a.samples;
            c.seed = a.seed;
            c.census = a.census.clone();
            c.n_max = a.n_max;
            c.cluster_cap = a.cluster_cap;
            c.format = a.format;
            c.out = a.out.clone();
        }
        Command::Tn(a) => {
            c.n = a.n.clone();
            c.p_c = a.pc;
            c.d = a.d;
            c.census = a.census.clone();
            c.format = a.format;
            c.out = a.out.clone();
        }
        Command::Analyze(a) => match a {
            AnalyzeCommand::PcBound { d, k_max, out } => {
                c.d = *d;
                c.k_max = *k_max;
                c.out = out.clone();
            }
            AnalyzeCommand::RateFunctions { grid, alpha, out } => {
                c.grid = grid.clone();
                c.alpha = *alpha;
                c.out = out.clone();
            }
            AnalyzeCommand::Lemma32 { alpha, gammas, out } => {
                c.alpha = *alpha;
                c.gammas = gammas.clone();
                c.out = out.clone();
            }
            AnalyzeCommand::Probes {
                census,
                d,
                n_max,
                pc,
                n_lo,
                n_hi,
                g,
                deltas,
                rho_p,
                out,
            } => {
                c.census = census.clone();
                c.d = *d;
                c.n_max = *n_max;
                c.p_c = *pc;
                c.n_lo = *n_lo;
                c.n_hi = *n_hi;
                c.window_g = *g;
                c.deltas = deltas.clone();
                c.rho_p = rho_p.clone();
                c.out = out.clone();
            }
            AnalyzeCommand::Brackets {
                census,
                d,
                n,
                pc,
                g,
                k,
                proxy,
                out,
            } => {
                c.census = census.clone();
                c.d = *d;
                c.n = n.map(|n| n.to_string());
                c.p_c = *pc;
                c.window_g = *g;
                c.tail_k = *k;
                c.proxy = proxy.clone();
                c.out = out.clone();
            }
        },
        Command::Construct(a) => match a {
            ConstructCommand::R2 { d, out } => {
                c.d = *d;
                c.out = out.clone();
            }
            ConstructCommand::Rho { d, k, a, out } => {
                c.d = *d;
                c.shape_k = *k;
                c.a = a.clone();
                c.out = out.clone();
            }
            ConstructCommand::S { d, k, i, out } => {
                c.d = *d;
                c.shape_k = *k;
                c.i = *i;
                c.out = out.clone();
            }
            ConstructCommand::Phi { q, out } => {
                c.q = q.clone();
                c.out = out.clone();
            }
            ConstructCommand::Correction {
                beta,
                g1,
                g2,
                k_cap,
                s_cap,
                any_ratio,
                out,
            } => {
                c.beta = beta.clone();
                c.g1 = g1.clone();
                c.g2 = g2.clone();
                c.k_cap = *k_cap;
                c.s_cap = *s_cap;
                c.any_ratio = any_ratio.then_some(true);
                c.out = out.clone();
            }
        },
    }
    c
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let base = match &cli.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    let mut over = flags(&cli.command);
    over.parallelism = cli.parallelism;
    let mut cfg = base.overlay(over);
    if cfg.parallelism == Some(0) {
        return Err(CliError::Usage("parallelism must be positive".into()));
    }
    match cli.command {
        Command::Census(_) => census::run(&mut cfg),
        Command::Verify(_) => verify::run(&mut cfg),
        Command::Percolate(_) => percolate::run(&mut cfg),
        Command::Tn(_) => percolate::run_tn(&mut cfg),
        Command::Analyze(a) => match a {
            AnalyzeCommand::PcBound { .. } => analyze::pc_bound(&mut cfg),
            AnalyzeCommand::RateFunctions { .. } => analyze::rate_functions(&mut cfg),
            AnalyzeCommand::Lemma32 { .. } => analyze::lemma32(&mut cfg),
            AnalyzeCommand::Probes { .. } => analyze::probes(&mut cfg),
            AnalyzeCommand::Brackets { .. } => analyze::brackets(&mut cfg),
        },
        Command::Construct(a) => match a {
            ConstructCommand::R2 { .. } => construct::r2(&mut cfg),
            ConstructCommand::Rho { .. } => construct::rho(&mut cfg),
            ConstructCommand::S { .. } => construct::s(&mut cfg),
            ConstructCommand::Phi { .. } => construct::phi(&mut cfg),
            ConstructCommand::Correction { .. } => construct::correction(&mut cfg),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
