//! Command-line front end: entropies and discord of JSON state files, sweeps
//! over `q`, counterexample search, property suites and random instances.
//!
//! Exit codes: 0 success, 1 a property suite failed, 2 malformed input or
//! configuration, 3 an object violates an invariant, 4 numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use qdiscord::entropy::entropy;
use qdiscord::infotheory::{discord_breakdown, fsa_condition, BipartiteInstance, FsaInstance};
use qdiscord::io;
use qdiscord::search::{self, KindFamily, Objective, SearchConfig};
use qdiscord::states::{random_channel, random_density, random_povm, random_projective_povm, Rng};
use qdiscord::suites::{run_suites, Suite, SuiteConfig};
use qdiscord::{DensityMatrix, EntropyKind, Error, Povm};

#[derive(Parser)]
#[command(
    name = "qdiscord",
    version,
    about = "Generalized entropies, discord and firm-subadditivity checks"
)]
struct Cli {
    /// Base seed for anything random; drawn from the clock when absent.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Slack for inequality checks; a negative value demands a strict margin.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// Write the result here (atomically) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy of a state.
    Entropy {
        state: PathBuf,
        #[command(flatten)]
        kind: KindArgs,
    },
    /// Mutual information, measured Holevo quantity and discord. Either file
    /// may be a search certificate; with a certificate the POVM file is optional.
    Discord {
        state: PathBuf,
        povm: Option<PathBuf>,
        #[command(flatten)]
        kind: KindArgs,
    },
    /// Tsallis discord over a grid of q, as CSV `q,discord`.
    Sweep {
        state: PathBuf,
        povm: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        q_from: f64,
        #[arg(long, default_value_t = 4.0)]
        q_to: f64,
        #[arg(long, default_value_t = 301)]
        q_steps: usize,
    },
    /// Search for negative discord (fsa) or negative mutual information (sa).
    Search(SearchArgs),
    /// Run property suites; exits 1 if any check fails.
    Check {
        /// Comma-separated list, or `all`.
        #[arg(long, default_value = "all", value_delimiter = ',')]
        suite: Vec<String>,
        /// Trials per suite; each suite has its own default.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Write a random state, POVM or channel as JSON.
    Gen(GenArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindName {
    #[value(alias = "von-neumann")]
    Vn,
    Renyi,
    Tsallis,
    Quadratic,
}

#[derive(Args)]
struct KindArgs {
    #[arg(long, value_enum)]
    kind: KindName,
    #[arg(long)]
    q: Option<f64>,
    /// Permit Rényi exponents above 1.
    #[arg(long)]
    allow_nonconcave: bool,
}

impl KindArgs {
    fn resolve(&self) -> qdiscord::Result<EntropyKind> {
        let need_q = || {
            self.q
                .ok_or_else(|| Error::Config("--q is required for renyi and tsallis".into()))
        };
        let kind = match self.kind {
            KindName::Vn | KindName::Quadratic if self.q.is_some() => {
                return Err(Error::Config(
                    "--q only applies to renyi and tsallis".into(),
                ))
            }
            KindName::Vn => EntropyKind::VonNeumann,
            KindName::Quadratic => EntropyKind::Quadratic,
            KindName::Tsallis => EntropyKind::tsallis(need_q()?),
            KindName::Renyi if self.allow_nonconcave => EntropyKind::renyi_nonconcave(need_q()?),
            KindName::Renyi => EntropyKind::renyi(need_q()?),
        };
        kind.validate()?;
        Ok(kind)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ObjectiveName {
    Fsa,
    Sa,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, value_enum, default_value = "fsa")]
    objective: ObjectiveName,
    #[arg(long, value_enum)]
    kind: KindName,
    /// Fixed exponent.
    #[arg(long, conflicts_with_all = ["q_from", "q_to"])]
    q: Option<f64>,
    /// Lower end when the exponent is searched too.
    #[arg(long, requires = "q_to")]
    q_from: Option<f64>,
    #[arg(long, requires = "q_from")]
    q_to: Option<f64>,
    /// `d_a,d_b`.
    #[arg(long, value_delimiter = ',', default_value = "2,2")]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    outcomes: usize,
    /// Full-rank POVM blocks instead of rank 1.
    #[arg(long)]
    full_rank: bool,
    #[arg(long, default_value_t = 200)]
    restarts: usize,
    /// Nelder–Mead iterations per restart.
    #[arg(long, default_value_t = 2000)]
    steps: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum What {
    State,
    Povm,
    Channel,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PovmClass {
    Rank1,
    Projective,
    FullRank,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    what: What,
    /// Subsystem dimensions of a state; the first entry is the dimension of a
    /// POVM or the channel input.
    #[arg(long, value_delimiter = ',', default_value = "2,2")]
    dims: Vec<usize>,
    /// State rank; full rank when absent.
    #[arg(long)]
    rank: Option<usize>,
    /// POVM outcomes; defaults to the dimension.
    #[arg(long)]
    outcomes: Option<usize>,
    #[arg(long, value_enum, default_value = "rank1")]
    povm_class: PovmClass,
    /// Channel output dimension; defaults to the input dimension.
    #[arg(long)]
    d_out: Option<usize>,
    #[arg(long, default_value_t = 2)]
    kraus: usize,
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Schema(_)
            | Error::Json(_)
            | Error::Io(_)
            | Error::Config(_)
            | Error::InvalidExponent(_)
            | Error::BadPartition(_) => 2,
            Error::Invariant { .. }
            | Error::NotSquare(..)
            | Error::DimensionMismatch(_)
            | Error::NotHermitian(_)
            | Error::Domain(_)
            | Error::BadRank { .. }
            | Error::SingularTotal(_)
            | Error::NotRank1(_)
            | Error::NotOrthonormal(_)
            | Error::NotPure(_) => 3,
            Error::NoConvergence(_) => 4,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = cli.seed.unwrap_or_else(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0)
    });
    eprintln!("seed: {seed}");
    match run(&cli, seed) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli, seed: u64) -> CliResult<u8> {
    match &cli.command {
        Command::Entropy { state, kind } => {
            let kind = kind.resolve()?;
            let value = entropy(kind, &load_state(state)?)?;
            let text = match cli.format {
                Some(Format::Json) => {
                    io::to_pretty_json(&json!({ "kind": kind, "entropy": value }))
                }
                Some(Format::Csv) => format!("entropy\n{value}\n"),
                None => format!("{}\n", format_significant(value, 15)),
            };
            emit(cli, &text)?;
        }
        Command::Discord { state, povm, kind } => {
            let kind = kind.resolve()?;
            let (rho, povm) = load_pair(state, povm.as_deref())?;
            let b = discord_breakdown(kind, &rho, &povm)?;
            let text = match cli.format {
                Some(Format::Csv) => format!(
                    "mutual_information,holevo_measured,discord\n{},{},{}\n",
                    b.mutual_information, b.holevo_measured, b.discord
                ),
                _ => {
                    let inst = FsaInstance::I(BipartiteInstance::new(rho, povm)?);
                    let report = fsa_condition(kind, &inst, cli.tolerance)?;
                    io::to_pretty_json(&json!({
                        "kind": kind,
                        "mutual_information": b.mutual_information,
                        "holevo_measured": b.holevo_measured,
                        "discord": b.discord,
                        "condition": report,
                    }))
                }
            };
            emit(cli, &text)?;
        }
        Command::Sweep {
            state,
            povm,
            q_from,
            q_to,
            q_steps,
        } => {
            let (rho, povm) = load_pair(state, povm.as_deref())?;
            let sweep = search::sweep_q(&rho, &povm, &search::linspace(*q_from, *q_to, *q_steps))?;
            let text = match cli.format {
                Some(Format::Json) => io::to_pretty_json(&sweep),
                _ => sweep.to_csv(),
            };
            emit(cli, &text)?;
        }
        Command::Search(args) => search_cmd(cli, args, seed)?,
        Command::Check { suite, trials } => {
            let suites = parse_suites(suite)?;
            let cfg = SuiteConfig {
                trials: *trials,
                seed,
                tolerance: cli.tolerance,
            };
            let report = run_suites(&suites, &cfg)?;
            let text = match cli.format {
                Some(Format::Csv) => {
                    let mut s = String::from("suite,name,trials,worst_gap,tolerance,pass\n");
                    for r in &report.results {
                        s += &format!(
                            "{},{},{},{},{},{}\n",
                            r.suite, r.name, r.trials, r.worst_gap, r.tolerance, r.pass
                        );
                    }
                    s
                }
                _ => io::to_pretty_json(&report),
            };
            emit(cli, &text)?;
            for r in report.results.iter().filter(|r| !r.pass) {
                eprintln!(
                    "FAIL {}: worst gap {:e} (tolerance {:e})",
                    r.name, r.worst_gap, r.tolerance
                );
            }
            if !report.pass {
                return Ok(1);
            }
        }
        Command::Gen(args) => gen_cmd(cli, args, seed)?,
    }
    Ok(0)
}

fn json_only(cli: &Cli, what: &str) -> CliResult<()> {
    if cli.format == Some(Format::Csv) {
        return Err(Error::Config(format!("{what} has no CSV form")).into());
    }
    Ok(())
}

fn search_cmd(cli: &Cli, args: &SearchArgs, seed: u64) -> CliResult<()> {
    json_only(cli, "search output")?;
    let family = match args.kind {
        KindName::Vn => KindFamily::VonNeumann,
        KindName::Renyi => KindFamily::Renyi,
        KindName::Tsallis => KindFamily::Tsallis,
        KindName::Quadratic => KindFamily::Quadratic,
    };
    let q_range = match (args.q, args.q_from, args.q_to) {
        (Some(q), _, _) => (q, q),
        (None, Some(lo), Some(hi)) => (lo, hi),
        _ if family.has_exponent() => {
            return Err(Error::Config("give --q or --q-from/--q-to".into()).into());
        }
        _ => (1.0, 1.0),
    };
    let &[da, db] = args.dims.as_slice() else {
        return Err(Error::Config("--dims takes two values, d_a,d_b".into()).into());
    };
    let cfg = SearchConfig {
        family,
        objective: match args.objective {
            ObjectiveName::Fsa => Objective::Fsa,
            ObjectiveName::Sa => Objective::Sa,
        },
        dims: (da, db),
        povm_outcomes: args.outcomes,
        povm_rank1: !args.full_rank,
        q_range,
        restarts: args.restarts,
        local_steps: args.steps,
        seed,
    };
    let outcome = search::search(&cfg)?;
    let text = match outcome.certificate() {
        Some(cert) => {
            eprintln!(
                "violation: value {:e} at q = {} (restart {}, {:.2?})",
                cert.discord_value, cert.q, cert.restart, cert.wall_time
            );
            cert.to_json()
        }
        None => {
            eprintln!(
                "none found; best value {:e} ({:.2?})",
                outcome.best_value, outcome.wall_time
            );
            io::to_pretty_json(&NoneFound {
                result: "none_found",
                objective: cfg.objective,
                family: cfg.family,
                q_range: family.has_exponent().then_some(cfg.q_range),
                dims: cfg.dims,
                best_value: outcome.best_value,
                restarts: cfg.restarts,
                local_steps: cfg.local_steps,
                evaluations: outcome.evaluations,
                seed,
            })
        }
    };
    emit(cli, &text)
}

#[derive(Serialize)]
struct NoneFound {
    result: &'static str,
    objective: Objective,
    family: KindFamily,
    #[serde(skip_serializing_if = "Option::is_none")]
    q_range: Option<(f64, f64)>,
    dims: (usize, usize),
    best_value: f64,
    restarts: usize,
    local_steps: usize,
    evaluations: usize,
    seed: u64,
}

fn gen_cmd(cli: &Cli, args: &GenArgs, seed: u64) -> CliResult<()> {
    json_only(cli, "gen output")?;
    let mut rng = Rng::new(seed);
    let d = *args
        .dims
        .first()
        .ok_or_else(|| Error::Config("--dims is empty".into()))?;
    let tol = cli.tolerance;
    let (text, summary) = match args.what {
        What::State => {
            let total: usize = args.dims.iter().product();
            let rho = random_density(&args.dims, args.rank.unwrap_or(total), &mut rng)?;
            let eig = rho.eigenvalues()?;
            let summary = vec![
                format!("dims: {:?}", rho.dims()),
                format!("hermitian: ok ({:e})", rho.matrix().hermiticity_error()),
                format!(
                    "unit_trace: ok ({:e})",
                    (rho.matrix().trace().re - 1.0).abs()
                ),
                format!("positive_semidefinite: ok (min eigenvalue {:e})", eig[0]),
                format!("rank: {}", rho.rank(tol)?),
            ];
            (io::state_to_string(&rho), summary)
        }
        What::Povm => {
            let n = args.outcomes.unwrap_or(d);
            let povm = match args.povm_class {
                PovmClass::Projective if n != d => {
                    return Err(Error::Config(format!(
                        "a projective POVM on dimension {d} has {d} outcomes"
                    ))
                    .into())
                }
                PovmClass::Projective => random_projective_povm(d, &mut rng)?,
                PovmClass::Rank1 => random_povm(d, n, true, &mut rng)?,
                PovmClass::FullRank => random_povm(d, n, false, &mut rng)?,
            };
            let summary = vec![
                format!("dim: {}, outcomes: {}", povm.dim(), povm.len()),
                format!("povm_completeness: ok ({:e})", completeness_error(&povm)),
                format!("rank1: {}", povm.is_rank1(tol)?),
                format!("projective: {}", povm.is_projective(tol)),
            ];
            (io::povm_to_string(&povm), summary)
        }
        What::Channel => {
            let ch = random_channel(d, args.d_out.unwrap_or(d), args.kraus, &mut rng)?;
            let summary = vec![
                format!(
                    "d_in: {}, d_out: {}, kraus: {}",
                    ch.d_in(),
                    ch.d_out(),
                    ch.kraus().len()
                ),
                "trace_preserving: ok".to_string(),
            ];
            (io::channel_to_string(&ch), summary)
        }
    };
    emit(cli, &text)?;
    for line in summary {
        eprintln!("{line}");
    }
    Ok(())
}

fn completeness_error(povm: &Povm) -> f64 {
    let d = povm.dim();
    let sum = povm
        .elements()
        .iter()
        .fold(qdiscord::ComplexMatrix::zeros(d, d), |acc, e| &acc + e);
    sum.max_abs_diff(&qdiscord::ComplexMatrix::identity(d))
}

fn parse_suites(names: &[String]) -> CliResult<Vec<Suite>> {
    if names.iter().any(|n| n == "all") {
        return Ok(Suite::ALL.to_vec());
    }
    Ok(names
        .iter()
        .map(|n| n.parse::<Suite>())
        .collect::<qdiscord::Result<Vec<_>>>()?)
}

fn emit(cli: &Cli, text: &str) -> CliResult<()> {
    match &cli.out {
        Some(path) => io::write_atomic(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(())
}

fn read_value(path: &Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })?;
    serde_json::from_str(&text).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}

/// A state file, or the `rho_ab` of a certificate.
fn load_state(path: &Path) -> CliResult<DensityMatrix> {
    let v = read_value(path)?;
    let v = v.get("rho_ab").cloned().unwrap_or(v);
    io::state_from_str(&v.to_string()).map_err(|e| with_path(e, path))
}

fn load_pair(state: &Path, povm: Option<&Path>) -> CliResult<(DensityMatrix, Povm)> {
    let rho = load_state(state)?;
    let source = povm.unwrap_or(state);
    let v = read_value(source)?;
    let v = match v.get("povm") {
        Some(p) => p.clone(),
        None if povm.is_none() => {
            return Err(Error::Config(
                "no POVM file given and the state file is not a certificate".into(),
            )
            .into())
        }
        None => v,
    };
    let povm = io::povm_from_str(&v.to_string()).map_err(|e| with_path(e, source))?;
    Ok((rho, povm))
}

fn with_path(e: Error, path: &Path) -> Failure {
    let mut f = Failure::from(e);
    f.message = format!("{}: {}", path.display(), f.message);
    f
}

/// `%.{digits}g`-style formatting without an exponent for ordinary
/// magnitudes. Values below the last printed digit of a unit-scale quantity
/// are roundoff and print as 0.
fn format_significant(x: f64, digits: usize) -> String {
    if x.abs() < 0.5 * 10f64.powi(-(digits as i32)) {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..digits as i32).contains(&exp) {
        return format!("{:.*e}", digits - 1, x);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
