use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use critspace::bbw::{h_e, h_omega};
use critspace::critical::koszul::koszul_oracle;
use critspace::critical::{alpha_dims, alpha_matrix, critical_dim, generic_rank, Protocol};
use critspace::exact::{Field, PrimeField, ALT_PRIME, DEFAULT_PRIME};
use critspace::format::{dimension_inequality, exception_scan};
use critspace::poly::ed_degree;
use critspace::solver::{solve_with_retries, DEFAULT_MAX_PATHS, RESIDUAL_TOL};
use critspace::tensor::TensorFile;
use critspace::{DenseTensor, Error, TensorFormat};

use critspace_cli::{sweep_resuming, write_report, ReportFormat, SweepConfig, DEFAULT_MAX_CELLS};

#[derive(Parser)]
#[command(
    name = "critspace",
    about = "Singular vector tuples, critical spaces and cohomology of tensor formats",
    version
)]
struct Cli {
    /// Field modulus for exact computations
    #[arg(long, global = true, default_value_t = DEFAULT_PRIME)]
    prime: u64,

    /// Seed for random tensors, charts and start systems
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TensorInput {
    /// JSON tensor file {"dims": [...], "entries": [...]}
    #[arg(long, conflicts_with = "random")]
    tensor_file: Option<PathBuf>,

    /// Draw a random tensor over the prime field instead of reading a file
    #[arg(long, requires = "format")]
    random: bool,

    /// Tensor format such as 3x3x6 (with --random)
    #[arg(long)]
    format: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Number of singular vector tuples of a general tensor of a format
    EdDegree {
        /// format string such as 3x3x6
        format: String,
    },

    /// Cohomology dimensions: either --format with --r/--q for the section
    /// bundle powers, or --n/--forms-r/--twist/--q for twisted forms on
    /// one projective space
    Cohomology {
        #[arg(long)]
        format: Option<String>,
        #[arg(long)]
        r: Option<i64>,
        #[arg(long)]
        n: Option<i64>,
        #[arg(long)]
        forms_r: Option<i64>,
        #[arg(long)]
        twist: Option<i64>,
        #[arg(long)]
        q: i64,
    },

    /// Dimension of the critical space of a tensor
    CriticalDim {
        #[command(flatten)]
        input: TensorInput,
    },

    /// Rank and kernel of the contraction map of a beyond-by-one tensor
    AlphaRank {
        #[command(flatten)]
        input: TensorInput,
    },

    /// Syzygy dimension by two independent routes; exits 4 if they differ
    KoszulOracle {
        #[command(flatten)]
        input: TensorInput,
    },

    /// All singular vector tuples of a small tensor, as a JSON report
    SolveTuples {
        /// format string for a random real tensor
        #[arg(long, conflicts_with = "tensor_file")]
        format: Option<String>,
        /// JSON tensor file with real entries
        #[arg(long)]
        tensor_file: Option<PathBuf>,
        /// certification residual threshold
        #[arg(long, default_value_t = RESIDUAL_TOL)]
        tol: f64,
        /// refuse to track more paths than this
        #[arg(long, default_value_t = DEFAULT_MAX_PATHS)]
        max_paths: u128,
    },

    /// Sweep all beyond-by-one formats up to a bound, testing maximal rank
    Sweep {
        /// number of leading factors
        #[arg(long)]
        k: usize,
        /// bound on the leading projective dimensions
        #[arg(long)]
        max_n: usize,
        /// two comma separated primes
        #[arg(long, default_value_t = format!("{DEFAULT_PRIME},{ALT_PRIME}"))]
        primes: String,
        /// two comma separated seeds
        #[arg(long, default_value = "1,2")]
        seeds: String,
        /// report format: jsonl or csv
        #[arg(long, default_value = "jsonl")]
        report: String,
        /// skip formats whose matrix exceeds this many entries
        #[arg(long, default_value_t = DEFAULT_MAX_CELLS)]
        max_cells: u128,
        /// reuse completed rows from the existing --output file (jsonl)
        #[arg(long, requires = "output")]
        resume: bool,
    },

    /// Scan leading-dimension tuples for failures of the domain/codomain
    /// dimension inequality
    CheckInequalities {
        /// tuple length
        #[arg(long)]
        k: usize,
        /// bound on each entry
        #[arg(long)]
        bound: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out: Vec<u8> = Vec::new();
    let code = match run(&cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    };
    let result = match &cli.output {
        Some(path) => fs::write(path, &out).map_err(|e| Error::Io(e.to_string())),
        None => std::io::stdout()
            .write_all(&out)
            .map_err(|e| Error::Io(e.to_string())),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    code
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidFormat(_)
        | Error::Io(_)
        | Error::EntryCount { .. }
        | Error::NotBeyondByOne(_)
        | Error::VariableCountMismatch { .. }
        | Error::DegenerateTensor => 2,
        Error::ResourceGuard(_) => 3,
        Error::RankDisagreement(_) | Error::OracleDisagreement { .. } | Error::IllConditionedSpan { .. } => 4,
        Error::TrackingUnstable { .. } => 1,
    }
}

fn protocol_for(prime: u64, seed: u64) -> Protocol {
    let second = if prime == DEFAULT_PRIME {
        ALT_PRIME
    } else {
        DEFAULT_PRIME
    };
    Protocol {
        primes: [prime, second],
        seeds: [seed, seed.wrapping_add(1)],
    }
}

fn load_exact_tensor(path: &PathBuf) -> Result<DenseTensor<i64>, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
    TensorFile::parse(&text)?.to_i64()
}

fn run(cli: &Cli, out: &mut Vec<u8>) -> Result<(), Error> {
    match &cli.command {
        Command::EdDegree { format } => {
            let format = TensorFormat::from_str(format)?;
            let ns: Vec<usize> = format.dims().iter().map(|&d| d - 1).collect();
            writeln!(out, "{}", ed_degree(&ns)).unwrap();
        }

        Command::Cohomology {
            format,
            r,
            n,
            forms_r,
            twist,
            q,
        } => match (format, n) {
            (Some(format), None) => {
                let format = TensorFormat::from_str(format)?;
                let r = r.ok_or_else(|| Error::InvalidFormat("--r is required".into()))?;
                writeln!(out, "{}", h_e(&format, r, *q)).unwrap();
            }
            (None, Some(n)) => {
                let fr =
                    forms_r.ok_or_else(|| Error::InvalidFormat("--forms-r is required".into()))?;
                let t = twist.ok_or_else(|| Error::InvalidFormat("--twist is required".into()))?;
                writeln!(out, "{}", h_omega(*n, fr, t, *q)).unwrap();
            }
            _ => {
                return Err(Error::InvalidFormat(
                    "pass exactly one of --format or --n".into(),
                ))
            }
        },

        Command::CriticalDim { input } => {
            if let Some(path) = &input.tensor_file {
                let tensor = load_exact_tensor(path)?;
                let field = PrimeField::new(cli.prime)?;
                let t = tensor.map(|&x| field.from_i64(x));
                writeln!(out, "{}", critical_dim(&field, &t)).unwrap();
            } else {
                let format = require_random(input)?;
                let protocol = protocol_for(cli.prime, cli.seed);
                let dim = generic_rank(&format, &protocol, |f, t| {
                    Ok(critspace::critical::critical_dim_structured(f, t))
                })?;
                writeln!(out, "{dim}").unwrap();
            }
        }

        Command::AlphaRank { input } => {
            let (rank, kernel, domain, codomain) = if let Some(path) = &input.tensor_file {
                let tensor = load_exact_tensor(path)?;
                let field = PrimeField::new(cli.prime)?;
                let t = tensor.map(|&x| field.from_i64(x));
                let m = alpha_matrix(&field, &t)?;
                let (d, c) = alpha_dims(t.format())?;
                let rank = m.rank();
                (rank, m.ncols() - rank, d, c)
            } else {
                let format = require_random(input)?;
                let protocol = protocol_for(cli.prime, cli.seed);
                let kernel = generic_rank(&format, &protocol, |f, t| {
                    critspace::critical::span_codim_via_alpha(f, t)
                })?;
                let (d, c) = alpha_dims(&format)?;
                (d as usize - kernel, kernel, d, c)
            };
            writeln!(
                out,
                "{{\"domain\":{domain},\"codomain\":{codomain},\"rank\":{rank},\"kernel\":{kernel}}}"
            )
            .unwrap();
        }

        Command::KoszulOracle { input } => {
            let field = PrimeField::new(cli.prime)?;
            let value = if let Some(path) = &input.tensor_file {
                let tensor = load_exact_tensor(path)?;
                let t = tensor.map(|&x| field.from_i64(x));
                koszul_oracle(&field, &t, cli.seed)?.agreed()?
            } else {
                let format = require_random(input)?;
                let entries = critspace::exact::random_mod_p(&format, cli.seed, cli.prime);
                let t = DenseTensor::new(format, entries)?;
                koszul_oracle(&field, &t, cli.seed.wrapping_add(17))?.agreed()?
            };
            writeln!(out, "{value}").unwrap();
        }

        Command::SolveTuples {
            format,
            tensor_file,
            tol,
            max_paths,
        } => {
            let tensor = match (format, tensor_file) {
                (Some(fmt), None) => {
                    let format = TensorFormat::from_str(fmt)?;
                    critspace::solver::random_real_tensor(&format, cli.seed)
                }
                (None, Some(path)) => {
                    let text = fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
                    TensorFile::parse(&text)?.to_f64()?
                }
                _ => {
                    return Err(Error::InvalidFormat(
                        "pass exactly one of --format or --tensor-file".into(),
                    ))
                }
            };
            let report = solve_with_retries(&tensor, cli.seed, 3, *max_paths, *tol)?;
            if !report.complete() {
                eprintln!(
                    "warning: found {} of {} expected tuples after 3 seeds",
                    report.tuples.len(),
                    report.expected_count
                );
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&report).unwrap()).unwrap();
        }

        Command::Sweep {
            k,
            max_n,
            primes,
            seeds,
            report,
            max_cells,
            resume,
        } => {
            let primes = parse_pair(primes, "primes")?;
            let seeds = parse_pair(seeds, "seeds")?;
            let config = SweepConfig {
                protocol: Protocol { primes, seeds },
                max_cells: *max_cells,
            };
            let fmt = match report.as_str() {
                "jsonl" => ReportFormat::JsonLines,
                "csv" => ReportFormat::Csv,
                other => {
                    return Err(Error::InvalidFormat(format!(
                        "unknown report format {other:?}, expected jsonl or csv"
                    )))
                }
            };
            let previous = if *resume {
                if fmt != ReportFormat::JsonLines {
                    return Err(Error::InvalidFormat(
                        "--resume only reads jsonl reports".into(),
                    ));
                }
                read_previous_rows(cli.output.as_ref().expect("clap enforces --output"))?
            } else {
                Vec::new()
            };
            let rows = sweep_resuming(*k, *max_n, &config, &previous)?;
            write_report(&rows, fmt, out).map_err(|e| Error::Io(e.to_string()))?;
        }

        Command::CheckInequalities { k, bound } => {
            if *k < 2 || *bound < 1 {
                return Err(Error::InvalidFormat(
                    "need --k >= 2 and --bound >= 1".into(),
                ));
            }
            for tuple in exception_scan(*k, *bound) {
                let record = dimension_inequality(&tuple);
                let parts: Vec<String> = tuple.iter().map(|n| n.to_string()).collect();
                writeln!(
                    out,
                    "{{\"tuple\":[{}],\"lhs\":\"{}\",\"rhs\":\"{}\"}}",
                    parts.join(","),
                    record.lhs,
                    record.rhs
                )
                .unwrap();
            }
        }
    }
    Ok(())
}

fn read_previous_rows(path: &PathBuf) -> Result<Vec<critspace_cli::SweepRow>, Error> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| Error::Io(format!("bad row in resume file: {e}"))))
        .collect()
}

fn require_random(input: &TensorInput) -> Result<TensorFormat, Error> {
    if !input.random {
        return Err(Error::InvalidFormat(
            "pass --tensor-file or --random --format".into(),
        ));
    }
    let fmt = input
        .format
        .as_ref()
        .ok_or_else(|| Error::InvalidFormat("--random needs --format".into()))?;
    TensorFormat::from_str(fmt)
}

fn parse_pair<T: FromStr + Copy>(s: &str, what: &str) -> Result<[T; 2], Error> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::InvalidFormat(format!(
            "--{what} needs two comma separated values"
        )));
    }
    let a = parts[0]
        .trim()
        .parse()
        .map_err(|_| Error::InvalidFormat(format!("bad value in --{what}")))?;
    let b = parts[1]
        .trim()
        .parse()
        .map_err(|_| Error::InvalidFormat(format!("bad value in --{what}")))?;
    Ok([a, b])
}
