use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use convlab::formats::{Command, JobSpec, OutputFormat};
use convlab_cli::run;

#[derive(Parser)]
#[command(name = "convlab", version, about = "Exact convergence radii of p-adic differential modules")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
    Dot,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
            Format::Svg => OutputFormat::Svg,
            Format::Dot => OutputFormat::Dot,
        }
    }
}

#[derive(Args)]
struct Common {
    /// Input file (module or exponent JSON).
    input: PathBuf,
    /// Output format; not every command supports every format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Intrinsic subsidiary radii at a log-radius.
    Radii {
        #[command(flatten)]
        common: Common,
        /// Log-radius r = −log ρ of the Gauss point.
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        /// Frobenius-descendant steps for radii at or above ω [default: 2].
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Radius profile over [r1, r2].
    Profile {
        #[command(flatten)]
        common: Common,
        /// Left end of the log-radius interval.
        #[arg(long, allow_hyphen_values = true)]
        r1: String,
        /// Right end of the log-radius interval.
        #[arg(long, allow_hyphen_values = true)]
        r2: String,
        /// Initial number of sample cells [default: 16].
        #[arg(long)]
        grid: Option<usize>,
        /// Refinement rounds around uncertified spans [default: 2].
        #[arg(long)]
        rounds: Option<usize>,
        /// Frobenius-descendant steps per sample [default: 2].
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Skeleton and controlling subdivision.
    Graph {
        #[command(flatten)]
        common: Common,
        /// Comma-separated generator centers.
        #[arg(long, allow_hyphen_values = true)]
        centers: Option<String>,
        /// Log-radius at which each generator ends.
        #[arg(long, allow_hyphen_values = true)]
        r_end: String,
        /// Sample cells per edge profile [default: 16].
        #[arg(long)]
        grid: Option<usize>,
        /// Refinement rounds per edge profile [default: 2].
        #[arg(long)]
        rounds: Option<usize>,
    },
    /// Cyclic vector and Newton polygon.
    Newton {
        #[command(flatten)]
        common: Common,
        /// Log-radius of the Gauss point.
        #[arg(long, allow_hyphen_values = true)]
        r: String,
    },
    /// Liouville profiles and partitions of an exponent file.
    Exponents {
        #[command(flatten)]
        common: Common,
        /// Weak-equivalence constant [default: 1].
        #[arg(long, allow_hyphen_values = true)]
        c: Option<String>,
        /// Largest depth m examined [default: 12].
        #[arg(long)]
        m_max: Option<u32>,
    },
    /// Frobenius descendant radii against the forward law.
    Descend {
        #[command(flatten)]
        common: Common,
        /// Log-radius of the Gauss point.
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        /// Frobenius-descendant steps for both sides [default: 2].
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Spectral-radius brackets from iterated derivatives.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Log-radius of the Gauss point.
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        /// Highest power of D examined [default: 64].
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Fuchs basis at a regular singular point.
    Fuchs {
        #[command(flatten)]
        common: Common,
        /// t-adic order of the basis [default: 8].
        #[arg(long)]
        order: Option<i64>,
        /// Maximum number of recursion steps [default: 1000000].
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Constant basis on an annulus.
    ConstantBasis {
        #[command(flatten)]
        common: Common,
        /// Gauge iterations [default: 3].
        #[arg(long)]
        iterations: Option<u32>,
    },
    /// Run a JSON job file.
    Job {
        /// Job file; a relative `input` is resolved against its directory.
        spec: PathBuf,
    },
}

fn put<T: ToString>(params: &mut BTreeMap<String, String>, key: &str, v: Option<T>) {
    if let Some(v) = v {
        params.insert(key.to_string(), v.to_string());
    }
}

fn job_of(cmd: Cmd) -> Result<(JobSpec, Option<PathBuf>), convlab::Error> {
    let mut p = BTreeMap::new();
    let (command, common) = match cmd {
        Cmd::Job { spec } => {
            let text = fs::read_to_string(&spec).map_err(|e| convlab::Error::Io(format!("{}: {e}", spec.display())))?;
            let mut job = JobSpec::parse(&text)?;
            // relative inputs are resolved against the job file's directory
            if let Some(dir) = spec.parent().filter(|_| Path::new(&job.input).is_relative()) {
                job.input = dir.join(&job.input).to_string_lossy().into_owned();
            }
            return Ok((job, None));
        }
        Cmd::Radii { common, r, depth } => {
            put(&mut p, "r", Some(r));
            put(&mut p, "depth", depth);
            (Command::Radii, common)
        }
        Cmd::Profile { common, r1, r2, grid, rounds, depth } => {
            put(&mut p, "r1", Some(r1));
            put(&mut p, "r2", Some(r2));
            put(&mut p, "grid", grid);
            put(&mut p, "rounds", rounds);
            put(&mut p, "depth", depth);
            (Command::Profile, common)
        }
        Cmd::Graph { common, centers, r_end, grid, rounds } => {
            put(&mut p, "centers", centers);
            put(&mut p, "r_end", Some(r_end));
            put(&mut p, "grid", grid);
            put(&mut p, "rounds", rounds);
            (Command::Graph, common)
        }
        Cmd::Newton { common, r } => {
            put(&mut p, "r", Some(r));
            (Command::Newton, common)
        }
        Cmd::Exponents { common, c, m_max } => {
            put(&mut p, "c", c);
            put(&mut p, "m_max", m_max);
            (Command::Exponents, common)
        }
        Cmd::Descend { common, r, depth } => {
            put(&mut p, "r", Some(r));
            put(&mut p, "depth", depth);
            (Command::Descend, common)
        }
        Cmd::Oracle { common, r, k_max } => {
            put(&mut p, "r", Some(r));
            put(&mut p, "k_max", k_max);
            (Command::Oracle, common)
        }
        Cmd::Fuchs { common, order, budget } => {
            put(&mut p, "order", order);
            put(&mut p, "budget", budget);
            (Command::Fuchs, common)
        }
        Cmd::ConstantBasis { common, iterations } => {
            put(&mut p, "iterations", iterations);
            (Command::ConstantBasis, common)
        }
    };
    let job = JobSpec::new(command, common.input.to_string_lossy().into_owned(), p, common.format.into())?;
    Ok((job, common.output))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = job_of(cli.command).and_then(|(job, out)| {
        let outcome = run(&job)?;
        match out {
            Some(path) => fs::write(&path, &outcome.output).map_err(|e| convlab::Error::Io(format!("{}: {e}", path.display())))?,
            None => print!("{}", outcome.output),
        }
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            for f in &outcome.flags {
                eprintln!("flag: {f}");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
