use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use levy_lie::chen_strichartz::{log_flowmap, Coordinates};
use levy_lie::levy_sim::{mc_compare, SdeSpec};
use levy_lie::verify::{run_all, Corruption, VerifyConfig};
use levy_lie::word_algebra::AlphabetSpec;

mod output;

const EXIT_INVARIANT: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "levy-lie", version, about = "Chen–Strichartz expansions for Lévy-driven SDEs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Latex,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Basis {
    #[value(name = "J", alias = "j")]
    J,
    #[value(name = "I", alias = "i")]
    I,
}

impl From<Basis> for Coordinates {
    fn from(b: Basis) -> Self {
        match b {
            Basis::J => Coordinates::J,
            Basis::I => Coordinates::I,
        }
    }
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit log φ in the chosen basis through the given grade.
    Expand {
        /// Number of Wiener drivers.
        #[arg(long, default_value_t = 1)]
        d: u32,
        /// Total number of drivers besides time.
        #[arg(long, default_value_t = 1)]
        l: u32,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        grade: u64,
        #[arg(long, value_enum, default_value = "J")]
        basis: Basis,
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate the tree coefficients of the pre-Lie Magnus expansion.
    Magnus {
        /// Largest tree size.
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..=8))]
        grade: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Run every invariant suite; exits 1 if any check fails.
    Verify {
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..=6))]
        grade: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        common: Common,
        /// Test hook: perturb one computed coefficient.
        #[arg(long, hide = true)]
        corrupt: Option<String>,
    },
    /// Per-grade strong error of the truncated flowmap on simulated paths.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        /// Overrides the seed in the spec.
        #[arg(long)]
        seed: Option<u64>,
        /// Evaluate grades 1..=grade instead of the spec's list.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=8))]
        grade: Option<u64>,
        /// Overrides the sample count in the spec.
        #[arg(long, hide = true)]
        samples: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Usage(String),
    Invariant(String),
}

impl From<levy_lie::Error> for Failure {
    fn from(e: levy_lie::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn emit(common: &Common, body: &str) -> Result<(), Failure> {
    match &common.out {
        Some(path) => fs::write(path, body).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Usage(e.to_string()))
        }
    }
}

fn unsupported(cmd: &str, format: Format) -> Failure {
    let name = format.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    Failure::Usage(format!("{cmd} does not support --format {name}"))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Expand { d, l, grade, basis, common } => {
            let grade = grade as usize;
            let spec = AlphabetSpec::new(d, l, grade)?;
            let start = std::time::Instant::now();
            let lf = log_flowmap(basis.into(), &spec, grade);
            log::info!("expanded {} words in {:.2?}", lf.terms.len(), start.elapsed());
            let body = match common.format {
                Format::Text => lf.to_text(),
                Format::Latex => lf.to_latex(),
                Format::Json => output::expand_json(&lf, d, l),
                Format::Csv => output::expand_csv(&lf),
            };
            emit(&common, &body)
        }
        Command::Magnus { grade, common } => {
            let rows = output::magnus_rows(grade as usize)?;
            let body = match common.format {
                Format::Text => output::magnus_text(&rows),
                Format::Latex => output::magnus_latex(&rows),
                Format::Json => output::magnus_json(&rows, grade as usize),
                Format::Csv => output::magnus_csv(&rows),
            };
            emit(&common, &body)
        }
        Command::Verify { grade, seed, common, corrupt } => {
            let corrupt = corrupt.map(|c| c.parse::<Corruption>()).transpose()?;
            let cfg = VerifyConfig {
                max_grade: grade as usize,
                seed,
                corrupt,
                ..VerifyConfig::default()
            };
            let report = run_all(&cfg);
            let body = match common.format {
                Format::Text => report.to_text(),
                Format::Json => output::verify_json(&report),
                Format::Csv => output::verify_csv(&report),
                Format::Latex => return Err(unsupported("verify", common.format)),
            };
            emit(&common, &body)?;
            match report.failures().map(|c| format!("{}.{}", c.suite, c.name)).collect::<Vec<_>>() {
                failed if failed.is_empty() => Ok(()),
                failed => Err(Failure::Invariant(format!("failed: {}", failed.join(", ")))),
            }
        }
        Command::Simulate { spec: path, seed, grade, samples, common } => {
            if common.format == Format::Latex {
                return Err(unsupported("simulate", common.format));
            }
            let spec = SdeSpec::from_toml_file(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let sim = &spec.simulation;
            let seed = seed.unwrap_or(sim.seed);
            let grades: Vec<usize> = match grade {
                Some(g) => (1..=g as usize).collect(),
                None => sim.grades.clone(),
            };
            let samples = samples.unwrap_or(sim.samples);
            let f = spec.observable()?;
            let start = std::time::Instant::now();
            let stats = mc_compare(&spec, &f, &grades, samples, &sim.times, seed)?;
            log::info!("{samples} samples in {:.2?}", start.elapsed());
            let body = match common.format {
                Format::Text => output::simulate_text(&stats),
                Format::Json => output::simulate_json(&stats, &sim.observable, seed),
                Format::Csv => output::simulate_csv(&stats),
                Format::Latex => unreachable!("rejected above"),
            };
            emit(&common, &body)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LEVY_LIE_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVARIANT)
        }
    }
}
