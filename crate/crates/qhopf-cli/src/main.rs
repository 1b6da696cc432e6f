//! The `qhopf` command line: builds the algebras, runs verification suites
//! and cohomology computations, and prints a JSON report.
//!
//! Exit codes: 0 when every check passes, 1 on a failed check, 2 on a usage
//! or parameter error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qhopf::cli::{self, BuildKind, CohomologyArgs, CohomologyMode, Report, RunConfig, Target, UsageError};

#[derive(Parser)]
#[command(name = "qhopf", version, about = "Exact verification of the quasi-Hopf algebras A(n,s,q), M(n,s,q), D(A) and Q_s u_q(sl2)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = RunConfig::default().seed)]
    seed: u64,
    /// Largest dimension tabulated; larger objects are refused or sampled.
    #[arg(long, global = true, default_value_t = RunConfig::default().max_dim)]
    max_dim: usize,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Record wall times; the report is then no longer byte-reproducible.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Construct an algebra, run its self-checks and dump it.
    Build {
        #[arg(value_enum)]
        algebra: Algebra,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        s: u32,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum)]
        target: VerifyTarget,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        s: u32,
    },
    /// Build the trivializing twist of D(A(n,1,q)) for odd n.
    Twist {
        #[arg(long)]
        n: u32,
    },
    /// Cocycle classes, coboundary decisions and the restricted reassociator.
    Cohomology {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        s: Option<u32>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        a: Option<i64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Algebra {
    Ansq,
    Mnsq,
    Double,
    Qusl2,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyTarget {
    Axioms,
    Lemma33,
    Prop34,
    Prop35,
    Thm31,
    Duality,
    Majid,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Class,
    Coboundary,
    Restrict,
}

fn run(cli: &Cli, cfg: &RunConfig) -> Result<Report, UsageError> {
    match &cli.command {
        Command::Build { algebra, n, s } => {
            let kind = match algebra {
                Algebra::Ansq => BuildKind::Ansq,
                Algebra::Mnsq => BuildKind::Mnsq,
                Algebra::Double => BuildKind::Double,
                Algebra::Qusl2 => BuildKind::Qusl2,
            };
            cli::cmd_build(kind, *n, *s, cfg)
        }
        Command::Verify { target, n, s } => {
            let t = match target {
                VerifyTarget::Axioms => Target::Axioms,
                VerifyTarget::Lemma33 => Target::Lemma33,
                VerifyTarget::Prop34 => Target::Prop34,
                VerifyTarget::Prop35 => Target::Prop35,
                VerifyTarget::Thm31 => Target::Thm31,
                VerifyTarget::Duality => Target::Duality,
                VerifyTarget::Majid => Target::Majid,
            };
            cli::cmd_verify(t, *n, *s, cfg)
        }
        Command::Twist { n } => cli::cmd_twist(*n, cfg),
        Command::Cohomology { mode, n, s, m, a } => {
            let mode = match mode {
                Mode::Class => CohomologyMode::Class,
                Mode::Coboundary => CohomologyMode::Coboundary,
                Mode::Restrict => CohomologyMode::Restrict,
            };
            cli::cmd_cohomology(mode, &CohomologyArgs { n: *n, s: *s, m: *m, a: *a }, cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if j == 0 || rayon::ThreadPoolBuilder::new().num_threads(j).build_global().is_err() {
            eprintln!("error: invalid --jobs {j}");
            return ExitCode::from(2);
        }
    }
    let cfg = RunConfig { seed: cli.seed, max_dim: cli.max_dim, timings: cli.timings };
    let report = match run(&cli, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = serde_json::to_string_pretty(&report.to_json()).expect("report serializes") + "\n";
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(report.exit_code() as u8)
}
