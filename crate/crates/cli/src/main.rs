//! `orbitspace`: command line front end.
//!
//! Exit status is 0 on success, 1 on a domain error (the error name is printed
//! on stderr) and 2 on a usage error.

mod commands;
mod source;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use source::SourceArgs;

#[derive(Parser, Debug)]
#[command(
    name = "orbitspace",
    version,
    about = "Exact P-matrices and orbit-space strata"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for grid and weight scans; output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrity basis checks.
    #[command(subcommand)]
    Basis(BasisCmd),
    /// P-matrix construction and transformation.
    #[command(subcommand)]
    Pmatrix(PmatrixCmd),
    /// Boundary equation and complete factor.
    #[command(subcommand)]
    Boundary(BoundaryCmd),
    /// Stratification of the orbit space.
    #[command(subcommand)]
    Strata(StrataCmd),
    /// Table of allowable P-matrices for q = 2, 3, 4.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// Inverse search for allowable P-matrices.
    #[command(subcommand)]
    Search(SearchCmd),
}

#[derive(Subcommand, Debug)]
enum BasisCmd {
    /// Validate a basis and report the checks run.
    Verify(SourceArgs),
}

#[derive(Subcommand, Debug)]
enum PmatrixCmd {
    /// Print the P-matrix in serialization format.
    Build(SourceArgs),
    /// Apply an integrity basis transformation `phi_1; ...; phi_q`.
    Ibt {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long = "map", value_name = "PHI", allow_hyphen_values = true)]
        map: String,
    },
}

#[derive(Args, Debug)]
struct FactorArg {
    /// Polynomial in p1..pq; defaults to det P.
    #[arg(long, allow_hyphen_values = true)]
    factor: Option<String>,
}

#[derive(Subcommand, Debug)]
enum BoundaryCmd {
    /// Components of the boundary residual and the activity of a factor.
    Residual {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        factor: FactorArg,
    },
    /// Strictly active divisors of det P at one weight or at every weight.
    FindActive {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, conflicts_with = "scan", required_unless_present = "scan")]
        weight: Option<u32>,
        #[arg(long)]
        scan: bool,
    },
    /// Split det P = A * B with A the complete factor.
    Split(SourceArgs),
    /// Initial conditions at p0; the factor defaults to the complete factor.
    InitialConditions {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        factor: FactorArg,
    },
}

#[derive(Subcommand, Debug)]
enum StrataCmd {
    /// Stratum of one point of R^q.
    Classify {
        #[command(flatten)]
        source: SourceArgs,
        /// Comma-separated rationals `p1,...,pq`.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Grid over the section p_q = 1.
    Section {
        #[command(flatten)]
        source: SourceArgs,
        /// `lo:hi` per axis p1..p_{q-1}, comma-separated; one range is reused for all axes.
        #[arg(long = "box", value_name = "LO:HI", allow_hyphen_values = true)]
        bounds: String,
        #[arg(long)]
        resolution: usize,
        /// CSV output file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON summary output file.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogCmd {
    /// Degrees and w(A) of a class.
    Degrees {
        #[arg(long = "class")]
        label: String,
        /// Comma-separated parameters j1,j2,...
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long, default_value_t = 1)]
        s: u64,
    },
    /// Every class reproducing the given degrees.
    Match {
        #[arg(long)]
        q: usize,
        /// Comma-separated degrees, last one 2.
        #[arg(long)]
        degrees: String,
    },
}

#[derive(Subcommand, Debug)]
enum SearchCmd {
    /// Allowable 2x2 P-matrices with the given d1 (a list `2,3` or a range `2..8`).
    Q2 {
        #[arg(long)]
        d1: String,
    },
}

/// Failure of a command: usage problems exit with 2, domain errors with 1.
pub enum Failure {
    Usage(String),
    Domain(orbitspace::Error),
    /// A report was printed but records a failed check.
    Report(String, orbitspace::Error),
}

impl From<orbitspace::Error> for Failure {
    fn from(e: orbitspace::Error) -> Self {
        Failure::Domain(e)
    }
}

fn dispatch(cli: &Cli) -> Result<String, Failure> {
    let f = cli.format;
    if f == Format::Csv && !matches!(cli.command, Command::Strata(StrataCmd::Section { .. })) {
        return Err(Failure::Usage(
            "--format csv applies only to `strata section`".into(),
        ));
    }
    match &cli.command {
        Command::Basis(BasisCmd::Verify(src)) => commands::basis_verify(src, f),
        Command::Pmatrix(PmatrixCmd::Build(src)) => commands::pmatrix_build(src, f),
        Command::Pmatrix(PmatrixCmd::Ibt { source, map }) => commands::pmatrix_ibt(source, map, f),
        Command::Boundary(BoundaryCmd::Residual { source, factor }) => {
            commands::boundary_residual(source, factor.factor.as_deref(), f)
        }
        Command::Boundary(BoundaryCmd::FindActive { source, weight, .. }) => {
            commands::find_active(source, *weight, f)
        }
        Command::Boundary(BoundaryCmd::Split(src)) => commands::split(src, f),
        Command::Boundary(BoundaryCmd::InitialConditions { source, factor }) => {
            commands::initial_conditions(source, factor.factor.as_deref(), f)
        }
        Command::Strata(StrataCmd::Classify { source, point }) => {
            commands::classify(source, point, f)
        }
        Command::Strata(StrataCmd::Section {
            source,
            bounds,
            resolution,
            out,
            summary,
        }) => commands::section(
            source,
            bounds,
            *resolution,
            out.as_deref(),
            summary.as_deref(),
            f,
        ),
        Command::Catalog(CatalogCmd::Degrees { label, params, s }) => {
            commands::catalog_degrees(label, params, *s, f)
        }
        Command::Catalog(CatalogCmd::Match { q, degrees }) => {
            commands::catalog_match(*q, degrees, f)
        }
        Command::Search(SearchCmd::Q2 { d1 }) => commands::search_q2(d1, f),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("{}: {e}", e.name());
            ExitCode::from(1)
        }
        Err(Failure::Report(out, e)) => {
            print!("{out}");
            eprintln!("{}: {e}", e.name());
            ExitCode::from(1)
        }
    }
}
