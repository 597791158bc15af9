use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use modkit::suites::{self, Command, SuiteConfig};
use modkit::{plot, Error};

#[derive(Parser, Debug)]
#[command(name = "modkit", version, about = "Numerical checks for modular theory")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Standard subspaces, modular objects and duality
    Standard,
    /// Antiunitary extensions of finite group representations
    Group,
    /// Finite-dimensional von Neumann algebras
    Vn,
    /// Fermionic and bosonic second quantization
    Fock,
    /// Wedges in Minkowski space
    Wedge,
    /// Discretized ax+b group models
    Affine,
    /// Every suite
    All,
}

#[derive(Args, Debug)]
struct Opts {
    /// Maximal dimension (standard) or spacetime dimension (wedge)
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Random instances per suite (defaults: standard 200, vn 50, fock 20 per d, wedge 500)
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Master seed; trial i draws from an independent stream
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Override absolute residual tolerances
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Affine grid points
    #[arg(long = "grid-n", global = true, default_value_t = 256)]
    grid_n: usize,
    /// Affine grid half-width in log-momentum
    #[arg(long = "grid-l", global = true, default_value_t = 4.0)]
    grid_l: f64,
    /// Largest one-particle dimension for the fermionic checks (at most 5)
    #[arg(long = "fermi-dim", global = true, default_value_t = 4)]
    fermi_dim: usize,
    /// Group preset, e.g. s3, cyclic-x-z2:3, q8-x-z2
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Write the JSON report here
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write an SVG residual plot here
    #[arg(long, global = true)]
    plot: Option<PathBuf>,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Standard => Command::Standard,
            Cmd::Group => Command::Group,
            Cmd::Vn => Command::Vn,
            Cmd::Fock => Command::Fock,
            Cmd::Wedge => Command::Wedge,
            Cmd::Affine => Command::Affine,
            Cmd::All => Command::All,
        }
    }
}

fn is_usage(e: &Error) -> bool {
    matches!(e, Error::InvalidParameters(_) | Error::InvalidGrid(_) | Error::InvalidGroup(_))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let o = cli.opts;
    if o.tol.is_some_and(|t| !(t.is_finite() && t > 0.0)) {
        eprintln!("error: --tol must be positive");
        return ExitCode::from(2);
    }
    let cfg = SuiteConfig {
        dim: o.dim,
        trials: o.trials,
        seed: o.seed,
        tol: o.tol,
        grid_n: o.grid_n,
        grid_l: o.grid_l,
        fermi_dim: o.fermi_dim,
        preset: o.preset,
    };
    let mut report = match suites::run(cli.command.into(), &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if is_usage(&e) { 2 } else { 1 });
        }
    };
    if let Some(path) = &o.plot {
        let title = format!("modkit {} residuals", report.command);
        match plot::emit_plot(&report.series, &title, path) {
            Ok(()) => report.artifacts.push(path.display().to_string()),
            Err(e) => {
                eprintln!("error: plot: {e}");
                return ExitCode::from(1);
            }
        }
    }
    for c in &report.checks {
        println!(
            "{} {:<60} residual {:.3e} tol {:.1e}",
            if c.passed { "ok  " } else { "FAIL" },
            c.name,
            c.residual,
            c.tolerance
        );
    }
    println!("{} checks, {} failed, {:.2}s", report.checks.len(), report.failures().count(), report.wall_time_s);
    if let Some(path) = &o.out {
        if let Err(e) = report.write(path) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
