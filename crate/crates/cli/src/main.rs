use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hypercrystal::lattice::{check_ccr, LatticeWindow};
use hypercrystal::run::{
    dump_vacuum, render_ccr, render_checks, render_dump, render_full, report_all, run_checks, Format, ModeSelection, RunConfig,
    DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_WINDOW,
};
use hypercrystal::symmetry::CheckKind;
use hypercrystal::vacua::VacuumTag;
use hypercrystal::{Error, Tower};

/// Exact verification of vacuum-state symmetry claims.
#[derive(Parser, Debug)]
#[command(name = "hypercrystal", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check [∂_μ, x^λ] = δ on every interior ket of the window.
    VerifyCcr(Common),
    /// Build vacua and run invariance checks.
    Check(Common),
    /// Print the canonical normal form of one vacuum.
    DumpVacuum(Common),
    /// CCR, γ identities, statistics, number operators, the S₄ report and all checks.
    ReportAll(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Lattice window half-width N.
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    window: u32,
    /// Scalar tower: q, qi or qi-sqrt3.
    #[arg(long, default_value = "qi-sqrt3")]
    tower: Tower,
    /// Vacua to build: dipole, dalembertian, dirac, left.
    #[arg(long, num_args = 1..)]
    vacuum: Vec<VacuumTag>,
    /// Checks to run: poincare, shear-dilation, discrete, sl4, parity.
    #[arg(long = "check", num_args = 1..)]
    checks: Vec<CheckKind>,
    /// abstract, lattice or both.
    #[arg(long, default_value = "both")]
    mode: ModeSelection,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Number of pseudorandom finite SL(4) samples.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// text or structured (JSON).
    #[arg(long, default_value = "text")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> RunConfig {
        let d = RunConfig::default();
        RunConfig {
            window: self.window,
            tower: self.tower,
            vacua: if self.vacuum.is_empty() { d.vacua } else { self.vacuum.clone() },
            checks: if self.checks.is_empty() { d.checks } else { self.checks.clone() },
            seed: self.seed,
            mode: self.mode,
            samples: self.samples,
            format: self.format,
        }
    }
}

enum Failure {
    Contradiction,
    Config(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn emit(common: &Common, text: &str) -> Result<(), Failure> {
    match &common.out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verdict(agree: bool) -> Result<(), Failure> {
    if agree {
        Ok(())
    } else {
        Err(Failure::Contradiction)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::VerifyCcr(c) => {
            let report = check_ccr(LatticeWindow::new(c.window)?)?;
            emit(&c, &render_ccr(&report, c.format))?;
            verdict(report.passed())
        }
        Command::Check(c) => {
            let config = c.config().validated()?;
            let bundle = run_checks(&config)?;
            emit(&c, &render_checks(&config, &bundle, c.format))?;
            verdict(bundle.agree)
        }
        Command::DumpVacuum(c) => {
            let config = c.config();
            let [tag] = config.vacua[..] else {
                return Err(Failure::Config("dump-vacuum needs exactly one --vacuum".into()));
            };
            let dump = dump_vacuum(&config, tag)?;
            emit(&c, &render_dump(&dump, c.format))
        }
        Command::ReportAll(c) => {
            let config = c.config().validated()?;
            let report = report_all(&config)?;
            emit(&c, &render_full(&config, &report, c.format))?;
            verdict(report.agree)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Contradiction) => {
            eprintln!("hypercrystal: results contradict the claimed outcomes");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("hypercrystal: {msg}");
            ExitCode::from(2)
        }
    }
}
