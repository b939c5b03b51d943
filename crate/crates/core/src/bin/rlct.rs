use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rlct::suite::{self, ModuleKind, SuiteConfig};
use rlct::{CenterKind, Error, Family};
use serde_json::Value;

#[derive(Parser)]
#[command(name = "rlct", version, about = "Restricted Lie algebras of Cartan type over F_p")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 3)]
    p: u32,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Allow parameters outside the tested envelope.
    #[arg(long)]
    force: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build W, S, H, K, Kpp or P and print its basis.
    Construct {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "toral")]
        center: CenterKind,
        #[command(flatten)]
        common: Common,
    },
    /// Run a named suite of checks.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        family: Option<Family>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value = "toral")]
        center: CenterKind,
        #[arg(long, default_value = "adjoint")]
        module: ModuleKind,
        #[command(flatten)]
        common: Common,
    },
    /// Weight decomposition under the standard torus.
    Weights {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "adjoint")]
        module: ModuleKind,
        #[command(flatten)]
        common: Common,
    },
    /// Substitution automorphisms normalizing the standard torus of W(n).
    Weyl {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        exhaustive: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Dickson invariants as coefficients of a product of linear forms.
    Dickson {
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Characteristic polynomial and restriction identities.
    Invariants {
        #[arg(long)]
        family: Option<Family>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn usage(e: &Error) -> bool {
    matches!(
        e,
        Error::EnvelopeError(_)
            | Error::UnsupportedKind(_)
            | Error::ParityError(_)
            | Error::InvalidModulus(_)
            | Error::DimensionMismatch(_)
    )
}

fn emit(v: &Value, out: &Option<PathBuf>) -> Result<(), String> {
    let s = suite::to_pretty(v);
    match out {
        Some(path) => std::fs::write(path, s).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{s}");
            Ok(())
        }
    }
}

fn envelope(common: &Common, family: Option<Family>, n: Option<usize>) -> rlct::Result<rlct::PrimeField> {
    let mut cfg = SuiteConfig::new("construct", common.p);
    cfg.family = family;
    cfg.n = n;
    cfg.force = common.force;
    cfg.check_envelope()?;
    cfg.field()
}

fn run(cli: Cli) -> rlct::Result<(Value, Option<PathBuf>, i32)> {
    match cli.cmd {
        Cmd::Construct { family, n, center, common } => {
            let f = envelope(&common, Some(family), Some(n))?;
            Ok((suite::construct_cmd(f, family, n, center)?, common.out, 0))
        }
        Cmd::Weights { family, n, module, common } => {
            let f = envelope(&common, Some(family), Some(n))?;
            Ok((suite::weights_cmd(f, family, n, module)?, common.out, 0))
        }
        Cmd::Weyl { n, exhaustive, common } => {
            let f = envelope(&common, None, Some(n))?;
            Ok((suite::weyl_cmd(f, n, exhaustive)?, common.out, 0))
        }
        Cmd::Dickson { m, common } => {
            let f = envelope(&common, None, None)?;
            Ok((suite::dickson_cmd(f, m)?, common.out, 0))
        }
        Cmd::Verify { suite: name, family, n, r, seed, samples, exhaustive, center, module, common } => {
            let cfg = SuiteConfig {
                suite: name,
                p: common.p,
                n,
                r,
                family,
                seed,
                samples,
                force: common.force,
                exhaustive,
                center,
                module,
            };
            report(cfg, common.out)
        }
        Cmd::Invariants { family, n, seed, samples, common } => {
            let mut cfg = SuiteConfig::new("invariants", common.p);
            cfg.family = family;
            cfg.n = n;
            cfg.seed = seed;
            cfg.samples = samples;
            cfg.force = common.force;
            report(cfg, common.out)
        }
    }
}

fn report(cfg: SuiteConfig, out: Option<PathBuf>) -> rlct::Result<(Value, Option<PathBuf>, i32)> {
    let checks = suite::run_suite(&cfg)?;
    let code = suite::exit_code(&checks);
    Ok((suite::report_value(&cfg, &checks), out, code))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((v, out, code)) => match emit(&v, &out) {
            Ok(()) => ExitCode::from(code as u8),
            Err(e) => {
                eprintln!("rlct: {e}");
                ExitCode::from(1)
            }
        },
        Err(e) => {
            eprintln!("rlct: {e}");
            ExitCode::from(if usage(&e) { 2 } else { 1 })
        }
    }
}
