use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use eprb::bounds::Gain;
use eprb::hilbert::DensityMatrix;
use eprb::protocol::{self, Protocol};
use eprb::report::{self, Invocation, Report};
use eprb::tolerance::Tolerances;
use eprb::{Error, Result};

#[derive(Parser)]
#[command(name = "eprb", version, about = "Two-party quantum protocol simulator and attack toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Structured)]
    format: Format,
    /// Seed for randomized audits.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long = "tolerance-profile", global = true, default_value = "default")]
    tolerance_profile: String,
    /// Record per-round snapshots of honest runs.
    #[arg(long, global = true)]
    snapshots: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Structured,
    Text,
}

#[derive(Args, Default)]
struct Source {
    /// Builtin protocol name.
    #[arg(long, conflicts_with = "protocol")]
    builtin: Option<String>,
    /// Builtin parameter `key=value` (repeatable).
    #[arg(long = "param", value_name = "K=V")]
    params: Vec<String>,
    /// Protocol document.
    #[arg(long)]
    protocol: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form, purification and measurement fidelities of two states.
    Fidelity {
        #[arg(long, requires = "rho1")]
        rho0: Option<PathBuf>,
        #[arg(long, requires = "rho0")]
        rho1: Option<PathBuf>,
        #[command(flatten)]
        source: Source,
        /// Include the measurement and purification witnesses.
        #[arg(long)]
        witnesses: bool,
        /// Random measurements and purifications to test against the witnesses.
        #[arg(long, default_value_t = 0)]
        audit: usize,
    },
    /// Coherent bit-flip attack on a commitment protocol.
    Attack {
        #[command(flatten)]
        source: Source,
        /// Also run theta-commit over a grid of angles in [0, π/2].
        #[arg(long)]
        sweep: bool,
        #[arg(long, default_value_t = 5)]
        sweep_points: usize,
    },
    /// Ideal-toss check and backward induction.
    Cointoss {
        #[command(flatten)]
        source: Source,
    },
    /// Minimum rounds for a given per-round imbalance ε.
    Bounds {
        /// Imbalance in bits (repeatable; the first one drives the ledger).
        #[arg(long, required = true, allow_negative_numbers = true)]
        epsilon: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        target: f64,
        /// JSON list of {"actor": "A"|"B", "bits": x}.
        #[arg(long)]
        schedule: Option<PathBuf>,
    },
    /// Honest execution.
    Run {
        #[command(flatten)]
        source: Source,
    },
    /// Write a builtin protocol as a document.
    Export {
        #[command(flatten)]
        source: Source,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, String>> {
    raw.iter()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::BadParams(format!("`{kv}` is not key=value")))
        })
        .collect()
}

/// Loads the protocol and the digest of its document.
fn load(source: &Source) -> Result<(Protocol, String)> {
    match (&source.builtin, &source.protocol) {
        (Some(name), None) => {
            let p = protocol::builtin(name, &parse_params(&source.params)?)?;
            let d = report::protocol_digest(&p)?;
            Ok((p, d))
        }
        (None, Some(path)) => {
            if !source.params.is_empty() {
                return Err(Error::BadParams("--param only applies to --builtin".into()));
            }
            let text = read(path)?;
            Ok((protocol::load_protocol(&text)?, report::digest(text.as_bytes())))
        }
        _ => Err(Error::BadParams("give exactly one of --builtin or --protocol".into())),
    }
}

fn render<T: Serialize>(r: &Report<T>, format: Format) -> Result<String> {
    match format {
        Format::Structured => r.to_json(),
        Format::Text => r.to_text(),
    }
}

fn execute(cli: Cli) -> Result<String> {
    let tolerances = Tolerances::by_name(&cli.common.tolerance_profile).ok_or_else(|| {
        Error::validation("--tolerance-profile", format!("unknown profile `{}`", cli.common.tolerance_profile))
    })?;
    let inv = Invocation {
        command: std::env::args().skip(1).collect(),
        tolerances,
        seed: cli.common.seed,
        snapshots: cli.common.snapshots,
    };
    let format = cli.common.format;
    match cli.command {
        Command::Fidelity {
            rho0,
            rho1,
            source,
            witnesses,
            audit,
        } => {
            let (r0, r1, digest) = match (rho0, rho1) {
                (Some(a), Some(b)) => {
                    let (ta, tb) = (read(&a)?, read(&b)?);
                    let digest = report::digest(format!("{ta}\0{tb}").as_bytes());
                    let r0 = report::parse_density(&ta, "X")?;
                    let r1 = report::parse_density(&tb, "X")?;
                    if r0.dim() != r1.dim() {
                        return Err(Error::DimensionMismatch(format!("--rho0 is {}x{0}, --rho1 is {}x{1}", r0.dim(), r1.dim())));
                    }
                    // Labels only name the system; compare both on the first one.
                    let r1 = DensityMatrix::new(r0.layout().clone(), r1.matrix().clone())?;
                    (r0, r1, digest)
                }
                _ => {
                    let (p, digest) = load(&source)?;
                    let (r0, r1) = report::protocol_marginals(&p.into_commitment()?)?;
                    (r0, r1, digest)
                }
            };
            render(&report::fidelity_report(&inv, &r0, &r1, digest, witnesses, audit)?, format)
        }
        Command::Attack {
            source,
            sweep,
            sweep_points,
        } => {
            let (p, digest) = if source.builtin.is_none() && source.protocol.is_none() && sweep {
                load(&Source {
                    builtin: Some("theta-commit".into()),
                    ..Source::default()
                })?
            } else {
                load(&source)?
            };
            let grid: Vec<f64> = match sweep_points {
                0 => Vec::new(),
                1 => vec![0.0],
                n => (0..n).map(|k| FRAC_PI_2 * k as f64 / (n - 1) as f64).collect(),
            };
            let sweep = sweep.then_some(grid.as_slice());
            render(&report::attack_report(&inv, &p.into_commitment()?, digest, sweep)?, format)
        }
        Command::Cointoss { source } => {
            let (p, digest) = load(&source)?;
            render(&report::cointoss_report(&inv, &p.into_cointoss()?, digest)?, format)
        }
        Command::Bounds {
            epsilon,
            target,
            schedule,
        } => {
            let gains = match &schedule {
                Some(path) => {
                    let text = read(path)?;
                    let gains: Vec<Gain> = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
                    Some((gains, report::digest(text.as_bytes())))
                }
                None => None,
            };
            let schedule = gains.as_ref().map(|(g, d)| (g.as_slice(), d.clone()));
            render(&report::bounds_report(&inv, &epsilon, target, schedule)?, format)
        }
        Command::Run { source } => {
            let (p, digest) = load(&source)?;
            render(&report::run_report(&inv, &p, digest)?, format)
        }
        Command::Export { source } => {
            let (p, _) = load(&source)?;
            protocol::serialize_protocol(&p)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.common.out.clone();
    let result = execute(cli).and_then(|text| match &out {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical_failure() { 3 } else { 2 })
        }
    }
}
