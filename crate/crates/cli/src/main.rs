//! `rootcert`: command-line access to root systems, Weyl groups, torus
//! conjugation, Diophantine approximation, weight sets, divergence
//! certificates, and the SL_n lattice probe.
//!
//! Exit codes: 0 success, 1 usage/parse/domain error, 2 failed verification.

mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rootcert_core::certify::{self, DivergenceCertificate};
use rootcert_core::rational::ScalarInput;
use rootcert_core::{canonical, diophantine, repweights, slprobe, torus, weyl};
use rootcert_core::{Error, Rational, Result};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "rootcert", version, about = "Exact root-system toolkit for divergence certificates")]
struct Cli {
    /// Write output here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Seed for randomized trials.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of randomized trials.
    #[arg(long, global = true, default_value_t = 1000)]
    trials: usize,
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Root-system data.
    #[command(subcommand)]
    Rootsys(RootsysCmd),
    #[command(subcommand)]
    Weyl(WeylCmd),
    #[command(subcommand)]
    Torus(TorusCmd),
    /// Diophantine approximation.
    #[command(subcommand)]
    Dio(DioCmd),
    /// Weight sets of highest-weight modules.
    #[command(subcommand)]
    Rep(RepCmd),
    #[command(subcommand)]
    Certify(CertifyCmd),
    /// SL_n lattice probe.
    #[command(subcommand)]
    Probe(ProbeCmd),
}

#[derive(Args)]
struct DatumArg {
    /// Root-datum JSON file (`-` for stdin).
    #[arg(short, long)]
    input: PathBuf,
}

#[derive(Subcommand)]
enum RootsysCmd {
    Show(DatumArg),
}

#[derive(Subcommand)]
enum WeylCmd {
    /// W-orbit of a weight.
    Orbit {
        #[command(flatten)]
        datum: DatumArg,
        /// Fundamental-weight coordinates, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        weight: String,
    },
    /// Dominant conjugate and the element reaching it.
    Dominate {
        #[command(flatten)]
        datum: DatumArg,
        #[arg(long, allow_hyphen_values = true)]
        weight: String,
    },
    /// Shortest reflection making the character nonzero on `t`.
    Onestep {
        #[command(flatten)]
        datum: DatumArg,
        #[arg(long, allow_hyphen_values = true)]
        weight: String,
        /// Evaluation coordinates of the torus vector.
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
}

#[derive(Subcommand)]
enum TorusCmd {
    /// Anisotropic and split parts of the subspace.
    Decompose(DatumArg),
    /// Conjugate the subspace to an almost split one.
    Splitify(DatumArg),
}

#[derive(Subcommand)]
enum DioCmd {
    Approx {
        /// Comma-separated rationals or decimals.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long = "Q")]
        big_q: u64,
    },
}

#[derive(Subcommand)]
enum RepCmd {
    Saturate {
        #[command(flatten)]
        datum: DatumArg,
        #[arg(long, allow_hyphen_values = true)]
        weight: String,
    },
    /// Positive constants expanding fundamental weights in simple roots.
    Dexp(DatumArg),
}

#[derive(Subcommand)]
enum CertifyCmd {
    Build(DatumArg),
    Verify {
        #[command(flatten)]
        datum: DatumArg,
        #[arg(long)]
        cert: PathBuf,
    },
    Decide(DatumArg),
}

#[derive(Subcommand)]
enum ProbeCmd {
    Run {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        cert: PathBuf,
        #[arg(long, default_value_t = 3.0)]
        tmax: f64,
        #[arg(long, default_value_t = 7)]
        steps: usize,
        /// Ray in evaluation coordinates; defaults to the certified ray.
        #[arg(long, allow_hyphen_values = true)]
        ray: Option<String>,
        /// JSON file holding the base lattice basis; defaults to the identity.
        #[arg(long)]
        basis: Option<PathBuf>,
    },
}

enum Outcome {
    Ok(String),
    /// Verification failed; the text carries the witnesses.
    Failed(String),
}

fn to_json<T: Serialize>(v: &T) -> Result<Outcome> {
    Ok(Outcome::Ok(canonical::to_string(v)?))
}

fn run(cli: &Cli) -> Result<Outcome> {
    let log = |msg: &str| {
        if cli.verbose > 0 {
            eprintln!("{msg}");
        }
    };
    match &cli.command {
        Command::Rootsys(RootsysCmd::Show(d)) => {
            let datum = input::load_datum(&d.input)?;
            let sys = datum.system();
            let order = sys.weyl_order();
            let highest = (0..sys.components().len()).map(|c| sys.highest_root(c)).collect::<Result<Vec<_>>>()?;
            let out = json!({
                "label": sys.label(),
                "rank": sys.rank(),
                "cartan": sys.cartan(),
                "components": sys.components(),
                "positive_roots": sys.positive_roots(),
                "num_roots": sys.num_roots(),
                "highest_roots": highest,
                "rho": sys.rho(),
                "weyl_order": u64::try_from(order).map(|o| json!(o)).unwrap_or_else(|_| json!(order.to_string())),
                "rank_q": datum.split.rank_q(),
                "relative": datum.split.relative().map(|r| json!({
                    "cartan": r.system.cartan(),
                    "simple_lifts": r.simple_lifts,
                    "non_reduced": r.non_reduced,
                })),
            });
            to_json(&out)
        }
        Command::Weyl(cmd) => match cmd {
            WeylCmd::Orbit { datum, weight } => {
                let d = input::load_datum(&datum.input)?;
                let chi = input::weight(weight)?;
                to_json(&json!({ "weight": chi, "orbit": weyl::orbit(d.system(), &chi)? }))
            }
            WeylCmd::Dominate { datum, weight } => {
                let d = input::load_datum(&datum.input)?;
                let chi = input::weight(weight)?;
                let (dom, w) = weyl::dominate(d.system(), &chi)?;
                to_json(&json!({ "weight": chi, "dominant": dom, "word": w.word, "matrix": w.matrix }))
            }
            WeylCmd::Onestep { datum, weight, t } => {
                let d = input::load_datum(&datum.input)?;
                let chi = input::weight(weight)?;
                let t = input::torus_vector(t)?;
                to_json(&weyl::one_step(d.system(), &chi, &t)?)
            }
        },
        Command::Torus(cmd) => match cmd {
            TorusCmd::Decompose(a) => {
                let d = input::load_datum(&a.input)?;
                to_json(&torus::decompose(d.require_subspace()?, &d.split)?)
            }
            TorusCmd::Splitify(a) => {
                let d = input::load_datum(&a.input)?;
                to_json(&torus::make_almost_split(d.require_subspace()?, &d.split)?)
            }
        },
        Command::Dio(DioCmd::Approx { x, big_q }) => {
            let xs: Vec<Rational> = x
                .split(',')
                .map(|s| ScalarInput::Text(s.to_string()).resolve().map(|(v, _)| v))
                .collect::<Result<_>>()?;
            to_json(&diophantine::dirichlet(&xs, *big_q)?)
        }
        Command::Rep(cmd) => match cmd {
            RepCmd::Saturate { datum, weight } => {
                let d = input::load_datum(&datum.input)?;
                let spec = repweights::saturate(d.system(), &input::weight(weight)?)?;
                to_json(&*spec)
            }
            RepCmd::Dexp(a) => {
                let d = input::load_datum(&a.input)?;
                to_json(&repweights::fundamental_expansion_constants(d.system())?)
            }
        },
        Command::Certify(cmd) => match cmd {
            CertifyCmd::Build(a) => {
                let d = input::load_datum(&a.input)?;
                let cert = certify::build_certificate(&d.split, d.require_subspace()?)?;
                log(&format!("certificate: multiplier {}, scale {}", cert.multiplier, cert.dirichlet_scale));
                Ok(Outcome::Ok(cert.to_json()?))
            }
            CertifyCmd::Verify { datum, cert } => {
                let d = input::load_datum(&datum.input)?;
                let text = input::read_text(cert)?;
                let cert: DivergenceCertificate =
                    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("certificate JSON: {e}")))?;
                let a = certify::relative_subspace(&d.split, d.require_subspace()?)?;
                let report = certify::verify_hypotheses(&cert, &a, cli.trials, cli.seed)?;
                log(&format!("{} checks, {} failures", report.checks.len(), report.failures));
                let text = report.to_json()?;
                Ok(if report.passed { Outcome::Ok(text) } else { Outcome::Failed(text) })
            }
            CertifyCmd::Decide(a) => {
                let d = input::load_datum(&a.input)?;
                to_json(&certify::factor_decision(&d.split, d.require_subspace()?)?)
            }
        },
        Command::Probe(ProbeCmd::Run { n, cert, tmax, steps, ray, basis }) => {
            let text = input::read_text(cert)?;
            let cert: DivergenceCertificate =
                serde_json::from_str(&text).map_err(|e| Error::Parse(format!("certificate JSON: {e}")))?;
            if cert.rank + 1 != *n {
                return Err(Error::Parse(format!("certificate has rank {}, not {}", cert.rank, n - 1)));
            }
            let x = match basis {
                Some(p) => input::matrix(&input::read_text(p)?)?,
                None => slprobe::identity(*n),
            };
            let ray = ray.as_deref().map(input::torus_vector).transpose()?;
            let table = slprobe::probe_divergence(&cert, &x, ray.as_ref(), *tmax, *steps)?;
            log(&format!("tracked index {}, monotone {}", table.ell, table.tracked_monotone));
            Ok(Outcome::Ok(table.to_csv()))
        }
    }
}

fn emit(cli: &Cli, text: &str) -> std::io::Result<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(Outcome::Ok(text)) => match emit(&cli, &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Ok(Outcome::Failed(text)) => {
            // witnesses always go to stdout
            print!("{text}");
            if let Some(path) = &cli.output {
                let _ = std::fs::write(path, &text);
            }
            eprintln!("verification failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
