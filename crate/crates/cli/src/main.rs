//! Command-line front end: runs a check, writes its certificate as JSON and
//! exits with 0 (verified), 1 (refuted), 2 (undecided) or 3 (usage error).

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use sha_nondiv::cert::{quartic_certificate, selmer_certificate, Certificate, Timing, Verdict};
use sha_nondiv::config::RunConfig;
use sha_nondiv::cyclic::{local_factor_scan, obstruction_certificate, KummerFamily};
use sha_nondiv::descent::CurveE2;
use sha_nondiv::divisibility::{certify_nondivisibility, classification_certificate, search_certificate};
use sha_nondiv::homspace::QuarticCover;
use sha_nondiv::Error;

const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "sha-nondiv", version, about = "Certificates for non-divisible elements of Sha")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Write the certificate here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (output does not depend on this)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Top rung of the Hensel precision ladder
    #[arg(long, global = true)]
    maxprec: Option<u32>,
    /// Record wall-clock time in the certificate
    #[arg(long, global = true)]
    timing: bool,
    /// Height bound of the naive point search
    #[arg(long, global = true, default_value_t = 10_000)]
    point_height: u64,
    /// Denominator bound of the naive point search
    #[arg(long, global = true, default_value_t = 100)]
    point_denominator: u64,
    /// Search bound for sign-pattern witness primes
    #[arg(long, global = true, default_value_t = 10_000)]
    witness_bound: u64,
    /// Terms of the L-series
    #[arg(long, global = true, default_value_t = 4000)]
    lvalue_terms: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Certify that Sha(E) is not contained in 4H^1(E)
    #[command(name = "verify-4div")]
    Verify4div {
        /// "a b" for y^2 = x(x+a)(x+b), or "e1 e2 e3"
        #[arg(long)]
        curve: String,
    },
    /// Scan y^2 = x(x+a)(x+b) over 1 <= a <= amax, a < b <= bmax
    #[command(name = "search-4div")]
    Search4div {
        #[arg(long)]
        amax: u64,
        #[arg(long)]
        bmax: u64,
    },
    /// Classify the nontrivial classes of Sha(E)[2] by their lifts
    #[command(name = "classify-sha")]
    ClassifySha {
        #[arg(long)]
        curve: String,
    },
    /// 2-Selmer group and its quotient by known points
    Selmer {
        #[arg(long)]
        curve: String,
    },
    /// Everywhere local solvability of y^2 = g(x)
    #[command(name = "quartic-els")]
    QuarticEls {
        /// "[a4,a3,a2,a1,a0]", "(q1)*(q2)" or a polynomial; repeatable
        #[arg(long, required = true)]
        quartic: Vec<String>,
    },
    /// Cyclic covers y^p = c f(x) over Q(zeta_p)
    Cyclic {
        #[command(subcommand)]
        command: CyclicCommand,
    },
    /// Re-run every step of a certificate
    Replay { file: PathBuf },
}

#[derive(Subcommand)]
enum CyclicCommand {
    /// Local linear factors of f at every place up to the bound
    Verify {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 1000)]
        bound: u64,
    },
    /// Obstruction primes r up to the bound
    #[command(name = "search-c")]
    SearchC {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 50)]
        bound: u64,
    },
}

impl Global {
    fn config(&self) -> RunConfig {
        RunConfig {
            point_height: self.point_height,
            point_denominator: self.point_denominator,
            witness_prime_bound: self.witness_bound,
            lvalue_terms: self.lvalue_terms,
            max_precision: self.maxprec,
            threads: self.threads,
            output: self.out.clone(),
            timing: self.timing,
        }
    }
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::InvalidInput(_)
            | Error::Parse(_)
            | Error::DegenerateCurve
            | Error::NonPrime(_)
            | Error::Inadmissible { .. }
            | Error::ExcludedPrime(_)
            | Error::Zero
            | Error::Schema(_),
        ) => EXIT_USAGE,
        Some(Error::InternalPigeonholeViolation(_)) => 1,
        Some(_) => 2,
        None => EXIT_USAGE,
    }
}

fn emit(cert: &Certificate, out: Option<&PathBuf>) -> anyhow::Result<()> {
    let json = cert.to_json()?;
    match out {
        Some(path) => std::fs::write(path, json).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{json}"),
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let cfg = cli.global.config();
    cfg.validate()?;
    if let Some(m) = cfg.max_precision {
        std::env::set_var(sha_nondiv::local::MAXPREC_ENV, m.to_string());
    }
    let start = Instant::now();
    let cert = cfg.install(|| -> anyhow::Result<Option<Certificate>> {
        Ok(Some(match &cli.command {
            Command::Verify4div { curve } => certify_nondivisibility(&CurveE2::parse(curve)?, &cfg)?,
            Command::Search4div { amax, bmax } => search_certificate(*amax, *bmax, &cfg)?,
            Command::ClassifySha { curve } => classification_certificate(&CurveE2::parse(curve)?, &cfg)?,
            Command::Selmer { curve } => selmer_certificate(&CurveE2::parse(curve)?, &cfg)?,
            Command::QuarticEls { quartic } => {
                let qs = quartic.iter().map(|s| QuarticCover::parse(s)).collect::<Result<Vec<_>, _>>()?;
                quartic_certificate(&qs)?
            }
            Command::Cyclic { command } => match command {
                CyclicCommand::Verify { p, q, bound } => local_factor_scan(&KummerFamily::new(*p, *q)?, *bound)?,
                CyclicCommand::SearchC { p, q, bound } => obstruction_certificate(&KummerFamily::new(*p, *q)?, *bound)?,
            },
            Command::Replay { .. } => return Ok(None),
        }))
    })?;
    let Some(mut cert) = cert else {
        let Command::Replay { file } = &cli.command else {
            unreachable!()
        };
        let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
        let cert = Certificate::from_json(&text)?;
        let report = cfg.install(|| cert.replay());
        if report.ok {
            eprintln!("replay: all {} steps reproduce", cert.steps.len());
            return Ok(0);
        }
        eprintln!("replay: steps {:?} do not reproduce", report.failed_steps);
        return Ok(1);
    };
    if cfg.timing {
        cert.timing = Some(Timing {
            millis: start.elapsed().as_millis(),
        });
    }
    emit(&cert, cli.global.out.as_ref())?;
    eprintln!("{}: {:?}", cert.command, cert.verdict);
    Ok(match cert.verdict {
        Verdict::Verified => 0,
        Verdict::Refuted => 1,
        Verdict::Undecided => 2,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
