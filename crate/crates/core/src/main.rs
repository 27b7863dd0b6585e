//! Batch front-end: parse germ or cubic files, run the certification
//! pipelines, and emit certificates or human-readable reports.
//!
//! Exit codes: 0 success/true, 1 mathematical negative, 2 invalid input,
//! 3 internal invariant violation.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lagloci::cubic::{Orbit, ScalarCubic};
use lagloci::error::Error;
use lagloci::germ::Germ;
use lagloci::pipeline::{certify, verify_certificate, LagrangianCertificate};
use lagloci::series::BiSeries;

#[derive(Parser)]
#[command(name = "lagloci", version, about = "Exact Lagrangian-locus certification of surface and null-curve germs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Truncation order override (must be >= 2).
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Write certificate JSON to this path.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Print certificate JSON to standard output.
    #[arg(long, global = true)]
    emit_json: bool,
    /// Process multiple input files with this many parallel workers.
    #[arg(long, default_value_t = 1, global = true)]
    jobs: usize,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Certify a surface germ file as a Lagrangian locus.
    VerifySurface { inputs: Vec<PathBuf> },
    /// Certify a curve germ file; fails on non-null curves.
    VerifyCurve { inputs: Vec<PathBuf> },
    /// Report whether a curve germ is a null curve.
    NullCheck { inputs: Vec<PathBuf> },
    /// Classify a binary cubic file into its GL2 orbit.
    ClassifyCubic { inputs: Vec<PathBuf> },
    /// Print the Pluecker image chi_hat of a binary cubic file.
    Chi { inputs: Vec<PathBuf> },
    /// Re-verify a previously emitted certificate file.
    VerifyCert { inputs: Vec<PathBuf> },
}

/// Worst outcome wins when fanning out over several inputs.
fn worst(a: u8, b: u8) -> u8 {
    a.max(b)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("{}: {}", path.display(), e))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {}", path.display(), e))
}

fn classify_error(err: &Error, surface: bool) -> u8 {
    match err {
        Error::NotNullCurve | Error::NotImmersed => 1,
        Error::Parse(_) | Error::InvalidGerm(_) => 2,
        Error::VerificationFailed(_) if surface => 3,
        _ if surface => 3,
        _ => 1,
    }
}

fn emit(cert: &LagrangianCertificate, cli: &Cli) -> Result<(), String> {
    let json = serde_json::to_string_pretty(cert).map_err(|e| e.to_string())?;
    if let Some(path) = &cli.output {
        fs::write(path, &json).map_err(|e| format!("{}: {}", path.display(), e))?;
    }
    if cli.emit_json {
        println!("{json}");
    }
    Ok(())
}

fn lowest_term(s: &BiSeries) -> Option<(usize, String)> {
    s.terms()
        .filter(|(_, c)| !c.is_zero())
        .min_by_key(|(&(i, j), _)| (i + j, i))
        .map(|(&(i, j), c)| (i + j, format!("{c}")))
}

fn run_verify(path: &PathBuf, cli: &Cli, expect_surface: bool) -> u8 {
    let germ: Germ = match read_json(path) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let matches_kind = matches!(
        (&germ, expect_surface),
        (Germ::Surface(_), true) | (Germ::Curve(_), false)
    );
    if !matches_kind {
        eprintln!("error: {}: germ kind does not match the command", path.display());
        return 2;
    }
    let germ = match (&germ, cli.order) {
        (Germ::Surface(g), Some(n)) => Germ::Surface(g.truncate(n.min(g.order))),
        (Germ::Curve(g), Some(n)) => Germ::Curve(g.truncate(n.min(g.order))),
        _ => germ,
    };
    match certify(&germ) {
        Ok(cert) => {
            let report = verify_certificate(&cert);
            for (name, ok) in &report.checks {
                println!("{}: {}", name, if *ok { "pass" } else { "FAIL" });
            }
            println!("certified_order: {}", cert.certified_order);
            if cert.psi_degeneracy_warning {
                println!("warning: chi_hat of psi vanishes at the origin to positive order");
            }
            if !report.passed() {
                eprintln!("error: internal: fresh certificate failed verification");
                return 3;
            }
            if let Err(e) = emit(&cert, cli) {
                eprintln!("error: {e}");
                return 2;
            }
            0
        }
        Err(e) => {
            eprintln!("error: {}: {}", path.display(), e);
            classify_error(&e, expect_surface)
        }
    }
}

fn run_null_check(path: &PathBuf) -> u8 {
    let germ: Germ = match read_json(path) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let curve = match germ {
        Germ::Curve(c) => c,
        Germ::Surface(_) => {
            eprintln!("error: {}: null-check expects a curve germ", path.display());
            return 2;
        }
    };
    match curve.is_null_curve() {
        Ok(true) => {
            println!("null curve: discriminant of the tangent quadratic vanishes identically");
            0
        }
        Ok(false) => {
            let [xx, xy, yy] = curve.tangent_quadratic();
            let disc = &(&xy * &xy)
                - &(&BiSeries::constant(lagloci::exact::GaussianRational::from_int(4))
                    * &(&xx * &yy));
            match lowest_term(&disc) {
                Some((ord, val)) => println!("discriminant = {val} at order {ord}"),
                None => println!("discriminant nonzero beyond the stored order"),
            }
            1
        }
        Err(e) => {
            eprintln!("error: {}: {}", path.display(), e);
            1
        }
    }
}

fn run_classify(path: &PathBuf, chi_only: bool) -> u8 {
    let cubic: ScalarCubic = match read_json(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let (p, q, r) = cubic.chi_hat();
    let chi = format!("chi_hat = ({}, {}, {})", p, q, r);
    if chi_only {
        println!("{chi}");
        return 0;
    }
    match cubic.classify_orbit() {
        Ok(orbit) => {
            let name = match orbit {
                Orbit::SmoothOrbit => "SmoothOrbit",
                Orbit::NodalOrbit => "NodalOrbit",
                Orbit::Degenerate => "Degenerate",
            };
            let disc = cubic.cubic_discriminant();
            println!("{name}, {chi}");
            println!(
                "discriminant = {}",
                if disc.is_zero() { "0".to_string() } else { format!("{disc}") }
            );
            0
        }
        Err(e) => {
            eprintln!("error: {}: {}", path.display(), e);
            2
        }
    }
}

fn run_verify_cert(path: &PathBuf) -> u8 {
    let cert: LagrangianCertificate = match read_json(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let report = verify_certificate(&cert);
    for (name, ok) in &report.checks {
        println!("{}: {}", name, if *ok { "pass" } else { "FAIL" });
    }
    if report.passed() {
        0
    } else {
        1
    }
}

fn fan_out(inputs: &[PathBuf], jobs: usize, run: impl Fn(&PathBuf) -> u8 + Sync) -> u8 {
    if inputs.is_empty() {
        eprintln!("error: no input files given");
        return 2;
    }
    if jobs <= 1 || inputs.len() == 1 {
        return inputs.iter().map(&run).fold(0, worst);
    }
    std::thread::scope(|scope| {
        let chunk = inputs.len().div_ceil(jobs);
        let handles: Vec<_> = inputs
            .chunks(chunk)
            .map(|slice| scope.spawn(|| slice.iter().map(&run).fold(0, worst)))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap_or(3)).fold(0, worst)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.order {
        if n < 2 {
            eprintln!("error: --order must be at least 2");
            return ExitCode::from(2);
        }
    }
    let code = match &cli.command {
        Command::VerifySurface { inputs } => {
            fan_out(inputs, cli.jobs, |p| run_verify(p, &cli, true))
        }
        Command::VerifyCurve { inputs } => {
            fan_out(inputs, cli.jobs, |p| run_verify(p, &cli, false))
        }
        Command::NullCheck { inputs } => fan_out(inputs, cli.jobs, run_null_check),
        Command::ClassifyCubic { inputs } => {
            fan_out(inputs, cli.jobs, |p| run_classify(p, false))
        }
        Command::Chi { inputs } => fan_out(inputs, cli.jobs, |p| run_classify(p, true)),
        Command::VerifyCert { inputs } => fan_out(inputs, cli.jobs, run_verify_cert),
    };
    ExitCode::from(code)
}
