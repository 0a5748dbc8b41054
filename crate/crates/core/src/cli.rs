//! Command-line front end. Every subcommand prints a human-readable summary,
//! optionally writes a JSON artifact with `--out`, and exits with status 0
//! exactly when every certificate it produced or read was verified.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::classify::{classify, LadderRung, PrimeSetDescriptor, RungEvidence};
use crate::construct::{
    factor_block_unitriangular, km_pipeline, ladder_chain, order_n_shear, sum_certificate,
    zaushko_commutator, WitnessChain,
};
use crate::filters::{centered_check, counterexample_demo};
use crate::gen::DEFAULT_SEED;
use crate::io::{parse_aut, parse_certificate, serialize_certificate, to_json};
use crate::linalg::IntMatrix;
use crate::model::{Certificate, Environment, GroupWord, RepAut, Verification, FORMAT_VERSION};

#[derive(Debug, Parser)]
#[command(
    name = "freeaut",
    version,
    about = "Automorphisms of the free abelian group of countable rank"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct OutArg {
    /// Write the JSON artifact here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Congruence level, Λ-levels, ν, generator status and ladder rung of an automorphism.
    Classify {
        aut: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Three conjugates of τ^m whose product is x ↦ x + m·Zy.
    Factor {
        #[arg(long)]
        m: i64,
        /// Z as a file or an inline matrix (JSON rows or the text format).
        matrix: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// The order-n shear λ, its conjugator σ and an order certificate.
    Shear {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: i64,
        #[command(flatten)]
        out: OutArg,
    },
    /// The commutator word for y ↦ y + x - ρx.
    Zaushko {
        /// ρ_X as a file or an inline matrix.
        matrix: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Splits a matrix into three automorphisms with cancelling tails.
    Wans {
        matrix: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Certified chain from an automorphism down to a τ^m-type element.
    Pipeline {
        aut: PathBuf,
        /// Coprime pair used for the final combination.
        #[arg(long, value_parser = parse_pair, default_value = "2,3")]
        coprime: (usize, usize),
        /// Normalize to this level first (as the ladder does).
        #[arg(long)]
        level: Option<i64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Rechecks a certificate or a witness chain.
    Verify {
        file: PathBuf,
        /// Also check the claim on this window.
        #[arg(long)]
        window: Option<usize>,
    },
    /// Prime-set filters: centered families and the counterexample demo.
    Filters {
        #[command(subcommand)]
        command: FilterCommand,
    },
    /// Runs the invariant suite and prints a table.
    Selftest {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum FilterCommand {
    /// Checks that every small subfamily of descriptors has a common prime.
    Centered {
        descriptors: PathBuf,
        /// Largest subfamily size (defaults to the whole family).
        #[arg(long)]
        size: Option<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Memberships behind the countable-cofinality counterexample.
    DemoCounterexample {
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        #[arg(long)]
        probe: u64,
        #[command(flatten)]
        out: OutArg,
    },
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected n1,n2, got `{s}`"))?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("`{x}`: {e}"));
    Ok((p(a)?, p(b)?))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_out(out: &OutArg, text: &str) -> Result<()> {
    if let Some(path) = &out.out {
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// Reads a matrix from a file, or from the argument itself, as JSON rows or
/// in the `rows cols` text format.
pub fn load_matrix(arg: &str) -> Result<IntMatrix> {
    let text = if Path::new(arg).is_file() {
        read(Path::new(arg))?
    } else {
        arg.to_string()
    };
    if let Ok(m) = serde_json::from_str::<IntMatrix>(&text) {
        return Ok(m);
    }
    IntMatrix::parse_text(&text).map_err(|e| anyhow!("cannot read a matrix from `{arg}`: {e}"))
}

fn report(v: &Verification) {
    for line in &v.report {
        println!("  {line}");
    }
}

fn certificate_status(name: &str, cert: &Certificate) -> Result<bool> {
    let v = cert.verify()?;
    println!("{name}: {}", if v.holds { "verified" } else { "FAILED" });
    report(&v);
    Ok(v.holds)
}

fn chain_status(chain: &WitnessChain) -> Result<bool> {
    let v = chain.verify()?;
    println!(
        "chain to level {} ({} steps): {}",
        chain.level,
        chain.steps.len(),
        if v.holds { "verified" } else { "FAILED" }
    );
    report(&v);
    Ok(v.holds)
}

/// Parses arguments, runs the command and returns the exit status.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

/// `Ok(true)` when all certificates verified.
pub fn run(command: Command) -> Result<bool> {
    match command {
        Command::Classify { aut, out } => cmd_classify(&aut, &out),
        Command::Factor { m, matrix, out } => {
            let z = load_matrix(&matrix)?;
            let w = factor_block_unitriangular(m, &z)?;
            println!("word: {}", serde_json::to_string(&w.word)?);
            let ok = certificate_status("three-conjugate identity", &w.certificate)?;
            write_out(&out, &serialize_certificate(&w.certificate))?;
            Ok(ok)
        }
        Command::Shear { n, m, out } => {
            let t = order_n_shear(n, m)?;
            println!("lambda =\n{}", t.lambda);
            println!("sigma =\n{}", t.sigma);
            let mut env = Environment::new();
            env.insert("lambda".into(), RepAut::uniform(t.lambda.clone())?);
            let cert = Certificate::order(GroupWord::named("lambda"), env, n as u64)?;
            let ok = certificate_status(&format!("order {n}"), &cert)?;
            write_out(&out, &serialize_certificate(&cert))?;
            Ok(ok)
        }
        Command::Zaushko { matrix, out } => {
            let rho = load_matrix(&matrix)?;
            let w = zaushko_commutator(&rho)?;
            let d = rho.rows();
            println!("sigma block =\n{}", w.sigma.window_matrix(2 * d)?);
            let ok = certificate_status("commutator identity", &w.certificate)?;
            write_out(&out, &serialize_certificate(&w.certificate))?;
            Ok(ok)
        }
        Command::Wans { matrix, out } => {
            let f = load_matrix(&matrix)?;
            let cert = sum_certificate(&f)?;
            let w = crate::construct::wans_three(&f)?;
            for (i, (h, t)) in w.heads.iter().zip(&w.tails).enumerate() {
                println!("part {} window =\n{}tail block =\n{}", i + 1, h, t);
            }
            let ok = certificate_status("three-part sum", &cert.certificate)?;
            write_out(&out, &serialize_certificate(&cert.certificate))?;
            Ok(ok)
        }
        Command::Pipeline {
            aut,
            coprime,
            level,
            out,
        } => {
            let phi = parse_aut(&read(&aut)?)?;
            let chain = match level {
                Some(g) => ladder_chain(&phi, g, coprime)?,
                None => km_pipeline(&phi, coprime)?,
            };
            for s in &chain.steps {
                match &s.produces {
                    Some(p) => println!("{}: {p}", s.name),
                    None => println!("{}", s.name),
                }
            }
            let ok = chain_status(&chain)?;
            write_out(&out, &to_json(&chain))?;
            Ok(ok)
        }
        Command::Verify { file, window } => cmd_verify(&file, window),
        Command::Filters { command } => cmd_filters(command),
        Command::Selftest { seed } => {
            let outcomes = crate::selftest::run(seed);
            let width = outcomes.iter().map(|o| o.name.len()).max().unwrap_or(0);
            let area = outcomes.iter().map(|o| o.area.len()).max().unwrap_or(0);
            println!("{:<width$}  {:<area$}  result  time", "check", "covers");
            for o in &outcomes {
                println!(
                    "{:<width$}  {:<area$}  {:<6}  {} ms  ({})",
                    o.name,
                    o.area,
                    if o.passed { "pass" } else { "FAIL" },
                    o.millis,
                    o.detail
                );
            }
            Ok(outcomes.iter().all(|o| o.passed))
        }
    }
}

fn cmd_classify(path: &Path, out: &OutArg) -> Result<bool> {
    let phi = parse_aut(&read(path)?)?;
    let c = classify(&phi);
    println!("variant: {}", phi.variant_name());
    println!("congruence gcd: {}", c.congruence_gcd);
    println!("lambda levels: {}", c.levels);
    println!("nu: {}", c.nu);
    println!("almost-radiation: {}", c.almost_radiation);
    println!("normal generator: {}", c.generator.is_generator);
    println!("ladder rung: {}", c.ladder);
    match &c.ladder {
        LadderRung::Rung {
            evidence: RungEvidence::Constructed(chain),
            ..
        } => {
            let ok = chain_status(chain)?;
            write_out(out, &to_json(chain.as_ref()))?;
            Ok(ok)
        }
        _ => Ok(true),
    }
}

fn cmd_verify(path: &Path, window: Option<usize>) -> Result<bool> {
    let text = read(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(crate::io::FormatError::from)
        .with_context(|| format!("parsing {}", path.display()))?;
    if value.get("steps").is_some() {
        let mut chain: WitnessChain =
            serde_json::from_str(&text).map_err(crate::io::FormatError::from)?;
        if let Some(n) = window {
            for s in &mut chain.steps {
                s.certificate.windows.push(n);
            }
        }
        chain_status(&chain)
    } else if value.get("claim").is_some() {
        let mut cert = parse_certificate(&text)?;
        if let Some(n) = window {
            cert.windows.push(n);
        }
        certificate_status("certificate", &cert)
    } else {
        bail!(
            "{} is neither a certificate nor a witness chain",
            path.display()
        )
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DescriptorFile {
    Bare(Vec<PrimeSetDescriptor>),
    Document {
        format_version: u32,
        descriptors: Vec<PrimeSetDescriptor>,
        #[serde(default)]
        subfamily_size: Option<usize>,
    },
}

fn cmd_filters(command: FilterCommand) -> Result<bool> {
    match command {
        FilterCommand::Centered {
            descriptors,
            size,
            out,
        } => {
            let text = read(&descriptors)?;
            let (family, file_size) =
                match serde_json::from_str(&text).map_err(crate::io::FormatError::from)? {
                    DescriptorFile::Bare(v) => (v, None),
                    DescriptorFile::Document {
                        format_version,
                        descriptors,
                        subfamily_size,
                    } => {
                        if format_version != FORMAT_VERSION {
                            bail!("unsupported format version {format_version}");
                        }
                        (descriptors, subfamily_size)
                    }
                };
            let s = size.or(file_size).unwrap_or(family.len());
            let r = centered_check(&family, s)?;
            for (i, d) in family.iter().enumerate() {
                println!("[{i}] {d}");
            }
            println!("subfamilies checked: {} (size <= {s})", r.checked);
            println!("centered: {}", r.verdict);
            println!("witness: {}", serde_json::to_string(&r.witness)?);
            let ok = r.witness_holds();
            println!(
                "witness recheck: {}",
                if ok { "verified" } else { "FAILED" }
            );
            write_out(&out, &to_json(&r))?;
            Ok(ok)
        }
        FilterCommand::DemoCounterexample { primes, probe, out } => {
            let r = counterexample_demo(&primes, probe)?;
            for c in &r.checks {
                let window = match c.by_window {
                    Some(true) => ", window check ok",
                    Some(false) => ", window check FAILED",
                    None => "",
                };
                println!(
                    "phi_{} in Lambda({}): {} (expected {}{window})",
                    c.automorphism, c.level, c.by_rule, c.expected
                );
            }
            let excluded: BTreeSet<u64> = r.primes.iter().copied().collect();
            println!(
                "each phi_p omits only p from its nu-set; none is an almost-radiation: {}",
                r.none_radiation
            );
            println!(
                "a tau^2-type element in the closure of phi_p, p in {excluded:?}, would force Gamma(2) <= Lambda({probe})"
            );
            let ok = r.all_verified();
            println!("memberships: {}", if ok { "verified" } else { "FAILED" });
            write_out(&out, &to_json(&r))?;
            Ok(ok)
        }
    }
}
