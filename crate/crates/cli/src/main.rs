//! `mopquad` command-line front end.
//!
//! Exit codes: 0 success, 2 usage or bad input, 3 numeric failure, 4 failed verification.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mopquad::quadrature::weight_report;
use mopquad::{
    format_sci, integrate_named, make_rule, rule_to_csv, rule_to_json, rule_to_table,
    verify_exactness, Error, ExactnessReport, Integrand, PrecisionContext, QuadratureRule,
    WeightSystem,
};

#[derive(Parser)]
#[command(
    name = "mopquad",
    version,
    about = "Quadrature rules for multiple orthogonal polynomials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute nodes and both weight sets.
    Rule {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Apply the rule to a named integrand.
    Integrate {
        #[command(flatten)]
        common: Common,
        /// one, exp_neg, cos, power:k or polycoeffs:a0,a1,...
        #[arg(long = "f")]
        f: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Check polynomial exactness against the moments.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum)]
    system: SystemArg,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// Stepline table for `--system custom`.
    #[arg(long)]
    coeffs: Option<PathBuf>,
    /// Number of nodes.
    #[arg(long = "N", value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    /// Significant decimal digits.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(10..))]
    digits: u32,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SystemArg {
    #[value(name = "besselK")]
    BesselK,
    #[value(name = "besselI")]
    BesselI,
    #[value(name = "custom")]
    Custom,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

enum Failure {
    Usage(String),
    Module(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Module(e)
    }
}

fn required<'a>(v: &'a Option<String>, flag: &str, system: &str) -> Result<&'a str, Failure> {
    v.as_deref()
        .ok_or_else(|| Failure::Usage(format!("--system {system} needs --{flag}")))
}

fn build_system(common: &Common) -> Result<WeightSystem, Failure> {
    let unused = |flags: &[(&str, bool)]| -> Result<(), Failure> {
        match flags.iter().find(|(_, given)| *given) {
            Some((flag, _)) => Err(Failure::Usage(format!(
                "--{flag} does not apply to this system"
            ))),
            None => Ok(()),
        }
    };
    let system = match common.system {
        SystemArg::BesselK => {
            unused(&[
                ("c", common.c.is_some()),
                ("coeffs", common.coeffs.is_some()),
            ])?;
            WeightSystem::bessel_k(
                required(&common.alpha, "alpha", "besselK")?,
                required(&common.nu, "nu", "besselK")?,
            )?
        }
        SystemArg::BesselI => {
            unused(&[
                ("alpha", common.alpha.is_some()),
                ("coeffs", common.coeffs.is_some()),
            ])?;
            WeightSystem::bessel_i(
                required(&common.nu, "nu", "besselI")?,
                required(&common.c, "c", "besselI")?,
            )?
        }
        SystemArg::Custom => {
            unused(&[
                ("alpha", common.alpha.is_some()),
                ("nu", common.nu.is_some()),
                ("c", common.c.is_some()),
            ])?;
            let path = common
                .coeffs
                .as_ref()
                .ok_or_else(|| Failure::Usage("--system custom needs --coeffs <path>".into()))?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            WeightSystem::from_custom_json(&text)?
        }
    };
    Ok(system)
}

fn render_rule(rule: &QuadratureRule, format: Format) -> String {
    match format {
        Format::Json => rule_to_json(rule) + "\n",
        Format::Csv => rule_to_csv(rule),
        Format::Table => rule_to_table(rule),
    }
}

fn render_integrals(
    rule: &QuadratureRule,
    f: &str,
    i1: &mopquad::ExtReal,
    i2: &mopquad::ExtReal,
    format: Format,
) -> String {
    let d = rule.digits as usize;
    let (s1, s2) = (format_sci(i1, d), format_sci(i2, d));
    match format {
        Format::Json => {
            let doc = serde_json::json!({
                "system": rule.system,
                "N": rule.n,
                "digits": rule.digits,
                "f": f,
                "I1": s1,
                "I2": s2,
            });
            serde_json::to_string_pretty(&doc).expect("plain json") + "\n"
        }
        Format::Csv => format!(
            "N,digits,f,I1,I2\n{},{},{f},{s1},{s2}\n",
            rule.n, rule.digits
        ),
        Format::Table => format!(
            "N = {}, digits = {}, f = {f}\nI1 = {s1}\nI2 = {s2}\n",
            rule.n, rule.digits
        ),
    }
}

fn render_report(rule: &QuadratureRule, report: &ExactnessReport, format: Format) -> String {
    let signs = weight_report(rule);
    let verdict = |p: bool| if p { "pass" } else { "FAIL" };
    match format {
        Format::Json => {
            let measures: Vec<_> = report
                .measures
                .iter()
                .zip(signs.signs)
                .map(|(m, s)| {
                    let checks: Vec<_> = m
                        .checks
                        .iter()
                        .map(|c| {
                            serde_json::json!({
                                "degree": c.degree,
                                "rel_error": format_sci(&c.rel_error, 6),
                                "tolerance": format_sci(&c.tolerance, 6),
                                "pass": c.pass,
                            })
                        })
                        .collect();
                    serde_json::json!({
                        "measure": m.measure,
                        "claimed_degree": m.claimed_degree,
                        "pass": m.pass(),
                        "checks": checks,
                        "weights": {"positive": s.positive, "negative": s.negative, "zero": s.zero},
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "system": rule.system,
                "N": rule.n,
                "digits": rule.digits,
                "pass": report.pass(),
                "measures": measures,
            });
            serde_json::to_string_pretty(&doc).expect("plain json") + "\n"
        }
        Format::Csv => {
            let mut out = String::from("measure,degree,rel_error,tolerance,pass\n");
            for m in &report.measures {
                for c in &m.checks {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{}",
                        m.measure,
                        c.degree,
                        format_sci(&c.rel_error, 6),
                        format_sci(&c.tolerance, 6),
                        c.pass
                    );
                }
            }
            out
        }
        Format::Table => {
            let mut out = format!("N = {}, digits = {}\n", rule.n, rule.digits);
            for (m, s) in report.measures.iter().zip(signs.signs) {
                let _ = writeln!(
                    out,
                    "measure {}: claimed degree {}: {}",
                    m.measure,
                    m.claimed_degree,
                    verdict(m.pass())
                );
                for c in &m.checks {
                    let _ = writeln!(
                        out,
                        "  m = {:>3}  rel. error {:>13}  tolerance {:>13}  {}",
                        c.degree,
                        format_sci(&c.rel_error, 6),
                        format_sci(&c.tolerance, 6),
                        verdict(c.pass)
                    );
                }
                let _ = writeln!(
                    out,
                    "  weights: {} positive, {} negative, {} zero",
                    s.positive, s.negative, s.zero
                );
            }
            let _ = writeln!(out, "largest node {}", format_sci(&signs.largest_node, 6));
            let _ = writeln!(out, "{}", if report.pass() { "PASS" } else { "FAIL" });
            out
        }
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Rule { common, format } => {
            let system = build_system(&common)?;
            let ctx = PrecisionContext::new(common.digits)?;
            let rule = make_rule(&system, common.n as usize, &ctx)?;
            emit(&common, render_rule(&rule, format))
        }
        Command::Integrate { common, f, format } => {
            let integrand = Integrand::parse(&f)?;
            let system = build_system(&common)?;
            let ctx = PrecisionContext::new(common.digits)?;
            let rule = make_rule(&system, common.n as usize, &ctx)?;
            let (i1, i2) = integrate_named(&rule, &integrand, &ctx)?;
            emit(&common, render_integrals(&rule, &f, &i1, &i2, format))
        }
        Command::Verify { common, format } => {
            let system = build_system(&common)?;
            let ctx = PrecisionContext::new(common.digits)?;
            let rule = make_rule(&system, common.n as usize, &ctx)?;
            let report = verify_exactness(&rule, &system, &ctx)?;
            let text = emit(&common, render_report(&rule, &report, format))?;
            if report.pass() {
                Ok(text)
            } else {
                Err(Failure::Verification(text))
            }
        }
    }
}

/// Writes to `--out` when given (returning nothing to print), else hands the text back.
fn emit(common: &Common, text: String) -> Result<String, Failure> {
    match &common.out {
        Some(path) => {
            std::fs::write(path, text)
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("mopquad: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Module(e)) => {
            eprintln!("mopquad: {e}");
            ExitCode::from(if e.is_numeric() { 3 } else { 2 })
        }
        Err(Failure::Verification(text)) => {
            print!("{text}");
            eprintln!("mopquad: exactness check failed");
            ExitCode::from(4)
        }
    }
}
