//! The `k0` command-line tool.

pub mod context;
pub mod expr;
pub mod selftest;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use k0_core::k0::{derive_same_degree, validate_derivation, Derivation};
use k0_core::kernels::kernel_class;
use k0_core::quadforms::{class_group, square_classes};
use k0_core::{FactoredRational, K0Element, TorsionSubgroup};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::context::load_context;
use crate::expr::{eval_expression, kernel_of_literal, parse_expression, parse_kernel, parse_rational};
use crate::selftest::{run_selftest, SelftestOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNEQUAL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] expr::ParseError),
    #[error(transparent)]
    Eval(#[from] expr::EvalError),
    #[error(transparent)]
    Core(#[from] k0_core::Error),
    #[error("bad context file: {0}")]
    ContextFile(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("bad subgroup literal `{0}`: expected three integers `a,b,c`")]
    Hnf(String),
}

#[derive(Debug, Parser)]
#[command(name = "k0", version, about = "Grothendieck-group arithmetic for isotypic categories of abelian varieties")]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reduced forms, class number and C/C^2 coset representatives.
    Classgroup {
        #[arg(long, allow_negative_numbers = true)]
        disc: i64,
    },
    /// Structure of G(A) for a context.
    Structure {
        #[arg(long)]
        ctx: PathBuf,
    },
    /// Canonical class of a degree or kernel.
    Dist {
        #[arg(long)]
        ctx: PathBuf,
        #[arg(long, required_unless_present = "kernel", conflicts_with = "kernel")]
        degree: Option<String>,
        #[arg(long)]
        kernel: Option<String>,
    },
    /// Evaluate an expression to its canonical form; with --equals, exit 0 iff equal.
    Eval {
        #[arg(long)]
        ctx: PathBuf,
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        equals: Option<String>,
    },
    /// Build a certificate that two order-n kernels give the same class.
    Derive {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        c1: String,
        #[arg(long)]
        c2: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a certificate; exit 0 iff valid.
    Check {
        #[arg(long)]
        cert: PathBuf,
    },
    /// Compare the main algorithms against the brute-force oracles.
    Selftest {
        #[arg(long, default_value_t = SelftestOptions::default().max_disc)]
        max_disc: u64,
        #[arg(long, default_value_t = SelftestOptions::default().max_level)]
        max_level: u64,
    },
}

/// Result of a command in both output formats.
#[derive(Debug)]
pub struct Report {
    pub text: String,
    pub json: Value,
    pub code: i32,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Self {
            text,
            json,
            code: EXIT_OK,
        }
    }

    fn verdict(pass: bool, text: String, json: Value) -> Self {
        Self {
            text,
            json,
            code: if pass { EXIT_OK } else { EXIT_UNEQUAL },
        }
    }
}

fn parse_hnf(level: u64, text: &str) -> Result<TorsionSubgroup, CliError> {
    let parts: Vec<u64> = text
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Hnf(text.into()))?;
    let [a, b, c] = parts[..] else {
        return Err(CliError::Hnf(text.into()));
    };
    Ok(TorsionSubgroup::from_hnf(level, a, b, c)?)
}

fn element_json(x: &K0Element) -> Value {
    json!({
        "n": x.n.to_string(),
        "g": x.g.to_string(),
        "g_is_identity": x.g.is_identity(),
        "display": x.to_string(),
    })
}

pub fn execute(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Classgroup { disc } => {
            let d = BigInt::from(*disc);
            let cg = class_group(&d)?;
            let sc = square_classes(&d)?;
            let forms: Vec<String> = cg.elements().iter().map(ToString::to_string).collect();
            let reps: Vec<String> = sc.coset_reps().iter().map(ToString::to_string).collect();
            let text = format!(
                "discriminant: {d}\nclass number: {}\nreduced forms: {}\n[C : C^2] = {}\nC/C^2 representatives: {}",
                cg.h(),
                forms.join(" "),
                sc.index(),
                reps.join(" ")
            );
            Ok(Report::ok(
                text,
                json!({"disc": disc, "h": cg.h(), "forms": forms, "index": sc.index(), "coset_reps": reps}),
            ))
        }
        Command::Structure { ctx } => {
            let ctx = load_context(ctx)?;
            let s = ctx.g_structure();
            Ok(Report::ok(
                format!("{ctx}: G(A) ≅ {s}"),
                json!({"context": ctx.to_string(), "structure": s.to_string(), "trivial": s.is_trivial()}),
            ))
        }
        Command::Dist { ctx, degree, kernel } => {
            let ctx = load_context(ctx)?;
            let class = match (degree, kernel) {
                (Some(q), _) => {
                    let (num, den) = parse_rational(q)?;
                    ctx.dist_class(&FactoredRational::from_ratio(&num, &den))?
                }
                (None, Some(k)) => kernel_class(&ctx, &kernel_of_literal(&ctx, &parse_kernel(k)?)?)?,
                (None, None) => unreachable!("clap requires one of --degree, --kernel"),
            };
            Ok(Report::ok(
                class.to_string(),
                json!({"context": ctx.to_string(), "class": class.to_string(), "identity": class.is_identity()}),
            ))
        }
        Command::Eval { ctx, expr, equals } => {
            let ctx = load_context(ctx)?;
            let lhs = eval_expression(&ctx, &parse_expression(expr)?)?;
            match equals {
                None => Ok(Report::ok(
                    lhs.to_string(),
                    json!({"context": ctx.to_string(), "value": element_json(&lhs)}),
                )),
                Some(other) => {
                    let rhs = eval_expression(&ctx, &parse_expression(other)?)?;
                    let equal = k0_core::k0::k0_eq(&lhs, &rhs);
                    let text = format!(
                        "{lhs}\n{rhs}\n{}",
                        if equal { "equal" } else { "not equal" }
                    );
                    Ok(Report::verdict(
                        equal,
                        text,
                        json!({
                            "context": ctx.to_string(),
                            "value": element_json(&lhs),
                            "other": element_json(&rhs),
                            "equal": equal,
                        }),
                    ))
                }
            }
        }
        Command::Derive { n, c1, c2, out } => {
            let (c1, c2) = (parse_hnf(*n, c1)?, parse_hnf(*n, c2)?);
            let d = derive_same_degree(*n, &c1, &c2)?;
            let valid = validate_derivation(&d).ok;
            let cert = d.to_json();
            let summary = json!({
                "level": d.level,
                "from": d.from.to_string(),
                "to": d.to.to_string(),
                "steps": d.steps.len(),
                "relations": d.key_steps(),
                "valid": valid,
            });
            match out {
                Some(path) => {
                    std::fs::write(path, &cert).map_err(|e| CliError::Io {
                        path: path.display().to_string(),
                        source: e,
                    })?;
                    let text = format!(
                        "wrote {} relations for [E/{c1}] = [E/{c2}] to {} ({})",
                        d.key_steps(),
                        path.display(),
                        if valid { "valid" } else { "INVALID" }
                    );
                    Ok(Report::verdict(valid, text, summary))
                }
                None => {
                    let cert_value: Value = serde_json::from_str(&cert).expect("certificate is JSON");
                    Ok(Report::verdict(valid, cert, json!({"summary": summary, "certificate": cert_value})))
                }
            }
        }
        Command::Check { cert } => {
            let text = std::fs::read_to_string(cert).map_err(|e| CliError::Io {
                path: cert.display().to_string(),
                source: e,
            })?;
            let d = Derivation::from_json(&text)?;
            let v = validate_derivation(&d);
            let mut out = v.trace.join("\n");
            out.push_str(if v.ok { "\nvalid" } else { "\ninvalid" });
            Ok(Report::verdict(v.ok, out, json!({"valid": v.ok, "trace": v.trace})))
        }
        Command::Selftest { max_disc, max_level } => {
            let suites = run_selftest(&SelftestOptions {
                max_disc: *max_disc,
                max_level: *max_level,
            });
            let pass = suites.iter().all(|s| s.passed());
            let mut lines = Vec::new();
            for s in &suites {
                if s.passed() {
                    lines.push(format!("PASS {} ({} checks)", s.name, s.checked));
                } else {
                    lines.push(format!(
                        "FAIL {} ({} of {} checks disagree)",
                        s.name,
                        s.disagreements.len(),
                        s.checked
                    ));
                    lines.extend(s.disagreements.iter().take(10).map(|d| format!("  {d}")));
                }
            }
            Ok(Report::verdict(pass, lines.join("\n"), json!({"pass": pass, "suites": suites})))
        }
    }
}

/// Parses arguments, runs the command, prints its output and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(report) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report.json).expect("JSON values serialize"));
            } else {
                println!("{}", report.text);
            }
            report.code
        }
        Err(e) => {
            if cli.json {
                println!("{}", json!({"error": e.to_string()}));
            } else {
                eprintln!("error: {e}");
            }
            EXIT_ERROR
        }
    }
}
