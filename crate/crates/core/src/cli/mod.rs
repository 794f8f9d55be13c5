//! The `bdlab` command line. Every command prints one JSON document.
//!
//! Exit codes: 0 on success, 2 on a domain error (printed as
//! `{"code", "message"}`), 64 on a usage error, 65 on malformed JSON input
//! and 66 when an input file cannot be read.

mod cert;
mod suite;

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::Path;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::antispecker::StarOracle;
use crate::error::Error;
use crate::labs::{
    az_witness, certificate_u64, enumerate_az, make_f_beta, FpLab, DEFAULT_STEP_CAP,
};
use crate::machine::Program;
use crate::seq::{self, BasicOpen, Condition, Point};
use crate::sets::{
    compatible_extension_check, intersect_set, member_set, sequential_bound, PeriodicSet, SetOpen,
};
use crate::terms::{RangeTerm, TermSequence};

pub use cert::{
    certify_bound, certify_dc, certify_pseudo, certify_schedule, verify, Certificate, StepRule,
};
pub use suite::{suite, SuiteName};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;

/// Machine step budget for `ext` commands when `--budget` is absent.
pub const DEFAULT_EXT_BUDGET: u64 = 1_000_000;

#[derive(Parser, Debug)]
#[command(
    name = "bdlab",
    version,
    about = "Forcing conditions, fusion certificates and realizability labs"
)]
struct Cli {
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Step budget for machine evaluation.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Basic opens of the sequence space.
    #[command(subcommand)]
    Seq(SeqCmd),
    /// Good extensions and fusion constructions, as certificates.
    #[command(subcommand)]
    Fuse(FuseCmd),
    /// Opens of the space of unbounded sets.
    #[command(subcommand)]
    Set(SetCmd),
    /// Escape schedules for star oracles.
    #[command(subcommand)]
    As(AsCmd),
    /// The function-realizability lab.
    #[command(subcommand)]
    Fp(FpCmd),
    /// The extensional-realizability lab.
    #[command(subcommand)]
    Ext(ExtCmd),
    /// Replay a certificate and compare it with the recorded result.
    Verify { certificate: String },
    /// A seeded randomized demo.
    Suite {
        name: SuiteName,
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
}

#[derive(Subcommand, Debug)]
enum SeqCmd {
    /// Intersect two basic opens.
    Intersect { a: String, b: String },
    /// The piece of the split cover with this value at the stem.
    Split {
        open: String,
        #[arg(long)]
        value: u64,
    },
    /// Whether a point lies in a basic open.
    Member {
        open: String,
        #[arg(long)]
        point: String,
    },
    /// A subopen forcing the value into the range of the generic sequence.
    ForceRange {
        open: String,
        #[arg(long)]
        bound: u64,
    },
}

#[derive(Subcommand, Debug)]
enum FuseCmd {
    /// Bound a range term by a good extension, optionally below a depth.
    Bound {
        open: String,
        term: String,
        #[arg(long)]
        bound: u64,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Stages of the pseudo-boundedness fusion below a point.
    Pseudo {
        open: String,
        terms: String,
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 4)]
        stages: usize,
    },
    /// A dependent-choice chain for the step rule `x -> x + add`.
    Dc {
        open: String,
        #[arg(long, default_value_t = 1)]
        add: u64,
        #[arg(long, default_value_t = 0)]
        start: u64,
        #[arg(long, default_value_t = 3)]
        steps: usize,
    },
}

#[derive(Subcommand, Debug)]
enum SetCmd {
    /// Intersect two opens.
    Intersect { a: String, b: String },
    /// Whether an infinite periodic set lies in an open.
    Member { set: String, open: String },
    /// Validate a decided family and report the bound the open forces.
    Seqbound { open: String, decided: String },
    /// Check the compatibility fact for `pext ⊇ P_O` and `V ⊆ O`.
    Compat {
        open: String,
        #[arg(long)]
        pext: String,
        #[arg(long)]
        sub: String,
    },
}

#[derive(Subcommand, Debug)]
enum AsCmd {
    /// Build an escape schedule, as a certificate.
    Schedule {
        open: String,
        oracle: String,
        #[arg(long)]
        bound: u64,
        #[arg(long)]
        horizon: usize,
    },
}

#[derive(Subcommand, Debug)]
enum FpCmd {
    /// `v(n)` with its qualifying `k` for every `n <= max-n`.
    V {
        #[arg(long)]
        max_n: u64,
    },
    /// Some `n` with `v(n) >= k`.
    Witness {
        #[arg(long)]
        k: u64,
    },
    /// Tabulate `v` along a certified program over a window.
    Scenario(ScenarioArgs),
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    /// Program text, or a file holding it.
    #[arg(long)]
    program: String,
    /// Defaults to the program's own certificate.
    #[arg(long)]
    cert: Option<u64>,
    #[arg(long, default_value_t = 100)]
    window: u64,
}

#[derive(Subcommand, Debug)]
enum ExtCmd {
    /// The members `m` of `A_z` up to the support bound.
    Az {
        /// Program text, or a file holding it.
        #[arg(long)]
        z: String,
        /// Search only this `m` and report a witness.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 8)]
        support: usize,
        #[arg(long, default_value_t = 3)]
        values: u64,
    },
    /// The functional `F_beta` for `m`, as program text and index.
    Fbeta {
        #[arg(long)]
        beta: String,
        #[arg(long)]
        m: u64,
    },
}

#[derive(Debug)]
enum Failure {
    Domain(Error),
    Data(String),
    NoInput(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Out = std::result::Result<Value, Failure>;

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values render");
    s.push('\n');
    s
}

fn error_doc(code: &str, message: impl std::fmt::Display) -> String {
    render(&json!({ "code": code, "message": message.to_string() }))
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code together with everything meant for stdout.
pub fn run<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => (EXIT_OK, e.to_string()),
                _ => (EXIT_USAGE, error_doc("Usage", e.render())),
            }
        }
    };
    match execute(&cli) {
        Ok(v) => (EXIT_OK, render(&v)),
        Err(Failure::Domain(e)) => (EXIT_DOMAIN, error_doc(e.code(), &e)),
        Err(Failure::Data(m)) => (EXIT_DATA, error_doc("MalformedJson", m)),
        Err(Failure::NoInput(m)) => (EXIT_NO_INPUT, error_doc("NoInput", m)),
    }
}

/// An argument holding JSON inline (starting with `{` or `[`) or naming a
/// file.
fn load<T: DeserializeOwned>(arg: &str) -> std::result::Result<T, Failure> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Failure::NoInput(format!("{arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::Data(format!("{arg}: {e}")))
}

/// Program text given inline or as the name of a file.
fn load_program(arg: &str) -> std::result::Result<Program, Failure> {
    let text = if Path::new(arg).is_file() {
        std::fs::read_to_string(arg).map_err(|e| Failure::NoInput(format!("{arg}: {e}")))?
    } else {
        arg.to_string()
    };
    Ok(text.trim().parse()?)
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn execute(cli: &Cli) -> Out {
    match &cli.command {
        Command::Seq(cmd) => seq_cmd(cmd),
        Command::Fuse(cmd) => fuse_cmd(cmd),
        Command::Set(cmd) => set_cmd(cmd),
        Command::As(AsCmd::Schedule {
            open,
            oracle,
            bound,
            horizon,
        }) => {
            let q: Condition = load(open)?;
            let oracle: StarOracle = load(oracle)?;
            Ok(to_json(&certify_schedule(&q, &oracle, *bound, *horizon)?))
        }
        Command::Fp(cmd) => fp_cmd(cmd, cli.budget.unwrap_or(DEFAULT_STEP_CAP)),
        Command::Ext(cmd) => ext_cmd(cmd, cli.budget.unwrap_or(DEFAULT_EXT_BUDGET)),
        Command::Verify { certificate } => {
            let c: Certificate = load(certificate)?;
            verify(&c)?;
            Ok(json!({ "operation": c.operation, "verified": true }))
        }
        Command::Suite { name, count } => Ok(suite(*name, cli.seed, *count)),
    }
}

fn seq_cmd(cmd: &SeqCmd) -> Out {
    Ok(match cmd {
        SeqCmd::Intersect { a, b } => {
            let (p, q): (BasicOpen, BasicOpen) = (load(a)?, load(b)?);
            to_json(&seq::intersect(&p, &q))
        }
        SeqCmd::Split { open, value } => to_json(&seq::split(&load(open)?, *value)?),
        SeqCmd::Member { open, point } => {
            let (p, f): (BasicOpen, Point) = (load(open)?, load(point)?);
            json!({ "member": seq::member(&f, &p) })
        }
        SeqCmd::ForceRange { open, bound } => {
            to_json(&seq::force_value_into_range(&load(open)?, *bound)?)
        }
    })
}

fn fuse_cmd(cmd: &FuseCmd) -> Out {
    let c = match cmd {
        FuseCmd::Bound {
            open,
            term,
            bound,
            depth,
        } => {
            let (p, t): (Condition, RangeTerm) = (load(open)?, load(term)?);
            certify_bound(&p, &t, *bound, *depth)?
        }
        FuseCmd::Pseudo {
            open,
            terms,
            point,
            stages,
        } => {
            let (p, a, f): (Condition, TermSequence, Point) =
                (load(open)?, load(terms)?, load(point)?);
            certify_pseudo(&p, &a, &f, *stages)?
        }
        FuseCmd::Dc {
            open,
            add,
            start,
            steps,
        } => certify_dc(&load(open)?, StepRule { add: *add }, *start, *steps)?,
    };
    Ok(to_json(&c))
}

fn set_cmd(cmd: &SetCmd) -> Out {
    Ok(match cmd {
        SetCmd::Intersect { a, b } => {
            let (o, u): (SetOpen, SetOpen) = (load(a)?, load(b)?);
            to_json(&intersect_set(&o, &u))
        }
        SetCmd::Member { set, open } => {
            let (x, o): (PeriodicSet, SetOpen) = (load(set)?, load(open)?);
            json!({ "member": member_set(&x, &o)? })
        }
        SetCmd::Seqbound { open, decided } => {
            let o: SetOpen = load(open)?;
            let decided: Vec<(BTreeSet<u64>, u64)> = load(decided)?;
            json!({ "bound": sequential_bound(&o, &decided)? })
        }
        SetCmd::Compat { open, pext, sub } => {
            let o: SetOpen = load(open)?;
            let pext: BTreeSet<u64> = load(pext)?;
            let v: SetOpen = load(sub)?;
            to_json(&compatible_extension_check(&o, &pext, &v)?)
        }
    })
}

fn fp_cmd(cmd: &FpCmd, step_cap: u64) -> Out {
    let mut lab = FpLab::new(step_cap);
    Ok(match cmd {
        FpCmd::V { max_n } => {
            let traces = (0..=*max_n)
                .map(|n| lab.v(n))
                .collect::<crate::Result<Vec<_>>>()?;
            to_json(&traces)
        }
        FpCmd::Witness { k } => {
            let n = lab.unbounded_witness(*k)?;
            json!({ "k": k, "n": n })
        }
        FpCmd::Scenario(args) => {
            let x = load_program(&args.program)?;
            let cert = match args.cert.or_else(|| certificate_u64(&x)) {
                Some(c) => c,
                None => {
                    return Err(Error::BudgetExhausted(format!(
                        "the certificate of {x} exceeds a machine word"
                    ))
                    .into())
                }
            };
            let table = lab.pseudobound_scenario(&x, cert, args.window)?;
            json!({ "program": x.to_string(), "cert": cert, "table": table })
        }
    })
}

fn ext_cmd(cmd: &ExtCmd, budget: u64) -> Out {
    Ok(match cmd {
        ExtCmd::Az {
            z,
            m: Some(m),
            support,
            values,
        } => {
            let z = load_program(z)?;
            let witness = az_witness(&z, *m, *support, *values, budget)?;
            json!({ "z": z.to_string(), "m": m, "member": witness.is_some() || *m == 0, "witness": witness })
        }
        ExtCmd::Az {
            z,
            m: None,
            support,
            values,
        } => {
            let z = load_program(z)?;
            json!({ "z": z.to_string(), "az": enumerate_az(&z, *support, *values, budget)? })
        }
        ExtCmd::Fbeta { beta, m } => {
            let beta = load_program(beta)?;
            let f = make_f_beta(&beta, *m);
            json!({ "beta": beta.to_string(), "m": m, "program": f.to_string(), "index": f.index().to_string() })
        }
    })
}
