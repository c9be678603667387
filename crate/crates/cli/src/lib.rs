//! Command-line front end for `sympack-core`.
//!
//! Exit codes: 0 decided or success, 1 input or hypothesis error, 2 undecided
//! within the budget.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use sympack_core::document::parse_domain_document;
use sympack_core::ech::{ech_concave_prefix, ech_convex_prefix, first_violation};
use sympack_core::exceptional::{cremona_transform, enumerate_exceptional, is_exceptional_vector};
use sympack_core::highdim::{
    equal_packing_value, verify_no_new_obstruction, volume_and_two_ball_feasible, HigherDimProblem,
};
use sympack_core::packing::{decide_from_capacity, packing_capacity, CapacityValue};
use sympack_core::scalar::{parse_rational, serde_rational};
use sympack_core::stabilized::{
    decide_stabilized_packing_with, decide_stabilized_toric_with, decide_stabilized_two_ball,
    TwoBallDecision,
};
use sympack_core::staircase::{sample_staircase, StaircaseSample};
use sympack_core::toric::{negative_weight_sequence, weight_sequence, ToricDomain};
use sympack_core::{BallConfig, Convention, Decision, Engine, Error, ObstructionTuple, Rational};

mod selfcheck;

pub const DEFAULT_SEED: u64 = 20240601;

#[derive(Debug, Parser)]
#[command(
    name = "sympack",
    version,
    about = "Exact ball-packing and toric embedding decisions"
)]
pub struct Cli {
    /// Degree budget for obstruction searches.
    #[arg(long, global = true, default_value_t = 60)]
    pub dmax: u32,
    /// Largest capacity index for ECH sequences.
    #[arg(long, global = true, default_value_t = 50)]
    pub kmax: usize,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value = "open", value_parser = parse_convention)]
    pub convention: Convention,
    #[arg(long, global = true, default_value = "combined", value_parser = parse_engine)]
    pub engine: Engine,
    /// Pretty-print JSON with this many spaces; 0 prints one line.
    #[arg(long, global = true, default_value_t = 0)]
    pub json_indent: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Packing capacity of a list of balls.
    Capacity {
        /// Comma-separated sizes, e.g. "1,1,1/2".
        #[arg(long)]
        balls: String,
    },
    /// Whether the balls pack into a ball of the given size.
    Pack {
        #[arg(long)]
        balls: String,
        #[arg(long)]
        target: String,
    },
    /// Exceptional classes up to a degree, or checks and Cremona moves on one tuple.
    Exceptional {
        /// Largest degree to enumerate.
        #[arg(long, default_value_t = 6)]
        degree: u32,
        /// Largest number of nonzero multiplicities.
        #[arg(long)]
        entries: Option<u32>,
        /// Decide whether this tuple, e.g. "(3; 2,1,1,1,1,1)", is exceptional.
        #[arg(long, conflicts_with = "cremona")]
        check: Option<String>,
        /// Apply one Cremona move to this tuple.
        #[arg(long)]
        cremona: Option<String>,
    },
    /// Weight sequence of a domain document.
    Weights {
        /// JSON document, or @path to read one.
        #[arg(long)]
        domain: String,
    },
    /// ECH capacities of a domain document, or a comparison of two.
    Ech(EchArgs),
    /// CSV samples of the ellipsoid-into-ball capacity function.
    Staircase {
        #[arg(long, default_value = "1")]
        from: String,
        #[arg(long, default_value = "4")]
        to: String,
        #[arg(long, default_value = "1/4")]
        step: String,
    },
    /// Problems crossed with a surface or aspherical manifold.
    #[command(subcommand)]
    Stabilized(Stabilized),
    /// Packings of balls in higher dimensions.
    #[command(subcommand)]
    Highdim(Highdim),
    /// Quick internal consistency checks.
    Selfcheck,
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true)]
pub struct EchArgs {
    #[arg(long)]
    pub domain: Option<String>,
    #[command(subcommand)]
    pub compare: Option<EchCompare>,
}

#[derive(Debug, Subcommand)]
pub enum EchCompare {
    /// Finds the first index where the source capacity exceeds the target's.
    Compare {
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
    },
}

#[derive(Debug, Args)]
pub struct Fiber {
    #[arg(long, default_value_t = 1)]
    pub genus: u32,
    #[arg(long, default_value = "1")]
    pub area: String,
}

#[derive(Debug, Subcommand)]
pub enum Stabilized {
    Pack {
        #[arg(long)]
        balls: String,
        #[arg(long)]
        target: String,
        #[command(flatten)]
        fiber: Fiber,
    },
    Twoball {
        /// Half the real dimension of the balls.
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long)]
        r1: String,
        #[arg(long)]
        r2: String,
        #[arg(long)]
        target: String,
        /// The fiber is not known to be symplectically aspherical.
        #[arg(long)]
        not_aspherical: bool,
    },
    Toric {
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        #[command(flatten)]
        fiber: Fiber,
    },
}

#[derive(Debug, Subcommand)]
pub enum Highdim {
    /// Scans curve classes for negative energy.
    Verify {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        balls: String,
        #[arg(long)]
        target: String,
    },
    /// Volume fraction filled by `k` equal balls.
    Equal {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u64,
    },
    /// Volume and two-ball conditions.
    Feasible {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        balls: String,
        #[arg(long)]
        target: String,
    },
}

fn parse_convention(s: &str) -> Result<Convention, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// What a command produced.
#[derive(Debug)]
pub struct Outcome {
    pub body: String,
    pub code: u8,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// Error document written to standard error.
    pub fn to_json(&self) -> Value {
        let (code, kind) = match self {
            CliError::Core(Error::InvalidDomain { code, .. }) => (code.as_str(), "domain"),
            CliError::Core(Error::Parse(_)) => ("E_PARSE", "input"),
            CliError::Core(Error::Domain(_)) => ("E_INPUT", "input"),
            CliError::Core(Error::Precondition(_)) => ("E_PRECONDITION", "input"),
            CliError::Core(Error::Hypothesis(_)) => ("E_HYPOTHESIS", "hypothesis"),
            CliError::Core(Error::Budget { .. }) | CliError::Core(Error::Uncertified { .. }) => {
                ("E_BUDGET", "budget")
            }
            CliError::Core(Error::Overflow(_)) => ("E_OVERFLOW", "budget"),
            CliError::Io(_) => ("E_IO", "io"),
        };
        json!({"error": {"code": code, "kind": kind, "message": self.to_string()}})
    }

    /// Budget exhaustion is undecided, everything else is an input error.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(
                Error::Budget { .. } | Error::Uncertified { .. } | Error::Overflow(_),
            ) => 2,
            _ => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn rational(s: &str) -> CliResult<Rational> {
    Ok(parse_rational(s)?)
}

fn balls(s: &str) -> CliResult<BallConfig> {
    Ok(BallConfig::parse(s)?)
}

fn tuple(s: &str) -> CliResult<ObstructionTuple> {
    Ok(s.parse()?)
}

fn document(arg: &str) -> CliResult<ToricDomain> {
    let text = match arg.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?,
        None => arg.to_string(),
    };
    Ok(parse_domain_document(&text)?)
}

fn render(value: &impl Serialize, indent: usize) -> String {
    if indent == 0 {
        return serde_json::to_string(value).expect("serializable");
    }
    let pad = vec![b' '; indent];
    let mut buf = Vec::new();
    let fmt = serde_json::ser::PrettyFormatter::with_indent(&pad);
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
    value.serialize(&mut ser).expect("serializable");
    String::from_utf8(buf).expect("utf-8")
}

fn decision_code(d: Decision) -> u8 {
    match d {
        Decision::Undecided => 2,
        _ => 0,
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> CliResult<Outcome> {
    let json = |v: &Value, code: u8| Outcome {
        body: render(v, cli.json_indent),
        code,
    };
    let out = match &cli.command {
        Command::Capacity { balls: b } => {
            let cap = packing_capacity(&balls(b)?, cli.dmax, cli.engine)?;
            let code = if cap.is_exact() { 0 } else { 2 };
            json(&serde_json::to_value(&cap).expect("serializable"), code)
        }
        Command::Pack { balls: b, target } => {
            let r = rational(target)?;
            let cap = packing_capacity(&balls(b)?, cli.dmax, cli.engine)?;
            let d = decide_from_capacity(&cap, &r, cli.convention);
            json(
                &json!({"decision": d, "capacity": CapacityValue::of(&cap), "convention": cli.convention}),
                decision_code(d),
            )
        }
        Command::Exceptional {
            degree,
            entries,
            check,
            cremona,
        } => {
            if let Some(t) = check {
                let t = tuple(t)?;
                json(
                    &json!({"tuple": t, "exceptional": is_exceptional_vector(&t)}),
                    0,
                )
            } else if let Some(t) = cremona {
                let t = tuple(t)?;
                json(&json!({"tuple": t, "image": cremona_transform(&t)}), 0)
            } else {
                let list = enumerate_exceptional(*degree, entries.unwrap_or(3 * degree))?;
                json(&json!({"count": list.len(), "classes": list}), 0)
            }
        }
        Command::Weights { domain } => {
            let w = match document(domain)? {
                ToricDomain::Concave(c) => weight_sequence(&c)?,
                ToricDomain::Convex(c) => negative_weight_sequence(&c)?,
            };
            json(&serde_json::to_value(&w).expect("serializable"), 0)
        }
        Command::Ech(args) => ech(cli, args)?,
        Command::Staircase { from, to, step } => {
            let table =
                sample_staircase(&rational(from)?, &rational(to)?, &rational(step)?, cli.dmax)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Io(e.to_string());
            w.write_record(StaircaseSample::CSV_HEADER).map_err(io)?;
            for row in &table.rows {
                w.write_record(row.csv_record()).map_err(io)?;
            }
            let body = String::from_utf8(w.into_inner().map_err(|e| CliError::Io(e.to_string()))?)
                .expect("utf-8");
            let undecided =
                table.status.is_some() || table.rows.iter().any(|r| !r.value.is_exact());
            if let Some(s) = &table.status {
                eprintln!("{s}");
            }
            Outcome {
                body: body.trim_end().to_string(),
                code: if undecided { 2 } else { 0 },
            }
        }
        Command::Stabilized(s) => stabilized(cli, s)?,
        Command::Highdim(h) => highdim(cli, h)?,
        Command::Selfcheck => {
            let report = selfcheck::run(cli.seed);
            let code = if report.passed() { 0 } else { 1 };
            json(&serde_json::to_value(&report).expect("serializable"), code)
        }
    };
    Ok(out)
}

fn ech(cli: &Cli, args: &EchArgs) -> CliResult<Outcome> {
    let k = cli.kmax;
    let value = match (&args.compare, &args.domain) {
        (Some(EchCompare::Compare { source, target }), _) => {
            let src = document(source)?
                .as_concave()
                .ok_or_else(|| Error::Domain("the source must be a concave domain".into()))?;
            let tgt = document(target)?
                .as_convex()
                .ok_or_else(|| Error::Domain("the target must be a convex domain".into()))?;
            let v = first_violation(&src, &tgt, k)?;
            json!({"k_max": k, "dominates": v.is_none(), "first_violation": v})
        }
        (None, Some(domain)) => {
            let seq = match document(domain)? {
                ToricDomain::Concave(c) => ech_concave_prefix(&c, k)?,
                ToricDomain::Convex(c) => ech_convex_prefix(&c, k, None)?,
            };
            #[derive(Serialize)]
            struct Seq<'a>(#[serde(with = "serde_rational::vec")] &'a Vec<Rational>);
            json!({"k_max": k, "capacities": Seq(&seq)})
        }
        (None, None) => {
            return Err(Error::Domain("ech needs --domain or the compare subcommand".into()).into())
        }
    };
    Ok(Outcome {
        body: render(&value, cli.json_indent),
        code: 0,
    })
}

fn stabilized(cli: &Cli, s: &Stabilized) -> CliResult<Outcome> {
    let (value, code) = match s {
        Stabilized::Pack {
            balls: b,
            target,
            fiber,
        } => {
            let d = decide_stabilized_packing_with(
                &balls(b)?,
                &rational(target)?,
                fiber.genus,
                &rational(&fiber.area)?,
                cli.convention,
                cli.dmax,
                cli.engine,
            )?;
            (
                serde_json::to_value(&d).expect("serializable"),
                decision_code(d.decision),
            )
        }
        Stabilized::Twoball {
            n,
            r1,
            r2,
            target,
            not_aspherical,
        } => {
            let d = decide_stabilized_two_ball(
                *n,
                &rational(r1)?,
                &rational(r2)?,
                &rational(target)?,
                !not_aspherical,
            )?;
            let code = if d.decision == TwoBallDecision::ConjecturallyYes {
                2
            } else {
                0
            };
            (serde_json::to_value(&d).expect("serializable"), code)
        }
        Stabilized::Toric {
            source,
            target,
            fiber,
        } => {
            let src = document(source)?
                .as_concave()
                .ok_or_else(|| Error::Domain("the source must be a concave domain".into()))?;
            let tgt = document(target)?
                .as_convex()
                .ok_or_else(|| Error::Domain("the target must be a convex domain".into()))?;
            let d = decide_stabilized_toric_with(
                &src,
                &tgt,
                fiber.genus,
                &rational(&fiber.area)?,
                cli.convention,
                cli.kmax,
                cli.dmax,
                cli.engine,
            )?;
            (
                serde_json::to_value(&d).expect("serializable"),
                decision_code(d.decision),
            )
        }
    };
    Ok(Outcome {
        body: render(&value, cli.json_indent),
        code,
    })
}

fn highdim(cli: &Cli, h: &Highdim) -> CliResult<Outcome> {
    let problem = |n: u32, b: &str, t: &str| -> CliResult<HigherDimProblem> {
        Ok(HigherDimProblem::new(n, balls(b)?, rational(t)?)?)
    };
    let (value, code) = match h {
        Highdim::Verify {
            n,
            balls: b,
            target,
        } => {
            let r = verify_no_new_obstruction(*n, &problem(*n, b, target)?, cli.dmax)?;
            let code = if r.violation_count == 0 { 0 } else { 1 };
            (serde_json::to_value(&r).expect("serializable"), code)
        }
        Highdim::Equal { n, k } => {
            let v = equal_packing_value(*n, *k, cli.dmax)?;
            let code = if v.value().is_some() { 0 } else { 2 };
            let mut value = serde_json::to_value(&v).expect("serializable");
            if let Some(x) = v.value() {
                value["value"] = Value::String(sympack_core::scalar::format_rational(x));
            }
            (value, code)
        }
        Highdim::Feasible {
            n,
            balls: b,
            target,
        } => {
            let f = volume_and_two_ball_feasible(&problem(*n, b, target)?)?;
            (serde_json::to_value(&f).expect("serializable"), 0)
        }
    };
    Ok(Outcome {
        body: render(&value, cli.json_indent),
        code,
    })
}
