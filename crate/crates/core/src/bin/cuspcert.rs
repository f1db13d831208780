//! Command-line front end. Every subcommand prints one JSON document; all
//! numbers are exact (rationals as strings). `--pretty` renders the same data
//! as an indented key/value table instead.
//!
//! Exit codes: 0 success (verified certificate for the pipeline commands),
//! 1 precondition/domain/parse error, 2 verification mismatch, 3 search
//! exhaustion, 64 command-line usage error.

use std::collections::BTreeSet;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use cuspcert_core::arith::{parse_rational, Place};
use cuspcert_core::bieberbach::{ghw_search, im_kim, product_with_circle};
use cuspcert_core::equivalence::{
    commensurable, projectively_equivalent, rationally_equivalent,
};
use cuspcert_core::error::Error;
use cuspcert_core::forms::{DiagonalForm, Signature, SymmetricForm};
use cuspcert_core::local::profile;
use cuspcert_core::matrix::Matrix;
use cuspcert_core::pipeline::{
    cusp_witness, flat_check, verify_certificate, CommensurabilityCertificate,
    ComplementReport, CuspProperty, PresentationJson, ProfileJson, VerdictJson,
    WitnessOptions, DEFAULT_GHW_BOUND,
};
use cuspcert_core::realization::{definite_complement, realize, TargetProfile};
use cuspcert_core::SquareClass;

#[derive(Parser)]
#[command(
    name = "cuspcert",
    about = "Exact quadratic-form invariants, commensurability decisions, and flat-manifold certificates",
    version
)]
struct Cli {
    /// Render output as an indented table instead of compact JSON
    #[arg(long, global = true)]
    pretty: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank, signature, discriminant, and negative Hasse-Witt places of a form
    Invariants {
        /// "<a1,...,an>" or a symmetric matrix as a row-major JSON array
        form: String,
    },
    /// Hilbert symbol (a,b)_v
    Hilbert {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
        /// a prime or "inf"
        place: String,
    },
    /// Rational equivalence of two forms
    Equiv { left: String, right: String },
    /// Projective equivalence with scalar witness or obstruction
    ProjEquiv { left: String, right: String },
    /// Commensurability of the hyperbolic manifolds attached to two (m,1) forms
    Commensurable { left: String, right: String },
    /// Construct a form with prescribed invariants
    Realize(RealizeArgs),
    /// Positive definite complement of a signature (m,1) form, with certificate
    Complement { form: String },
    /// Flat-manifold subcommands
    #[command(subcommand)]
    Flat(FlatCommand),
    /// Full witness certificate for a commensurability class
    CuspWitness(CuspWitnessArgs),
    /// Re-verify a certificate file
    Verify { path: String },
}

#[derive(Args)]
struct RealizeArgs {
    #[arg(long)]
    rank: usize,
    /// signature as "r,s"
    #[arg(long)]
    sig: String,
    /// discriminant (a nonzero rational; its square class is used)
    #[arg(long)]
    disc: String,
    /// comma-separated places with Hasse-Witt invariant -1, e.g. "2,3" or "2,inf"
    #[arg(long, default_value = "")]
    neg_places: String,
}

#[derive(Subcommand)]
enum FlatCommand {
    /// Emit a presentation of a built-in family
    Build {
        /// family name; currently "im-kim"
        family: String,
        #[arg(long)]
        n: usize,
        /// take the product with a circle
        #[arg(long)]
        circle: bool,
    },
    /// Run closure and all predicates over a presentation JSON file
    Check { path: String },
    /// Search for a Generalized Hantzsche-Wendt presentation
    GhwSearch {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = DEFAULT_GHW_BOUND)]
        bound: u64,
    },
}

#[derive(Args)]
struct CuspWitnessArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    form: String,
    /// "sw" or "spinc"
    #[arg(long)]
    property: String,
    /// write the certificate here instead of stdout
    #[arg(long)]
    out: Option<String>,
    /// use this positive definite diagonal form as the complement
    #[arg(long)]
    complement_form: Option<String>,
    #[arg(long, default_value_t = DEFAULT_GHW_BOUND)]
    ghw_bound: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // keep clap's message but pin the usage exit code
            let _ = e.print();
            return ExitCode::from(64);
        }
    };
    let pretty = cli.pretty;
    match run(cli.command) {
        Ok(value) => {
            emit(&value, pretty);
            ExitCode::SUCCESS
        }
        Err(CommandError { value, code }) => {
            emit(&value, pretty);
            ExitCode::from(code)
        }
    }
}

struct CommandError {
    value: Value,
    code: u8,
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::SearchExhausted { .. } => 3,
            _ => 1,
        };
        let value = match &e {
            Error::Infeasible { violated } => {
                json!({"error": "infeasible", "violated": violated})
            }
            other => json!({"error": other.to_string()}),
        };
        CommandError { value, code }
    }
}

fn run(command: Command) -> Result<Value, CommandError> {
    match command {
        Command::Invariants { form } => {
            let f = parse_form_argument(&form)?;
            Ok(serde_json::to_value(ProfileJson::from(&profile(&f))).unwrap())
        }
        Command::Hilbert { a, b, place } => {
            let av = parse_rational(&a)?;
            let bv = parse_rational(&b)?;
            let v: Place = place.parse()?;
            let symbol = cuspcert_core::local::hilbert(&av, &bv, &v)?;
            Ok(json!({
                "a": av.to_string(),
                "b": bv.to_string(),
                "place": v.to_string(),
                "symbol": symbol,
            }))
        }
        Command::Equiv { left, right } => {
            let l = parse_form_argument(&left)?;
            let r = parse_form_argument(&right)?;
            Ok(json!({"equivalent": rationally_equivalent(&l, &r)}))
        }
        Command::ProjEquiv { left, right } => {
            let l = parse_form_argument(&left)?;
            let r = parse_form_argument(&right)?;
            let v = projectively_equivalent(&l, &r)?;
            Ok(serde_json::to_value(VerdictJson::from(&v)).unwrap())
        }
        Command::Commensurable { left, right } => {
            let l = parse_form_argument(&left)?;
            let r = parse_form_argument(&right)?;
            let v = commensurable(&l, &r)?;
            let vj = VerdictJson::from(&v);
            Ok(json!({
                "commensurable": vj.equivalent,
                "witness": vj.witness,
                "obstruction": vj.obstruction,
            }))
        }
        Command::Realize(args) => {
            let target = parse_target(&args)?;
            let f = realize(&target)?;
            Ok(json!({
                "form": f.to_string(),
                "profile": ProfileJson::from(&profile(&f)),
            }))
        }
        Command::Complement { form } => {
            let f = parse_form_argument(&form)?;
            let (_, cert) = definite_complement(&f)?;
            Ok(serde_json::to_value(ComplementReport::from_certificate(&cert)).unwrap())
        }
        Command::Flat(flat) => run_flat(flat),
        Command::CuspWitness(args) => {
            let f = parse_form_argument(&args.form)?;
            let property = CuspProperty::parse(&args.property)?;
            let mut opts = WitnessOptions {
                ghw_bound: args.ghw_bound,
                complement_override: None,
            };
            if let Some(text) = &args.complement_form {
                opts.complement_override = Some(parse_form_argument(text)?);
            }
            let cert = cusp_witness(args.m, &f, property, &opts)?;
            let report = verify_certificate(&cert);
            if !report.ok {
                return Err(CommandError {
                    value: json!({
                        "error": "certificate failed self-verification",
                        "mismatches": report.mismatches,
                    }),
                    code: 2,
                });
            }
            let value = serde_json::to_value(&cert).unwrap();
            if let Some(path) = &args.out {
                std::fs::write(path, cert.to_json()).map_err(Error::from)?;
                return Ok(json!({"written": path, "verified": true}));
            }
            Ok(value)
        }
        Command::Verify { path } => {
            let text = std::fs::read_to_string(&path).map_err(Error::from)?;
            let cert = CommensurabilityCertificate::from_json(&text)?;
            let report = verify_certificate(&cert);
            let value = serde_json::to_value(&report).unwrap();
            if report.ok {
                Ok(value)
            } else {
                Err(CommandError { value, code: 2 })
            }
        }
    }
}

fn run_flat(flat: FlatCommand) -> Result<Value, CommandError> {
    match flat {
        FlatCommand::Build { family, n, circle } => {
            if family != "im-kim" {
                return Err(Error::Parse {
                    offset: 0,
                    message: format!("unknown family {family:?}: expected \"im-kim\""),
                }
                .into());
            }
            let mut p = im_kim(n)?;
            if circle {
                p = product_with_circle(&p);
            }
            Ok(serde_json::to_value(PresentationJson::from_presentation(&p)).unwrap())
        }
        FlatCommand::Check { path } => {
            let text = std::fs::read_to_string(&path).map_err(Error::from)?;
            let pj: PresentationJson = serde_json::from_str(&text).map_err(Error::from)?;
            let p = pj.to_presentation()?;
            let report = flat_check(&p)?;
            Ok(serde_json::to_value(report).unwrap())
        }
        FlatCommand::GhwSearch { dim, bound } => match ghw_search(dim, bound)? {
            Some(p) => Ok(serde_json::to_value(PresentationJson::from_presentation(&p)).unwrap()),
            None => Err(CommandError {
                value: json!({
                    "error": "no presentation found within bound",
                    "bound": bound,
                }),
                code: 3,
            }),
        },
    }
}

/// Form arguments: "<a1,...,an>" diagonal syntax, or a symmetric matrix as a
/// row-major JSON array (entries integers or rational strings), which is
/// diagonalized on input.
fn parse_form_argument(text: &str) -> Result<DiagonalForm, Error> {
    let trimmed = text.trim_start();
    if !trimmed.starts_with('[') {
        return DiagonalForm::parse(text);
    }
    let rows: Vec<Vec<Value>> = serde_json::from_str(text).map_err(|e| Error::Parse {
        offset: 0,
        message: format!("invalid matrix JSON: {e}"),
    })?;
    let parse_entry = |v: &Value| -> Result<cuspcert_core::Rational, Error> {
        match v {
            Value::Number(n) => parse_rational(&n.to_string()),
            Value::String(s) => parse_rational(s),
            other => Err(Error::Parse {
                offset: 0,
                message: format!("matrix entry {other} is not a number or rational string"),
            }),
        }
    };
    let mut matrix_rows = Vec::with_capacity(rows.len());
    for row in &rows {
        let mut out = Vec::with_capacity(row.len());
        for v in row {
            out.push(parse_entry(v)?);
        }
        matrix_rows.push(out);
    }
    if matrix_rows.is_empty() || matrix_rows.iter().any(|r| r.len() != matrix_rows.len()) {
        return Err(Error::Parse {
            offset: 0,
            message: "matrix must be square and nonempty".into(),
        });
    }
    let sym = SymmetricForm::new(Matrix::new(matrix_rows))?;
    Ok(sym.diagonalize().0)
}

fn parse_target(args: &RealizeArgs) -> Result<TargetProfile, Error> {
    let sig_parts: Vec<&str> = args.sig.split(',').collect();
    if sig_parts.len() != 2 {
        return Err(Error::Parse {
            offset: 0,
            message: format!("--sig expects \"r,s\", got {:?}", args.sig),
        });
    }
    let parse_count = |s: &str| -> Result<usize, Error> {
        s.trim().parse().map_err(|_| Error::Parse {
            offset: 0,
            message: format!("invalid signature count {s:?}"),
        })
    };
    let signature = Signature {
        pos: parse_count(sig_parts[0])?,
        neg: parse_count(sig_parts[1])?,
    };
    let disc = parse_rational(&args.disc)?;
    let discriminant = SquareClass::of(&disc)?;
    let mut negative_places = BTreeSet::new();
    for piece in args.neg_places.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        negative_places.insert(piece.parse::<Place>()?);
    }
    Ok(TargetProfile {
        rank: args.rank,
        signature,
        discriminant,
        negative_places,
    })
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

fn emit(value: &Value, pretty: bool) {
    if pretty {
        let mut out = String::new();
        render(value, 0, &mut out);
        print!("{out}");
    } else {
        println!("{}", serde_json::to_string(value).unwrap());
    }
}

fn render(value: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                match v {
                    Value::Object(_) | Value::Array(_) if !is_short(v) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render(v, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", short(v))),
                }
            }
        }
        Value::Array(items) => {
            for v in items {
                if is_short(v) {
                    out.push_str(&format!("{pad}- {}\n", short(v)));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    render(v, indent + 1, out);
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", short(other))),
    }
}

fn is_short(v: &Value) -> bool {
    serde_json::to_string(v)
        .map(|s| s.len() <= 60)
        .unwrap_or(false)
}

fn short(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => serde_json::to_string(other).unwrap(),
    }
}
