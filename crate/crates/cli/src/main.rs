use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hecke_zero::acceptance::run_all;
use hecke_zero::arith::{rational_to_string, square_factor, QuadSurd};
use hecke_zero::biro::{condition_star_search, factorization_oracle_check, residue_mod_p};
use hecke_zero::cfrac::{evaluate_minus, evaluate_plus, minus_expand, plus_expand, plus_to_minus, MinusCF, PlusCF};
use hecke_zero::characters::DirichletCharacter;
use hecke_zero::linearity::{closed_form_chi, hypothesis_check_norm, load_family_config, verify_linearity};
use hecke_zero::quadfield::{class_numbers_bounded, ideal_inverse, make_field, IdealLattice, DEFAULT_CLASS_NUMBER_BOUND};
use hecke_zero::serial::{
    cell_json, closed_form_json, cyclo_json, field_json, linearity_json, minus_cf_json, oracle_json, pair_json,
    plus_cf_json, rational_json, residue_report_json, surd_json,
};
use hecke_zero::shintani::{l_value_from_setup, partial_hecke_cells, prepare};
use hecke_zero::Error;

#[derive(Parser, Debug)]
#[command(name = "hecke-zero", version, about = "Exact partial Hecke L-values at s = 0 for real quadratic fields")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write results as JSON lines (or CSV with --format csv) to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to HECKE_ZERO_THREADS or the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Field invariants: discriminant, fundamental units, class numbers.
    Field {
        #[arg(long)]
        d: u64,
        #[arg(long, default_value_t = DEFAULT_CLASS_NUMBER_BOUND)]
        bound: u64,
    },
    /// Continued fractions.
    #[command(subcommand)]
    Cf(CfCommand),
    /// L(0, chi, b) from the cone decomposition.
    Lvalue(LvalueArgs),
    /// Linearity in k of 12 q^2 L along n = qk + r.
    #[command(subcommand)]
    Linearity(LinearityCommand),
    /// Residue sieve.
    #[command(subcommand)]
    Biro(BiroCommand),
    /// Run the acceptance suite.
    Selftest,
}

#[derive(Subcommand, Debug)]
enum CfCommand {
    /// Expand x = (a + b sqrt d) / c.
    Expand {
        #[arg(long)]
        d: u64,
        /// a,b,c
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, value_enum, default_value_t = Kind::Minus)]
        kind: Kind,
    },
    /// Convert a purely periodic plus period to the minus period.
    Convert {
        #[arg(long)]
        plus: String,
    },
    /// Evaluate a periodic word.
    Eval {
        #[arg(long, conflicts_with = "minus", required_unless_present = "minus")]
        plus: Option<String>,
        #[arg(long)]
        minus: Option<String>,
        #[arg(long)]
        pre: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Plus,
    Minus,
}

#[derive(Args, Debug)]
struct LvalueArgs {
    #[arg(long)]
    d: u64,
    /// a,b,c with delta = (a + b sqrt d) / c
    #[arg(long, allow_hyphen_values = true)]
    delta: String,
    /// Generators of b as a,b,c;a,b,c; defaults to the inverse of [1, delta].
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    chi: String,
}

#[derive(Subcommand, Debug)]
enum LinearityCommand {
    Verify {
        #[arg(long)]
        family: String,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        chi: String,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        k: String,
    },
    ClosedForm {
        #[arg(long)]
        family: String,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        chi: String,
        #[arg(long)]
        r: u64,
    },
    Hypothesis {
        #[arg(long)]
        family: String,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        k: String,
    },
}

#[derive(Subcommand, Debug)]
enum BiroCommand {
    Search {
        #[arg(long)]
        q_max: u64,
        #[arg(long)]
        p_max: u64,
    },
    Residues {
        #[arg(long)]
        family: String,
        #[arg(long)]
        q_max: u64,
        #[arg(long)]
        p_max: u64,
        #[arg(long)]
        r: Option<u64>,
    },
    Oracle {
        #[arg(long)]
        family: String,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        chi: String,
    },
}

/// A finished command: the payload, the JSON-lines records and an optional
/// flat table for CSV.
struct Outcome {
    name: &'static str,
    inputs: Value,
    payload: Value,
    records: Vec<Value>,
    table: Option<Table>,
    status: u8,
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Outcome {
    fn new(name: &'static str, inputs: Value, payload: Value) -> Self {
        let records = vec![payload.clone()];
        Outcome { name, inputs, payload, records, table: None, status: 0 }
    }
}

type CliResult<T> = std::result::Result<T, Error>;

fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

fn parse_ints(s: &str, what: &str) -> CliResult<Vec<i64>> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| invalid(format!("{what}: {t:?} is not an integer"))))
        .collect()
}

fn parse_surd(s: &str, d: u64, what: &str) -> CliResult<QuadSurd> {
    match parse_ints(s, what)?.as_slice() {
        [_, _, 0] => Err(invalid(format!("{what}: zero denominator"))),
        [a, b, c] => Ok(QuadSurd::new(*a, *b, *c, d)),
        _ => Err(invalid(format!("{what}: expected a,b,c"))),
    }
}

fn parse_chi(id: &str, q: u64) -> CliResult<DirichletCharacter> {
    let chi = DirichletCharacter::parse(id)?;
    if chi.modulus() != q {
        return Err(invalid(format!("character {id} has modulus {}, expected {q}", chi.modulus())));
    }
    Ok(chi)
}

fn check_radicand(d: u64) -> CliResult<()> {
    if d < 2 {
        return Err(invalid(format!("d = {d} must be at least 2")));
    }
    match square_factor(d) {
        Some(prime) => Err(Error::NotSquarefree { value: d.to_string(), prime }),
        None => Ok(()),
    }
}

fn run_field(d: u64, bound: u64) -> CliResult<Outcome> {
    check_radicand(d)?;
    let field = make_field(d)?;
    let h = class_numbers_bounded(d, bound)?;
    Ok(Outcome::new("field", json!({ "d": d, "bound": bound }), field_json(&field, Some(h))))
}

fn run_cf(cmd: CfCommand) -> CliResult<Outcome> {
    match cmd {
        CfCommand::Expand { d, x, kind } => {
            check_radicand(d)?;
            let x = parse_surd(&x, d, "--x")?;
            let word = match kind {
                Kind::Plus => plus_cf_json(&plus_expand(&x)?),
                Kind::Minus => minus_cf_json(&minus_expand(&x)?),
            };
            let kind = if kind == Kind::Plus { "plus" } else { "minus" };
            Ok(Outcome::new(
                "cf expand",
                json!({ "x": surd_json(&x), "kind": kind }),
                json!({ "x": surd_json(&x), "kind": kind, "word": word }),
            ))
        }
        CfCommand::Convert { plus } => {
            let word = PlusCF::purely_periodic(parse_ints(&plus, "--plus")?);
            let minus = plus_to_minus(&word)?;
            Ok(Outcome::new(
                "cf convert",
                json!({ "plus": word.period }),
                json!({ "plus": plus_cf_json(&word), "minus": minus_cf_json(&minus) }),
            ))
        }
        CfCommand::Eval { plus, minus, pre } => {
            let preperiod = pre.map(|p| parse_ints(&p, "--pre")).transpose()?.unwrap_or_default();
            let (kind, value) = match (plus, minus) {
                (Some(p), None) => {
                    let w = PlusCF { preperiod: preperiod.clone(), period: parse_ints(&p, "--plus")? };
                    ("plus", evaluate_plus(&w)?)
                }
                (None, Some(m)) => {
                    let w = MinusCF { preperiod: preperiod.clone(), period: parse_ints(&m, "--minus")?, conversion: None };
                    ("minus", evaluate_minus(&w)?)
                }
                _ => return Err(invalid("give exactly one of --plus and --minus")),
            };
            Ok(Outcome::new("cf eval", json!({ "kind": kind, "pre": preperiod }), json!({ "value": surd_json(&value) })))
        }
    }
}

fn run_lvalue(args: LvalueArgs) -> CliResult<Outcome> {
    check_radicand(args.d)?;
    let field = make_field(args.d)?;
    let delta = parse_surd(&args.delta, args.d, "--delta")?;
    let chi = parse_chi(&args.chi, args.q)?;
    let b = match &args.b {
        Some(text) => {
            let gens = text
                .split(';')
                .map(|g| parse_surd(g, args.d, "--b"))
                .collect::<CliResult<Vec<_>>>()?;
            IdealLattice::from_generators(&field, &gens)?
        }
        None => ideal_inverse(&field, &IdealLattice::from_generators(&field, &[field.one(), delta.clone()])?)?,
    };
    let setup = prepare(&field, &delta, &b, &chi)?;
    let (value, scaled) = l_value_from_setup(&setup, &chi)?;
    let cells = partial_hecke_cells(&setup, &chi)?;
    let (g, x, y) = b.normal_form();
    let inputs = json!({
        "d": args.d,
        "delta": surd_json(&delta),
        "b": [rational_json(&g), rational_json(&x), rational_json(&y)],
        "q": args.q,
        "chi": chi.id(),
    });
    let headline = match value.rational_value() {
        Some(r) => rational_json(&r),
        None => cyclo_json(&value),
    };
    let payload = json!({
        "value": headline,
        "L": cyclo_json(&value),
        "scaled_12q2": cyclo_json(&scaled),
        "minus_period": setup.mcf.period,
        "cells": cells.iter().map(cell_json).collect::<Vec<_>>(),
    });
    let table = Table {
        header: vec!["C", "D", "norm_residue", "chi_exponent", "zeta"],
        rows: cells
            .iter()
            .map(|c| {
                vec![
                    c.c.to_string(),
                    c.d.to_string(),
                    c.norm_residue.to_string(),
                    c.chi_exponent.map(|e| e.to_string()).unwrap_or_default(),
                    rational_to_string(&c.zeta),
                ]
            })
            .collect(),
    };
    let mut out = Outcome::new("lvalue", inputs, payload);
    out.table = Some(table);
    Ok(out)
}

fn run_linearity(cmd: LinearityCommand) -> CliResult<Outcome> {
    match cmd {
        LinearityCommand::Verify { family, q, chi, r, k } => {
            let spec = load_family_config(&family)?;
            let chi = parse_chi(&chi, q)?;
            let mut ks = parse_ints(&k, "--k")?;
            ks.sort_unstable();
            ks.dedup();
            let rep = verify_linearity(&spec, q, &chi, r, &ks)?;
            let table = Table {
                header: vec!["k", "n", "scaled_12q2"],
                rows: rep
                    .ks
                    .iter()
                    .zip(&rep.direct)
                    .map(|(k, v)| vec![k.to_string(), (q as i64 * k + r as i64).to_string(), cyclo_json(v).to_string()])
                    .collect(),
            };
            let inputs = json!({ "family": spec.name, "q": q, "chi": chi.id(), "r": r, "k": ks });
            let mut out = Outcome::new("linearity verify", inputs, linearity_json(&rep));
            out.table = Some(table);
            Ok(out)
        }
        LinearityCommand::ClosedForm { family, q, chi, r } => {
            let spec = load_family_config(&family)?;
            let chi = parse_chi(&chi, q)?;
            let cf = closed_form_chi(&spec, q, &chi, r)?;
            let table = Table {
                header: vec!["C", "D", "A_CD", "B_CD", "norm_residue", "F_exponent"],
                rows: cf
                    .cells
                    .iter()
                    .map(|c| {
                        vec![
                            c.c.to_string(),
                            c.d.to_string(),
                            rational_to_string(&c.a_cd),
                            rational_to_string(&c.b_cd),
                            c.norm_residue.to_string(),
                            c.f_exponent.map(|e| e.to_string()).unwrap_or_default(),
                        ]
                    })
                    .collect(),
            };
            let inputs = json!({ "family": spec.name, "q": q, "chi": chi.id(), "r": r });
            let mut out = Outcome::new("linearity closed-form", inputs, closed_form_json(&cf));
            out.table = Some(table);
            Ok(out)
        }
        LinearityCommand::Hypothesis { family, q, r, k } => {
            let spec = load_family_config(&family)?;
            let mut ks = parse_ints(&k, "--k")?;
            ks.sort_unstable();
            ks.dedup();
            let holds = hypothesis_check_norm(&spec, q, r, &ks)?;
            let inputs = json!({ "family": spec.name, "q": q, "r": r, "k": ks });
            Ok(Outcome::new("linearity hypothesis", inputs, json!({ "holds": holds })))
        }
    }
}

fn run_biro(cmd: BiroCommand) -> CliResult<Outcome> {
    match cmd {
        BiroCommand::Search { q_max, p_max } => {
            let pairs: Vec<Value> = condition_star_search(q_max, p_max)?.iter().map(pair_json).collect();
            let mut out = Outcome::new("biro search", json!({ "q_max": q_max, "p_max": p_max }), json!(pairs));
            out.records = pairs;
            Ok(out)
        }
        BiroCommand::Residues { family, q_max, p_max, r } => {
            let spec = load_family_config(&family)?;
            let mut reports = Vec::new();
            let mut skipped = Vec::new();
            for pair in condition_star_search(q_max, p_max)? {
                let rs: Vec<u64> = match r {
                    Some(r) if r < pair.q => vec![r],
                    Some(_) => continue,
                    None => (0..pair.q).collect(),
                };
                for r in rs {
                    match residue_mod_p(&spec, &pair, r) {
                        Ok(rep) => reports.push(residue_report_json(&rep)),
                        Err(e @ (Error::NoAdmissibleN { .. } | Error::HypothesisFailed { .. })) => {
                            skipped.push(json!({
                                "q": pair.q,
                                "p": pair.p,
                                "chi": pair.chi.id(),
                                "r": r,
                                "error": e.kind(),
                            }))
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
            let inputs = json!({ "family": spec.name, "q_max": q_max, "p_max": p_max, "r": r });
            let mut out = Outcome::new("biro residues", inputs, json!({ "reports": reports, "skipped": skipped }));
            out.records = reports;
            Ok(out)
        }
        BiroCommand::Oracle { family, n, q, chi } => {
            let spec = load_family_config(&family)?;
            let chi = parse_chi(&chi, q)?;
            let check = factorization_oracle_check(&spec, n, q, &chi)?;
            let inputs = json!({ "family": spec.name, "n": n, "q": q, "chi": chi.id() });
            Ok(Outcome::new("biro oracle", inputs, oracle_json(&check)))
        }
    }
}

fn run_selftest() -> Outcome {
    let results = run_all();
    let passed = results.iter().all(|r| r.passed);
    let criteria: Vec<Value> = results
        .iter()
        .map(|r| {
            json!({
                "id": r.id,
                "name": r.name,
                "passed": r.passed,
                "detail": r.detail,
                "elapsed_ms": r.elapsed.as_secs_f64() * 1e3,
            })
        })
        .collect();
    for r in &results {
        eprintln!("{}", r.line());
    }
    let mut out = Outcome::new("selftest", json!({}), json!({ "passed": passed, "criteria": criteria.clone() }));
    out.records = criteria;
    out.status = if passed { 0 } else { 1 };
    out
}

fn configure_threads(flag: Option<usize>) -> CliResult<()> {
    let from_env = match std::env::var("HECKE_ZERO_THREADS") {
        Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| invalid(format!("HECKE_ZERO_THREADS={v:?} is not a count")))?),
        Err(_) => None,
    };
    if let Some(n) = flag.or(from_env) {
        if n == 0 {
            return Err(invalid("thread count must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Internal(e.to_string()))?;
    }
    Ok(())
}

fn write_table(table: &Table, sink: &mut dyn Write) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()
}

fn emit(outcome: &Outcome, format: Format, out: Option<&PathBuf>, elapsed_ms: f64) -> CliResult<()> {
    let io_err = |e: std::io::Error| invalid(format!("cannot write output: {e}"));
    let table = match format {
        Format::Csv => Some(
            outcome
                .table
                .as_ref()
                .ok_or_else(|| invalid(format!("{} has no tabular output; use --format json", outcome.name)))?,
        ),
        Format::Json => None,
    };
    let envelope = json!({
        "tool": "hecke-zero",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": outcome.name,
        "inputs": outcome.inputs,
        "payload": outcome.payload,
        "elapsed_ms": elapsed_ms,
    });
    if let Some(path) = out {
        let mut file = File::create(path).map_err(io_err)?;
        match table {
            Some(t) => write_table(t, &mut file).map_err(io_err)?,
            None => {
                for record in &outcome.records {
                    writeln!(file, "{record}").map_err(io_err)?;
                }
            }
        }
    }
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match table {
        Some(t) => write_table(t, &mut lock).map_err(io_err)?,
        None => writeln!(lock, "{envelope}").map_err(io_err)?,
    }
    Ok(())
}

fn error_exit(kind: &str, message: &str, internal: bool) -> ExitCode {
    println!("{}", json!({ "tool": "hecke-zero", "error": { "kind": kind, "message": message } }));
    eprintln!("error ({kind}): {message}");
    ExitCode::from(if internal { 3 } else { 2 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    error_exit("UnknownCommand", e.to_string().trim(), false)
                }
                _ => error_exit("ValidationError", e.to_string().trim(), false),
            };
        }
    };
    if let Err(e) = configure_threads(cli.threads) {
        return error_exit(e.kind(), &e.to_string(), e.is_internal());
    }
    let start = Instant::now();
    let result = match cli.command {
        Command::Field { d, bound } => run_field(d, bound),
        Command::Cf(cmd) => run_cf(cmd),
        Command::Lvalue(args) => run_lvalue(args),
        Command::Linearity(cmd) => run_linearity(cmd),
        Command::Biro(cmd) => run_biro(cmd),
        Command::Selftest => Ok(run_selftest()),
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    match result.and_then(|outcome| emit(&outcome, cli.format, cli.out.as_ref(), elapsed_ms).map(|_| outcome.status)) {
        Ok(status) => ExitCode::from(status),
        Err(e) => error_exit(e.kind(), &e.to_string(), e.is_internal()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn integer_lists() {
        assert_eq!(parse_ints("2, 3,-1", "x").unwrap(), vec![2, 3, -1]);
        assert!(parse_ints("2,a", "x").is_err());
        assert!(parse_surd("1,2", 5, "x").is_err());
        assert!(parse_surd("1,2,0", 5, "x").is_err());
        assert_eq!(parse_surd("3,1,2", 5, "x").unwrap(), QuadSurd::new(3, 1, 2, 5));
    }
}
