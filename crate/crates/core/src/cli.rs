//! The `opcalc` command line: argument parsing, dispatch and exit codes.
//!
//! Exit codes: 0 pass, 1 mathematical failure, 2 input error, 3 cutoff overflow.

use crate::cobar::{self, Color, Which};
use crate::error::{Error, Result};
use crate::hochschild::{self, poly, AInfinityStructure, JsonAlgebra};
use crate::scoalgebra::{morphism_compatibility_check, q_square_check, Cutoffs, JsonCoderivation};
use crate::swisscheese;
use crate::transfer::{self, JsonTransferInput};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "opcalc", version, about = "Exact computations for open-closed homotopy algebras and Swiss-Cheese cobar complexes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Arity cutoff N.
    #[arg(long, global = true, default_value_t = 4)]
    pub arity: usize,
    /// Weight cutoff W.
    #[arg(long, global = true, default_value_t = 4)]
    pub weight: usize,
    /// Polynomial degree cutoff D.
    #[arg(long = "poly-degree", global = true, default_value_t = 3)]
    pub poly_degree: u32,
    /// Bound on k + n for tree enumeration.
    #[arg(long = "tree-bound", global = true, default_value_t = swisscheese::DEFAULT_TREE_BOUND)]
    pub tree_bound: usize,
    /// Size bound on each cochain argument of a monomial.
    #[arg(long, global = true, default_value_t = 2)]
    pub vsize: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maurer–Cartan equation [m, m] = 0 for an A∞ structure file.
    CheckMc {
        #[arg(long)]
        input: PathBuf,
    },
    /// Q̂² = 0 for a structure file (rule over an algebra, or tables).
    Qsq {
        #[arg(long)]
        input: PathBuf,
    },
    /// Non-formality certificate for S or sc.
    Nonformality {
        #[arg(long, value_parser = parse_operad)]
        operad: Which,
    },
    /// E¹ dimension table of the Swiss-Cheese spectral sequence.
    ScTable {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        /// Output color of the signature (c only for n = 0).
        #[arg(long, default_value = "o", value_parser = parse_color)]
        out: Color,
        #[arg(long = "min-degree", default_value_t = -8, allow_hyphen_values = true)]
        min_degree: i64,
        #[arg(long = "max-degree", default_value_t = 2, allow_hyphen_values = true)]
        max_degree: i64,
    },
    /// Transfer the tautological structure along a contraction.
    Transfer {
        #[arg(long)]
        input: PathBuf,
    },
    /// Hochschild cohomology of an algebra file, or of ℚ[x_1..x_d] with --poly d.
    Hh {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        poly: Option<usize>,
        #[arg(long)]
        degree: i64,
    },
}

fn parse_operad(s: &str) -> std::result::Result<Which, String> {
    match Which::parse(s) {
        Ok(w @ (Which::S | Which::Sc)) => Ok(w),
        Ok(_) => Err("the certificate is defined for S and sc".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_color(s: &str) -> std::result::Result<Color, String> {
    match s {
        "c" => Ok(Color::C),
        "o" => Ok(Color::O),
        _ => Err(format!("color must be c or o, got {s:?}")),
    }
}

/// What a run produced: the exit code and the rendered output.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Input(_) => 2,
        Error::Cutoff(_) => 3,
        Error::Math(_) | Error::Internal(_) => 1,
    }
}

fn read_json<T: serde::de::DeserializeOwned>(p: &PathBuf) -> Result<T> {
    let s = std::fs::read_to_string(p).map_err(|e| Error::input(format!("{}: {e}", p.display())))?;
    Ok(serde_json::from_str(&s)?)
}

/// (passed, report)
type Report = (bool, Value);

fn check_mc(cli: &Cli, input: &PathBuf) -> Result<Report> {
    let j: JsonAlgebra = read_json(input)?;
    let a = AInfinityStructure::from_json(&j, cli.arity)?;
    let v = hochschild::maurer_cartan_check(&a);
    Ok((v.is_empty(), json!({"command": "check-mc", "arity_cutoff": a.cutoff, "pass": v.is_empty(), "violations": v})))
}

fn qsq(cli: &Cli, input: &PathBuf) -> Result<Report> {
    let j: JsonCoderivation = read_json(input)?;
    let q = j.build(Cutoffs::new(cli.arity, cli.vsize))?;
    let r = q_square_check(&q);
    Ok((r.is_empty(), json!({"command": "qsq", "pass": r.is_empty(), "checked": r.checked, "violations": r.violations})))
}

fn nonformality(operad: Which) -> Result<Report> {
    let c = cobar::nonformality_witness(operad)?;
    Ok((c.is_nonformal(), serde_json::to_value(&c)?))
}

fn sc_table(cli: &Cli, k: usize, n: usize, out: Color, lo: i64, hi: i64) -> Result<(bool, Value, String)> {
    if lo > hi {
        return Err(Error::input("min-degree exceeds max-degree"));
    }
    let t = swisscheese::e1_dimension_table(k, n, out, lo, hi, cli.tree_bound)?;
    let d1 = swisscheese::d1_dimension_defects(k, n, out, cli.tree_bound)?;
    let csv = t.to_csv();
    Ok((d1.is_empty(), json!({"command": "sc-table", "table": t, "d1_dimension_defects": d1}), csv))
}

fn transfer_cmd(cli: &Cli, input: &PathBuf) -> Result<Report> {
    let j: JsonTransferInput = read_json(input)?;
    let w = cli.weight;
    let a = AInfinityStructure::from_json(&j.algebra, w + 1)?;
    let c = j.contraction.build(&a.space)?;
    let q2 = transfer::tautological_for_transfer(&a, w, cli.vsize)?;
    let tr = transfer::transfer_structure(&q2, &c, w, cli.vsize)?;
    let qs = q_square_check(&tr.q);
    let mc = morphism_compatibility_check(&tr.t, &tr.q, &q2);
    let o = transfer::o_color(&tr.q, w + 1)?;
    let oracle = transfer::ainf_transfer_oracle(&a, &c, w + 1)?;
    let agrees = o.m == oracle.m;
    let pass = qs.is_empty() && mc.is_empty() && agrees;
    Ok((
        pass,
        json!({
            "command": "transfer",
            "weight": w,
            "pass": pass,
            "o_color": o.to_json(),
            "qsq_violations": qs.violations,
            "morphism_violations": mc.violations.len(),
            "oracle_agrees": agrees,
            "solved_per_weight": tr.solved_per_weight(),
        }),
    ))
}

fn hh(cli: &Cli, input: &Option<PathBuf>, polyd: Option<usize>, degree: i64) -> Result<Report> {
    match (input, polyd) {
        (Some(p), None) => {
            let j: JsonAlgebra = read_json(p)?;
            let a = AInfinityStructure::from_json(&j, 2)?;
            let r = hochschild::hochschild_cohomology(&a, degree, cli.arity)?;
            let reps: Vec<JsonAlgebra> = r.representatives.iter().map(|c| hochschild::cochain_to_json(&a.space, c)).collect();
            Ok((true, json!({"command": "hh", "degree": r.degree, "dim": r.dim, "representatives": reps})))
        }
        (None, Some(d)) => {
            if degree < 0 {
                return Err(Error::input("negative degree"));
            }
            let n = degree as usize;
            let s = cli.poly_degree.max(n as u32 + 1);
            let r = poly::poly_hochschild_cohomology(d, n, cli.poly_degree, s)?;
            let hkr = poly::hkr_check(d, n, cli.poly_degree, s)?;
            let pass = hkr.all_cocycles && hkr.hh_dim == hkr.polyvectors && hkr.injective_rank == hkr.polyvectors;
            Ok((
                pass,
                json!({
                    "command": "hh",
                    "variables": d,
                    "degree": n,
                    "poly_degree": cli.poly_degree,
                    "dim": r.dim,
                    "by_weight": r.by_weight,
                    "polyvector_dim": hkr.polyvectors,
                    "hkr_images_cocycles": hkr.all_cocycles,
                    "hkr_rank": hkr.injective_rank,
                }),
            ))
        }
        _ => Err(Error::input("hh needs exactly one of --input or --poly")),
    }
}

fn render_text(v: &Value) -> String {
    fn go(v: &Value, prefix: &str, out: &mut String) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    go(x, &if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") }, out);
                }
            }
            Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
                for (i, x) in a.iter().enumerate() {
                    go(x, &format!("{prefix}[{i}]"), out);
                }
            }
            _ => out.push_str(&format!("{prefix}: {v}\n")),
        }
    }
    let mut s = String::new();
    go(v, "", &mut s);
    s
}

fn dispatch(cli: &Cli) -> Result<(bool, String)> {
    if cli.arity == 0 || cli.weight == 0 || cli.poly_degree == 0 || cli.tree_bound == 0 {
        return Err(Error::input("cutoffs must be positive"));
    }
    let mut csv = None;
    let (pass, v) = match &cli.command {
        Command::CheckMc { input } => check_mc(cli, input)?,
        Command::Qsq { input } => qsq(cli, input)?,
        Command::Nonformality { operad } => nonformality(*operad)?,
        Command::ScTable { k, n, out, min_degree, max_degree } => {
            let (p, v, c) = sc_table(cli, *k, *n, *out, *min_degree, *max_degree)?;
            csv = Some(c);
            (p, v)
        }
        Command::Transfer { input } => transfer_cmd(cli, input)?,
        Command::Hh { input, poly, degree } => hh(cli, input, *poly, *degree)?,
    };
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&v)? + "\n",
        Format::Text => render_text(&v),
        Format::Csv => csv.ok_or_else(|| Error::input("csv output is only available for sc-table"))?,
    };
    Ok((pass, text))
}

/// Parses `args` (including the program name) and runs one command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return Outcome { code, output: e.to_string() };
        }
    };
    match dispatch(&cli) {
        Ok((pass, text)) => {
            if let Some(p) = &cli.output {
                if let Err(e) = std::fs::write(p, &text) {
                    return Outcome { code: 2, output: format!("{}: {e}\n", p.display()) };
                }
            }
            Outcome { code: if pass { 0 } else { 1 }, output: if cli.output.is_some() { String::new() } else { text } }
        }
        Err(e) => Outcome { code: exit_code(&e), output: format!("error: {e}\n") },
    }
}

/// Caps rayon's global pool from OPCALC_THREADS, if set.
pub fn init_threads() -> Result<()> {
    if let Ok(s) = std::env::var("OPCALC_THREADS") {
        let n: usize = s.trim().parse().map_err(|_| Error::input(format!("OPCALC_THREADS={s:?} is not a positive integer")))?;
        if n == 0 {
            return Err(Error::input("OPCALC_THREADS must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::Internal(e.to_string()))?;
    }
    Ok(())
}
