//! `htheta`: evaluate thetas, compute characteristic groups, build and verify
//! relations, and run the preset suite.
//!
//! Exit codes: 0 pass, 1 parse or usage error, 2 domain error (including a
//! singular `T` or `W` outside the domain), 3 truncation failure, 4 size cap
//! exceeded, 5 residual above tolerance.

mod input;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use htheta::json::{
    cmatrix_to_json, group_to_json, kmatrix_from_json, kmatrix_to_json, pmatrix_from_json, rat_matrix_from_json,
    rational_from_json, rational_to_json, spec_from_json, spec_to_json, theta_value_to_json,
};
use htheta::kfield::{FieldId, KMatrix, Rational};
use htheta::lattice::{compute_g1_capped, compute_g2_capped, FiniteAbelianGroup, Pairing, DEFAULT_GROUP_CAP};
use htheta::presets::{
    default_suite, make_preset, run_case_with, run_paper_suite, w_samples, PresetName, PresetParams, SuiteCase,
    DEFAULT_SEED,
};
use htheta::relation::{
    build_relation_with, evaluate_relation, rat_det, theta_p_as_polynomial_with, tolerance_for, PMatrix,
    RelationOptions, RelationSpec, VerificationReport, DEFAULT_POLYNOMIAL_CAP,
};
use htheta::theta::{in_h1, riemann_theta_z0, theta_general, CMatrix, Characteristic, ThetaParams};
use htheta::{Error, ErrorKind};
use num_complex::Complex64;
use serde_json::{json, Value};

use input::{get_u64, load, w_from_json};

#[derive(Parser)]
#[command(
    name = "htheta",
    version,
    about = "Theta functions and Riemann-type relations over imaginary quadratic fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Target bound on the truncated tail of every theta series.
    #[arg(long, global = true, default_value_t = 1e-12)]
    eps: f64,
    /// Largest admissible lattice radius.
    #[arg(long, global = true, default_value_t = 64)]
    max_radius: u64,
    /// Worker threads (default: all cores). Never changes results.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for sample points.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    out: Output,
    /// Character pairing; relations default to `printed`, `decompose` to `dual`.
    #[arg(long, global = true, value_enum)]
    pairing: Option<PairingArg>,
    /// Limit on group orders and term counts (default 1000000; 50000 monomials for `decompose`).
    #[arg(long, global = true)]
    cap: Option<u64>,
    /// How many representatives or terms to list.
    #[arg(long, global = true, default_value_t = 64)]
    list: usize,
    #[arg(long, global = true, hide = true, default_value_t = 0)]
    corrupt_phase: u8,
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum PairingArg {
    Printed,
    Dual,
}

impl From<PairingArg> for Pairing {
    fn from(p: PairingArg) -> Self {
        match p {
            PairingArg::Printed => Pairing::Printed,
            PairingArg::Dual => Pairing::Dual,
        }
    }
}

#[derive(Args, Default)]
struct Source {
    /// Input document, as a file path or inline JSON.
    #[arg(long)]
    spec: Option<String>,
    /// Named preset instead of `--spec`.
    #[arg(long, conflicts_with = "spec")]
    preset: Option<String>,
    #[arg(long, requires = "preset")]
    d: Option<u64>,
    #[arg(long, requires = "preset")]
    g: Option<usize>,
    #[arg(long, requires = "preset")]
    h: Option<usize>,
    /// Further preset parameters (`alpha`, `beta`) as JSON.
    #[arg(long, requires = "preset")]
    params: Option<String>,
    /// Point of the domain, as a file path or inline JSON: `[re, im]` or a matrix of them.
    #[arg(long = "W")]
    w: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one theta series.
    Eval(Source),
    /// Compute the groups G1 and G2 of a matrix T.
    Groups(Source),
    /// Expand a relation into its right-hand terms.
    Build(Source),
    /// Evaluate both sides of a relation or preset.
    Verify(Source),
    /// Expand a rational positive definite P into rank-one thetas.
    Decompose(Source),
    /// Run the preset suite.
    Suite(SuiteArgs),
}

#[derive(Args)]
struct SuiteArgs {
    /// Run every preset of the standard suite (the default).
    #[arg(long)]
    all: bool,
    /// Restrict to these presets.
    #[arg(long, conflicts_with = "all")]
    preset: Vec<String>,
}

struct Report {
    json: Value,
    csv: String,
    pass: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let out = cli.common.out;
    match run(&cli) {
        Ok(r) => {
            match out {
                Output::Json => println!("{}", serde_json::to_string_pretty(&r.json).expect("json")),
                Output::Csv => print!("{}", r.csv),
            }
            if r.pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: residual above tolerance");
                ExitCode::from(5)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Parse => 1,
                ErrorKind::Domain => 2,
                ErrorKind::Truncation => 3,
                ErrorKind::Cap => 4,
            })
        }
    }
}

fn run(cli: &Cli) -> Result<Report, Error> {
    let c = &cli.common;
    let params = ThetaParams { eps: c.eps, max_radius: c.max_radius, ..Default::default() };
    params.validate().map_err(|e| parse_err(e.to_string()))?;
    if let Some(n) = c.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| parse_err(format!("--threads: {e}")))?;
    }
    match &cli.command {
        Command::Eval(s) => eval(s, &params),
        Command::Groups(s) => groups(s, c),
        Command::Build(s) => build(s, c, &params),
        Command::Verify(s) => verify(s, c, &params),
        Command::Decompose(s) => decompose(s, c, &params),
        Command::Suite(s) => suite(s, &params, c.seed),
    }
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn doc(src: &Source) -> Result<Value, Error> {
    match &src.spec {
        Some(s) => load(s),
        None => Ok(json!({})),
    }
}

fn field_of(doc: &Value) -> Result<FieldId, Error> {
    FieldId::new(get_u64(doc, "d")?.unwrap_or(1)).map_err(|e| parse_err(e.to_string()))
}

fn w_arg(src: &Source, doc: &Value) -> Result<Option<CMatrix>, Error> {
    match (&src.w, doc.get("W")) {
        (Some(s), _) => Ok(Some(w_from_json(&load(s)?)?)),
        (None, Some(v)) => Ok(Some(w_from_json(v)?)),
        (None, None) => Ok(None),
    }
}

fn preset_params(src: &Source) -> Result<PresetParams, Error> {
    let mut p = match &src.params {
        Some(s) => PresetParams::from_json(&load(s)?)?,
        None => PresetParams::default(),
    };
    p.d = src.d.or(p.d);
    p.g = src.g.or(p.g);
    p.h = src.h.or(p.h);
    Ok(p)
}

/// The relation named by `--preset`, or the one in `--spec`.
fn relation_spec(src: &Source) -> Result<(RelationSpec, Vec<String>), Error> {
    if let Some(name) = &src.preset {
        let preset = make_preset(name.parse()?, &preset_params(src)?)?;
        let rp = preset.relation().ok_or_else(|| parse_err(format!("preset {name} is an identity, not a relation")))?;
        return Ok((rp.spec.clone(), preset.warnings.clone()));
    }
    let d = doc(src)?;
    if d.get("T").is_none() {
        return Err(parse_err("a relation needs --preset or --spec with d, g, h, T, P, A0, B0"));
    }
    Ok((spec_from_json(&d)?, Vec::new()))
}

fn relation_options(c: &Common) -> RelationOptions {
    RelationOptions {
        term_cap: c.cap.unwrap_or(DEFAULT_GROUP_CAP),
        corrupt_phase: c.corrupt_phase,
        pairing: c.pairing.map_or(Pairing::Printed, Pairing::from),
    }
}

fn char_or_zero(doc: &Value, key: &str, g: usize, h: usize, field: FieldId) -> Result<KMatrix, Error> {
    match doc.get(key) {
        Some(v) => kmatrix_from_json(v, field),
        None => Ok(KMatrix::zeros(g, h, field)),
    }
}

fn rationals(doc: &Value, key: &str, g: usize) -> Result<Vec<Rational>, Error> {
    match doc.get(key) {
        Some(Value::Array(a)) => a.iter().map(rational_from_json).collect(),
        Some(v) => Err(parse_err(format!("\"{key}\" must be an array, got {v}"))),
        None => Ok(vec![Rational::from_integer(0.into()); g]),
    }
}

fn eval(src: &Source, params: &ThetaParams) -> Result<Report, Error> {
    let doc = doc(src)?;
    let w = w_arg(src, &doc)?.ok_or_else(|| parse_err("eval needs --W or a \"W\" entry"))?;
    let g = w.rows();
    let kind = doc.get("kind").and_then(Value::as_str).unwrap_or("general");
    let value = match kind {
        "general" => {
            let field = field_of(&doc)?;
            let p = match doc.get("P") {
                Some(v) => pmatrix_from_json(v)?,
                None => {
                    let h = doc.get("A0").map(|a| kmatrix_from_json(a, field)).transpose()?.map_or(1, |a| a.cols());
                    PMatrix::scalar_identity(h, 1)
                }
            };
            let h = p.size();
            let ch =
                Characteristic::new(char_or_zero(&doc, "A0", g, h, field)?, char_or_zero(&doc, "B0", g, h, field)?)?;
            theta_general(&w, &p.to_cmatrix(), &ch, params)?
        }
        "riemann" => riemann_theta_z0(&w, &rationals(&doc, "a", g)?, &rationals(&doc, "b", g)?, params)?,
        other => return Err(parse_err(format!("unknown kind {other:?}; expected \"general\" or \"riemann\""))),
    };
    let (_, lambda) = in_h1(&w, params.pd_tol)?;
    let mut json = theta_value_to_json(&value);
    json["lambda_min_Y"] = json!(lambda);
    let csv = format!(
        "re,im,tail,points,lambda_min_Y\n{:e},{:e},{:e},{},{:e}\n",
        value.value.re, value.value.im, value.tail_bound, value.lattice_points_used, lambda
    );
    Ok(Report { json, csv, pass: true })
}

fn listed_group(g: &FiniteAbelianGroup, list: usize) -> Value {
    let mut v = group_to_json(g);
    if let Some(reps) = v["representatives"].as_array_mut() {
        reps.truncate(list);
    }
    v["listed"] = json!(g.representatives.len().min(list));
    v
}

fn group_csv(groups: &[(&str, &FiniteAbelianGroup)]) -> String {
    let mut csv = String::from("group,order,invariant_factors\n");
    for (name, g) in groups {
        let f: Vec<String> = g.invariant_factors.iter().map(u64::to_string).collect();
        csv.push_str(&format!("{name},{},{}\n", g.order, f.join(" ")));
    }
    csv
}

fn groups(src: &Source, c: &Common) -> Result<Report, Error> {
    let (field, g, t) = if src.preset.is_some() {
        let (spec, _) = relation_spec(src)?;
        (spec.field, spec.g, spec.t)
    } else {
        let doc = doc(src)?;
        let field = field_of(&doc)?;
        let g = get_u64(&doc, "g")?.unwrap_or(1) as usize;
        let t = kmatrix_from_json(
            doc.get("T").ok_or_else(|| parse_err("groups needs --preset or --spec with \"T\""))?,
            field,
        )?;
        (field, g, t)
    };
    if t.is_square() && t.det()?.is_zero() {
        return Err(Error::Singular);
    }
    let g1 = compute_g1_capped(g, &t, c.cap.unwrap_or(DEFAULT_GROUP_CAP))?;
    let g2 = compute_g2_capped(g, &t, c.cap.unwrap_or(DEFAULT_GROUP_CAP))?;
    let json = json!({
        "d": field.d(),
        "g": g,
        "h": t.rows(),
        "T": kmatrix_to_json(&t),
        "G1": listed_group(&g1, c.list),
        "G2": listed_group(&g2, c.list),
    });
    Ok(Report { json, csv: group_csv(&[("G1", &g1), ("G2", &g2)]), pass: true })
}

fn build(src: &Source, c: &Common, params: &ThetaParams) -> Result<Report, Error> {
    let (spec, warnings) = relation_spec(src)?;
    let opts = relation_options(c);
    let inst = build_relation_with(&spec, &opts, params)?;
    let mut terms = Vec::new();
    let mut csv = String::from("a_index,b_index,phase\n");
    for t in inst.terms()?.into_iter().take(c.list) {
        let ch = inst.term_characteristic(t.a_index, t.b_index)?;
        csv.push_str(&format!("{},{},{}\n", t.a_index, t.b_index, t.phase));
        terms.push(json!({
            "a_index": t.a_index,
            "b_index": t.b_index,
            "phase": rational_to_json(&t.phase),
            "A": kmatrix_to_json(&ch.a0),
            "B": kmatrix_to_json(&ch.b0),
        }));
    }
    let json = json!({
        "spec": spec_to_json(&spec),
        "pairing": inst.pairing,
        "G1": listed_group(&inst.g1, c.list),
        "G2": listed_group(&inst.g2, c.list),
        "term_count": inst.term_count(),
        "Q": cmatrix_to_json(&inst.q),
        "Q_exact": inst.q_exact.as_ref().map(kmatrix_to_json),
        "lhs": { "A": kmatrix_to_json(&inst.lhs.a0), "B": kmatrix_to_json(&inst.lhs.b0) },
        "terms": terms,
        "warnings": warnings,
    });
    Ok(Report { json, csv, pass: true })
}

fn verify_csv(rows: &[(String, usize, &VerificationReport, bool)]) -> String {
    let mut csv = String::from("label,sample,residual_rel,tolerance,pass\n");
    for (label, sample, r, pass) in rows {
        csv.push_str(&format!("{label},{sample},{:e},{:e},{pass}\n", r.residual_rel, r.tolerance));
    }
    csv
}

fn verify(src: &Source, c: &Common, params: &ThetaParams) -> Result<Report, Error> {
    let opts = relation_options(c);
    if let (Some(name), None) = (&src.preset, &src.w) {
        let case = SuiteCase::new(name.parse::<PresetName>()?, preset_params(src)?);
        let records = run_case_with(&case, &opts, params, c.seed)?;
        let pass = records.iter().all(|r| r.pass());
        let rows: Vec<_> = records.iter().map(|r| (r.label.clone(), r.sample, &r.report, r.pass())).collect();
        let csv = verify_csv(&rows);
        let json = json!({ "pass": pass, "records": records });
        return Ok(Report { json, csv, pass });
    }
    let (spec, warnings) = relation_spec(src)?;
    let inst = build_relation_with(&spec, &opts, params)?;
    let ws = match w_arg(src, &doc(src)?)? {
        Some(w) => vec![w],
        None => w_samples(spec.g, c.seed),
    };
    let reports = ws.iter().map(|w| evaluate_relation(&inst, w, params)).collect::<Result<Vec<_>, _>>()?;
    let pass = reports.iter().all(|r| r.pass);
    let rows: Vec<_> = reports.iter().enumerate().map(|(i, r)| ("relation".to_string(), i, r, r.pass)).collect();
    let csv = verify_csv(&rows);
    let records: Vec<Value> = reports
        .iter()
        .enumerate()
        .map(|(i, r)| json!({ "label": "relation", "sample": i, "order_g1": inst.g1.order, "order_g2": inst.g2.order, "report": r }))
        .collect();
    let json = json!({ "pass": pass, "records": records, "warnings": warnings });
    Ok(Report { json, csv, pass })
}

fn decompose(src: &Source, c: &Common, params: &ThetaParams) -> Result<Report, Error> {
    let doc = doc(src)?;
    let field = field_of(&doc)?;
    let pv = doc.get("P").ok_or_else(|| parse_err("decompose needs --spec with a rational \"P\""))?;
    let p = match pv.get("rational") {
        Some(r) => rat_matrix_from_json(r)?,
        None if pv.get("complex").is_some() => return Err(parse_err("decompose needs a rational P")),
        None => rat_matrix_from_json(pv)?,
    };
    let h = p.len();
    let w = match w_arg(src, &doc)? {
        Some(w) => w,
        None => {
            let g = get_u64(&doc, "g")?.unwrap_or(1) as usize;
            w_samples(g, c.seed).swap_remove(0)
        }
    };
    let g = w.rows();
    let a0 = char_or_zero(&doc, "A0", g, h, field)?;
    let b0 = char_or_zero(&doc, "B0", g, h, field)?;
    let pairing = c.pairing.map_or(Pairing::Dual, Pairing::from);
    let cap = c.cap.unwrap_or(DEFAULT_POLYNOMIAL_CAP);
    let r = theta_p_as_polynomial_with(&p, &a0, &b0, &w, params, cap, pairing)?;
    let tolerance = tolerance_for(r.monomials.len() as u64, params);
    let pass = r.residual < tolerance;
    let lambdas = r.tree.lambdas();
    let complex = |z: Complex64| json!([z.re, z.im]);
    let json = json!({
        "d": field.d(),
        "g": g,
        "h": h,
        "pairing": pairing,
        "tree": r.tree,
        "lambdas": lambdas.iter().map(rational_to_json).collect::<Vec<_>>(),
        "det": rational_to_json(&rat_det(&p)),
        "monomials": r.monomials.len(),
        "value": complex(r.value),
        "direct": complex(r.direct),
        "residual": r.residual,
        "scale": r.scale,
        "tolerance": tolerance,
        "pass": pass,
    });
    let mut csv = String::from("level,lambda\n");
    for (i, l) in lambdas.iter().enumerate() {
        csv.push_str(&format!("{i},{l}\n"));
    }
    Ok(Report { json, csv, pass })
}

fn suite(args: &SuiteArgs, params: &ThetaParams, seed: u64) -> Result<Report, Error> {
    let mut cases = default_suite();
    if !args.preset.is_empty() {
        let names = args.preset.iter().map(|s| s.parse::<PresetName>()).collect::<Result<Vec<_>, _>>()?;
        cases.retain(|c| names.contains(&c.preset));
    }
    let report = run_paper_suite(&cases, params, seed)?;
    Ok(Report { json: report.to_json(), csv: report.to_csv(), pass: report.all_pass() })
}
