use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{default_seed, load_problem, load_section, GEntry, GMode, ProblemFile};
use crate::chart::{Chart, JetPoint};
use crate::error::{Error, Result};
use crate::expr::{equals, Expr};
use crate::gtensor::{canonical_from_quadratic, closedness_check, random_constant, ClosednessReport, GTensor};
use crate::hamilton::{p2_system, residuals_on_section, SectionPair};
use crate::lagrangian::{euler_lagrange_exprs, extract_quadratic, standard_regularity_report};
use crate::legendre::{
    hamiltonian_in_legendre, hamiltonian_jet, is_regular_at, momenta, regularity_matrix, regularize_affine,
    LepageanSystem,
};
use crate::linalg::{det_exact, det_symbolic, SymbolicMatrix};
use crate::presets::{load_preset, run_preset_checks};
use crate::verify::{equivalence_suite, grid_residual, GridSection, PROBE_COUNT, RESIDUAL_TOL};

const REGULARITY_PROBES: usize = 20;
const SEARCH_TRIES: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Canonical,
    Random,
    Explicit,
}

#[derive(Debug, Parser)]
#[command(name = "lepage", version, about = "Lepagean regularization of first-order field Lagrangians")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimensions, Lagrangian class and standard regularity.
    Info { problem: PathBuf },
    /// Choose a 2-contact tensor g and report regularity and closedness.
    Regularize {
        problem: PathBuf,
        /// Default: random search for affine Lagrangians, canonical otherwise.
        #[arg(long, value_enum)]
        strategy: Option<Strategy>,
        /// Default: LEPAGE_SEED or 42.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Momenta, regularity matrix and Hamiltonian.
    Legendre { problem: PathBuf },
    /// Euler–Lagrange expressions and p2 residual templates.
    Equations { problem: PathBuf },
    /// Check a candidate solution.
    Verify {
        problem: PathBuf,
        #[arg(long)]
        section: PathBuf,
        /// Also sample the section on an N×N grid over [0,1]².
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Run the checks of a built-in example.
    Example { name: String },
}

struct Outcome {
    ok: bool,
    json: Value,
    text: String,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_)
        | Error::Schema { .. }
        | Error::Syntax { .. }
        | Error::UnknownIdentifier { .. }
        | Error::NonIntegerExponent { .. }
        | Error::UnknownPreset(_)
        | Error::UnboundName(_) => 2,
        _ => 1,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Syntax { .. } => "Syntax",
        Error::UnknownIdentifier { .. } => "UnknownIdentifier",
        Error::NonIntegerExponent { .. } => "NonIntegerExponent",
        Error::UnboundName(_) => "UnboundName",
        Error::DivisionByZero => "DivisionByZero",
        Error::Domain(_) => "Domain",
        Error::NotPolynomial => "NotPolynomial",
        Error::IndexOutOfRange(_) => "IndexOutOfRange",
        Error::InvalidChart(_) => "InvalidChart",
        Error::NotQuadraticInVelocities => "NotQuadraticInVelocities",
        Error::InvalidLagrangian(_) => "InvalidLagrangian",
        Error::DimensionTooSmall(_) => "DimensionTooSmall",
        Error::InvalidComponent(_) => "InvalidComponent",
        Error::SizeLimitExceeded { .. } => "SizeLimitExceeded",
        Error::SingularMatrix => "SingularMatrix",
        Error::NotAntisymmetric => "NotAntisymmetric",
        Error::OddSize(_) => "OddSize",
        Error::Shape(_) => "Shape",
        Error::SearchFailed(_) => "SearchFailed",
        Error::NewtonDivergence(_) => "NewtonDivergence",
        Error::HamiltonianUnavailable(_) => "HamiltonianUnavailable",
        Error::NotRegular(_) => "NotRegular",
        Error::GridTooSmall(_) => "GridTooSmall",
        Error::GridUnsupported(_) => "GridUnsupported",
        Error::UnknownPreset(_) => "UnknownPreset",
        Error::Io(_) => "Io",
        Error::Schema { .. } => "Schema",
    }
}

fn wants_json<I: AsRef<str>>(args: &[I]) -> bool {
    args.windows(2).any(|w| w[0].as_ref() == "--format" && w[1].as_ref() == "json")
        || args.iter().any(|a| a.as_ref() == "--format=json")
}

/// Run with process stdout and stderr; returns the exit code
/// (0 success, 1 checks failed, 2 usage or input error).
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = argv.into_iter().map(Into::into).collect();
    let json_errors = wants_json(&args);
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            if json_errors {
                let v = json!({"error": {"kind": "Usage", "message": e.kind().to_string()}});
                let _ = writeln!(err, "{v}");
            } else {
                let _ = write!(err, "{e}");
            }
            return 2;
        }
    };
    let result = match &cli.command {
        Command::Info { problem } => load_problem(problem).and_then(|s| info(&s)),
        Command::Regularize { problem, strategy, seed } => {
            regularize(problem, *strategy, seed.unwrap_or_else(default_seed))
        }
        Command::Legendre { problem } => load_problem(problem).and_then(|s| legendre(&s)),
        Command::Equations { problem } => load_problem(problem).and_then(|s| equations(&s)),
        Command::Verify { problem, section, grid } => verify(problem, section, *grid),
        Command::Example { name } => example(name),
    };
    match result {
        Ok(o) => {
            let _ = match cli.format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&o.json).unwrap_or_default()),
                Format::Text => write!(out, "{}", o.text),
            };
            if o.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = match cli.format {
                Format::Json => writeln!(err, "{}", json!({"error": {"kind": error_kind(&e), "message": e.to_string()}})),
                Format::Text => writeln!(err, "error: {e}"),
            };
            exit_code(&e)
        }
    }
}

fn complex_text(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

fn legend(chart: &Chart) -> String {
    let names: Vec<String> = chart.jet_names().iter().map(|n| n.to_string()).collect();
    format!("index order: {}", names.join(" "))
}

fn matrix_text(chart: &Chart, k: &SymbolicMatrix) -> String {
    let cells: Vec<Vec<String>> = k.rows().iter().map(|r| r.iter().map(|e| e.to_string()).collect()).collect();
    let width = cells.iter().flatten().map(|c| c.chars().count()).max().unwrap_or(1);
    let mut s = format!("  {}\n", legend(chart));
    for row in &cells {
        let padded: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        s.push_str(&format!("  [ {} ]\n", padded.join("  ")));
    }
    s
}

fn matrix_json(k: &SymbolicMatrix) -> Value {
    Value::from(k.rows().iter().map(|r| r.iter().map(|e| e.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn named_json(names: impl IntoIterator<Item = String>, values: &[Expr]) -> Value {
    Value::Object(names.into_iter().zip(values).map(|(n, e)| (n, Value::from(e.to_string()))).collect())
}

fn named_text(names: impl IntoIterator<Item = String>, values: &[Expr]) -> String {
    names.into_iter().zip(values).map(|(n, e)| format!("  {n} = {e}\n")).collect()
}

fn det_text(k: &SymbolicMatrix) -> Option<String> {
    match k.as_constant() {
        Some(c) => Some(Expr::constant(det_exact(&c)).to_string()),
        None => det_symbolic(k).ok().map(|d| d.to_string()),
    }
}

/// Regular at the origin and at seeded random jet points.
fn regular_at_probes(sys: &LepageanSystem, seed: u64) -> Result<bool> {
    let chart = sys.chart();
    if !is_regular_at(sys, &JetPoint::origin(chart))? {
        return Ok(false);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..REGULARITY_PROBES {
        let mut draw = |k: usize| (0..k).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect::<Vec<_>>();
        let pt = JetPoint::new(chart, draw(chart.n()), draw(chart.m()), draw(chart.mn()))?;
        if !is_regular_at(sys, &pt)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn class(sys: &LepageanSystem) -> &'static str {
    match sys.quadratic() {
        Some(q) if q.is_affine() => "affine",
        Some(_) => "quadratic",
        None => "general",
    }
}

fn info(sys: &LepageanSystem) -> Result<Outcome> {
    let chart = sys.chart();
    let std = standard_regularity_report(sys.lagrangian(), &JetPoint::origin(chart))?;
    let regular = regular_at_probes(sys, default_seed())?;
    let params: Vec<String> = sys.params().iter().map(|p| p.name.to_string()).collect();
    let g_count = sys.g().stored().filter(|(_, e)| !e.is_zero()).count();
    let json = json!({
        "n": chart.n(),
        "m": chart.m(),
        "class": class(sys),
        "parameters": params,
        "lagrangian": sys.lagrangian().expr().to_string(),
        "standard_regularity": {
            "point": "origin",
            "det": complex_text(std.det),
            "rank": std.rank,
            "size": chart.mn(),
            "regular": std.regular,
        },
        "g_nonzero_components": g_count,
        "regular_with_g": regular,
    });
    let text = format!(
        "n = {}, m = {}\nclass: {}\nparameters: {}\nL = {}\nstandard regularity at origin: det = {}, rank {}/{}, {}\n\
         g: {} nonzero components; regularity matrix K {}\n",
        chart.n(),
        chart.m(),
        class(sys),
        if params.is_empty() { "none".to_string() } else { params.join(", ") },
        sys.lagrangian().expr(),
        complex_text(std.det),
        std.rank,
        chart.mn(),
        if std.regular { "regular" } else { "not regular" },
        g_count,
        if regular { "invertible at probes" } else { "singular somewhere" },
    );
    Ok(Outcome { ok: true, json, text })
}

fn closedness_json(c: &ClosednessReport) -> Value {
    let v: Vec<Value> = c
        .violations
        .iter()
        .map(|v| json!({"condition": v.condition.to_string(), "indices": v.indices, "residual": v.residual.to_string()}))
        .collect();
    json!({"closed": c.closed, "violations": v})
}

fn closedness_text(c: &ClosednessReport) -> String {
    let mut s = format!("closed: {}\n", c.closed);
    for v in &c.violations {
        s.push_str(&format!("  {} violated at {:?}: {}\n", v.condition, v.indices, v.residual));
    }
    s
}

fn regularize(path: &PathBuf, strategy: Option<Strategy>, seed: u64) -> Result<Outcome> {
    let text = std::fs::read_to_string(path)?;
    let file = super::parse_problem(&text)?;
    let sys = file.to_system()?;
    let chart = sys.chart().clone();
    if chart.m() < 2 {
        return Err(Error::DimensionTooSmall(format!("2-contact regularization needs m ≥ 2 fields, got m = {}", chart.m())));
    }
    if chart.n() < 2 {
        return Err(Error::DimensionTooSmall(format!("2-contact regularization needs n ≥ 2, got n = {}", chart.n())));
    }
    let strategy = strategy.unwrap_or(match sys.quadratic() {
        Some(q) if q.is_affine() => Strategy::Random,
        _ => Strategy::Canonical,
    });
    let g: GTensor = match strategy {
        Strategy::Explicit => sys.g().clone(),
        Strategy::Canonical => canonical_from_quadratic(&extract_quadratic(sys.lagrangian())?),
        Strategy::Random => match sys.quadratic() {
            Some(q) if q.is_affine() => regularize_affine(q, seed, SEARCH_TRIES)?,
            _ => random_constant(&chart, seed, 1)?,
        },
    };
    let sys = sys.with_g(g)?;
    let regular = regular_at_probes(&sys, seed)?;
    let closed = closedness_check(sys.g());
    let det = det_text(&regularity_matrix(&sys));
    let g_file = ProblemFile::from_system(&sys).g.unwrap_or(GEntry { mode: GMode::Explicit, components: vec![], seed: None });
    let strategy_name = format!("{strategy:?}").to_lowercase();
    let json = json!({
        "strategy": strategy_name,
        "seed": seed,
        "g": g_file,
        "det_k": det,
        "regular": regular,
        "closedness": closedness_json(&closed),
    });
    let mut text = format!("strategy: {strategy_name} (seed {seed})\ng components:\n");
    for c in &g_file.components {
        text.push_str(&format!("  g^{{{}{}}}_{{{}{}}} = {}\n", c.i, c.j, c.sigma, c.nu, c.expr));
    }
    text.push_str(&format!("det K = {}\nregular: {regular}\n", det.as_deref().unwrap_or("(not computed)")));
    text.push_str(&closedness_text(&closed));
    Ok(Outcome { ok: regular && closed.closed, json, text })
}

fn legendre(sys: &LepageanSystem) -> Result<Outcome> {
    let chart = sys.chart();
    let names = || chart.momentum_names().into_iter().map(|n| n.to_string());
    let p = momenta(sys);
    let k = regularity_matrix(sys);
    let h_jet = hamiltonian_jet(sys);
    let h_leg = match hamiltonian_in_legendre(sys) {
        Ok(h) => Some(h),
        Err(Error::HamiltonianUnavailable(_)) => None,
        Err(e) => return Err(e),
    };
    let json = json!({
        "index_order": chart.jet_names().iter().map(|n| n.to_string()).collect::<Vec<_>>(),
        "momenta": named_json(names(), &p),
        "regularity_matrix": matrix_json(&k),
        "det_k": det_text(&k),
        "hamiltonian_jet": h_jet.to_string(),
        "hamiltonian_legendre": h_leg.as_ref().map(|h| h.to_string()),
    });
    let text = format!(
        "momenta:\n{}regularity matrix K:\n{}det K = {}\nH (jet coordinates) = {h_jet}\nH (legendre coordinates) = {}\n",
        named_text(names(), &p),
        matrix_text(chart, &k),
        det_text(&k).as_deref().unwrap_or("(not computed)"),
        h_leg.as_ref().map_or("(no closed form)".to_string(), |h| h.to_string()),
    );
    Ok(Outcome { ok: true, json, text })
}

fn equations(sys: &LepageanSystem) -> Result<Outcome> {
    let chart = sys.chart();
    let el = euler_lagrange_exprs(sys.lagrangian());
    let el_names = || (1..=chart.m()).map(|s| format!("E{s}"));
    let p2 = match p2_system(sys) {
        Ok(p) => Some(p),
        Err(Error::HamiltonianUnavailable(_)) => None,
        Err(e) => return Err(e),
    };
    let first_names = || (1..=chart.m()).map(|s| format!("R_{s}"));
    let second_names = || chart.pairs().map(|(s, i)| format!("R{i}_{s}"));
    let mut json = json!({"euler_lagrange": named_json(el_names(), &el)});
    let mut text = format!("euler-lagrange expressions:\n{}", named_text(el_names(), &el));
    match &p2 {
        Some(p2) => {
            json["p2"] = json!({
                "reduced": p2.reduced,
                "first": named_json(first_names(), &p2.first),
                "second": named_json(second_names(), &p2.second),
            });
            text.push_str(&format!(
                "p2 residual templates ({}):\n{}{}",
                if p2.reduced { "reduced, closed g" } else { "with g-derivative terms" },
                named_text(first_names(), &p2.first),
                named_text(second_names(), &p2.second)
            ));
        }
        None => {
            json["p2"] = Value::Null;
            text.push_str("p2 residual templates: no closed-form Hamiltonian\n");
        }
    }
    Ok(Outcome { ok: true, json, text })
}

fn max_at_probes(sys: &LepageanSystem, es: &[Expr], seed: u64) -> Result<f64> {
    let chart = sys.chart();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..PROBE_COUNT {
        let mut env = sys.parameter_bindings();
        for name in chart.base_names() {
            env.insert(name, Complex64::new(rng.gen_range(0.0..1.0), 0.0));
        }
        for e in es {
            worst = worst.max(e.eval(&env)?.norm());
        }
    }
    Ok(worst)
}

fn verify(problem: &PathBuf, section: &PathBuf, grid: Option<usize>) -> Result<Outcome> {
    let base = load_problem(problem)?;
    let resolved = load_section(section, &base)?;
    let sys = &resolved.system;
    let seed = default_seed();
    let report = equivalence_suite(sys, std::slice::from_ref(&resolved.fields), seed)?;
    let sol = &report.solutions[0];
    let mut ok = report.pass;
    let mut json = json!({
        "el_max": sol.el_max,
        "el_symbolic_zero": sol.el_symbolic_zero,
        "p2_max": sol.p2_max,
        "p2_symbolic_zero": sol.p2_symbolic_zero,
        "lemma3": report.lemma3,
        "closed": report.closed,
        "el_of_l_and_dedonderized_agree": report.proposition2,
        "tolerance": RESIDUAL_TOL,
    });
    let mut text = format!(
        "euler-lagrange residual: max {:.3e} at {PROBE_COUNT} probes{}\n",
        sol.el_max,
        if sol.el_symbolic_zero { " (identically zero)" } else { "" }
    );
    match sol.p2_max {
        Some(r) => text.push_str(&format!(
            "p2 residual on prolongation: max {r:.3e}{}\n",
            if sol.p2_symbolic_zero == Some(true) { " (identically zero)" } else { "" }
        )),
        None => text.push_str("p2 residual: no closed-form Hamiltonian\n"),
    }
    text.push_str(&format!(
        "dedonderization identities: {}\nclosed: {}\nEuler-Lagrange expressions of L and its dedonderization agree: {}\n",
        report.lemma3,
        report.closed,
        report.proposition2.map_or("undecided".to_string(), |b| b.to_string())
    ));

    if let Some(ps) = &resolved.momenta {
        let p2 = p2_system(sys)?;
        let pair = SectionPair::new(sys, resolved.fields.clone(), ps.clone())?;
        let r = residuals_on_section(&p2, &pair)?;
        let worst = max_at_probes(sys, &r, seed)?;
        let zero = r.iter().all(|e| equals(e, &Expr::zero()).holds_exactly());
        ok &= worst <= RESIDUAL_TOL;
        json["given_momenta"] = json!({"p2_max": worst, "p2_symbolic_zero": zero});
        text.push_str(&format!("p2 residual with given momenta: max {worst:.3e}{}\n", if zero { " (identically zero)" } else { "" }));
    }

    if let Some(n) = grid {
        let p2 = p2_system(sys)?;
        let gs = GridSection::sample(&resolved.fields, &sys.parameter_bindings(), n, n)?;
        let g = grid_residual(&p2, &gs)?;
        json["grid"] = json!({"n": n, "sup_norm": g.sup_norm, "order_estimate": g.order_estimate});
        text.push_str(&format!(
            "grid {n}×{n}: sup residual {:.3e}, observed order {}\n",
            g.sup_norm,
            g.order_estimate.map_or("n/a".to_string(), |o| format!("{o:.2}"))
        ));
    }
    text.push_str(if ok { "PASS\n" } else { "FAIL\n" });
    json["pass"] = Value::from(ok);
    Ok(Outcome { ok, json, text })
}

fn example(name: &str) -> Result<Outcome> {
    let preset = load_preset(name)?;
    let sys = &preset.system;
    let chart = sys.chart();
    let report = run_preset_checks(&preset)?;
    let k = regularity_matrix(sys);
    let p = momenta(sys);
    let h_leg = hamiltonian_in_legendre(sys).ok();
    let names = || chart.momentum_names().into_iter().map(|n| n.to_string());

    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| json!({"name": c.name, "tag": c.tag, "pass": c.pass, "detail": c.detail}))
        .collect();
    let audits: Vec<Value> = report
        .audits
        .iter()
        .map(|a| json!({"tag": a.tag, "claim": a.claim, "holds": a.holds, "detail": a.detail}))
        .collect();
    let json = json!({
        "preset": report.preset,
        "index_order": chart.jet_names().iter().map(|n| n.to_string()).collect::<Vec<_>>(),
        "regularity_matrix": matrix_json(&k),
        "momenta": named_json(names(), &p),
        "hamiltonian_legendre": h_leg.as_ref().map(|h| h.to_string()),
        "checks": checks,
        "audits": audits,
        "pass": report.pass(),
    });

    let mut text = format!(
        "example {}\nL = {}\nregularity matrix K:\n{}momenta:\n{}H (legendre coordinates) = {}\n\nchecks:\n",
        report.preset,
        sys.lagrangian().expr(),
        matrix_text(chart, &k),
        named_text(names(), &p),
        h_leg.as_ref().map_or("(no closed form)".to_string(), |h| h.to_string()),
    );
    for c in &report.checks {
        let tag = if c.tag.is_empty() { String::new() } else { format!(" [{}]", c.tag) };
        text.push_str(&format!("  {} {}{tag}", if c.pass { "ok  " } else { "FAIL" }, c.name));
        if !c.detail.is_empty() && !c.pass {
            text.push_str(&format!(": {}", c.detail));
        }
        text.push('\n');
    }
    if !report.audits.is_empty() {
        text.push_str("audits (claims of the source, recorded only):\n");
        for a in &report.audits {
            text.push_str(&format!(
                "  [{}] {} -> {}; {}\n",
                a.tag,
                a.claim,
                if a.holds { "reproduced" } else { "not reproduced" },
                a.detail
            ));
        }
    }
    text.push_str(if report.pass() { "PASS\n" } else { "FAIL\n" });
    Ok(Outcome { ok: report.pass(), json, text })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let argv = std::iter::once("lepage").chain(args.iter().copied());
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn example_maxwell2_prints_matrix() {
        let (code, out, _) = call(&["example", "maxwell2"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("index order: y1_1 y1_2 y2_1 y2_2"));
        assert!(out.contains("p1_1 ="));
    }

    #[test]
    fn json_output_is_stable() {
        let a = call(&["--format", "json", "example", "dirac2"]);
        let b = call(&["example", "dirac2", "--format", "json"]);
        assert_eq!(a, b);
        let v: Value = serde_json::from_str(&a.1).unwrap();
        assert_eq!(v["pass"], Value::Bool(true));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["example", "nope"]).0, 2);
        let (code, _, err) = call(&["--format", "json", "info", "/nonexistent/p.json"]);
        assert_eq!(code, 2);
        let v: Value = serde_json::from_str(&err).unwrap();
        assert_eq!(v["error"]["kind"], "Io");
        assert_eq!(call(&["--help"]).0, 0);
    }
}
