//! Worked examples (Dirac and Maxwell fields, a random affine Lagrangian)
//! with their expected artifacts, stored as expression text in fixture
//! files under `fixtures/`.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::chart::{Chart, Coordinate, JetPoint};
use crate::error::{Error, Result};
use crate::expr::{equals, parse, Expr, GaussRational, Name};
use crate::gtensor::{canonical_from_quadratic, closedness_check, dedonderize, quarter, satellite, GTensor};
use crate::hamilton::{p2_system, prolong_section, residuals_on_section};
use crate::lagrangian::{
    dedonder, el_residual_on_section, euler_lagrange_exprs, extract_quadratic, GeneralLagrangian, Parameter,
};
use crate::legendre::{
    corollary1_check, dedonderization_report, hamiltonian_in_legendre, hamiltonian_jet, inverse_legendre_exprs,
    is_regular_at, krupka_matrix, momenta, regularity_matrix, regularize_affine, LepageanSystem,
};
use crate::linalg::{det_exact, det_symbolic, is_singular, SymbolicMatrix};

pub const PRESET_NAMES: [&str; 5] = ["dirac2", "dirac4", "maxwell2", "maxwell4", "affine_toy"];

const PRESET_SEED: u64 = 42;
const PROBE_TOL: f64 = 1e-9;

/// One expected artifact. Texts may use the placeholders `L0`, `L{i}_{σ}`
/// (coefficients of an affine Lagrangian) and `u` (`4g^{12}_{12}`).
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Artifact {
    Lagrangian { tag: String, expr: String },
    DeDonder { tag: String, momenta: BTreeMap<String, String>, hamiltonian: String },
    Matrix { tag: String, rows: Vec<Vec<String>> },
    Det { tag: String, expr: String },
    Momenta { tag: String, entries: BTreeMap<String, String> },
    Inverse { tag: String, entries: BTreeMap<String, String> },
    HLeg {
        tag: String,
        expr: String,
        #[serde(default)]
        probes: usize,
    },
    HJet { tag: String, expr: String },
    Satellite { tag: String, expr: String },
    Dedonderized { tag: String, expr: String },
    /// `L̄ − L`.
    LagrangianCorrection { tag: String, expr: String },
    /// `H − H̃(L)`.
    HamiltonianCorrection { tag: String, expr: String },
    /// A claim that the Krupka-induced matrix is singular.
    KrupkaSingular { tag: String, note: String },
    /// A claimed closed form of `H` in jet coordinates.
    HamiltonianClaim { tag: String, expr: String, note: String },
}

impl Artifact {
    pub fn tag(&self) -> &str {
        match self {
            Artifact::Lagrangian { tag, .. }
            | Artifact::DeDonder { tag, .. }
            | Artifact::Matrix { tag, .. }
            | Artifact::Det { tag, .. }
            | Artifact::Momenta { tag, .. }
            | Artifact::Inverse { tag, .. }
            | Artifact::HLeg { tag, .. }
            | Artifact::HJet { tag, .. }
            | Artifact::Satellite { tag, .. }
            | Artifact::Dedonderized { tag, .. }
            | Artifact::LagrangianCorrection { tag, .. }
            | Artifact::HamiltonianCorrection { tag, .. }
            | Artifact::KrupkaSingular { tag, .. }
            | Artifact::HamiltonianClaim { tag, .. } => tag,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct Fixture {
    name: String,
    #[serde(default)]
    template_instances: usize,
    solutions: Vec<Vec<String>>,
    artifacts: Vec<Artifact>,
}

fn fixture_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "dirac2" => include_str!("../fixtures/dirac2.json"),
        "dirac4" => include_str!("../fixtures/dirac4.json"),
        "maxwell2" => include_str!("../fixtures/maxwell2.json"),
        "maxwell4" => include_str!("../fixtures/maxwell4.json"),
        "affine_toy" => include_str!("../fixtures/affine_toy.json"),
        _ => return None,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Preset {
    pub name: String,
    pub system: LepageanSystem,
    /// Exact Euler–Lagrange solutions.
    pub solutions: Vec<Vec<Expr>>,
    pub artifacts: Vec<Artifact>,
    /// Number of random affine Lagrangians on which the placeholder
    /// artifacts are re-checked.
    pub template_instances: usize,
    pub seed: u64,
}

fn real(n: i64) -> GaussRational {
    GaussRational::from_int(n)
}

/// `L = ½(y^σ_ν y^ν_σ − 𝔤^{σν}𝔤_{μρ} y^μ_σ y^ρ_ν)` with
/// `𝔤 = diag(−1, 1, …, 1)`, fields indexed like the base.
pub fn maxwell_lagrangian(n: usize) -> Result<GeneralLagrangian> {
    let chart = Chart::new(n, n)?;
    let metric = |k: usize| if k == 1 { -1 } else { 1 };
    let y = |s: usize, i: usize| Expr::Var(chart.jet(s, i));
    let mut terms = Vec::new();
    for sigma in 1..=n {
        for nu in 1..=n {
            terms.push(Expr::mul([Expr::ratio(1, 2), y(sigma, nu), y(nu, sigma)]));
            // Diagonal metric: only ρ = μ and ν = σ survive.
            let w = metric(sigma) * metric(nu);
            terms.push(Expr::mul([Expr::ratio(-w, 2), Expr::pow(y(nu, sigma), 2)]));
        }
    }
    GeneralLagrangian::new(chart, Expr::add(terms).simplify(), vec![])
}

/// Dirac Lagrangian `i/2(ψ̄γ^μ∂_μψ + ∂_μψ̄γ^μψ) − ψ̄mψ` with `ψ = y1`,
/// `ψ̄ = y2`, and scalar parameters `gamma{μ}`, `m`.
pub fn dirac_lagrangian(n: usize) -> Result<GeneralLagrangian> {
    let chart = Chart::new(n, 2)?;
    let mut params: Vec<Parameter> = (1..=n).map(|k| Parameter::new(format!("gamma{k}"), real(k as i64))).collect();
    params.push(Parameter::new("m", real(1)));
    let mut inner = Vec::new();
    for mu in 1..=n {
        let g = Expr::param(format!("gamma{mu}"));
        inner.push(Expr::mul([Expr::Var(chart.y(2)), g.clone(), Expr::Var(chart.jet(1, mu))]));
        inner.push(Expr::mul([Expr::Var(chart.jet(2, mu)), g, Expr::Var(chart.y(1))]));
    }
    let half_i = Expr::mul([Expr::ratio(1, 2), Expr::imaginary_unit()]);
    let mass = Expr::mul([Expr::Var(chart.y(2)), Expr::param("m"), Expr::Var(chart.y(1))]);
    let e = Expr::sub(Expr::mul([half_i, Expr::add(inner)]), mass).simplify();
    GeneralLagrangian::new(chart, e, params)
}

/// `u_k = 4g^{ij}_{12}` in the order `12, 13, …, (n−1)n`.
fn dirac_tensor(chart: &Chart, params: Vec<Parameter>, names: &[String]) -> Result<GTensor> {
    let mut slots = Vec::new();
    let n = chart.n();
    for i in 1..=n {
        for j in i + 1..=n {
            slots.push((i, j));
        }
    }
    let values: Vec<_> = slots.into_iter().zip(names).map(|(s, name)| (s, Expr::param(name.as_str()))).collect();
    quarter(chart, params, &values)
}

pub fn dirac_system(n: usize) -> Result<LepageanSystem> {
    let l = dirac_lagrangian(n)?;
    let (names, defaults): (Vec<String>, Vec<i64>) = if n == 2 {
        (vec!["u".into()], vec![1])
    } else {
        ((1..=n * (n - 1) / 2).map(|k| format!("u{k}")).collect(), vec![1, 2, 3, 4, 5, 7])
    };
    let params: Vec<Parameter> = names.iter().zip(defaults).map(|(nm, d)| Parameter::new(nm.as_str(), real(d))).collect();
    let g = dirac_tensor(l.chart(), params, &names)?;
    LepageanSystem::new(l, g)
}

pub fn maxwell_system(n: usize) -> Result<LepageanSystem> {
    let l = maxwell_lagrangian(n)?;
    let g = canonical_from_quadratic(&extract_quadratic(&l)?);
    LepageanSystem::new(l, g)
}

/// `L₀ + L^i_σ y^σ_i` with random polynomial coefficients of degree ≤ 2 in
/// `(x, y)`.
pub fn random_affine(chart: &Chart, seed: u64) -> Result<GeneralLagrangian> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars: Vec<Expr> = chart.base_names().into_iter().chain(chart.fibre_names()).map(Expr::Var).collect();
    let poly = |rng: &mut ChaCha8Rng| {
        let terms: Vec<Expr> = (0..3)
            .map(|_| {
                let mut k = rng.gen_range(-3i64..=2);
                if k >= 0 {
                    k += 1;
                }
                let degree = rng.gen_range(0..=2);
                let mut factors = vec![Expr::int(k)];
                for _ in 0..degree {
                    factors.push(vars[rng.gen_range(0..vars.len())].clone());
                }
                Expr::mul(factors)
            })
            .collect();
        Expr::add(terms)
    };
    let mut terms = vec![poly(&mut rng)];
    for name in chart.jet_names() {
        terms.push(Expr::mul([poly(&mut rng), Expr::Var(name)]));
    }
    GeneralLagrangian::new(chart.clone(), Expr::add(terms).simplify(), vec![])
}

fn affine_toy_system(seed: u64) -> Result<LepageanSystem> {
    let chart = Chart::new(2, 2)?;
    let l = random_affine(&chart, seed)?;
    let g = regularize_affine(&extract_quadratic(&l)?, seed, 100)?;
    LepageanSystem::new(l, g)
}

pub fn load_preset(name: &str) -> Result<Preset> {
    let text = fixture_text(name).ok_or_else(|| Error::UnknownPreset(name.to_string()))?;
    let fixture: Fixture =
        serde_json::from_str(text).map_err(|e| Error::Schema { path: format!("fixtures/{name}.json"), message: e.to_string() })?;
    let system = match name {
        "dirac2" => dirac_system(2)?,
        "dirac4" => dirac_system(4)?,
        "maxwell2" => maxwell_system(2)?,
        "maxwell4" => maxwell_system(4)?,
        _ => affine_toy_system(PRESET_SEED)?,
    };
    let chart = system.chart().clone();
    let names: Vec<&str> = system.params().iter().map(|p| &*p.name).collect();
    let solutions = fixture
        .solutions
        .iter()
        .map(|s| s.iter().map(|t| parse(t, &chart, &names)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(Preset {
        name: fixture.name,
        system,
        solutions,
        artifacts: fixture.artifacts,
        template_instances: fixture.template_instances,
        seed: PRESET_SEED,
    })
}

/// Values of the affine placeholders for `sys`: `L0`, `L{i}_{σ}` from the
/// coefficients of its Lagrangian, `u = 4g^{12}_{12}` unless `u` is already
/// a parameter.
pub fn affine_placeholders(sys: &LepageanSystem) -> HashMap<Name, Expr> {
    let mut map = HashMap::new();
    let chart = sys.chart();
    if let Some(q) = sys.quadratic().filter(|q| q.is_affine()) {
        map.insert("L0".into(), q.a.clone());
        for (r, (sigma, i)) in chart.pairs().enumerate() {
            map.insert(format!("L{i}_{sigma}").into(), q.b[r].clone());
        }
    }
    if chart.n() >= 2 && chart.m() >= 2 && !sys.params().iter().any(|p| &*p.name == "u") {
        if let Ok(g) = sys.g().component(1, 2, 1, 2) {
            map.insert("u".into(), Expr::mul([Expr::int(4), g]).simplify());
        }
    }
    map
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub tag: String,
    pub pass: bool,
    pub detail: String,
}

/// A statement of the source that the computation does not reproduce or
/// that is only recorded, kept apart from the pass/fail checks.
#[derive(Clone, Debug, PartialEq)]
pub struct Audit {
    pub kind: &'static str,
    pub tag: String,
    pub claim: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PresetReport {
    pub preset: String,
    pub checks: Vec<Check>,
    pub audits: Vec<Audit>,
}

impl PresetReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn exact(a: &Expr, b: &Expr) -> bool {
    equals(a, b).holds_exactly()
}

struct Context<'a> {
    sys: &'a LepageanSystem,
    names: Vec<String>,
    placeholders: HashMap<Name, Expr>,
}

impl Context<'_> {
    fn new(sys: &LepageanSystem) -> Context<'_> {
        let placeholders = affine_placeholders(sys);
        let mut names: Vec<String> = sys.params().iter().map(|p| p.name.to_string()).collect();
        let chart = sys.chart();
        names.push("L0".into());
        for (sigma, i) in chart.pairs() {
            names.push(format!("L{i}_{sigma}"));
        }
        if !names.iter().any(|n| n == "u") {
            names.push("u".into());
        }
        Context { sys, names, placeholders }
    }

    /// Parse fixture text; `None` when it mentions a placeholder this
    /// system cannot fill.
    fn expr(&self, text: &str) -> Result<Option<Expr>> {
        let e = parse(text, self.sys.chart(), &self.names)?;
        let own: Vec<&str> = self.sys.params().iter().map(|p| &*p.name).collect();
        let unfilled = e.symbols().into_iter().any(|s| {
            self.sys.chart().classify(&s).is_none() && !own.contains(&&*s) && !self.placeholders.contains_key(&s)
        });
        Ok((!unfilled).then(|| e.substitute(&self.placeholders).simplify()))
    }

    fn named(&self, entries: &BTreeMap<String, String>, actual: &[Expr]) -> Result<Option<(bool, String)>> {
        let chart = self.sys.chart();
        let mut bad = Vec::new();
        for (name, text) in entries {
            let r = match chart.classify(name) {
                Some(Coordinate::Momentum { sigma, i } | Coordinate::Jet { sigma, i }) => chart.flat_index(sigma, i)?,
                _ => return Err(Error::Schema { path: format!("entries.{name}"), message: "not a momentum or jet".into() }),
            };
            let Some(want) = self.expr(text)? else { return Ok(None) };
            if !exact(&actual[r], &want) {
                bad.push(format!("{name}: got {}", actual[r]));
            }
        }
        Ok(Some((bad.is_empty(), bad.join("; "))))
    }
}

fn scalar(name: &str, tag: &str, got: &Expr, want: &Expr) -> Check {
    let pass = exact(got, want);
    let detail = if pass { String::new() } else { format!("got {got}, expected {want}") };
    Check { name: name.into(), tag: tag.into(), pass, detail }
}

fn symbolic_det(k: &SymbolicMatrix) -> Result<Expr> {
    match k.as_constant() {
        Some(c) => Ok(Expr::constant(det_exact(&c))),
        None => det_symbolic(k),
    }
}

/// `H_leg(p(v)) = H_jet(v)` at seeded random points.
fn probe_error(sys: &LepageanSystem, h_leg: &Expr, count: usize, seed: u64) -> Result<f64> {
    let chart = sys.chart();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = momenta(sys);
    let h_jet = hamiltonian_jet(sys);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let mut env = sys.parameter_bindings();
        for name in chart.base_names().into_iter().chain(chart.fibre_names()).chain(chart.jet_names()) {
            env.insert(name, Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
        }
        let mut penv = env.clone();
        for (name, e) in chart.momentum_names().into_iter().zip(&p) {
            penv.insert(name, e.eval(&env)?);
        }
        let (a, b) = (h_leg.eval(&penv)?, h_jet.eval(&env)?);
        worst = worst.max((a - b).norm() / (1.0 + b.norm()));
    }
    Ok(worst)
}

fn artifact_checks(ctx: &Context, art: &Artifact, seed: u64, suffix: &str) -> Result<Option<Check>> {
    let sys = ctx.sys;
    let chart = sys.chart();
    let tag = art.tag();
    let check = |name: &str, pass: bool, detail: String| Check { name: format!("{name}{suffix}"), tag: tag.into(), pass, detail };
    Ok(Some(match art {
        Artifact::Lagrangian { expr, .. } => {
            let Some(want) = ctx.expr(expr)? else { return Ok(None) };
            scalar(&format!("lagrangian{suffix}"), tag, sys.lagrangian().expr(), &want)
        }
        Artifact::DeDonder { momenta: entries, hamiltonian, .. } => {
            let dd = dedonder(sys.lagrangian());
            let Some((pm, dm)) = ctx.named(entries, &dd.momenta)? else { return Ok(None) };
            let Some(want) = ctx.expr(hamiltonian)? else { return Ok(None) };
            let ph = exact(&dd.hamiltonian, &want);
            check("de donder momenta and hamiltonian", pm && ph, dm)
        }
        Artifact::Matrix { rows, .. } => {
            let mut parsed = Vec::with_capacity(rows.len());
            for row in rows {
                let mut r = Vec::with_capacity(row.len());
                for t in row {
                    let Some(e) = ctx.expr(t)? else { return Ok(None) };
                    r.push(e);
                }
                parsed.push(r);
            }
            let want = SymbolicMatrix::from_rows(parsed)?;
            let k = regularity_matrix(sys);
            let pass = k.size() == want.size() && k.equals(&want) == Some(true);
            check("regularity matrix", pass, if pass { String::new() } else { format!("got {:?}", k.rows()) })
        }
        Artifact::Det { expr, .. } => {
            let Some(want) = ctx.expr(expr)? else { return Ok(None) };
            scalar(&format!("det K{suffix}"), tag, &symbolic_det(&regularity_matrix(sys))?, &want)
        }
        Artifact::Momenta { entries, .. } => {
            let Some((pass, detail)) = ctx.named(entries, &momenta(sys))? else { return Ok(None) };
            check("momenta", pass, detail)
        }
        Artifact::Inverse { entries, .. } => {
            let Some((pass, detail)) = ctx.named(entries, &inverse_legendre_exprs(sys)?)? else { return Ok(None) };
            check("inverse legendre map", pass, detail)
        }
        Artifact::HLeg { expr, probes, .. } => {
            let Some(want) = ctx.expr(expr)? else { return Ok(None) };
            let got = hamiltonian_in_legendre(sys)?;
            let mut c = scalar(&format!("hamiltonian (legendre coordinates){suffix}"), tag, &got, &want);
            if *probes > 0 {
                let err = probe_error(sys, &want, *probes, seed)?;
                c.pass &= err <= PROBE_TOL;
                c.detail = format!("{} probe error {err:.2e} at {probes} points", c.detail).trim().to_string();
            }
            c
        }
        Artifact::HJet { expr, .. } => {
            let Some(want) = ctx.expr(expr)? else { return Ok(None) };
            scalar(&format!("hamiltonian (jet coordinates){suffix}"), tag, &hamiltonian_jet(sys), &want)
        }
        Artifact::Satellite { expr, .. } => {
            let Some(want) = ctx.expr(expr)? else { return Ok(None) };
            scalar(&format!("satellite{suffix}"), tag, &satellite(sys.g()), &want)
        }
        Artifact::Dedonderized { expr, .. } => {
            let Some(want) = ctx.expr(expr)? else { return Ok(None) };
            scalar(&format!("dedonderization{suffix}"), tag, dedonderize(sys.lagrangian(), sys.g()).expr(), &want)
        }
        Artifact::LagrangianCorrection { expr, .. } => {
            let Some(want) = ctx.expr(expr)? else { return Ok(None) };
            let got = Expr::sub(dedonderize(sys.lagrangian(), sys.g()).expr().clone(), sys.lagrangian().expr().clone());
            scalar(&format!("dedonderization correction{suffix}"), tag, &got, &want)
        }
        Artifact::HamiltonianCorrection { expr, .. } => {
            let Some(want) = ctx.expr(expr)? else { return Ok(None) };
            let got = Expr::sub(hamiltonian_jet(sys), dedonder(sys.lagrangian()).hamiltonian);
            scalar(&format!("hamiltonian correction{suffix}"), tag, &got, &want)
        }
        Artifact::KrupkaSingular { .. } | Artifact::HamiltonianClaim { .. } => {
            let _ = chart;
            return Ok(None);
        }
    }))
}

fn audit(sys: &LepageanSystem, art: &Artifact, ctx: &Context) -> Result<Option<Audit>> {
    Ok(match art {
        Artifact::KrupkaSingular { tag, note } => {
            let k = krupka_matrix(sys.lagrangian());
            let det = symbolic_det(&k)?;
            let numerically = is_singular(&k.evaluate(&sys.parameter_bindings())?);
            Some(Audit {
                kind: "krupka_singular",
                tag: tag.clone(),
                claim: note.clone(),
                holds: det.is_zero() && numerically,
                detail: format!("det = {det}; numerically singular: {numerically}"),
            })
        }
        Artifact::HamiltonianClaim { tag, expr, note } => {
            let Some(want) = ctx.expr(expr)? else { return Ok(None) };
            let h = hamiltonian_jet(sys);
            let holds = exact(&h, &want);
            Some(Audit {
                kind: "hamiltonian_claim",
                tag: tag.clone(),
                claim: note.clone(),
                holds,
                detail: if holds { String::new() } else { format!("computed H = {h}") },
            })
        }
        _ => None,
    })
}

fn structural_checks(p: &Preset) -> Result<Vec<Check>> {
    let sys = &p.system;
    let chart = sys.chart();
    let mut out = Vec::new();
    let mut push = |name: &str, pass: bool, detail: String| {
        out.push(Check { name: name.into(), tag: String::new(), pass, detail });
    };

    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut regular = is_regular_at(sys, &JetPoint::origin(chart))?;
    for _ in 0..5 {
        let mut draw = |k: usize| (0..k).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect::<Vec<_>>();
        let pt = JetPoint::new(chart, draw(chart.n()), draw(chart.m()), draw(chart.mn()))?;
        regular &= is_regular_at(sys, &pt)?;
    }
    push("regular at default parameters", regular, String::new());

    let closed = closedness_check(sys.g());
    push("closed 2-contact term", closed.closed, format!("{} violations", closed.violations.len()));

    let dd = dedonderization_report(sys);
    push("dedonderization identities", dd.all(), format!("{dd:?}"));

    let c1 = corollary1_check(sys, &JetPoint::origin(chart))?;
    push("K · Hess_p H = identity", c1.ok, format!("exact: {}, max error {:.2e}", c1.exact, c1.max_error));

    let sat = GeneralLagrangian::new(chart.clone(), satellite(sys.g()), sys.params().to_vec())?;
    let null = euler_lagrange_exprs(&sat).iter().all(|e| exact(e, &Expr::zero()));
    push("satellite is a null Lagrangian", null, String::new());

    let el = euler_lagrange_exprs(sys.lagrangian());
    let el_bar = euler_lagrange_exprs(&dedonderize(sys.lagrangian(), sys.g()));
    push("Euler–Lagrange expressions of L and L̄ agree", el.iter().zip(&el_bar).all(|(a, b)| exact(a, b)), String::new());

    let p2 = p2_system(sys)?;
    for (k, gamma) in p.solutions.iter().enumerate() {
        let el = el_residual_on_section(sys.lagrangian(), gamma)?;
        push(&format!("solution {}: Euler–Lagrange residual", k + 1), el.iter().all(|e| exact(e, &Expr::zero())), String::new());
        let r = residuals_on_section(&p2, &prolong_section(sys, gamma)?)?;
        push(&format!("solution {}: p2 residual", k + 1), r.iter().all(|e| exact(e, &Expr::zero())), String::new());
    }
    Ok(out)
}

/// Random affine Lagrangians on two fields over a plane with `g^{12}_{12} = u/4`, `u` symbolic.
fn template_instance(seed: u64) -> Result<LepageanSystem> {
    let chart = Chart::new(2, 2)?;
    let l = random_affine(&chart, seed)?;
    let params = vec![Parameter::new("u", real(1))];
    let g = quarter(&chart, params, &[((1, 2), Expr::param("u"))])?;
    LepageanSystem::new(l, g)
}

pub fn run_preset_checks(p: &Preset) -> Result<PresetReport> {
    let sys = &p.system;
    let ctx = Context::new(sys);
    let mut checks = structural_checks(p)?;
    let mut audits = Vec::new();
    for art in &p.artifacts {
        if let Some(c) = artifact_checks(&ctx, art, p.seed, "")? {
            checks.push(c);
        }
        if let Some(a) = audit(sys, art, &ctx)? {
            audits.push(a);
        }
    }
    for t in 0..p.template_instances {
        let inst = template_instance(p.seed + 1 + t as u64)?;
        let ictx = Context::new(&inst);
        let suffix = format!(" [random affine #{}]", t + 1);
        for art in &p.artifacts {
            if matches!(art, Artifact::Momenta { .. } | Artifact::Inverse { .. } | Artifact::HLeg { .. } | Artifact::Matrix { .. }) {
                if let Some(c) = artifact_checks(&ictx, art, p.seed, &suffix)? {
                    checks.push(c);
                }
            }
        }
    }
    Ok(PresetReport { preset: p.name.clone(), checks, audits })
}
