//! JSON problem and section files, and the command-line driver.

mod cli;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::expr::{parse, Expr, GaussRational};
use crate::gtensor::{canonical_from_quadratic, random_constant, GTensor};
use crate::lagrangian::{extract_quadratic, GeneralLagrangian, Parameter, QuadraticLagrangian};
use crate::legendre::LepageanSystem;
use crate::linalg::SymbolicMatrix;

pub use cli::{run, run_with, Cli, Command, Format, Strategy};

pub const DEFAULT_SEED: u64 = 42;

/// `LEPAGE_SEED` if set and numeric, otherwise 42.
pub fn default_seed() -> u64 {
    std::env::var("LEPAGE_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SEED)
}

/// A complex rational as `["re", "im"]`, each `"p"` or `"p/q"`.
pub type ComplexText = [String; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterEntry {
    pub name: String,
    pub default: ComplexText,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LagrangianEntry {
    Expr {
        expr: String,
    },
    /// `L = a + b[σ][i]·y^σ_i + c[σ][i][ν][j]·y^σ_i·y^ν_j`.
    Quadratic {
        a: String,
        b: Vec<Vec<String>>,
        c: Vec<Vec<Vec<Vec<String>>>>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GMode {
    Explicit,
    Canonical,
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentEntry {
    pub sigma: usize,
    pub nu: usize,
    pub i: usize,
    pub j: usize,
    pub expr: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GEntry {
    pub mode: GMode,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<ComponentEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    pub m: usize,
    #[serde(default)]
    pub parameters: Vec<ParameterEntry>,
    pub lagrangian: LagrangianEntry,
    /// Absent means the zero tensor (Poincaré–Cartan form).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<GEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionFile {
    pub fields: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub momenta: Option<Vec<String>>,
    #[serde(default)]
    pub bindings: BTreeMap<String, ComplexText>,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema { path: path.into(), message: message.into() }
}

pub fn complex_from_text(c: &ComplexText, path: &str) -> Result<GaussRational> {
    let part = |s: &str, which: &str| {
        GaussRational::parse_rational(s).ok_or_else(|| schema(format!("{path}[{which}]"), format!("`{s}` is not a rational")))
    };
    Ok(GaussRational::new(part(&c[0], "0")?, part(&c[1], "1")?))
}

pub fn complex_to_text(c: &GaussRational) -> ComplexText {
    [c.re.to_string(), c.im.to_string()]
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| schema(format!("line {}, column {}", e.line(), e.column()), e.to_string()))
}

pub fn parse_problem(text: &str) -> Result<ProblemFile> {
    from_json(text)
}

pub fn parse_section(text: &str) -> Result<SectionFile> {
    from_json(text)
}

impl ProblemFile {
    /// Deterministic construction; `random` mode without a seed uses
    /// [`default_seed`].
    pub fn to_system(&self) -> Result<LepageanSystem> {
        let chart = Chart::new(self.n, self.m).map_err(|e| schema("n", e.to_string()))?;
        let mut params = Vec::with_capacity(self.parameters.len());
        for (k, p) in self.parameters.iter().enumerate() {
            if chart.classify(&p.name).is_some() {
                return Err(schema(format!("parameters[{k}].name"), format!("`{}` is a coordinate name", p.name)));
            }
            params.push(Parameter::new(p.name.as_str(), complex_from_text(&p.default, &format!("parameters[{k}].default"))?));
        }
        let names: Vec<&str> = self.parameters.iter().map(|p| p.name.as_str()).collect();
        let ex = |t: &str| parse(t, &chart, &names);

        let lagrangian = match &self.lagrangian {
            LagrangianEntry::Expr { expr } => GeneralLagrangian::new(chart.clone(), ex(expr)?, params.clone())?,
            LagrangianEntry::Quadratic { a, b, c } => {
                let (n, m) = (chart.n(), chart.m());
                if b.len() != m || b.iter().any(|r| r.len() != n) {
                    return Err(schema("lagrangian.b", format!("expected {m}×{n} entries")));
                }
                let shape_ok = c.len() == m
                    && c.iter().all(|ci| ci.len() == n && ci.iter().all(|cin| cin.len() == m && cin.iter().all(|x| x.len() == n)));
                if !shape_ok {
                    return Err(schema("lagrangian.c", format!("expected {m}×{n}×{m}×{n} entries")));
                }
                let mut flat_b = Vec::with_capacity(chart.mn());
                for (sigma, i) in chart.pairs() {
                    flat_b.push(ex(&b[sigma - 1][i - 1])?);
                }
                let mut cm = SymbolicMatrix::from_fn(chart.mn(), |_, _| Expr::zero());
                for (r, (s, i)) in chart.pairs().enumerate() {
                    for (q, (v, j)) in chart.pairs().enumerate() {
                        cm.set(r, q, ex(&c[s - 1][i - 1][v - 1][j - 1])?);
                    }
                }
                QuadraticLagrangian::new(chart.clone(), params.clone(), ex(a)?, flat_b, cm)?.to_general()
            }
        };

        let g = match &self.g {
            None => GTensor::zero(chart.clone(), params.clone()),
            Some(entry) => match entry.mode {
                GMode::Explicit => {
                    let mut g = GTensor::zero(chart.clone(), params.clone());
                    for (k, c) in entry.components.iter().enumerate() {
                        let path = format!("g.components[{k}]");
                        let value = ex(&c.expr)?;
                        g.set(c.sigma, c.nu, c.i, c.j, value).map_err(|e| schema(path, e.to_string()))?;
                    }
                    g
                }
                GMode::Canonical => {
                    let q = extract_quadratic(&lagrangian)
                        .map_err(|e| schema("g.mode", format!("canonical tensor needs a quadratic Lagrangian: {e}")))?;
                    canonical_from_quadratic(&q)
                }
                GMode::Random => random_constant(&chart, entry.seed.unwrap_or_else(default_seed), 1)?,
            },
        };
        LepageanSystem::new(lagrangian, g)
    }

    /// Serialize a system with an explicit tensor.
    pub fn from_system(sys: &LepageanSystem) -> Self {
        let chart = sys.chart();
        let components = sys
            .g()
            .stored()
            .map(|((sigma, nu, i, j), e)| ComponentEntry { sigma, nu, i, j, expr: e.to_string() })
            .collect();
        ProblemFile {
            n: chart.n(),
            m: chart.m(),
            parameters: sys
                .params()
                .iter()
                .map(|p| ParameterEntry { name: p.name.to_string(), default: complex_to_text(&p.default) })
                .collect(),
            lagrangian: LagrangianEntry::Expr { expr: sys.lagrangian().expr().to_string() },
            g: Some(GEntry { mode: GMode::Explicit, components, seed: None }),
        }
    }
}

pub fn load_problem(path: impl AsRef<Path>) -> Result<LepageanSystem> {
    parse_problem(&std::fs::read_to_string(path)?)?.to_system()
}

pub fn write_problem(sys: &LepageanSystem, path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(&ProblemFile::from_system(sys)).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// A section file resolved against a system: the system with the file's
/// bindings substituted, the fields and the optional momenta.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedSection {
    pub system: LepageanSystem,
    pub fields: Vec<Expr>,
    pub momenta: Option<Vec<Expr>>,
}

impl SectionFile {
    pub fn resolve(&self, sys: &LepageanSystem) -> Result<ResolvedSection> {
        let mut values = Vec::with_capacity(self.bindings.len());
        for (name, v) in &self.bindings {
            values.push((name.as_str(), complex_from_text(v, &format!("bindings.{name}"))?));
        }
        let system = sys.instantiate(&values)?;
        let chart = system.chart();
        let bound: std::collections::HashMap<crate::expr::Name, Expr> =
            values.iter().map(|(n, v)| ((*n).into(), Expr::constant(v.clone()))).collect();
        if self.fields.len() != chart.m() {
            return Err(schema("fields", format!("expected {} fields, got {}", chart.m(), self.fields.len())));
        }
        let names: Vec<&str> = sys.params().iter().map(|p| &*p.name).collect();
        let in_x = |t: &str, path: String| -> Result<Expr> {
            let e = parse(t, chart, &names)?.substitute(&bound).simplify();
            match e.symbols().into_iter().find(|s| !names.contains(&&**s) && !chart.base_names().contains(s)) {
                Some(s) => Err(schema(path, format!("`{s}` is not a base coordinate"))),
                None => Ok(e),
            }
        };
        let fields = self.fields.iter().enumerate().map(|(k, t)| in_x(t, format!("fields[{k}]"))).collect::<Result<Vec<_>>>()?;
        let momenta = match &self.momenta {
            None => None,
            Some(ps) => {
                if ps.len() != chart.mn() {
                    return Err(schema("momenta", format!("expected {} momenta, got {}", chart.mn(), ps.len())));
                }
                Some(ps.iter().enumerate().map(|(k, t)| in_x(t, format!("momenta[{k}]"))).collect::<Result<Vec<_>>>()?)
            }
        };
        Ok(ResolvedSection { system, fields, momenta })
    }
}

pub fn load_section(path: impl AsRef<Path>, sys: &LepageanSystem) -> Result<ResolvedSection> {
    parse_section(&std::fs::read_to_string(path)?)?.resolve(sys)
}
