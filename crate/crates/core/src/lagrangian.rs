//! First-order Lagrangians: the data model, quadratic coefficient
//! extraction, De Donder momenta and Hamiltonian, the standard regularity
//! diagnosis, and Euler–Lagrange expressions on the formal second jet.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::chart::{Chart, Coordinate, JetPoint};
use crate::error::{Error, Result};
use crate::expr::{canonical, equals, parse, Bindings, Expr, GaussRational, Name};
use crate::linalg::{det_numeric, is_singular, numeric_rank, SymbolicMatrix};

/// A named constant appearing in expressions, with the value used whenever
/// a numeric evaluation needs one.
#[derive(Clone, Debug, PartialEq)]
pub struct Parameter {
    pub name: Name,
    pub default: GaussRational,
}

impl Parameter {
    pub fn new(name: impl Into<Name>, default: GaussRational) -> Self {
        Self { name: name.into(), default }
    }
}

/// Bindings of every parameter to its default value.
pub fn parameter_bindings(params: &[Parameter]) -> Bindings {
    params.iter().map(|p| (p.name.clone(), p.default.to_complex())).collect()
}

pub(crate) fn parameter_names(params: &[Parameter]) -> Vec<Name> {
    params.iter().map(|p| p.name.clone()).collect()
}

/// Union of two parameter lists; the first list wins on name clashes.
pub(crate) fn merge_parameters(a: &[Parameter], b: &[Parameter]) -> Vec<Parameter> {
    let mut out = a.to_vec();
    for p in b {
        if !out.iter().any(|q| q.name == p.name) {
            out.push(p.clone());
        }
    }
    out
}

/// Check that every symbol of `e` is a coordinate admitted by `allowed` or a
/// declared parameter.
pub(crate) fn check_symbols(
    chart: &Chart,
    params: &[Parameter],
    e: &Expr,
    allowed: impl Fn(Coordinate) -> bool,
) -> std::result::Result<(), Name> {
    for s in e.symbols() {
        if params.iter().any(|p| p.name == s) {
            continue;
        }
        match chart.classify(&s) {
            Some(c) if allowed(c) => {}
            _ => return Err(s),
        }
    }
    Ok(())
}

/// A Lagrangian `L(x, y, y_j)` on the first jet space.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralLagrangian {
    chart: Chart,
    expr: Expr,
    params: Vec<Parameter>,
}

impl GeneralLagrangian {
    pub fn new(chart: Chart, expr: Expr, params: Vec<Parameter>) -> Result<Self> {
        check_symbols(&chart, &params, &expr, |c| {
            matches!(c, Coordinate::Base(_) | Coordinate::Fibre(_) | Coordinate::Jet { .. })
        })
        .map_err(|s| Error::InvalidLagrangian(format!("`{s}` is not a first-jet coordinate or parameter")))?;
        Ok(Self { chart, expr, params })
    }

    pub fn parse(chart: Chart, text: &str, params: Vec<Parameter>) -> Result<Self> {
        let names = parameter_names(&params);
        let expr = parse(text, &chart, &names)?;
        Self::new(chart, expr, params)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn params(&self) -> &[Parameter] {
        &self.params
    }

    pub(crate) fn with_expr(&self, expr: Expr) -> Self {
        Self { chart: self.chart.clone(), expr, params: self.params.clone() }
    }

    pub(crate) fn with_params(&self, params: Vec<Parameter>) -> Self {
        Self { chart: self.chart.clone(), expr: self.expr.clone(), params }
    }

    /// `∂L/∂y^σ_i` in flat order.
    pub fn velocity_gradient(&self) -> Vec<Expr> {
        self.chart.jet_names().iter().map(|v| self.expr.differentiate(v).simplify()).collect()
    }
}

/// `L = a + b^j_σ y^σ_j + c^{jk}_{σν} y^σ_j y^ν_k` with `b` in flat order and
/// `c` as a symmetric `mn × mn` matrix over flat indices.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticLagrangian {
    chart: Chart,
    params: Vec<Parameter>,
    pub a: Expr,
    pub b: Vec<Expr>,
    pub c: SymbolicMatrix,
}

impl QuadraticLagrangian {
    /// Build from coefficients; `c` is symmetrized.
    pub fn new(chart: Chart, params: Vec<Parameter>, a: Expr, b: Vec<Expr>, c: SymbolicMatrix) -> Result<Self> {
        let mn = chart.mn();
        if b.len() != mn || c.size() != mn {
            return Err(Error::Shape(format!("expected {mn} linear and {mn}×{mn} quadratic coefficients")));
        }
        let no_jets = |c: Coordinate| matches!(c, Coordinate::Base(_) | Coordinate::Fibre(_));
        for e in std::iter::once(&a).chain(&b).chain(c.entries().map(|(_, _, e)| e)) {
            check_symbols(&chart, &params, e, no_jets)
                .map_err(|s| Error::InvalidLagrangian(format!("coefficient depends on `{s}`")))?;
        }
        let c = SymbolicMatrix::from_fn(mn, |r, s| {
            Expr::mul([Expr::ratio(1, 2), Expr::add([c.get(r, s).clone(), c.get(s, r).clone()])]).simplify()
        });
        Ok(Self { chart, params, a, b, c })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn params(&self) -> &[Parameter] {
        &self.params
    }

    /// `b^i_σ`.
    pub fn b_at(&self, sigma: usize, i: usize) -> Result<&Expr> {
        Ok(&self.b[self.chart.flat_index(sigma, i)?])
    }

    /// `c^{jk}_{σν}`.
    pub fn c_at(&self, sigma: usize, j: usize, nu: usize, k: usize) -> Result<&Expr> {
        Ok(self.c.get(self.chart.flat_index(sigma, j)?, self.chart.flat_index(nu, k)?))
    }

    pub fn is_affine(&self) -> bool {
        self.c.entries().all(|(_, _, e)| canonical(e).is_ok_and(|p| p.is_zero()))
    }

    pub fn reassemble(&self) -> Expr {
        let jets: Vec<Expr> = self.chart.jet_names().into_iter().map(Expr::Var).collect();
        let mut terms = vec![self.a.clone()];
        for (r, v) in jets.iter().enumerate() {
            terms.push(Expr::mul([self.b[r].clone(), v.clone()]));
            for (s, w) in jets.iter().enumerate() {
                terms.push(Expr::mul([self.c.get(r, s).clone(), v.clone(), w.clone()]));
            }
        }
        Expr::add(terms).simplify()
    }

    pub fn to_general(&self) -> GeneralLagrangian {
        GeneralLagrangian { chart: self.chart.clone(), expr: self.reassemble(), params: self.params.clone() }
    }
}

/// De Donder momenta `p̃^i_σ` (flat order) and Hamiltonian `H̃`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeDonderData {
    pub momenta: Vec<Expr>,
    pub hamiltonian: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegularityReport {
    pub det: Complex64,
    pub rank: usize,
    pub regular: bool,
}

fn zero_jets(chart: &Chart) -> HashMap<Name, Expr> {
    chart.jet_names().into_iter().map(|v| (v, Expr::zero())).collect()
}

/// Split `L` into its constant, linear and quadratic parts in the velocities.
pub fn extract_quadratic(l: &GeneralLagrangian) -> Result<QuadraticLagrangian> {
    let chart = &l.chart;
    let jets = chart.jet_names();
    if let Ok(p) = canonical(&l.expr) {
        if p.degree_in(&jets) > 2 {
            return Err(Error::NotQuadraticInVelocities);
        }
    }
    let zero = zero_jets(chart);
    let grad = l.velocity_gradient();
    let a = l.expr.substitute(&zero).simplify();
    let b: Vec<Expr> = grad.iter().map(|g| g.substitute(&zero).simplify()).collect();
    let mn = chart.mn();
    let mut c = SymbolicMatrix::from_fn(mn, |_, _| Expr::zero());
    for r in 0..mn {
        for s in r..mn {
            let h = grad[r].differentiate(&jets[s]).substitute(&zero);
            let v = Expr::mul([Expr::ratio(1, 2), h]).simplify();
            c.set(r, s, v.clone());
            c.set(s, r, v);
        }
    }
    let q = QuadraticLagrangian::new(chart.clone(), l.params.clone(), a, b, c)
        .map_err(|_| Error::NotQuadraticInVelocities)?;
    if !equals(&q.reassemble(), &l.expr).equal {
        return Err(Error::NotQuadraticInVelocities);
    }
    Ok(q)
}

/// `∂²L/∂y^σ_i∂y^ν_j` over flat indices.
pub fn velocity_hessian(l: &GeneralLagrangian) -> SymbolicMatrix {
    let jets = l.chart.jet_names();
    let grad = l.velocity_gradient();
    let mn = jets.len();
    let mut h = SymbolicMatrix::from_fn(mn, |_, _| Expr::zero());
    for r in 0..mn {
        for s in r..mn {
            let v = grad[r].differentiate(&jets[s]).simplify();
            h.set(r, s, v.clone());
            h.set(s, r, v);
        }
    }
    h
}

/// Determinant, numeric rank and the regularity verdict of the velocity
/// Hessian at a point, with parameters at their defaults.
pub fn standard_regularity_report(l: &GeneralLagrangian, pt: &JetPoint) -> Result<RegularityReport> {
    let mut env = parameter_bindings(&l.params);
    env.extend(pt.bindings(&l.chart));
    let h = velocity_hessian(l).evaluate(&env)?;
    Ok(RegularityReport { det: det_numeric(&h), rank: numeric_rank(&h), regular: !is_singular(&h) })
}

pub fn dedonder(l: &GeneralLagrangian) -> DeDonderData {
    let momenta = l.velocity_gradient();
    let jets = l.chart.jet_names();
    let mut terms = vec![Expr::neg(l.expr.clone())];
    for (p, v) in momenta.iter().zip(jets) {
        terms.push(Expr::mul([p.clone(), Expr::Var(v)]));
    }
    DeDonderData { momenta, hamiltonian: Expr::add(terms).simplify() }
}

/// Formal total derivative `D_i` on the second jet space.
pub fn total_derivative(chart: &Chart, e: &Expr, i: usize) -> Expr {
    let mut terms = vec![e.differentiate(&chart.x(i))];
    for nu in 1..=chart.m() {
        let d = e.differentiate(&chart.y(nu));
        if !d.is_zero() {
            terms.push(Expr::mul([Expr::Var(chart.jet(nu, i)), d]));
        }
        for j in 1..=chart.n() {
            let d = e.differentiate(&chart.jet(nu, j));
            if !d.is_zero() {
                terms.push(Expr::mul([Expr::Var(chart.jet2(nu, i, j)), d]));
            }
        }
    }
    Expr::add(terms)
}

/// `E_σ = ∂L/∂y^σ − D_i(∂L/∂y^σ_i)`.
pub fn euler_lagrange_exprs(l: &GeneralLagrangian) -> Vec<Expr> {
    let chart = &l.chart;
    (1..=chart.m())
        .map(|sigma| {
            let mut terms = vec![l.expr.differentiate(&chart.y(sigma))];
            for i in 1..=chart.n() {
                let d = l.expr.differentiate(&chart.jet(sigma, i));
                terms.push(Expr::neg(total_derivative(chart, &d, i)));
            }
            Expr::add(terms).simplify()
        })
        .collect()
}

/// Substitution replacing `y^σ`, `y^σ_i` and `y^σ_{ij}` by a field section
/// and its first and second partial derivatives.
pub fn section_substitution(chart: &Chart, section: &[Expr]) -> Result<HashMap<Name, Expr>> {
    if section.len() != chart.m() {
        return Err(Error::Shape(format!("section has {} fields, chart has m={}", section.len(), chart.m())));
    }
    let mut map = HashMap::new();
    for (s, f) in section.iter().enumerate() {
        let sigma = s + 1;
        map.insert(chart.y(sigma), f.clone());
        for i in 1..=chart.n() {
            let d = f.differentiate(&chart.x(i));
            for j in i..=chart.n() {
                map.insert(chart.jet2(sigma, i, j), d.differentiate(&chart.x(j)).simplify());
            }
            map.insert(chart.jet(sigma, i), d.simplify());
        }
    }
    Ok(map)
}

/// Euler–Lagrange expressions evaluated along a field section `y^σ(x)`.
pub fn el_residual_on_section(l: &GeneralLagrangian, section: &[Expr]) -> Result<Vec<Expr>> {
    let map = section_substitution(&l.chart, section)?;
    Ok(euler_lagrange_exprs(l).iter().map(|e| e.substitute(&map).simplify()).collect())
}
