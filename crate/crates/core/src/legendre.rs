//! The generalized Legendre transformation of a Lepagean equivalent
//! `ρ = θ_λ + g^{ij}_{σν} ω^σ∧ω^ν∧ω_{ij}`: regularity matrix, momenta,
//! Hamiltonian, inversion, and the regularization search for affine
//! Lagrangians.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::chart::{Chart, JetPoint};
use crate::error::{Error, Result};
use crate::expr::{equals, Bindings, Expr, GaussRational, Name};
use crate::gtensor::{dedonderize, random_constant, satellite, GTensor};
use crate::lagrangian::{
    dedonder, extract_quadratic, merge_parameters, parameter_bindings, velocity_hessian, GeneralLagrangian,
    Parameter, QuadraticLagrangian,
};
use crate::linalg::{det_exact, inverse_symbolic, is_singular, solve, NumericMatrix, SymbolicMatrix};

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 50;
const FD_STEP: f64 = 1e-5;
const COROLLARY1_TOL: f64 = 1e-8;

/// A Lagrangian together with the 2-contact tensor of its Lepagean
/// equivalent. With `g = 0` this is the Poincaré–Cartan form.
#[derive(Clone, Debug, PartialEq)]
pub struct LepageanSystem {
    lagrangian: GeneralLagrangian,
    quadratic: Option<QuadraticLagrangian>,
    g: GTensor,
}

impl LepageanSystem {
    pub fn new(lagrangian: GeneralLagrangian, g: GTensor) -> Result<Self> {
        if lagrangian.chart() != g.chart() {
            return Err(Error::Shape("lagrangian and g-tensor live on different charts".into()));
        }
        let params = merge_parameters(lagrangian.params(), g.params());
        let lagrangian = lagrangian.with_params(params.clone());
        let g = g.with_params(params);
        let quadratic = extract_quadratic(&lagrangian).ok();
        Ok(Self { lagrangian, quadratic, g })
    }

    pub fn chart(&self) -> &Chart {
        self.lagrangian.chart()
    }

    pub fn lagrangian(&self) -> &GeneralLagrangian {
        &self.lagrangian
    }

    pub fn quadratic(&self) -> Option<&QuadraticLagrangian> {
        self.quadratic.as_ref()
    }

    pub fn g(&self) -> &GTensor {
        &self.g
    }

    pub fn params(&self) -> &[Parameter] {
        self.lagrangian.params()
    }

    /// Parameter defaults as evaluation bindings.
    pub fn parameter_bindings(&self) -> Bindings {
        parameter_bindings(self.params())
    }

    /// Replace the named parameters by constants and drop them from the
    /// parameter list.
    pub fn instantiate(&self, values: &[(&str, GaussRational)]) -> Result<Self> {
        let mut map: HashMap<Name, Expr> = HashMap::new();
        for (name, v) in values {
            if !self.params().iter().any(|p| &*p.name == *name) {
                return Err(Error::UnboundName((*name).to_string()));
            }
            map.insert((*name).into(), Expr::Const(v.clone()));
        }
        let params: Vec<Parameter> = self.params().iter().filter(|p| !map.contains_key(&p.name)).cloned().collect();
        let expr = self.lagrangian.expr().substitute(&map).simplify();
        let lagrangian = GeneralLagrangian::new(self.chart().clone(), expr, params.clone())?;
        Self::new(lagrangian, self.g.substitute(&map, params))
    }

    /// Same Lagrangian, different tensor.
    pub fn with_g(&self, g: GTensor) -> Result<Self> {
        Self::new(self.lagrangian.clone(), g)
    }

    fn env(&self, x: &[Complex64], y: &[Complex64]) -> Bindings {
        let chart = self.chart();
        let mut env = self.parameter_bindings();
        env.extend(chart.base_names().into_iter().zip(x.iter().copied()));
        env.extend(chart.fibre_names().into_iter().zip(y.iter().copied()));
        env
    }

    fn jet_vars(&self) -> Vec<Expr> {
        self.chart().jet_names().into_iter().map(Expr::Var).collect()
    }
}

/// Momenta (flat order), Hamiltonian in jet coordinates, Hamiltonian in
/// Legendre coordinates when a closed form exists, and the regularity
/// matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct LegendreMap {
    pub momenta: Vec<Expr>,
    pub h_jet: Expr,
    pub h_leg: Option<Expr>,
    pub k: SymbolicMatrix,
}

/// `K[(σ,i),(ν,j)] = ∂²L/∂y^σ_i∂y^ν_j − 4g^{ij}_{σν}`.
pub fn regularity_matrix(sys: &LepageanSystem) -> SymbolicMatrix {
    let hess = match &sys.quadratic {
        Some(q) => q.c.map(|e| Expr::mul([Expr::int(2), e.clone()])),
        None => velocity_hessian(&sys.lagrangian),
    };
    let g = sys.g.as_matrix();
    SymbolicMatrix::from_fn(hess.size(), |r, c| {
        Expr::sub(hess.get(r, c).clone(), Expr::mul([Expr::int(4), g.get(r, c).clone()])).simplify()
    })
}

/// Numeric regularity of `K` at a point, parameters at their defaults.
pub fn is_regular_at(sys: &LepageanSystem, pt: &JetPoint) -> Result<bool> {
    let mut env = sys.parameter_bindings();
    env.extend(pt.bindings(sys.chart()));
    Ok(!is_singular(&regularity_matrix(sys).evaluate(&env)?))
}

/// Search constant tensors (sub-seeds `seed, seed+1, …`) until `K = −4g`
/// is invertible.
pub fn regularize_affine(l: &QuadraticLagrangian, seed: u64, max_tries: usize) -> Result<GTensor> {
    let chart = l.chart();
    if chart.m() < 2 || chart.n() < 2 {
        return Err(Error::DimensionTooSmall(format!(
            "regularization of an affine Lagrangian needs m ≥ 2 and n ≥ 2, got n={}, m={}",
            chart.n(),
            chart.m()
        )));
    }
    if !l.is_affine() {
        return Err(Error::InvalidLagrangian("regularize_affine expects a Lagrangian affine in the velocities".into()));
    }
    let sys = LepageanSystem::new(l.to_general(), GTensor::zero(chart.clone(), vec![]))?;
    for t in 0..max_tries as u64 {
        let g = random_constant(chart, seed.wrapping_add(t), 1)?;
        let candidate = sys.with_g(g)?;
        let k = regularity_matrix(&candidate);
        let regular = match k.as_constant() {
            Some(c) => !det_exact(&c).is_zero(),
            None => !is_singular(&k.evaluate(&candidate.parameter_bindings())?),
        };
        if regular {
            return Ok(candidate.g);
        }
    }
    Err(Error::SearchFailed(max_tries))
}

/// `p^i_σ = ∂L/∂y^σ_i − 4g^{ij}_{σν}y^ν_j`, flat order.
pub fn momenta(sys: &LepageanSystem) -> Vec<Expr> {
    let grad = sys.lagrangian.velocity_gradient();
    let g = sys.g.as_matrix();
    let v = sys.jet_vars();
    grad.into_iter()
        .enumerate()
        .map(|(r, d)| {
            let mut terms = vec![d];
            for (s, vs) in v.iter().enumerate() {
                if !g.get(r, s).is_zero() {
                    terms.push(Expr::mul([Expr::int(-4), g.get(r, s).clone(), vs.clone()]));
                }
            }
            Expr::add(terms).simplify()
        })
        .collect()
}

/// `H = −L + (∂L/∂y^σ_i) y^σ_i − 2g^{ij}_{σν} y^σ_i y^ν_j`.
pub fn hamiltonian_jet(sys: &LepageanSystem) -> Expr {
    let grad = sys.lagrangian.velocity_gradient();
    let v = sys.jet_vars();
    let g = sys.g.as_matrix();
    let mut terms = vec![Expr::neg(sys.lagrangian.expr().clone())];
    for (d, vr) in grad.iter().zip(&v) {
        terms.push(Expr::mul([d.clone(), vr.clone()]));
    }
    for (r, c, e) in g.entries() {
        if !e.is_zero() {
            terms.push(Expr::mul([Expr::int(-2), e.clone(), v[r].clone(), v[c].clone()]));
        }
    }
    Expr::add(terms).simplify()
}

/// The second printed form of the Hamiltonian, `−L + p^i_σ y^σ_i + 2g y y`.
pub fn hamiltonian_jet_from_momenta(sys: &LepageanSystem, momenta: &[Expr]) -> Expr {
    let v = sys.jet_vars();
    let g = sys.g.as_matrix();
    let mut terms = vec![Expr::neg(sys.lagrangian.expr().clone())];
    for (p, vr) in momenta.iter().zip(&v) {
        terms.push(Expr::mul([p.clone(), vr.clone()]));
    }
    for (r, c, e) in g.entries() {
        if !e.is_zero() {
            terms.push(Expr::mul([Expr::int(2), e.clone(), v[r].clone(), v[c].clone()]));
        }
    }
    Expr::add(terms).simplify()
}

pub fn legendre_map(sys: &LepageanSystem) -> LegendreMap {
    LegendreMap {
        momenta: momenta(sys),
        h_jet: hamiltonian_jet(sys),
        h_leg: hamiltonian_in_legendre(sys).ok(),
        k: regularity_matrix(sys),
    }
}

/// Closed form of the Hamiltonian in `(x, y, p)` for a quadratic
/// Lagrangian: `H = −a + ½(p − b)ᵀ K⁻¹ (p − b)`.
pub fn hamiltonian_in_legendre(sys: &LepageanSystem) -> Result<Expr> {
    let q = sys
        .quadratic
        .as_ref()
        .ok_or_else(|| Error::HamiltonianUnavailable("the Lagrangian is not quadratic in the velocities".into()))?;
    let k = regularity_matrix(sys);
    let kinv = inverse_symbolic(&k).map_err(|e| match e {
        Error::SizeLimitExceeded { .. } | Error::NotPolynomial => {
            Error::HamiltonianUnavailable(format!("no symbolic inverse of the regularity matrix: {e}"))
        }
        other => other,
    })?;
    let shifted: Vec<Expr> = sys
        .chart()
        .momentum_names()
        .into_iter()
        .zip(&q.b)
        .map(|(p, b)| Expr::sub(Expr::Var(p), b.clone()))
        .collect();
    let mut terms = vec![Expr::neg(q.a.clone())];
    for (r, c, e) in kinv.entries() {
        if !e.is_zero() {
            terms.push(Expr::mul([Expr::ratio(1, 2), e.clone(), shifted[r].clone(), shifted[c].clone()]));
        }
    }
    Ok(Expr::add(terms).simplify())
}

/// Closed-form inverse `y_j = K⁻¹(p − b)` (flat order) for a quadratic
/// Lagrangian.
pub fn inverse_legendre_exprs(sys: &LepageanSystem) -> Result<Vec<Expr>> {
    let q = sys
        .quadratic
        .as_ref()
        .ok_or_else(|| Error::HamiltonianUnavailable("the Lagrangian is not quadratic in the velocities".into()))?;
    let kinv = inverse_symbolic(&regularity_matrix(sys))?;
    let shifted: Vec<Expr> = sys
        .chart()
        .momentum_names()
        .into_iter()
        .zip(&q.b)
        .map(|(p, b)| Expr::sub(Expr::Var(p), b.clone()))
        .collect();
    Ok((0..shifted.len())
        .map(|r| {
            let terms = (0..shifted.len())
                .filter(|&c| !kinv.get(r, c).is_zero())
                .map(|c| Expr::mul([kinv.get(r, c).clone(), shifted[c].clone()]));
            Expr::add(terms.collect::<Vec<_>>()).simplify()
        })
        .collect())
}

/// Jet velocities (flat order) with the given momenta at `(x, y)`.
pub fn invert_legendre(sys: &LepageanSystem, x: &[Complex64], y: &[Complex64], p: &[Complex64]) -> Result<Vec<Complex64>> {
    let chart = sys.chart();
    if x.len() != chart.n() || y.len() != chart.m() || p.len() != chart.mn() {
        return Err(Error::Shape("point does not match the chart".into()));
    }
    let env = sys.env(x, y);
    let k_sym = regularity_matrix(sys);
    if let Some(q) = &sys.quadratic {
        let k = k_sym.evaluate(&env)?;
        let rhs = q.b.iter().zip(p).map(|(b, pi)| Ok(pi - b.eval(&env)?)).collect::<Result<Vec<_>>>()?;
        return solve(&k, &rhs);
    }
    let mom = momenta(sys);
    let jets = chart.jet_names();
    let residual = |v: &[Complex64]| -> Result<Vec<Complex64>> {
        let mut e = env.clone();
        e.extend(jets.iter().cloned().zip(v.iter().copied()));
        mom.iter().zip(p).map(|(m, pi)| Ok(m.eval(&e)? - pi)).collect()
    };
    let norm = |r: &[Complex64]| r.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = 1.0 + norm(p);
    let mut v = vec![Complex64::new(0.0, 0.0); chart.mn()];
    let mut r = residual(&v)?;
    for _ in 0..NEWTON_MAX_ITER {
        if norm(&r) <= NEWTON_TOL * scale {
            return Ok(v);
        }
        let mut e = env.clone();
        e.extend(jets.iter().cloned().zip(v.iter().copied()));
        let jac = k_sym.evaluate(&e)?;
        let neg: Vec<Complex64> = r.iter().map(|z| -z).collect();
        let step = solve(&jac, &neg)?;
        let mut alpha = 1.0;
        loop {
            let trial: Vec<Complex64> = v.iter().zip(&step).map(|(a, s)| a + s * alpha).collect();
            let rt = residual(&trial)?;
            if norm(&rt) < norm(&r) || alpha < 1e-3 {
                v = trial;
                r = rt;
                break;
            }
            alpha /= 2.0;
        }
    }
    if norm(&r) <= NEWTON_TOL * scale {
        Ok(v)
    } else {
        Err(Error::NewtonDivergence(NEWTON_MAX_ITER))
    }
}

/// Numeric momenta at a jet point.
pub fn momenta_at(sys: &LepageanSystem, pt: &JetPoint) -> Result<Vec<Complex64>> {
    let mut env = sys.parameter_bindings();
    env.extend(pt.bindings(sys.chart()));
    momenta(sys).iter().map(|m| m.eval(&env)).collect()
}

/// `H(x, y, p)` by inverting the Legendre map and evaluating `H` in jet
/// coordinates; works whether or not a closed form exists.
pub fn hamiltonian_value(sys: &LepageanSystem, x: &[Complex64], y: &[Complex64], p: &[Complex64]) -> Result<Complex64> {
    let v = invert_legendre(sys, x, y, p)?;
    let mut env = sys.env(x, y);
    env.extend(sys.chart().jet_names().into_iter().zip(v));
    hamiltonian_jet(sys).eval(&env)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Corollary1Report {
    pub ok: bool,
    /// Largest `|K·Hess − I|` entry at the point.
    pub max_error: f64,
    /// Whether the identity was established symbolically.
    pub exact: bool,
}

/// `∂²H/∂p∂p` as a symbolic matrix over flat momentum indices.
pub fn momentum_hessian(chart: &Chart, h_leg: &Expr) -> SymbolicMatrix {
    let names = chart.momentum_names();
    let grad: Vec<Expr> = names.iter().map(|p| h_leg.differentiate(p)).collect();
    SymbolicMatrix::from_fn(names.len(), |r, c| grad[r].differentiate(&names[c]).simplify())
}

/// Check that the momentum Hessian of `H` is the inverse of `K` at a point.
pub fn corollary1_check(sys: &LepageanSystem, pt: &JetPoint) -> Result<Corollary1Report> {
    let mut env = sys.parameter_bindings();
    env.extend(pt.bindings(sys.chart()));
    let k_sym = regularity_matrix(sys);
    let k = k_sym.evaluate(&env)?;
    if is_singular(&k) {
        return Err(Error::SingularMatrix);
    }
    let Ok(h_leg) = hamiltonian_in_legendre(sys) else {
        return corollary1_check_fd(sys, pt);
    };
    let hess = momentum_hessian(sys.chart(), &h_leg);
    let product = k_sym.matmul(&hess);
    let exact = product.equals(&SymbolicMatrix::identity(k.size())) == Some(true);
    let max_error = identity_error(&k.matmul(&hess.evaluate(&env)?));
    Ok(Corollary1Report { ok: exact || max_error <= COROLLARY1_TOL, max_error, exact })
}

/// The same check with the Hessian from central differences of the
/// numerically evaluated Hamiltonian, step `1e-5`.
pub fn corollary1_check_fd(sys: &LepageanSystem, pt: &JetPoint) -> Result<Corollary1Report> {
    let mut env = sys.parameter_bindings();
    env.extend(pt.bindings(sys.chart()));
    let k = regularity_matrix(sys).evaluate(&env)?;
    if is_singular(&k) {
        return Err(Error::SingularMatrix);
    }
    let p0 = momenta_at(sys, pt)?;
    let h = |p: &[Complex64]| hamiltonian_value(sys, &pt.x, &pt.y, p);
    let n = p0.len();
    let mut hess = NumericMatrix::from_fn(n, |_, _| Complex64::new(0.0, 0.0));
    let shifted = |a: usize, sa: f64, b: usize, sb: f64| {
        let mut p = p0.clone();
        p[a] += sa * FD_STEP;
        p[b] += sb * FD_STEP;
        p
    };
    for a in 0..n {
        for b in a..n {
            let v = (h(&shifted(a, 1.0, b, 1.0))? - h(&shifted(a, 1.0, b, -1.0))? - h(&shifted(a, -1.0, b, 1.0))?
                + h(&shifted(a, -1.0, b, -1.0))?)
                / (4.0 * FD_STEP * FD_STEP);
            hess.set(a, b, v);
            hess.set(b, a, v);
        }
    }
    let max_error = identity_error(&k.matmul(&hess));
    Ok(Corollary1Report { ok: max_error <= COROLLARY1_TOL, max_error, exact: false })
}

fn identity_error(m: &NumericMatrix) -> f64 {
    m.entries()
        .map(|(r, c, z)| (z - if r == c { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }).norm())
        .fold(0.0, f64::max)
}

/// The regularity matrix induced by the Krupka equivalent:
/// `∂²L/∂y^σ_β∂y^ν_α + ∂²L/∂y^σ_α∂y^ν_β` at row `(σ,α)`, column `(ν,β)`.
pub fn krupka_matrix(l: &GeneralLagrangian) -> SymbolicMatrix {
    let chart = l.chart();
    let h = velocity_hessian(l);
    SymbolicMatrix::from_fn(chart.mn(), |r, c| {
        let (sigma, alpha) = chart.unflat_index(r).expect("flat index in range");
        let (nu, beta) = chart.unflat_index(c).expect("flat index in range");
        let swapped = h.get(chart.flat_index(sigma, beta).unwrap(), chart.flat_index(nu, alpha).unwrap());
        Expr::add([swapped.clone(), h.get(r, c).clone()]).simplify()
    })
}

/// Verdicts for the identities relating a Lepagean system to its
/// dedonderization `L̄ = L − l` and to the De Donder data of `L` and `l`.
#[derive(Clone, Debug, PartialEq)]
pub struct DedonderizationReport {
    /// `H = H̃(L̄)`.
    pub hamiltonian_dedonderized: bool,
    /// `p = p̃(L̄)`.
    pub momenta_dedonderized: bool,
    /// `p = p̃(L) − p̃(l)`.
    pub momenta_split: bool,
    /// `H = H̃(L) − l`.
    pub hamiltonian_split: bool,
    /// Standard Hessian of `L̄` equals `K`.
    pub hessian_is_k: bool,
    /// Both printed forms of the Hamiltonian agree.
    pub hamiltonian_forms_agree: bool,
    /// `∂p/∂y_j = K`.
    pub jacobian_is_k: bool,
}

impl DedonderizationReport {
    pub fn all(&self) -> bool {
        self.hamiltonian_dedonderized
            && self.momenta_dedonderized
            && self.momenta_split
            && self.hamiltonian_split
            && self.hessian_is_k
            && self.hamiltonian_forms_agree
            && self.jacobian_is_k
    }
}

fn exact_eq(a: &Expr, b: &Expr) -> bool {
    equals(a, b).holds_exactly()
}

fn all_exact_eq(a: &[Expr], b: &[Expr]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| exact_eq(x, y))
}

pub fn dedonderization_report(sys: &LepageanSystem) -> DedonderizationReport {
    let chart = sys.chart();
    let p = momenta(sys);
    let h = hamiltonian_jet(sys);
    let k = regularity_matrix(sys);
    let lbar = dedonderize(&sys.lagrangian, &sys.g);
    let dd_bar = dedonder(&lbar);
    let dd_l = dedonder(&sys.lagrangian);
    let sat = satellite(&sys.g);
    let sat_lag = GeneralLagrangian::new(chart.clone(), sat.clone(), sys.params().to_vec())
        .expect("satellite is a first-order Lagrangian");
    let dd_sat = dedonder(&sat_lag);
    let split: Vec<Expr> = dd_l.momenta.iter().zip(&dd_sat.momenta).map(|(a, b)| Expr::sub(a.clone(), b.clone())).collect();
    let jets = chart.jet_names();
    let jacobian = SymbolicMatrix::from_fn(chart.mn(), |r, c| p[r].differentiate(&jets[c]));
    DedonderizationReport {
        hamiltonian_dedonderized: exact_eq(&h, &dd_bar.hamiltonian),
        momenta_dedonderized: all_exact_eq(&p, &dd_bar.momenta),
        momenta_split: all_exact_eq(&p, &split),
        hamiltonian_split: exact_eq(&h, &Expr::sub(dd_l.hamiltonian, sat)),
        hessian_is_k: velocity_hessian(&lbar).equals(&k) == Some(true),
        hamiltonian_forms_agree: exact_eq(&h, &hamiltonian_jet_from_momenta(sys, &p)),
        jacobian_is_k: jacobian.equals(&k) == Some(true),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::gtensor::{canonical_from_quadratic, quarter};
    use crate::linalg::det_symbolic;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn chart() -> Chart {
        Chart::new(2, 2).unwrap()
    }

    fn maxwell2() -> LepageanSystem {
        let l = GeneralLagrangian::parse(chart(), "1/2*(y1_2 + y2_1)^2", vec![]).unwrap();
        let g = canonical_from_quadratic(&extract_quadratic(&l).unwrap());
        LepageanSystem::new(l, g).unwrap()
    }

    fn pure_satellite(u: GaussRational) -> LepageanSystem {
        let params = vec![Parameter::new("u", u)];
        let l = GeneralLagrangian::new(chart(), Expr::zero(), params.clone()).unwrap();
        let g = quarter(&chart(), params, &[((1, 2), Expr::param("u"))]).unwrap();
        LepageanSystem::new(l, g).unwrap()
    }

    fn ex(text: &str) -> Expr {
        parse(text, &chart(), &["u"]).unwrap()
    }

    fn ints(rows: &[[i64; 4]; 4]) -> SymbolicMatrix {
        SymbolicMatrix::from_fn(4, |r, c| Expr::int(rows[r][c]))
    }

    #[test]
    fn maxwell_regularity_matrix_and_momenta() {
        let sys = maxwell2();
        let k = regularity_matrix(&sys);
        assert_eq!(k.equals(&ints(&[[0, 0, 0, 4], [0, 1, -3, 0], [0, -3, 1, 0], [4, 0, 0, 0]])), Some(true));
        assert_eq!(det_symbolic(&k).unwrap(), Expr::int(128));
        let map = legendre_map(&sys);
        let chart = chart();
        let expected = [("p1_1", "4*y2_2"), ("p1_2", "-3*y1_2 + y2_1"), ("p2_1", "y1_2 - 3*y2_1"), ("p2_2", "4*y1_1")];
        for (name, text) in expected {
            let Some(crate::chart::Coordinate::Momentum { sigma, i }) = chart.classify(name) else { panic!() };
            let r = chart.flat_index(sigma, i).unwrap();
            assert!(exact_eq(&map.momenta[r], &ex(text)), "{name}");
        }
        let h = map.h_leg.unwrap();
        assert!(exact_eq(&h, &ex("1/4*p1_1*p2_2 - 3/8*p1_2*p2_1 - 1/16*p1_2^2 - 1/16*p2_1^2")));
    }

    #[test]
    fn maxwell_numeric_round_trip() {
        let sys = maxwell2();
        let pt = JetPoint::new(&chart(), vec![c(0.0); 2], vec![c(0.0); 2], vec![c(1.0), c(2.0), c(3.0), c(4.0)]).unwrap();
        let p = momenta_at(&sys, &pt).unwrap();
        // flat order is (p1_1, p2_1, p1_2, p2_2)
        assert_eq!(p, vec![c(16.0), c(-7.0), c(-3.0), c(4.0)]);
        let mut env = pt.bindings(&chart());
        env.extend(sys.parameter_bindings());
        assert!((hamiltonian_jet(&sys).eval(&env).unwrap() - c(4.5)).norm() < 1e-12);
        let v = invert_legendre(&sys, &pt.x, &pt.y, &p).unwrap();
        for (a, b) in v.iter().zip(&pt.jets) {
            assert!((a - b).norm() < 1e-12);
        }
        let zero = invert_legendre(&sys, &pt.x, &pt.y, &[c(0.0); 4]).unwrap();
        assert!(zero.iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn pure_satellite_hamiltonian() {
        let sys = pure_satellite(GaussRational::one()).instantiate(&[("u", GaussRational::one())]).unwrap();
        let h = hamiltonian_in_legendre(&sys).unwrap();
        assert!(exact_eq(&h, &ex("-p1_1*p2_2 + p1_2*p2_1")));
        let env: Bindings =
            [("p1_1", 1.0), ("p1_2", 2.0), ("p2_1", 3.0), ("p2_2", 4.0)].iter().map(|(n, v)| ((*n).into(), c(*v))).collect();
        assert!((h.eval(&env).unwrap() - c(2.0)).norm() < 1e-12);
    }

    #[test]
    fn symbolic_u_gives_rational_hamiltonian() {
        let sys = pure_satellite(GaussRational::from_int(2));
        let k = regularity_matrix(&sys);
        assert!(exact_eq(&det_symbolic(&k).unwrap(), &ex("u^4")));
        let h = hamiltonian_in_legendre(&sys).unwrap();
        assert!(exact_eq(&h, &ex("(p1_2*p2_1 - p1_1*p2_2)/u")));
        let r = corollary1_check(&sys, &JetPoint::origin(&chart())).unwrap();
        assert!(r.ok && r.exact);
        let zero = sys.instantiate(&[("u", GaussRational::zero())]).unwrap();
        assert_eq!(corollary1_check(&zero, &JetPoint::origin(&chart())), Err(Error::SingularMatrix));
        assert!(!is_regular_at(&zero, &JetPoint::origin(&chart())).unwrap());
        assert!(is_regular_at(&sys, &JetPoint::origin(&chart())).unwrap());
    }

    #[test]
    fn corollary_one_for_maxwell() {
        let sys = maxwell2();
        let h = hamiltonian_in_legendre(&sys).unwrap();
        let hess = momentum_hessian(&chart(), &h);
        let q = |a, b| Expr::ratio(a, b);
        let expected = SymbolicMatrix::from_rows(vec![
            vec![Expr::zero(), Expr::zero(), Expr::zero(), q(1, 4)],
            vec![Expr::zero(), q(-1, 8), q(-3, 8), Expr::zero()],
            vec![Expr::zero(), q(-3, 8), q(-1, 8), Expr::zero()],
            vec![q(1, 4), Expr::zero(), Expr::zero(), Expr::zero()],
        ])
        .unwrap();
        assert_eq!(hess.equals(&expected), Some(true));
        let r = corollary1_check(&sys, &JetPoint::origin(&chart())).unwrap();
        assert!(r.ok && r.exact && r.max_error == 0.0);
        let fd = corollary1_check_fd(&sys, &JetPoint::origin(&chart())).unwrap();
        assert!(fd.max_error < 1e-6, "{}", fd.max_error);
    }

    #[test]
    fn newton_inversion_for_non_quadratic_lagrangian() {
        let l = GeneralLagrangian::parse(
            chart(),
            "1/2*(y1_1^2 + y1_2^2 + y2_1^2 + y2_2^2) + 1/12*y1_1^4 + x1*y2_2",
            vec![],
        )
        .unwrap();
        let sys = LepageanSystem::new(l, GTensor::zero(chart(), vec![])).unwrap();
        assert!(sys.quadratic().is_none());
        assert!(matches!(hamiltonian_in_legendre(&sys), Err(Error::HamiltonianUnavailable(_))));
        let pt =
            JetPoint::new(&chart(), vec![c(0.5), c(0.1)], vec![c(0.2), c(0.3)], vec![c(0.7), c(-0.4), c(1.1), c(0.9)])
                .unwrap();
        let p = momenta_at(&sys, &pt).unwrap();
        let v = invert_legendre(&sys, &pt.x, &pt.y, &p).unwrap();
        for (a, b) in v.iter().zip(&pt.jets) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn affine_regularization() {
        let params: Vec<Parameter> =
            ["gamma1", "gamma2", "m"].iter().map(|n| Parameter::new(*n, GaussRational::one())).collect();
        let l = GeneralLagrangian::parse(
            chart(),
            "im/2*(y2*gamma1*y1_1 + y2*gamma2*y1_2 + y2_1*gamma1*y1 + y2_2*gamma2*y1) - y2*m*y1",
            params,
        )
        .unwrap();
        let q = extract_quadratic(&l).unwrap();
        let g = regularize_affine(&q, 42, 10).unwrap();
        assert_eq!(g, regularize_affine(&q, 42, 10).unwrap());
        let sys = LepageanSystem::new(l, g).unwrap();
        let det = det_exact(&regularity_matrix(&sys).as_constant().unwrap());
        assert!(!det.is_zero());

        let line = Chart::new(2, 1).unwrap();
        let l1 = GeneralLagrangian::parse(line, "y1*y1_1 + x2*y1_2", vec![]).unwrap();
        assert!(matches!(regularize_affine(&extract_quadratic(&l1).unwrap(), 42, 10), Err(Error::DimensionTooSmall(_))));
    }

    #[test]
    fn krupka_matrix_entries() {
        let sys = maxwell2();
        let k = krupka_matrix(sys.lagrangian());
        assert_eq!(k.equals(&ints(&[[0, 0, 0, 1], [0, 2, 1, 0], [0, 1, 2, 0], [1, 0, 0, 0]])), Some(true));
        assert_eq!(det_symbolic(&k).unwrap(), Expr::int(-3));
        let l = GeneralLagrangian::parse(chart(), "1/2*(y1_1^2 + y1_2^2 + y2_1^2 + y2_2^2)", vec![]).unwrap();
        let two = SymbolicMatrix::identity(4).map(|e| Expr::mul([Expr::int(2), e.clone()]));
        assert_eq!(krupka_matrix(&l).equals(&two), Some(true));
    }

    #[test]
    fn dedonderization_identities() {
        assert!(dedonderization_report(&maxwell2()).all());
        assert!(dedonderization_report(&pure_satellite(GaussRational::one())).all());
    }
}
