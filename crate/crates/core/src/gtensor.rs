//! The coefficients `g^{ij}_{σν}(x, y)` of the 2-contact term of a Lepagean
//! equivalent, stored by their independent components.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::{Chart, Coordinate};
use crate::error::{Error, Result};
use crate::expr::{equals, Expr, Name};
use crate::lagrangian::{check_symbols, merge_parameters, GeneralLagrangian, Parameter, QuadraticLagrangian};
use crate::linalg::SymbolicMatrix;

/// Antisymmetric in `(σ, ν)` and in `(i, j)`. Only components with `σ < ν`
/// and `i < j` are stored; everything else is derived on access.
#[derive(Clone, Debug, PartialEq)]
pub struct GTensor {
    chart: Chart,
    params: Vec<Parameter>,
    components: BTreeMap<(usize, usize, usize, usize), Expr>,
}

/// Number of independent components, `C(m,2)·C(n,2)`.
pub fn free_component_count(chart: &Chart) -> usize {
    let (n, m) = (chart.n(), chart.m());
    m * (m - 1) / 2 * (n * (n - 1) / 2)
}

impl GTensor {
    pub fn zero(chart: Chart, params: Vec<Parameter>) -> Self {
        Self { chart, params, components: BTreeMap::new() }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn params(&self) -> &[Parameter] {
        &self.params
    }

    /// Set the stored component `g^{ij}_{σν}`; requires `σ < ν`, `i < j`.
    pub fn set(&mut self, sigma: usize, nu: usize, i: usize, j: usize, value: Expr) -> Result<()> {
        self.check_indices(sigma, nu, i, j)?;
        if sigma >= nu || i >= j {
            return Err(Error::InvalidComponent(format!(
                "only σ < ν and i < j are stored, got (σ,ν,i,j) = ({sigma},{nu},{i},{j})"
            )));
        }
        check_symbols(&self.chart, &self.params, &value, |c| {
            matches!(c, Coordinate::Base(_) | Coordinate::Fibre(_))
        })
        .map_err(|s| Error::InvalidComponent(format!("component depends on `{s}`")))?;
        let value = value.simplify();
        if value.is_zero() {
            self.components.remove(&(sigma, nu, i, j));
        } else {
            self.components.insert((sigma, nu, i, j), value);
        }
        Ok(())
    }

    fn check_indices(&self, sigma: usize, nu: usize, i: usize, j: usize) -> Result<()> {
        self.chart.check_fibre(sigma)?;
        self.chart.check_fibre(nu)?;
        self.chart.check_base(i)?;
        self.chart.check_base(j)
    }

    /// `g^{ij}_{σν}` for any indices.
    pub fn component(&self, sigma: usize, nu: usize, i: usize, j: usize) -> Result<Expr> {
        self.check_indices(sigma, nu, i, j)?;
        Ok(self.get(sigma, nu, i, j))
    }

    pub(crate) fn get(&self, sigma: usize, nu: usize, i: usize, j: usize) -> Expr {
        if sigma == nu || i == j {
            return Expr::zero();
        }
        let flip = (sigma > nu) != (i > j);
        let key = (sigma.min(nu), sigma.max(nu), i.min(j), i.max(j));
        match self.components.get(&key) {
            None => Expr::zero(),
            Some(e) if flip => Expr::neg(e.clone()),
            Some(e) => e.clone(),
        }
    }

    /// Nonzero stored components, keyed by `(σ, ν, i, j)`.
    pub fn stored(&self) -> impl Iterator<Item = ((usize, usize, usize, usize), &Expr)> {
        self.components.iter().map(|(k, v)| (*k, v))
    }

    /// All `(σ, ν, i, j)` with `σ < ν`, `i < j`, in storage order.
    pub fn free_slots(chart: &Chart) -> Vec<(usize, usize, usize, usize)> {
        let (n, m) = (chart.n(), chart.m());
        let mut out = Vec::new();
        for sigma in 1..=m {
            for nu in sigma + 1..=m {
                for i in 1..=n {
                    for j in i + 1..=n {
                        out.push((sigma, nu, i, j));
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// True when every component is a number.
    pub fn is_constant(&self) -> bool {
        self.components.values().all(|e| e.as_const().is_some())
    }

    /// `G[(σ,i),(ν,j)] = g^{ij}_{σν}` over flat indices; symmetric.
    pub fn as_matrix(&self) -> SymbolicMatrix {
        let c = &self.chart;
        SymbolicMatrix::from_fn(c.mn(), |r, s| {
            let (sigma, i) = c.unflat_index(r).expect("flat index in range");
            let (nu, j) = c.unflat_index(s).expect("flat index in range");
            self.get(sigma, nu, i, j)
        })
    }

    /// Substitute symbols (typically parameters) in every component.
    pub fn substitute(&self, map: &HashMap<Name, Expr>, params: Vec<Parameter>) -> Self {
        let components = self
            .components
            .iter()
            .map(|(k, v)| (*k, v.substitute(map).simplify()))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        Self { chart: self.chart.clone(), params, components }
    }

    pub(crate) fn with_params(&self, params: Vec<Parameter>) -> Self {
        Self { chart: self.chart.clone(), params, components: self.components.clone() }
    }
}

/// `g^{αβ}_{σν} = ∂²L/∂y^σ_α∂y^ν_β − ∂²L/∂y^σ_β∂y^ν_α`.
pub fn canonical_from_quadratic(l: &QuadraticLagrangian) -> GTensor {
    let chart = l.chart().clone();
    let hess = |s: usize, a: usize, v: usize, b: usize| {
        let r = chart.flat_index(s, a).expect("index in range");
        let c = chart.flat_index(v, b).expect("index in range");
        Expr::mul([Expr::int(2), l.c.get(r, c).clone()])
    };
    let mut g = GTensor::zero(chart.clone(), l.params().to_vec());
    for (sigma, nu, a, b) in GTensor::free_slots(&chart) {
        let v = Expr::sub(hess(sigma, a, nu, b), hess(sigma, b, nu, a));
        g.set(sigma, nu, a, b, v).expect("coefficients are jet-free");
    }
    g
}

/// Constant tensor with independent components drawn uniformly from the
/// nonzero multiples `k/16`, `|k| ≤ 16·amplitude`.
pub fn random_constant(chart: &Chart, seed: u64, amplitude: u32) -> Result<GTensor> {
    if chart.m() < 2 || chart.n() < 2 {
        return Err(Error::DimensionTooSmall(format!(
            "an antisymmetric g needs m ≥ 2 and n ≥ 2, got n={}, m={}",
            chart.n(),
            chart.m()
        )));
    }
    let kmax = 16 * amplitude.max(1) as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = GTensor::zero(chart.clone(), vec![]);
    for (sigma, nu, i, j) in GTensor::free_slots(chart) {
        let mut k = rng.gen_range(-kmax..kmax);
        if k >= 0 {
            k += 1;
        }
        g.set(sigma, nu, i, j, Expr::ratio(k, 16))?;
    }
    Ok(g)
}

/// Satellite Lagrangian `l = 2 g^{ij}_{σν} y^σ_i y^ν_j`.
pub fn satellite(g: &GTensor) -> Expr {
    let c = &g.chart;
    let terms = g.components.iter().map(|(&(sigma, nu, i, j), v)| {
        let y = |s, k| Expr::Var(c.jet(s, k));
        let wedge = Expr::sub(Expr::mul([y(sigma, i), y(nu, j)]), Expr::mul([y(sigma, j), y(nu, i)]));
        Expr::mul([Expr::int(4), v.clone(), wedge])
    });
    Expr::add(terms.collect::<Vec<_>>()).simplify()
}

/// `L̄ = L − l`.
pub fn dedonderize(l: &GeneralLagrangian, g: &GTensor) -> GeneralLagrangian {
    let params = merge_parameters(l.params(), g.params());
    let expr = Expr::sub(l.expr().clone(), satellite(g)).simplify();
    l.with_params(params).with_expr(expr)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    /// Cyclic sum of fibre derivatives.
    C1,
    /// Base divergence.
    C2,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::C1 => "C1",
            Condition::C2 => "C2",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub condition: Condition,
    /// `(i, j, κ, σ, ν)` for C1, `(i, σ, ν)` for C2.
    pub indices: Vec<usize>,
    pub residual: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosednessReport {
    pub closed: bool,
    pub violations: Vec<Violation>,
}

/// Closedness of `η = g^{ij}_{σν} dy^σ∧dy^ν∧ω_{ij}`, decided by
///
/// * (C1) `∂_κ g^{ij}_{σν} + ∂_σ g^{ij}_{νκ} + ∂_ν g^{ij}_{κσ} = 0` for `i < j`, `κ < σ < ν`
///   (derivatives in `y`);
/// * (C2) `Σ_j ∂g^{ij}_{σν}/∂x^j = 0` for every `i` and `σ < ν`.
pub fn closedness_check(g: &GTensor) -> ClosednessReport {
    let c = &g.chart;
    let (n, m) = (c.n(), c.m());
    let mut violations = Vec::new();
    let vanishes = |e: &Expr| equals(e, &Expr::zero()).holds_exactly();
    for i in 1..=n {
        for j in i + 1..=n {
            for kappa in 1..=m {
                for sigma in kappa + 1..=m {
                    for nu in sigma + 1..=m {
                        let r = Expr::add([
                            g.get(sigma, nu, i, j).differentiate(&c.y(kappa)),
                            g.get(nu, kappa, i, j).differentiate(&c.y(sigma)),
                            g.get(kappa, sigma, i, j).differentiate(&c.y(nu)),
                        ])
                        .simplify();
                        if !vanishes(&r) {
                            violations.push(Violation {
                                condition: Condition::C1,
                                indices: vec![i, j, kappa, sigma, nu],
                                residual: r,
                            });
                        }
                    }
                }
            }
        }
    }
    for i in 1..=n {
        for sigma in 1..=m {
            for nu in sigma + 1..=m {
                let r = Expr::add((1..=n).map(|j| g.get(sigma, nu, i, j).differentiate(&c.x(j)))).simplify();
                if !vanishes(&r) {
                    violations.push(Violation { condition: Condition::C2, indices: vec![i, sigma, nu], residual: r });
                }
            }
        }
    }
    ClosednessReport { closed: violations.is_empty(), violations }
}

/// A tensor whose only free slots are `(1,2,i,j)`, set to `value/4` each.
pub(crate) fn quarter(chart: &Chart, params: Vec<Parameter>, values: &[((usize, usize), Expr)]) -> Result<GTensor> {
    let mut g = GTensor::zero(chart.clone(), params);
    for ((i, j), v) in values {
        g.set(1, 2, *i, *j, Expr::mul([Expr::ratio(1, 4), v.clone()]))?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, GaussRational};
    use crate::lagrangian::{euler_lagrange_exprs, extract_quadratic};

    fn u_param() -> Vec<Parameter> {
        vec![Parameter::new("u", GaussRational::one())]
    }

    fn dirac_g(u: &str) -> GTensor {
        let chart = Chart::new(2, 2).unwrap();
        let e = parse(u, &chart, &["u"]).unwrap();
        quarter(&chart, u_param(), &[((1, 2), e)]).unwrap()
    }

    fn ex(text: &str, chart: &Chart) -> Expr {
        parse(text, chart, &["u"]).unwrap()
    }

    #[test]
    fn component_symmetries() {
        let g = dirac_g("u");
        let chart = g.chart().clone();
        assert!(equals(&g.component(1, 2, 1, 2).unwrap(), &ex("u/4", &chart)).holds_exactly());
        assert!(equals(&g.component(2, 1, 1, 2).unwrap(), &ex("-u/4", &chart)).holds_exactly());
        assert!(equals(&g.component(1, 2, 2, 1).unwrap(), &ex("-u/4", &chart)).holds_exactly());
        assert!(equals(&g.component(2, 1, 2, 1).unwrap(), &ex("u/4", &chart)).holds_exactly());
        assert!(g.component(1, 1, 1, 2).unwrap().is_zero());
        assert!(g.component(1, 2, 2, 2).unwrap().is_zero());
        assert!(matches!(g.component(3, 1, 1, 2), Err(Error::IndexOutOfRange(_))));
    }

    #[test]
    fn storage_rule_is_enforced() {
        let chart = Chart::new(2, 2).unwrap();
        let mut g = GTensor::zero(chart, vec![]);
        assert!(matches!(g.set(2, 1, 1, 2, Expr::one()), Err(Error::InvalidComponent(_))));
        assert!(matches!(g.set(1, 1, 1, 2, Expr::one()), Err(Error::InvalidComponent(_))));
        assert!(matches!(g.set(1, 2, 1, 2, Expr::var("y1_1")), Err(Error::InvalidComponent(_))));
    }

    #[test]
    fn free_component_counts() {
        for (n, m, k) in [(2, 2, 1), (4, 2, 6), (2, 3, 3), (4, 4, 36), (1, 2, 0)] {
            let c = Chart::new(n, m).unwrap();
            assert_eq!(free_component_count(&c), k);
            assert_eq!(GTensor::free_slots(&c).len(), k);
        }
    }

    #[test]
    fn maxwell_canonical_tensor() {
        let chart = Chart::new(2, 2).unwrap();
        let l = GeneralLagrangian::parse(chart.clone(), "1/2*(y1_2 + y2_1)^2", vec![]).unwrap();
        let g = canonical_from_quadratic(&extract_quadratic(&l).unwrap());
        assert_eq!(g.component(1, 2, 1, 2).unwrap(), Expr::int(-1));
        let l_sat = satellite(&g);
        assert!(equals(&l_sat, &ex("4*(y1_2*y2_1 - y1_1*y2_2)", &chart)).holds_exactly());
        let affine = GeneralLagrangian::parse(chart, "x1*y1_1 + y2*y2_2", vec![]).unwrap();
        assert!(canonical_from_quadratic(&extract_quadratic(&affine).unwrap()).is_zero());
    }

    #[test]
    fn random_constant_tensors() {
        let g = random_constant(&Chart::new(2, 2).unwrap(), 42, 1).unwrap();
        assert_eq!(g.stored().count(), 1);
        let g4 = random_constant(&Chart::new(4, 2).unwrap(), 7, 1).unwrap();
        assert_eq!(g4.stored().count(), 6);
        assert!(g4.is_constant());
        for (_, v) in g4.stored() {
            let k = v.as_const().unwrap();
            let sixteenths = (k * &GaussRational::from_int(16)).as_integer().unwrap();
            assert!(sixteenths != 0 && sixteenths.abs() <= 16);
        }
        assert_eq!(random_constant(&Chart::new(4, 2).unwrap(), 7, 1).unwrap(), g4);
        assert!(matches!(random_constant(&Chart::new(1, 2).unwrap(), 1, 1), Err(Error::DimensionTooSmall(_))));
        assert!(matches!(random_constant(&Chart::new(2, 1).unwrap(), 1, 1), Err(Error::DimensionTooSmall(_))));
    }

    #[test]
    fn dirac_satellite_and_dedonderization() {
        let g = dirac_g("u");
        let chart = g.chart().clone();
        assert!(equals(&satellite(&g), &ex("u*(y1_1*y2_2 - y1_2*y2_1)", &chart)).holds_exactly());
        assert!(satellite(&GTensor::zero(chart.clone(), vec![])).is_zero());
        let l = GeneralLagrangian::parse(chart.clone(), "x1*y1_2", vec![]).unwrap();
        let lbar = dedonderize(&l, &g);
        assert!(equals(lbar.expr(), &ex("x1*y1_2 - u*(y1_1*y2_2 - y1_2*y2_1)", &chart)).holds_exactly());
        assert_eq!(dedonderize(&l, &GTensor::zero(chart, vec![])).expr(), l.expr());
    }

    #[test]
    fn closedness() {
        assert!(closedness_check(&dirac_g("u")).closed);
        assert!(closedness_check(&dirac_g("y1*y2")).closed);
        let r = closedness_check(&dirac_g("x1"));
        assert!(!r.closed);
        assert_eq!(r.violations.len(), 1);
        let v = &r.violations[0];
        assert_eq!((v.condition, v.indices.clone()), (Condition::C2, vec![2, 1, 2]));
        assert_eq!(v.residual, Expr::ratio(-1, 4));

        let chart = Chart::new(2, 3).unwrap();
        let mut g = GTensor::zero(chart.clone(), vec![]);
        g.set(1, 2, 1, 2, Expr::var("y3")).unwrap();
        let r = closedness_check(&g);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].condition, Condition::C1);
        g.set(2, 3, 1, 2, Expr::var("y1")).unwrap();
        g.set(1, 3, 1, 2, Expr::neg(Expr::var("y2"))).unwrap();
        assert!(!closedness_check(&g).closed);
        let mut h = GTensor::zero(chart, vec![]);
        h.set(1, 2, 1, 2, Expr::var("y3")).unwrap();
        h.set(1, 3, 1, 2, Expr::var("y2")).unwrap();
        assert!(closedness_check(&h).closed);
    }

    #[test]
    fn constant_satellites_are_null_lagrangians() {
        let chart = Chart::new(4, 2).unwrap();
        for seed in 0..3 {
            let g = random_constant(&chart, seed, 1).unwrap();
            let l = GeneralLagrangian::new(chart.clone(), satellite(&g), vec![]).unwrap();
            assert!(euler_lagrange_exprs(&l).iter().all(Expr::is_zero));
        }
    }
}
