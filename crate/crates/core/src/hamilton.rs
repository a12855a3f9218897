//! Hamilton p2-equations of a Lepagean system in Legendre coordinates and
//! their residuals along candidate sections `x ↦ (y(x), p(x))`.
//!
//! Residual templates use jet names `y{σ}_{i}` as placeholders for
//! `∂y^σ/∂x^i` and `p{i}_{σ}_{k}` for `∂p^i_σ/∂x^k`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::expr::{Expr, Name};
use crate::gtensor::closedness_check;
use crate::lagrangian::{check_symbols, section_substitution, Parameter};
use crate::legendre::{hamiltonian_in_legendre, momenta, LepageanSystem};
use crate::chart::Coordinate;

/// A section of the Legendre bundle: fields and momenta (flat order) as
/// functions of `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct SectionPair {
    pub y: Vec<Expr>,
    pub p: Vec<Expr>,
    pub params: Vec<Parameter>,
}

impl SectionPair {
    pub fn new(sys: &LepageanSystem, y: Vec<Expr>, p: Vec<Expr>) -> Result<Self> {
        let chart = sys.chart();
        if y.len() != chart.m() || p.len() != chart.mn() {
            return Err(Error::Shape(format!(
                "section has {} fields and {} momenta, expected {} and {}",
                y.len(),
                p.len(),
                chart.m(),
                chart.mn()
            )));
        }
        let params = sys.params().to_vec();
        for e in y.iter().chain(&p) {
            check_symbols(chart, &params, e, |c| matches!(c, Coordinate::Base(_)))
                .map_err(|name| Error::UnboundName(name.to_string()))?;
        }
        Ok(Self { y, p, params })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct P2System {
    pub sys: LepageanSystem,
    pub h_leg: Expr,
    /// `R_σ`, one per field.
    pub first: Vec<Expr>,
    /// `R^i_σ`, flat order.
    pub second: Vec<Expr>,
    /// Closedness holds and the g-derivative terms were dropped.
    pub reduced: bool,
}

impl P2System {
    /// All templates, first family then second.
    pub fn templates(&self) -> Vec<Expr> {
        self.first.iter().chain(&self.second).cloned().collect()
    }
}

/// Residual templates
///
/// `R_σ = ∂H/∂y^σ + ∂p^i_σ/∂x^i − 4(∂g^{ij}_{σν}/∂x^j) y^ν_i
///        − 2(∂g^{ij}_{κν}/∂y^σ + ∂g^{ij}_{σκ}/∂y^ν + ∂g^{ij}_{νσ}/∂y^κ) y^κ_i y^ν_j`,
/// `R^i_σ = ∂H/∂p^i_σ − y^σ_i`.
pub fn p2_system(sys: &LepageanSystem) -> Result<P2System> {
    let chart = sys.chart().clone();
    let (n, m) = (chart.n(), chart.m());
    let h = hamiltonian_in_legendre(sys)?;
    let reduced = closedness_check(sys.g()).closed;
    let g = sys.g();
    let jet = |s, i| Expr::Var(chart.jet(s, i));

    let mut first = Vec::with_capacity(m);
    for sigma in 1..=m {
        let mut terms = vec![h.differentiate(&chart.y(sigma))];
        for i in 1..=n {
            terms.push(Expr::Var(chart.momentum_derivative(sigma, i, i)));
        }
        if !reduced {
            for i in 1..=n {
                for j in 1..=n {
                    for nu in 1..=m {
                        let d = g.get(sigma, nu, i, j).differentiate(&chart.x(j));
                        if !d.is_zero() {
                            terms.push(Expr::mul([Expr::int(-4), d, jet(nu, i)]));
                        }
                        for kappa in 1..=m {
                            let cyc = Expr::add([
                                g.get(kappa, nu, i, j).differentiate(&chart.y(sigma)),
                                g.get(sigma, kappa, i, j).differentiate(&chart.y(nu)),
                                g.get(nu, sigma, i, j).differentiate(&chart.y(kappa)),
                            ])
                            .simplify();
                            if !cyc.is_zero() {
                                terms.push(Expr::mul([Expr::int(-2), cyc, jet(kappa, i), jet(nu, j)]));
                            }
                        }
                    }
                }
            }
        }
        first.push(Expr::add(terms).simplify());
    }

    let second = chart
        .pairs()
        .map(|(sigma, i)| Expr::sub(h.differentiate(&chart.momentum(sigma, i)), jet(sigma, i)).simplify())
        .collect();

    Ok(P2System { sys: sys.clone(), h_leg: h, first, second, reduced })
}

/// `δ = J¹γ` pushed through the Legendre map.
pub fn prolong_section(sys: &LepageanSystem, gamma: &[Expr]) -> Result<SectionPair> {
    let map = section_substitution(sys.chart(), gamma)?;
    let p = momenta(sys).iter().map(|e| e.substitute(&map).simplify()).collect();
    Ok(SectionPair { y: gamma.to_vec(), p, params: sys.params().to_vec() })
}

fn pair_substitution(sys: &LepageanSystem, delta: &SectionPair) -> Result<HashMap<Name, Expr>> {
    let chart = sys.chart();
    if delta.y.len() != chart.m() || delta.p.len() != chart.mn() {
        return Err(Error::Shape("section does not match the chart".into()));
    }
    let mut map = HashMap::new();
    for (s, f) in delta.y.iter().enumerate() {
        map.insert(chart.y(s + 1), f.clone());
        for i in 1..=chart.n() {
            map.insert(chart.jet(s + 1, i), f.differentiate(&chart.x(i)).simplify());
        }
    }
    for ((sigma, i), f) in chart.pairs().zip(&delta.p) {
        map.insert(chart.momentum(sigma, i), f.clone());
        for k in 1..=chart.n() {
            map.insert(chart.momentum_derivative(sigma, i, k), f.differentiate(&chart.x(k)).simplify());
        }
    }
    Ok(map)
}

/// `m + mn` residuals along `δ`, first family then second.
pub fn residuals_on_section(p2: &P2System, delta: &SectionPair) -> Result<Vec<Expr>> {
    let map = pair_substitution(&p2.sys, delta)?;
    Ok(p2.templates().iter().map(|e| e.substitute(&map).simplify()).collect())
}

/// `∂H/∂p^i_σ∘δ − ∂y^σ/∂x^i`, flat order.
pub fn holonomy_gap(p2: &P2System, delta: &SectionPair) -> Result<Vec<Expr>> {
    let map = pair_substitution(&p2.sys, delta)?;
    Ok(p2.second.iter().map(|e| e.substitute(&map).simplify()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::expr::{equals, parse, GaussRational};
    use crate::gtensor::{canonical_from_quadratic, quarter, GTensor};
    use crate::lagrangian::{el_residual_on_section, extract_quadratic, GeneralLagrangian};

    fn chart() -> Chart {
        Chart::new(2, 2).unwrap()
    }

    fn ex(text: &str) -> Expr {
        parse(text, &chart(), &["a", "b"]).unwrap()
    }

    fn zero(e: &Expr) -> bool {
        equals(e, &Expr::zero()).holds_exactly()
    }

    fn maxwell2() -> LepageanSystem {
        let l = GeneralLagrangian::parse(chart(), "1/2*(y1_2 + y2_1)^2", vec![]).unwrap();
        let g = canonical_from_quadratic(&extract_quadratic(&l).unwrap());
        LepageanSystem::new(l, g).unwrap()
    }

    fn dirac2_massless(u: &str) -> LepageanSystem {
        let c = chart();
        let l = GeneralLagrangian::parse(c.clone(), "y2*y1_1 + y2*y1_2 + y2_1*y1 + y2_2*y1", vec![]).unwrap();
        let g = quarter(&c, vec![], &[((1, 2), parse(u, &c, &[] as &[&str]).unwrap())]).unwrap();
        LepageanSystem::new(l, g).unwrap()
    }

    #[test]
    fn maxwell_system_is_reduced() {
        let p2 = p2_system(&maxwell2()).unwrap();
        assert!(p2.reduced);
        assert_eq!(p2.templates().len(), 6);
        // H does not depend on y, so R_σ is the divergence of the momenta.
        assert!(equals(&p2.first[0], &ex("p1_1_1 + p2_1_2")).holds_exactly());
    }

    #[test]
    fn prolongation_of_linear_and_trigonometric_fields() {
        let params = vec![Parameter::new("a", GaussRational::one()), Parameter::new("b", GaussRational::from_int(2))];
        let sys = maxwell2();
        let l = sys.lagrangian().with_params(params.clone());
        let sys = LepageanSystem::new(l, sys.g().with_params(params)).unwrap();
        let d = prolong_section(&sys, &[ex("a*x2"), ex("b*x1")]).unwrap();
        // flat order: p1_1, p2_1, p1_2, p2_2
        for (got, want) in d.p.iter().zip(["0", "a - 3*b", "-3*a + b", "0"]) {
            assert!(equals(got, &ex(want)).holds_exactly(), "{got}");
        }
        let p2 = p2_system(&sys).unwrap();
        assert!(residuals_on_section(&p2, &d).unwrap().iter().all(zero));

        let d = prolong_section(&sys, &[ex("sin(x1)"), ex("cos(x2)")]).unwrap();
        for (got, want) in d.p.iter().zip(["-4*sin(x2)", "0", "0", "4*cos(x1)"]) {
            assert!(equals(got, &ex(want)).holds_exactly(), "{got}");
        }
        assert!(residuals_on_section(&p2, &d).unwrap().iter().all(zero));
        assert!(holonomy_gap(&p2, &d).unwrap().iter().all(zero));
    }

    #[test]
    fn non_solutions_leave_residuals() {
        let sys = maxwell2();
        let p2 = p2_system(&sys).unwrap();
        let d = SectionPair::new(&sys, vec![Expr::zero(), Expr::zero()], vec![ex("x1"), Expr::zero(), Expr::zero(), Expr::zero()])
            .unwrap();
        assert!(equals(&residuals_on_section(&p2, &d).unwrap()[0], &Expr::one()).holds_exactly());

        let d = SectionPair::new(&sys, vec![Expr::zero(), Expr::zero()], vec![Expr::one(), Expr::zero(), Expr::zero(), Expr::zero()])
            .unwrap();
        let gap = holonomy_gap(&p2, &d).unwrap();
        assert!(zero(&gap[0]));
        assert!(equals(&gap[3], &Expr::ratio(1, 4)).holds_exactly());

        let d = prolong_section(&sys, &[ex("x2*x2"), Expr::zero()]).unwrap();
        let r = residuals_on_section(&p2, &d).unwrap();
        assert!(!r.iter().all(zero));
        assert!(holonomy_gap(&p2, &d).unwrap().iter().all(zero));
    }

    #[test]
    fn zero_tensor_gives_de_donder_system() {
        let l = GeneralLagrangian::parse(chart(), "1/2*(y1_1^2 + y1_2^2 + y2_1^2 + y2_2^2)", vec![]).unwrap();
        let sys = LepageanSystem::new(l, GTensor::zero(chart(), vec![])).unwrap();
        let p2 = p2_system(&sys).unwrap();
        assert!(p2.reduced);
        assert!(equals(&p2.first[1], &ex("p1_2_1 + p2_2_2")).holds_exactly());
        assert!(equals(&p2.second[1], &ex("p2_1 - y1_2")).holds_exactly());
    }

    #[test]
    fn fibre_dependent_tensor_is_reduced() {
        let p2 = p2_system(&dirac2_massless("y1*y2")).unwrap();
        assert!(p2.reduced);
    }

    #[test]
    fn base_dependent_tensor_keeps_derivative_terms() {
        let sys = dirac2_massless("x1");
        let p2 = p2_system(&sys).unwrap();
        assert!(!p2.reduced);
        assert!(p2.first.iter().any(|r| r.contains_symbol("y1_2") || r.contains_symbol("y2_2")));
        // Constant fields solve the massless equations.
        let d = prolong_section(&sys, &[Expr::int(3), Expr::int(-2)]).unwrap();
        assert!(residuals_on_section(&p2, &d).unwrap().iter().all(zero));
        // So does any field of the form f(x1 - x2).
        let gamma = [parse("sin(x1 - x2)", &chart(), &[] as &[&str]).unwrap(), parse("(x1 - x2)^2", &chart(), &[] as &[&str]).unwrap()];
        assert!(el_residual_on_section(sys.lagrangian(), &gamma).unwrap().iter().all(zero));
        let d = prolong_section(&sys, &gamma).unwrap();
        assert!(residuals_on_section(&p2, &d).unwrap().iter().all(zero));
    }

    #[test]
    fn non_closed_tensor_on_three_fields() {
        let c = Chart::new(2, 3).unwrap();
        let l = GeneralLagrangian::parse(c.clone(), "1/2*(y1_1^2 + y1_2^2 + y2_1^2 + y2_2^2 + y3_1^2 + y3_2^2)", vec![]).unwrap();
        let mut g = GTensor::zero(c.clone(), vec![]);
        g.set(1, 2, 1, 2, parse("y3/8", &c, &[] as &[&str]).unwrap()).unwrap();
        let sys = LepageanSystem::new(l, g).unwrap();
        let p2 = p2_system(&sys).unwrap();
        assert!(!p2.reduced);
        for gamma in [["x1", "x2", "1"], ["x1*x2", "x1^2 - x2^2", "x1 + 2*x2"]] {
            let gamma: Vec<Expr> = gamma.iter().map(|t| parse(t, &c, &[] as &[&str]).unwrap()).collect();
            assert!(el_residual_on_section(sys.lagrangian(), &gamma).unwrap().iter().all(zero));
            let d = prolong_section(&sys, &gamma).unwrap();
            let r = residuals_on_section(&p2, &d).unwrap();
            assert!(r.iter().all(zero), "{r:?}");
        }
    }
}
