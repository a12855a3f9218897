//! Sparse multivariate polynomials with Gaussian-rational coefficients and
//! the canonical-form conversion from [`Expr`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;

use super::{Bindings, Expr, GaussRational, Name};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum SymKind {
    Var,
    Param,
    /// An opaque transcendental subterm, used only inside equality tests.
    Atom,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Symbol {
    name: Name,
    kind: SymKind,
}

/// Product of symbols raised to positive powers, sorted by symbol.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<(Symbol, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    /// Exponent of the named symbol.
    pub fn degree_of(&self, name: &str) -> u32 {
        self.0.iter().find(|(s, _)| &*s.name == name).map_or(0, |(_, e)| *e)
    }

    pub fn factors(&self) -> impl Iterator<Item = (&str, u32)> {
        self.0.iter().map(|(s, e)| (&*s.name, *e))
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    fn to_expr(&self) -> Expr {
        Expr::mul(self.0.iter().map(|(s, e)| {
            let base = match s.kind {
                SymKind::Param => Expr::Param(s.name.clone()),
                SymKind::Var | SymKind::Atom => Expr::Var(s.name.clone()),
            };
            Expr::pow(base, *e as i64)
        }))
    }
}

/// Canonical polynomial: no stored zero coefficients, monomials sorted, so
/// two equal polynomials are structurally identical.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, GaussRational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: GaussRational) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn one() -> Self {
        Self::constant(GaussRational::one())
    }

    fn symbol(sym: Symbol) -> Self {
        let mut p = Self::zero();
        p.terms.insert(Monomial(vec![(sym, 1)]), GaussRational::one());
        p
    }

    pub fn var(name: impl Into<Name>) -> Self {
        Self::symbol(Symbol { name: name.into(), kind: SymKind::Var })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<GaussRational> {
        match self.terms.len() {
            0 => Some(GaussRational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> GaussRational {
        self.terms.get(m).cloned().unwrap_or_else(GaussRational::zero)
    }

    /// Sorted list of the variable/parameter names occurring.
    pub fn variables(&self) -> Vec<Name> {
        let set: BTreeSet<Name> = self.terms.keys().flat_map(|m| m.0.iter().map(|(s, _)| s.name.clone())).collect();
        set.into_iter().collect()
    }

    pub(crate) fn has_atoms(&self) -> bool {
        self.terms.keys().any(|m| m.0.iter().any(|(s, _)| s.kind == SymKind::Atom))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    /// Highest combined degree in the given names over all monomials.
    pub fn degree_in(&self, names: &[Name]) -> u32 {
        self.terms
            .keys()
            .map(|m| m.0.iter().filter(|(s, _)| names.contains(&s.name)).map(|(_, e)| e).sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    fn insert_term(&mut self, m: Monomial, c: GaussRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &GaussRational) -> Polynomial {
        if k.is_zero() {
            return Polynomial::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.insert_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn differentiate(&self, name: &str) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let Some(pos) = m.0.iter().position(|(s, _)| &*s.name == name) else {
                continue;
            };
            let e = m.0[pos].1;
            let mut factors = m.0.clone();
            if e == 1 {
                factors.remove(pos);
            } else {
                factors[pos].1 = e - 1;
            }
            out.insert_term(Monomial(factors), c * &GaussRational::from_int(e as i64));
        }
        out
    }

    /// Largest monomial dividing every term.
    fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        let mut common = first.0.clone();
        for m in it {
            common.retain_mut(|(s, e)| match m.0.iter().find(|(t, _)| t == s) {
                Some((_, f)) => {
                    *e = (*e).min(*f);
                    true
                }
                None => false,
            });
        }
        Monomial(common)
    }

    fn divide_monomial(&self, d: &Monomial) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let factors = m
                    .0
                    .iter()
                    .filter_map(|(s, e)| {
                        let k = e - d.degree_of(&s.name);
                        (k > 0).then(|| (s.clone(), k))
                    })
                    .collect();
                (Monomial(factors), c.clone())
            })
            .collect();
        Polynomial { terms }
    }

    pub fn eval(&self, env: &Bindings) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_complex();
            for (s, e) in &m.0 {
                let v = env.get(&s.name).ok_or_else(|| Error::UnboundName(s.name.to_string()))?;
                t *= v.powu(*e);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Back to an expression; terms ordered by decreasing degree.
    pub fn to_expr(&self) -> Expr {
        let mut terms: Vec<(&Monomial, &GaussRational)> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.0.total_degree().cmp(&a.0.total_degree()).then_with(|| a.0.cmp(b.0)));
        Expr::add(terms.into_iter().map(|(m, c)| Expr::mul([Expr::Const(c.clone()), m.to_expr()])))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum AtomPolicy {
    Reject,
    Opaque,
}

/// Canonical polynomial form of a polynomial expression.
pub fn canonical(e: &Expr) -> Result<Polynomial> {
    to_poly(e, AtomPolicy::Reject).ok_or(Error::NotPolynomial)
}

pub(crate) fn to_poly(e: &Expr, policy: AtomPolicy) -> Option<Polynomial> {
    Some(match e {
        Expr::Const(c) => Polynomial::constant(c.clone()),
        Expr::Var(n) => Polynomial::symbol(Symbol { name: n.clone(), kind: SymKind::Var }),
        Expr::Param(n) => Polynomial::symbol(Symbol { name: n.clone(), kind: SymKind::Param }),
        Expr::Neg(a) => to_poly(a, policy)?.neg(),
        Expr::Add(ts) => {
            let mut acc = Polynomial::zero();
            for t in ts {
                acc = acc.add(&to_poly(t, policy)?);
            }
            acc
        }
        Expr::Mul(fs) => {
            let mut acc = Polynomial::one();
            for f in fs {
                acc = acc.mul(&to_poly(f, policy)?);
                if acc.is_zero() {
                    break;
                }
            }
            acc
        }
        Expr::Div(a, b) => {
            let den = to_poly(b, policy)?.as_constant()?;
            let inv = den.recip()?;
            to_poly(a, policy)?.scale(&inv)
        }
        Expr::Pow(base, n) => {
            let b = to_poly(base, policy)?;
            if *n >= 0 {
                b.pow(*n as u32)
            } else {
                Polynomial::constant(b.as_constant()?.pow(*n)?)
            }
        }
        Expr::Func(..) => match policy {
            AtomPolicy::Reject => return None,
            AtomPolicy::Opaque => Polynomial::symbol(Symbol { name: atom_name(e), kind: SymKind::Atom }),
        },
    })
}

/// Key for an opaque function node: its argument is normalised first so
/// that algebraically equal arguments share one atom.
fn atom_name(e: &Expr) -> Name {
    let Expr::Func(kind, arg) = e else { unreachable!("atoms are function nodes") };
    let normal = match RationalFunction::from_expr_with_atoms(arg) {
        Some(rf) if rf.den.as_constant().is_some_and(|c| c.is_one()) => rf.num.to_string(),
        Some(rf) => format!("({})/({})", rf.num, rf.den),
        None => arg.to_string(),
    };
    format!("§{}({})", kind.name(), normal).into()
}

/// Quotient of two polynomials, not reduced. Used for exact equality of
/// expressions with variable denominators by cross-multiplication.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunction {
    pub num: Polynomial,
    pub den: Polynomial,
}

impl RationalFunction {
    /// Conversion of a function-free expression; `None` if the expression
    /// contains functions or divides by an identically zero polynomial.
    pub fn from_expr(e: &Expr) -> Option<Self> {
        to_ratfn(e, AtomPolicy::Reject)
    }

    pub(crate) fn from_expr_with_atoms(e: &Expr) -> Option<Self> {
        to_ratfn(e, AtomPolicy::Opaque)
    }

    fn poly(p: Polynomial) -> Self {
        Self { num: p, den: Polynomial::one() }
    }

    fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self { num: self.num.add(&o.num), den: self.den.clone() };
        }
        Self { num: self.num.mul(&o.den).add(&o.num.mul(&self.den)), den: self.den.mul(&o.den) }
    }

    fn mul(&self, o: &Self) -> Self {
        Self { num: self.num.mul(&o.num), den: self.den.mul(&o.den) }
    }

    fn recip(&self) -> Option<Self> {
        if self.num.is_zero() {
            return None;
        }
        Some(Self { num: self.den.clone(), den: self.num.clone() })
    }

    /// Cancel the common monomial factor of numerator and denominator and
    /// scale so that the denominator's first coefficient is one.
    pub fn reduced(&self) -> Self {
        if self.num.is_zero() {
            return Self::poly(Polynomial::zero());
        }
        let cn = self.num.monomial_content();
        let cd = self.den.monomial_content();
        let common = Monomial(
            cn.0.iter()
                .filter_map(|(s, e)| {
                    let k = (*e).min(cd.degree_of(&s.name));
                    (k > 0).then(|| (s.clone(), k))
                })
                .collect(),
        );
        let num = self.num.divide_monomial(&common);
        let den = self.den.divide_monomial(&common);
        let lead = den.terms.values().next().cloned().unwrap_or_else(GaussRational::one);
        let inv = lead.recip().expect("nonzero coefficient");
        Self { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn to_expr(&self) -> Expr {
        match self.den.as_constant() {
            Some(c) => self.num.scale(&c.recip().expect("nonzero denominator")).to_expr(),
            None => Expr::div(self.num.to_expr(), self.den.to_expr()),
        }
    }

    /// Whether `self` and `other` are the same rational function.
    pub fn same_as(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

fn to_ratfn(e: &Expr, policy: AtomPolicy) -> Option<RationalFunction> {
    if let Some(p) = to_poly(e, policy) {
        return Some(RationalFunction::poly(p));
    }
    Some(match e {
        Expr::Func(..) => return None,
        Expr::Const(_) | Expr::Var(_) | Expr::Param(_) => unreachable!("handled by to_poly"),
        Expr::Neg(a) => {
            let r = to_ratfn(a, policy)?;
            RationalFunction { num: r.num.neg(), den: r.den }
        }
        Expr::Add(ts) => {
            let mut acc = RationalFunction::poly(Polynomial::zero());
            for t in ts {
                acc = acc.add(&to_ratfn(t, policy)?);
            }
            acc
        }
        Expr::Mul(fs) => {
            let mut acc = RationalFunction::poly(Polynomial::one());
            for f in fs {
                acc = acc.mul(&to_ratfn(f, policy)?);
            }
            acc
        }
        Expr::Div(a, b) => to_ratfn(a, policy)?.mul(&to_ratfn(b, policy)?.recip()?),
        Expr::Pow(base, n) => {
            let b = to_ratfn(base, policy)?;
            let b = if *n < 0 { b.recip()? } else { b };
            let k = n.unsigned_abs() as u32;
            RationalFunction { num: b.num.pow(k), den: b.den.pow(k) }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::expr::parse;
    use proptest::prelude::*;

    fn p(text: &str) -> Expr {
        parse(text, &Chart::new(2, 2).unwrap(), &["u", "a", "b"]).unwrap()
    }

    fn mono(vars: &[(&str, u32)]) -> Monomial {
        let mut v: Vec<(Symbol, u32)> =
            vars.iter().map(|(n, e)| (Symbol { name: (*n).into(), kind: SymKind::Var }, *e)).collect();
        v.sort();
        Monomial(v)
    }

    #[test]
    fn binomial_square() {
        let c = canonical(&p("(y1_2+y2_1)^2")).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.coefficient(&mono(&[("y1_2", 2)])), GaussRational::one());
        assert_eq!(c.coefficient(&mono(&[("y1_2", 1), ("y2_1", 1)])), GaussRational::from_int(2));
        assert_eq!(c.coefficient(&mono(&[("y2_1", 2)])), GaussRational::one());
    }

    #[test]
    fn cancellation_gives_empty_map() {
        assert!(canonical(&p("x1 - x1")).unwrap().is_zero());
    }

    #[test]
    fn transcendental_is_not_polynomial() {
        assert_eq!(canonical(&p("sin(x1)")), Err(Error::NotPolynomial));
        assert_eq!(canonical(&p("1/x1")), Err(Error::NotPolynomial));
        assert_eq!(canonical(&p("x1^(-1)")), Err(Error::NotPolynomial));
        assert!(canonical(&p("x1/2 + 2^(-1)")).is_ok());
    }

    #[test]
    fn variables_are_sorted_and_degree_queries_work() {
        let c = canonical(&p("u*y1_1^2*x2 + y2_2")).unwrap();
        let vars: Vec<String> = c.variables().iter().map(|n| n.to_string()).collect();
        assert_eq!(vars, vec!["u", "x2", "y1_1", "y2_2"]);
        assert_eq!(c.total_degree(), 4);
        assert_eq!(c.degree_in(&["y1_1".into(), "y2_2".into()]), 2);
    }

    #[test]
    fn parameters_survive_round_trip_through_to_expr() {
        let c = canonical(&p("u*x1 - u")).unwrap();
        let back = c.to_expr();
        assert!(back.symbols().contains("u"));
        assert!(matches!(back, Expr::Add(_)));
        assert_eq!(canonical(&back).unwrap(), c);
    }

    #[test]
    fn rational_function_cross_multiplication() {
        let a = RationalFunction::from_expr(&p("1/(x1*x2)")).unwrap();
        let b = RationalFunction::from_expr(&p("(1/x1)*(1/x2)")).unwrap();
        assert!(a.same_as(&b));
        assert!(RationalFunction::from_expr(&p("1/(x1 - x1)")).is_none());
        assert!(RationalFunction::from_expr(&p("sin(x1)")).is_none());
    }

    fn small_poly() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (-3i64..=3).prop_map(Expr::int),
            prop::sample::select(vec!["x1", "x2", "y1", "y1_2"]).prop_map(Expr::var),
        ];
        leaf.prop_recursive(3, 12, 3, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 2..3).prop_map(Expr::add),
                prop::collection::vec(inner.clone(), 2..3).prop_map(Expr::mul),
                (inner.clone(), 0i64..3).prop_map(|(b, n)| Expr::pow(b, n)),
                inner.prop_map(Expr::neg),
            ]
        })
    }

    proptest! {
        #[test]
        fn canonical_is_a_congruence(a in small_poly(), b in small_poly()) {
            let ca = canonical(&a).unwrap();
            let cb = canonical(&b).unwrap();
            prop_assert_eq!(ca.add(&cb), canonical(&Expr::add([a.clone(), b.clone()])).unwrap());
            prop_assert_eq!(ca.mul(&cb), canonical(&Expr::mul([a, b])).unwrap());
        }

        #[test]
        fn canonical_is_idempotent(a in small_poly()) {
            let c = canonical(&a).unwrap();
            prop_assert_eq!(canonical(&c.to_expr()).unwrap(), c);
        }

        #[test]
        fn print_parse_round_trip_preserves_canonical_form(a in small_poly()) {
            let again = p(&a.to_string());
            prop_assert_eq!(canonical(&again).unwrap(), canonical(&a).unwrap());
        }
    }
}
