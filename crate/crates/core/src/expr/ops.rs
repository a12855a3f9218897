use std::collections::HashMap;

use num_complex::Complex64;

use super::{Expr, FuncKind, Name};
use crate::error::{Error, Result};

/// Name → complex value environment for [`Expr::eval`].
pub type Bindings = HashMap<Name, Complex64>;

impl Expr {
    /// Exact partial derivative with respect to the symbol `v`.
    pub fn differentiate(&self, v: &str) -> Expr {
        if !self.contains_symbol(v) {
            return Expr::zero();
        }
        match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Param(n) | Expr::Var(n) => {
                if &**n == v {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Neg(a) => Expr::neg(a.differentiate(v)),
            Expr::Add(ts) => Expr::add(ts.iter().map(|t| t.differentiate(v))),
            Expr::Mul(fs) => {
                let mut terms = Vec::new();
                for (k, f) in fs.iter().enumerate() {
                    let df = f.differentiate(v);
                    if df.is_zero() {
                        continue;
                    }
                    let mut prod: Vec<Expr> = Vec::with_capacity(fs.len());
                    for (j, g) in fs.iter().enumerate() {
                        prod.push(if j == k { df.clone() } else { g.clone() });
                    }
                    terms.push(Expr::mul(prod));
                }
                Expr::add(terms)
            }
            Expr::Div(a, b) => {
                let da = a.differentiate(v);
                let db = b.differentiate(v);
                if db.is_zero() {
                    return Expr::div(da, (**b).clone());
                }
                let num = Expr::sub(
                    Expr::mul([da, (**b).clone()]),
                    Expr::mul([(**a).clone(), db]),
                );
                Expr::div(num, Expr::pow((**b).clone(), 2))
            }
            Expr::Pow(base, n) => {
                let db = base.differentiate(v);
                Expr::mul([Expr::int(*n), Expr::pow((**base).clone(), n - 1), db])
            }
            Expr::Func(kind, a) => {
                let da = a.differentiate(v);
                let outer = match kind {
                    FuncKind::Sin => Expr::cos((**a).clone()),
                    FuncKind::Cos => Expr::neg(Expr::sin((**a).clone())),
                    FuncKind::Exp => self.clone(),
                    FuncKind::Log => return Expr::div(da, (**a).clone()),
                };
                Expr::mul([outer, da])
            }
        }
    }

    /// Simultaneous substitution of symbols (variables or parameters) by
    /// expressions. Right-hand sides are not re-substituted.
    pub fn substitute(&self, bindings: &HashMap<Name, Expr>) -> Expr {
        if bindings.is_empty() {
            return self.clone();
        }
        self.subst_inner(bindings)
    }

    fn subst_inner(&self, b: &HashMap<Name, Expr>) -> Expr {
        match self {
            Expr::Const(_) => self.clone(),
            Expr::Param(n) | Expr::Var(n) => b.get(n).cloned().unwrap_or_else(|| self.clone()),
            Expr::Neg(a) => Expr::neg(a.subst_inner(b)),
            Expr::Add(ts) => Expr::add(ts.iter().map(|t| t.subst_inner(b))),
            Expr::Mul(fs) => Expr::mul(fs.iter().map(|t| t.subst_inner(b))),
            Expr::Div(x, y) => Expr::div(x.subst_inner(b), y.subst_inner(b)),
            Expr::Pow(x, n) => Expr::pow(x.subst_inner(b), *n),
            Expr::Func(k, a) => Expr::func(*k, a.subst_inner(b)),
        }
    }

    /// Double-precision complex evaluation.
    pub fn eval(&self, env: &Bindings) -> Result<Complex64> {
        match self {
            Expr::Const(c) => Ok(c.to_complex()),
            Expr::Param(n) | Expr::Var(n) => env.get(n).copied().ok_or_else(|| Error::UnboundName(n.to_string())),
            Expr::Neg(a) => Ok(-a.eval(env)?),
            Expr::Add(ts) => ts.iter().try_fold(Complex64::new(0.0, 0.0), |acc, t| Ok(acc + t.eval(env)?)),
            Expr::Mul(fs) => fs.iter().try_fold(Complex64::new(1.0, 0.0), |acc, t| Ok(acc * t.eval(env)?)),
            Expr::Div(a, b) => {
                let num = a.eval(env)?;
                let den = b.eval(env)?;
                if den.norm_sqr() == 0.0 {
                    return Err(Error::DivisionByZero);
                }
                Ok(num / den)
            }
            Expr::Pow(a, n) => {
                let base = a.eval(env)?;
                if *n < 0 && base.norm_sqr() == 0.0 {
                    return Err(Error::DivisionByZero);
                }
                Ok(complex_powi(base, *n))
            }
            Expr::Func(kind, a) => {
                let z = a.eval(env)?;
                Ok(match kind {
                    FuncKind::Sin => z.sin(),
                    FuncKind::Cos => z.cos(),
                    FuncKind::Exp => z.exp(),
                    FuncKind::Log => {
                        if z.norm_sqr() == 0.0 {
                            return Err(Error::Domain("log of zero".into()));
                        }
                        z.ln()
                    }
                })
            }
        }
    }
}

/// Integer power by repeated squaring; exact for small integers, unlike
/// `Complex::powi` which goes through polar form.
fn complex_powi(z: Complex64, n: i64) -> Complex64 {
    if n < 0 {
        return Complex64::new(1.0, 0.0) / complex_powi(z, -n);
    }
    let mut acc = Complex64::new(1.0, 0.0);
    let mut base = z;
    let mut e = n as u64;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}
