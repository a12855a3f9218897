//! A small computer-algebra engine for scalar expressions over Gaussian
//! rationals, chart coordinates and named parameters.
//!
//! Construction goes through smart constructors ([`Expr::add`],
//! [`Expr::mul`], ...) that fold constants, drop `0`/`1` identities and
//! flatten nested sums and products. Nothing else is rewritten; full
//! normalisation happens only in [`canonical`] and [`equals`].

mod equality;
mod number;
mod ops;
mod parse;
mod poly;

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use std::fmt;
use std::sync::Arc;

pub use equality::{equals, probabilistic_seed, set_probabilistic_seed, Equality, EqualityMethod};
pub use number::GaussRational;
pub use ops::Bindings;
pub use parse::parse;
pub use poly::{canonical, Monomial, Polynomial, RationalFunction};

/// Interned symbol name.
pub type Name = Arc<str>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FuncKind {
    Sin,
    Cos,
    Exp,
    Log,
}

impl FuncKind {
    pub fn name(self) -> &'static str {
        match self {
            FuncKind::Sin => "sin",
            FuncKind::Cos => "cos",
            FuncKind::Exp => "exp",
            FuncKind::Log => "log",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "sin" => Some(FuncKind::Sin),
            "cos" => Some(FuncKind::Cos),
            "exp" => Some(FuncKind::Exp),
            "log" => Some(FuncKind::Log),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(GaussRational),
    /// Named parameter (γ^μ, a mass, `u`, ...).
    Param(Name),
    /// Chart coordinate.
    Var(Name),
    Neg(Box<Expr>),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    Func(FuncKind, Box<Expr>),
}

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Const(GaussRational::zero())
    }

    pub fn one() -> Expr {
        Expr::Const(GaussRational::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(GaussRational::from_int(n))
    }

    pub fn ratio(p: i64, q: i64) -> Expr {
        Expr::Const(GaussRational::from_ratio(p, q))
    }

    pub fn constant(c: GaussRational) -> Expr {
        Expr::Const(c)
    }

    pub fn imaginary_unit() -> Expr {
        Expr::Const(GaussRational::imaginary_unit())
    }

    pub fn var(name: impl Into<Name>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn param(name: impl Into<Name>) -> Expr {
        Expr::Param(name.into())
    }

    pub fn as_const(&self) -> Option<&GaussRational> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    /// Structural zero test (a literal `0`).
    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_one())
    }

    pub fn add(terms: impl IntoIterator<Item = Expr>) -> Expr {
        let mut constant = GaussRational::zero();
        let mut flat = Vec::new();
        for t in terms {
            match t {
                Expr::Const(c) => constant = &constant + &c,
                Expr::Add(inner) => {
                    for u in inner {
                        match u {
                            Expr::Const(c) => constant = &constant + &c,
                            other => flat.push(other),
                        }
                    }
                }
                other => flat.push(other),
            }
        }
        if !constant.is_zero() {
            flat.push(Expr::Const(constant));
        }
        match flat.len() {
            0 => Expr::zero(),
            1 => flat.pop().unwrap(),
            _ => Expr::Add(flat),
        }
    }

    pub fn mul(factors: impl IntoIterator<Item = Expr>) -> Expr {
        let mut constant = GaussRational::one();
        let mut flat = Vec::new();
        let push = |e: Expr, constant: &mut GaussRational, flat: &mut Vec<Expr>| match e {
            Expr::Const(c) => *constant = &*constant * &c,
            Expr::Neg(inner) => {
                *constant = -&*constant;
                match *inner {
                    Expr::Mul(fs) => {
                        for f in fs {
                            match f {
                                Expr::Const(c) => *constant = &*constant * &c,
                                other => flat.push(other),
                            }
                        }
                    }
                    Expr::Const(c) => *constant = &*constant * &c,
                    other => flat.push(other),
                }
            }
            other => flat.push(other),
        };
        for f in factors {
            match f {
                Expr::Mul(inner) => {
                    for g in inner {
                        push(g, &mut constant, &mut flat);
                    }
                }
                other => push(other, &mut constant, &mut flat),
            }
        }
        if constant.is_zero() {
            return Expr::zero();
        }
        if flat.is_empty() {
            return Expr::Const(constant);
        }
        if !constant.is_one() {
            flat.insert(0, Expr::Const(constant));
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            Expr::Mul(flat)
        }
    }

    pub fn neg(e: Expr) -> Expr {
        match e {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => *inner,
            Expr::Mul(mut fs) => {
                if let Some(Expr::Const(c)) = fs.first() {
                    let c = -c;
                    if c.is_one() {
                        fs.remove(0);
                        return if fs.len() == 1 { fs.pop().unwrap() } else { Expr::Mul(fs) };
                    }
                    fs[0] = Expr::Const(c);
                    Expr::Mul(fs)
                } else {
                    fs.insert(0, Expr::int(-1));
                    Expr::Mul(fs)
                }
            }
            other => Expr::Neg(Box::new(other)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::add([a, Expr::neg(b)])
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        if a.is_zero() && !b.is_zero() {
            return Expr::zero();
        }
        if let Expr::Const(c) = &b {
            if let Some(r) = c.recip() {
                return Expr::mul([Expr::Const(r), a]);
            }
        }
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(base: Expr, exp: i64) -> Expr {
        if exp == 0 {
            return Expr::one();
        }
        if exp == 1 {
            return base;
        }
        match base {
            Expr::Const(c) => match c.pow(exp) {
                Some(v) => Expr::Const(v),
                None => Expr::Pow(Box::new(Expr::Const(c)), exp),
            },
            Expr::Pow(inner, k) => Expr::pow(*inner, k * exp),
            other => Expr::Pow(Box::new(other), exp),
        }
    }

    pub fn func(kind: FuncKind, arg: Expr) -> Expr {
        if arg.is_zero() {
            return match kind {
                FuncKind::Sin => Expr::zero(),
                FuncKind::Cos | FuncKind::Exp => Expr::one(),
                FuncKind::Log => Expr::Func(kind, Box::new(arg)),
            };
        }
        if kind == FuncKind::Log && arg.is_one() {
            return Expr::zero();
        }
        Expr::Func(kind, Box::new(arg))
    }

    pub fn sin(arg: Expr) -> Expr {
        Expr::func(FuncKind::Sin, arg)
    }

    pub fn cos(arg: Expr) -> Expr {
        Expr::func(FuncKind::Cos, arg)
    }

    pub fn exp(arg: Expr) -> Expr {
        Expr::func(FuncKind::Exp, arg)
    }

    pub fn log(arg: Expr) -> Expr {
        Expr::func(FuncKind::Log, arg)
    }

    /// Names of every variable and parameter occurring in the expression.
    pub fn symbols(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Name>) {
        match self {
            Expr::Const(_) => {}
            Expr::Param(n) | Expr::Var(n) => {
                out.insert(n.clone());
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Func(_, a) => a.collect_symbols(out),
            Expr::Add(ts) | Expr::Mul(ts) => ts.iter().for_each(|t| t.collect_symbols(out)),
            Expr::Div(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
        }
    }

    pub fn contains_symbol(&self, name: &str) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Param(n) | Expr::Var(n) => &**n == name,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Func(_, a) => a.contains_symbol(name),
            Expr::Add(ts) | Expr::Mul(ts) => ts.iter().any(|t| t.contains_symbol(name)),
            Expr::Div(a, b) => a.contains_symbol(name) || b.contains_symbol(name),
        }
    }

    pub fn contains_func(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Param(_) | Expr::Var(_) => false,
            Expr::Func(..) => true,
            Expr::Neg(a) | Expr::Pow(a, _) => a.contains_func(),
            Expr::Add(ts) | Expr::Mul(ts) => ts.iter().any(Expr::contains_func),
            Expr::Div(a, b) => a.contains_func() || b.contains_func(),
        }
    }

    /// Rewrite into expanded canonical polynomial form when the expression
    /// is a polynomial; otherwise return it unchanged.
    pub fn expand(&self) -> Expr {
        match canonical(self) {
            Ok(p) => p.to_expr(),
            Err(_) => self.clone(),
        }
    }

    /// [`expand`](Expr::expand), extended to quotients of polynomials, which
    /// are put over a single denominator with common monomials cancelled.
    pub fn simplify(&self) -> Expr {
        if let Ok(p) = canonical(self) {
            return p.to_expr();
        }
        match RationalFunction::from_expr(self) {
            Some(rf) => rf.reduced().to_expr(),
            None => self.clone(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(_) => 1,
            Expr::Mul(_) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(c) => {
                if !c.re.is_zero() && !c.im.is_zero() {
                    5
                } else if c.is_negative() {
                    3
                } else if c.is_real() {
                    if c.re.is_integer() {
                        5
                    } else {
                        2
                    }
                } else if c.im.is_one() {
                    5
                } else {
                    2
                }
            }
            _ => 5,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, f)
    }
}

fn write_wrapped(e: &Expr, min_prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "(")?;
        write_expr(e, f)?;
        write!(f, ")")
    } else {
        write_expr(e, f)
    }
}

fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Const(c) => write!(f, "{c}"),
        Expr::Param(n) | Expr::Var(n) => write!(f, "{n}"),
        Expr::Neg(a) => {
            write!(f, "-")?;
            write_wrapped(a, 3, f)
        }
        Expr::Add(ts) => {
            for (k, t) in ts.iter().enumerate() {
                if k == 0 {
                    write_wrapped(t, 1, f)?;
                    continue;
                }
                match negated_term(t) {
                    Some(pos) => {
                        write!(f, " - ")?;
                        write_wrapped(&pos, 2, f)?;
                    }
                    None => {
                        write!(f, " + ")?;
                        write_wrapped(t, 2, f)?;
                    }
                }
            }
            Ok(())
        }
        Expr::Mul(fs) => {
            let mut rest: &[Expr] = fs;
            if let Some(Expr::Const(c)) = fs.first() {
                if (-c).is_one() {
                    write!(f, "-")?;
                    rest = &fs[1..];
                    for (k, x) in rest.iter().enumerate() {
                        if k > 0 {
                            write!(f, "*")?;
                        }
                        write_wrapped(x, if k == 0 { 2 } else { 3 }, f)?;
                    }
                    return Ok(());
                }
            }
            for (k, x) in rest.iter().enumerate() {
                if k > 0 {
                    write!(f, "*")?;
                }
                // a right operand of `*` that is itself a product or quotient
                // would re-associate; constants like `3/2` count as quotients
                let min = if k == 0 { 2 } else { 3 };
                write_wrapped(x, min, f)?;
            }
            Ok(())
        }
        Expr::Div(a, b) => {
            write_wrapped(a, 2, f)?;
            write!(f, "/")?;
            write_wrapped(b, 3, f)
        }
        Expr::Pow(b, n) => {
            write_wrapped(b, 5, f)?;
            if *n < 0 {
                write!(f, "^({n})")
            } else {
                write!(f, "^{n}")
            }
        }
        Expr::Func(k, a) => {
            write!(f, "{}(", k.name())?;
            write_expr(a, f)?;
            write!(f, ")")
        }
    }
}

/// If `t` prints with a leading minus, the term without it.
fn negated_term(t: &Expr) -> Option<Expr> {
    match t {
        Expr::Neg(a) => Some((**a).clone()),
        Expr::Const(c) if c.is_negative() => Some(Expr::Const(-c)),
        Expr::Mul(fs) => match fs.first() {
            Some(Expr::Const(c)) if c.is_negative() => {
                let mut fs = fs.clone();
                fs[0] = Expr::Const(-c);
                Some(Expr::mul(fs))
            }
            _ => None,
        },
        _ => None,
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add([self, rhs])
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul([self, rhs])
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::div(self, rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}
