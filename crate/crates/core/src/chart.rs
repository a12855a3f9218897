//! Dimension bookkeeping and coordinate naming for a single global fibred
//! chart `(x^i, y^σ)` on `R^n × R^m` and its first jet prolongation.
//!
//! Names follow "upper index first":
//!
//! | coordinate            | name            |
//! |-----------------------|-----------------|
//! | `x^i`                 | `x{i}`          |
//! | `y^σ`                 | `y{σ}`          |
//! | `y^σ_i`               | `y{σ}_{i}`      |
//! | `y^σ_{ij}`, `i ≤ j`   | `y{σ}_{i}{j}`   (`y{σ}_{i}_{j}` when `n > 9`) |
//! | `p^i_σ`               | `p{i}_{σ}`      |
//! | `∂p^i_σ/∂x^k`         | `p{i}_{σ}_{k}`  |
//!
//! Every matrix indexed by pairs `(σ, i)` uses the σ-major flat index
//! `(σ−1)·n + (i−1)`; see [`Chart::flat_index`].

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::Name;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coordinate {
    Base(usize),
    Fibre(usize),
    Jet { sigma: usize, i: usize },
    Jet2 { sigma: usize, i: usize, j: usize },
    Momentum { sigma: usize, i: usize },
    MomentumDerivative { sigma: usize, i: usize, k: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chart {
    n: usize,
    m: usize,
}

impl Chart {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidChart(format!("need n ≥ 1 and m ≥ 1, got n={n}, m={m}")));
        }
        Ok(Self { n, m })
    }

    /// Base dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Fibre dimension.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of first-order jet coordinates, `m·n`.
    pub fn mn(&self) -> usize {
        self.m * self.n
    }

    pub fn flat_index(&self, sigma: usize, i: usize) -> Result<usize> {
        self.check_fibre(sigma)?;
        self.check_base(i)?;
        Ok((sigma - 1) * self.n + (i - 1))
    }

    pub fn unflat_index(&self, r: usize) -> Result<(usize, usize)> {
        if r >= self.mn() {
            return Err(Error::IndexOutOfRange(format!("flat index {r} not in [0, {})", self.mn())));
        }
        Ok((r / self.n + 1, r % self.n + 1))
    }

    pub(crate) fn check_base(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n {
            return Err(Error::IndexOutOfRange(format!("base index {i} not in 1..={}", self.n)));
        }
        Ok(())
    }

    pub(crate) fn check_fibre(&self, sigma: usize) -> Result<()> {
        if sigma == 0 || sigma > self.m {
            return Err(Error::IndexOutOfRange(format!("fibre index {sigma} not in 1..={}", self.m)));
        }
        Ok(())
    }

    pub fn x(&self, i: usize) -> Name {
        format!("x{i}").into()
    }

    pub fn y(&self, sigma: usize) -> Name {
        format!("y{sigma}").into()
    }

    pub fn jet(&self, sigma: usize, i: usize) -> Name {
        format!("y{sigma}_{i}").into()
    }

    /// Formal second-jet coordinate; symmetric in `(i, j)`.
    pub fn jet2(&self, sigma: usize, i: usize, j: usize) -> Name {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        if self.n > 9 {
            format!("y{sigma}_{a}_{b}").into()
        } else {
            format!("y{sigma}_{a}{b}").into()
        }
    }

    /// Legendre coordinate `p^i_σ`.
    pub fn momentum(&self, sigma: usize, i: usize) -> Name {
        format!("p{i}_{sigma}").into()
    }

    /// Placeholder for `∂p^i_σ/∂x^k` in Hamilton residual templates.
    pub fn momentum_derivative(&self, sigma: usize, i: usize, k: usize) -> Name {
        format!("p{i}_{sigma}_{k}").into()
    }

    pub fn base_names(&self) -> Vec<Name> {
        (1..=self.n).map(|i| self.x(i)).collect()
    }

    pub fn fibre_names(&self) -> Vec<Name> {
        (1..=self.m).map(|s| self.y(s)).collect()
    }

    /// Jet names in flat order.
    pub fn jet_names(&self) -> Vec<Name> {
        self.pairs().map(|(s, i)| self.jet(s, i)).collect()
    }

    /// Momentum names in flat order.
    pub fn momentum_names(&self) -> Vec<Name> {
        self.pairs().map(|(s, i)| self.momentum(s, i)).collect()
    }

    /// All `(σ, i)` pairs in flat order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=self.m).flat_map(move |s| (1..=self.n).map(move |i| (s, i)))
    }

    /// Recognise a coordinate name of this chart. Second-jet names with
    /// `i > j` are accepted and mean the same variable as `i < j`.
    pub fn classify(&self, name: &str) -> Option<Coordinate> {
        if !name.chars().next()?.is_ascii() {
            return None;
        }
        let (head, rest) = name.split_at(1);
        let parts: Vec<&str> = rest.split('_').collect();
        let nums: Option<Vec<usize>> = parts
            .iter()
            .map(|p| {
                if p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit()) || p.starts_with('0') {
                    None
                } else {
                    p.parse().ok()
                }
            })
            .collect();
        let in_base = |i: usize| (1..=self.n).contains(&i);
        let in_fibre = |s: usize| (1..=self.m).contains(&s);
        match head {
            "x" => {
                let nums = nums?;
                match nums.as_slice() {
                    [i] if in_base(*i) => Some(Coordinate::Base(*i)),
                    _ => None,
                }
            }
            "y" => {
                if parts.len() == 2 && self.n <= 9 && parts[1].len() == 2 {
                    let sigma: usize = parts[0].parse().ok()?;
                    let b = parts[1].as_bytes();
                    let i = (b[0] as char).to_digit(10)? as usize;
                    let j = (b[1] as char).to_digit(10)? as usize;
                    if in_fibre(sigma) && in_base(i) && in_base(j) && !parts[0].starts_with('0') {
                        return Some(Coordinate::Jet2 { sigma, i: i.min(j), j: i.max(j) });
                    }
                    return None;
                }
                let nums = nums?;
                match nums.as_slice() {
                    [s] if in_fibre(*s) => Some(Coordinate::Fibre(*s)),
                    [s, i] if in_fibre(*s) && in_base(*i) => Some(Coordinate::Jet { sigma: *s, i: *i }),
                    [s, i, j] if self.n > 9 && in_fibre(*s) && in_base(*i) && in_base(*j) => {
                        Some(Coordinate::Jet2 { sigma: *s, i: (*i).min(*j), j: (*i).max(*j) })
                    }
                    _ => None,
                }
            }
            "p" => {
                let nums = nums?;
                match nums.as_slice() {
                    [i, s] if in_fibre(*s) && in_base(*i) => Some(Coordinate::Momentum { sigma: *s, i: *i }),
                    [i, s, k] if in_fibre(*s) && in_base(*i) && in_base(*k) => {
                        Some(Coordinate::MomentumDerivative { sigma: *s, i: *i, k: *k })
                    }
                    _ => None,
                }
            }
            _ => None,
        }
    }

    /// Canonical spelling of a coordinate.
    pub fn name_of(&self, c: Coordinate) -> Name {
        match c {
            Coordinate::Base(i) => self.x(i),
            Coordinate::Fibre(s) => self.y(s),
            Coordinate::Jet { sigma, i } => self.jet(sigma, i),
            Coordinate::Jet2 { sigma, i, j } => self.jet2(sigma, i, j),
            Coordinate::Momentum { sigma, i } => self.momentum(sigma, i),
            Coordinate::MomentumDerivative { sigma, i, k } => self.momentum_derivative(sigma, i, k),
        }
    }
}

/// A point of the first jet space: values of `x^i`, `y^σ` and `y^σ_i`
/// (the latter in flat order).
#[derive(Clone, Debug, PartialEq)]
pub struct JetPoint {
    pub x: Vec<Complex64>,
    pub y: Vec<Complex64>,
    pub jets: Vec<Complex64>,
}

impl JetPoint {
    pub fn new(chart: &Chart, x: Vec<Complex64>, y: Vec<Complex64>, jets: Vec<Complex64>) -> Result<Self> {
        if x.len() != chart.n() || y.len() != chart.m() || jets.len() != chart.mn() {
            return Err(Error::Shape(format!(
                "jet point needs {}+{}+{} values, got {}+{}+{}",
                chart.n(),
                chart.m(),
                chart.mn(),
                x.len(),
                y.len(),
                jets.len()
            )));
        }
        Ok(Self { x, y, jets })
    }

    pub fn origin(chart: &Chart) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self { x: vec![z; chart.n()], y: vec![z; chart.m()], jets: vec![z; chart.mn()] }
    }

    /// Bindings for every coordinate of the point.
    pub fn bindings(&self, chart: &Chart) -> HashMap<Name, Complex64> {
        let mut env = HashMap::new();
        for (k, v) in chart.base_names().into_iter().zip(&self.x) {
            env.insert(k, *v);
        }
        for (k, v) in chart.fibre_names().into_iter().zip(&self.y) {
            env.insert(k, *v);
        }
        for (k, v) in chart.jet_names().into_iter().zip(&self.jets) {
            env.insert(k, *v);
        }
        env
    }
}
