//! Equivalence suites for Euler–Lagrange and Hamilton p2-equations, and a
//! finite-difference residual check on uniform grids over `[0,1]²`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::JetPoint;
use crate::error::{Error, Result};
use crate::expr::{equals, Bindings, Expr};
use crate::gtensor::{closedness_check, dedonderize};
use crate::hamilton::{p2_system, prolong_section, residuals_on_section, P2System};
use crate::lagrangian::{el_residual_on_section, euler_lagrange_exprs};
use crate::legendre::{dedonderization_report, is_regular_at, momenta, LepageanSystem};

pub const PROBE_COUNT: usize = 50;
pub const RESIDUAL_TOL: f64 = 1e-10;
pub const MIN_GRID: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct SolutionReport {
    pub section: Vec<Expr>,
    pub el_max: f64,
    /// `None` when no closed-form Hamiltonian exists.
    pub p2_max: Option<f64>,
    /// Residuals vanish as expressions, not only at probes.
    pub el_symbolic_zero: bool,
    pub p2_symbolic_zero: Option<bool>,
}

impl SolutionReport {
    pub fn pass(&self) -> bool {
        self.el_max <= RESIDUAL_TOL && self.p2_max.map_or(true, |r| r <= RESIDUAL_TOL)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    pub solutions: Vec<SolutionReport>,
    /// Identities between `ρ`, its dedonderization and the De Donder data.
    pub lemma3: bool,
    pub closed: bool,
    /// Euler–Lagrange expressions of `L` and `L̄` coincide; only decided
    /// for closed tensors.
    pub proposition2: Option<bool>,
    pub pass: bool,
}

fn probe_x(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.gen_range(0.0..1.0), 0.0)).collect()
}

fn max_abs_at(es: &[Expr], base: &Bindings, names: &[crate::expr::Name], points: &[Vec<Complex64>]) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in points {
        let mut env = base.clone();
        env.extend(names.iter().cloned().zip(x.iter().copied()));
        for e in es {
            worst = worst.max(e.eval(&env)?.norm());
        }
    }
    Ok(worst)
}

/// Check regularity at seeded probes, then evaluate Euler–Lagrange and p2
/// residuals of every candidate solution at the same probes in `[0,1]^n`.
pub fn equivalence_suite(sys: &LepageanSystem, solutions: &[Vec<Expr>], seed: u64) -> Result<EquivalenceReport> {
    let chart = sys.chart();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<Complex64>> = (0..PROBE_COUNT).map(|_| probe_x(&mut rng, chart.n())).collect();
    for x in &points {
        let y = probe_x(&mut rng, chart.m());
        let jets = probe_x(&mut rng, chart.mn());
        let pt = JetPoint::new(chart, x.clone(), y, jets)?;
        if !is_regular_at(sys, &pt)? {
            return Err(Error::NotRegular(format!("regularity matrix is singular at x = {:?}", pt.x)));
        }
    }

    let p2: Option<P2System> = match p2_system(sys) {
        Ok(p) => Some(p),
        Err(Error::HamiltonianUnavailable(_)) => None,
        Err(e) => return Err(e),
    };
    let base = sys.parameter_bindings();
    let names = chart.base_names();
    let zero = |e: &Expr| equals(e, &Expr::zero()).holds_exactly();

    let mut reports = Vec::with_capacity(solutions.len());
    for section in solutions {
        let el = el_residual_on_section(sys.lagrangian(), section)?;
        let el_max = max_abs_at(&el, &base, &names, &points)?;
        let (p2_max, p2_symbolic_zero) = match &p2 {
            Some(p2) => {
                let r = residuals_on_section(p2, &prolong_section(sys, section)?)?;
                (Some(max_abs_at(&r, &base, &names, &points)?), Some(r.iter().all(zero)))
            }
            None => (None, None),
        };
        reports.push(SolutionReport {
            section: section.clone(),
            el_max,
            p2_max,
            el_symbolic_zero: el.iter().all(zero),
            p2_symbolic_zero,
        });
    }

    let lemma3 = dedonderization_report(sys).all();
    let closed = closedness_check(sys.g()).closed;
    let proposition2 = closed.then(|| {
        let a = euler_lagrange_exprs(sys.lagrangian());
        let b = euler_lagrange_exprs(&dedonderize(sys.lagrangian(), sys.g()));
        a.iter().zip(&b).all(|(x, y)| equals(x, y).holds_exactly())
    });
    let pass = lemma3 && proposition2 != Some(false) && reports.iter().all(SolutionReport::pass);
    Ok(EquivalenceReport { solutions: reports, lemma3, closed, proposition2, pass })
}

/// Field samples on a uniform `N₁×N₂` grid over `[0,1]²`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSection {
    n1: usize,
    n2: usize,
    /// `values[σ][a * n2 + b]` at `(a·h₁, b·h₂)`.
    values: Vec<Vec<Complex64>>,
    /// Analytic source, kept so the grid can be refined.
    source: Option<(Vec<Expr>, Bindings)>,
}

impl GridSection {
    pub fn from_samples(n1: usize, n2: usize, values: Vec<Vec<Complex64>>) -> Result<Self> {
        if n1 < MIN_GRID || n2 < MIN_GRID {
            return Err(Error::GridTooSmall(format!("{n1}×{n2}, need at least {MIN_GRID} nodes per axis")));
        }
        if values.iter().any(|v| v.len() != n1 * n2) {
            return Err(Error::Shape(format!("every field needs {} samples", n1 * n2)));
        }
        Ok(Self { n1, n2, values, source: None })
    }

    /// Sample a field section given by expressions in `x1, x2`.
    pub fn sample(fields: &[Expr], params: &Bindings, n1: usize, n2: usize) -> Result<Self> {
        let (h1, h2) = (1.0 / (n1.max(2) - 1) as f64, 1.0 / (n2.max(2) - 1) as f64);
        let mut values = vec![Vec::with_capacity(n1 * n2); fields.len()];
        for a in 0..n1 {
            for b in 0..n2 {
                let mut env = params.clone();
                env.insert("x1".into(), Complex64::new(a as f64 * h1, 0.0));
                env.insert("x2".into(), Complex64::new(b as f64 * h2, 0.0));
                for (v, f) in values.iter_mut().zip(fields) {
                    v.push(f.eval(&env)?);
                }
            }
        }
        let mut g = Self::from_samples(n1, n2, values)?;
        g.source = Some((fields.to_vec(), params.clone()));
        Ok(g)
    }

    pub fn size(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    pub fn spacing(&self) -> (f64, f64) {
        (1.0 / (self.n1 - 1) as f64, 1.0 / (self.n2 - 1) as f64)
    }

    /// The same source on the grid with halved spacing.
    pub fn refined(&self) -> Option<Result<Self>> {
        let (fields, params) = self.source.as_ref()?;
        Some(Self::sample(fields, params, 2 * self.n1 - 1, 2 * self.n2 - 1))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridReport {
    pub sup_norm: f64,
    /// `log₂(sup(h)/sup(h/2))`; `None` without an analytic source.
    pub order_estimate: Option<f64>,
}

/// Second-order derivative along one axis of a node-major array; central
/// in the interior, one-sided at the edges.
fn diff(f: &[Complex64], n1: usize, n2: usize, axis: usize, a: usize, b: usize) -> Complex64 {
    let (len, h, pos) = if axis == 0 { (n1, 1.0 / (n1 - 1) as f64, a) } else { (n2, 1.0 / (n2 - 1) as f64, b) };
    let at = |k: usize| if axis == 0 { f[k * n2 + b] } else { f[a * n2 + k] };
    if pos == 0 {
        (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h)
    } else if pos == len - 1 {
        (3.0 * at(len - 1) - 4.0 * at(len - 2) + at(len - 3)) / (2.0 * h)
    } else {
        (at(pos + 1) - at(pos - 1)) / (2.0 * h)
    }
}

fn sup_residual(p2: &P2System, gs: &GridSection) -> Result<f64> {
    let sys = &p2.sys;
    let chart = sys.chart();
    let (n1, n2) = (gs.n1, gs.n2);
    let (h1, h2) = gs.spacing();
    let params = sys.parameter_bindings();
    let mom = momenta(sys);
    let node_env = |a: usize, b: usize| -> Bindings {
        let mut env = params.clone();
        env.insert(chart.x(1), Complex64::new(a as f64 * h1, 0.0));
        env.insert(chart.x(2), Complex64::new(b as f64 * h2, 0.0));
        for sigma in 1..=chart.m() {
            let f = &gs.values[sigma - 1];
            env.insert(chart.y(sigma), f[a * n2 + b]);
            for i in 1..=2 {
                env.insert(chart.jet(sigma, i), diff(f, n1, n2, i - 1, a, b));
            }
        }
        env
    };

    // Momenta from the Legendre map of the discrete jets, at every node.
    let mut p = vec![Vec::with_capacity(n1 * n2); chart.mn()];
    for a in 0..n1 {
        for b in 0..n2 {
            let env = node_env(a, b);
            for (col, e) in p.iter_mut().zip(&mom) {
                col.push(e.eval(&env)?);
            }
        }
    }

    // Only nodes whose whole stencil is central: differencing the one-sided
    // edge momenta would drop the order to one.
    let templates = p2.templates();
    let mut worst = 0.0f64;
    for a in 2..n1 - 2 {
        for b in 2..n2 - 2 {
            let mut env = node_env(a, b);
            for (r, (sigma, i)) in chart.pairs().enumerate() {
                env.insert(chart.momentum(sigma, i), p[r][a * n2 + b]);
                for k in 1..=2 {
                    env.insert(chart.momentum_derivative(sigma, i, k), diff(&p[r], n1, n2, k - 1, a, b));
                }
            }
            for t in &templates {
                worst = worst.max(t.eval(&env)?.norm());
            }
        }
    }
    Ok(worst)
}

/// Sup-norm of the reduced p2 residuals over nodes at least two steps from
/// the boundary, plus an order
/// estimate from one refinement when the grid has an analytic source.
pub fn grid_residual(p2: &P2System, gs: &GridSection) -> Result<GridReport> {
    if p2.sys.chart().n() != 2 {
        return Err(Error::GridUnsupported("a two-dimensional base".into()));
    }
    if !p2.reduced {
        return Err(Error::GridUnsupported("a reduced (closed) p2 system".into()));
    }
    if gs.values.len() != p2.sys.chart().m() {
        return Err(Error::Shape("grid does not carry one sample array per field".into()));
    }
    let sup_norm = sup_residual(p2, gs)?;
    let order_estimate = match gs.refined() {
        Some(fine) => Some((sup_norm / sup_residual(p2, &fine?)?).log2()),
        None => None,
    };
    Ok(GridReport { sup_norm, order_estimate })
}
