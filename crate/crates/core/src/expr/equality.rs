//! Symbolic equality: exact by normal forms where possible, otherwise by
//! seeded random evaluation.

use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::{to_poly, AtomPolicy, RationalFunction};
use super::{Bindings, Expr};

static PROBABILISTIC_SEED: AtomicU64 = AtomicU64::new(42);

const PROBE_POINTS: usize = 20;
const RELATIVE_TOLERANCE: f64 = 1e-9;

/// Seed used by the probabilistic fallback of [`equals`].
pub fn probabilistic_seed() -> u64 {
    PROBABILISTIC_SEED.load(Ordering::Relaxed)
}

pub fn set_probabilistic_seed(seed: u64) {
    PROBABILISTIC_SEED.store(seed, Ordering::Relaxed);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EqualityMethod {
    Exact,
    Probabilistic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Equality {
    pub equal: bool,
    pub method: EqualityMethod,
    /// Largest observed |e1 − e2| for probabilistic verdicts.
    pub max_difference: Option<f64>,
}

impl Equality {
    fn exact(equal: bool) -> Self {
        Self { equal, method: EqualityMethod::Exact, max_difference: None }
    }

    /// Equal, and decided by normal forms rather than sampling.
    pub fn holds_exactly(&self) -> bool {
        self.equal && self.method == EqualityMethod::Exact
    }

    pub fn is_probabilistic(&self) -> bool {
        self.method == EqualityMethod::Probabilistic
    }
}

/// Decide `e1 = e2`.
///
/// Polynomials are compared by canonical form. Quotients are compared by
/// cross-multiplication, with function nodes treated as opaque atoms; a
/// zero difference is then exact, a nonzero one is only conclusive when no
/// atoms are involved. Anything else falls back to evaluation at
/// [`PROBE_POINTS`] seeded random complex points.
pub fn equals(e1: &Expr, e2: &Expr) -> Equality {
    let diff = Expr::sub(e1.clone(), e2.clone());
    if let Some(p) = to_poly(&diff, AtomPolicy::Reject) {
        return Equality::exact(p.is_zero());
    }
    if let Some(rf) = RationalFunction::from_expr_with_atoms(&diff) {
        if rf.num.is_zero() {
            return Equality::exact(true);
        }
        if !rf.num.has_atoms() && !rf.den.has_atoms() {
            return Equality::exact(false);
        }
    }
    probabilistic_equals(e1, e2, probabilistic_seed())
}

fn probabilistic_equals(e1: &Expr, e2: &Expr, seed: u64) -> Equality {
    let mut names = e1.symbols();
    names.extend(e2.symbols());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_diff: f64 = 0.0;
    let mut max_lhs: f64 = 0.0;
    let mut evaluated = 0;
    for _ in 0..PROBE_POINTS {
        let env: Bindings = names
            .iter()
            .map(|n| (n.clone(), Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))))
            .collect();
        let (Ok(a), Ok(b)) = (e1.eval(&env), e2.eval(&env)) else {
            continue;
        };
        evaluated += 1;
        max_diff = max_diff.max((a - b).norm());
        max_lhs = max_lhs.max(a.norm());
    }
    let equal = evaluated > 0 && max_diff <= RELATIVE_TOLERANCE * (1.0 + max_lhs);
    Equality { equal, method: EqualityMethod::Probabilistic, max_difference: Some(max_diff) }
}
