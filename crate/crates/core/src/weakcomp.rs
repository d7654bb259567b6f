//! Weak computers: grammars that, started from `(n, 0, 0)`, can produce
//! `f(n)` in the output counter (completeness) and never more (soundness).
//! Counter 0 is the input, counter 1 the output, the rest are auxiliary.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::flowtree::{witness_tree, FlowTree};
use crate::grammar::{concat_all, map_actions, repeat, sandwich, Action, Config, Gvas, Symbol};
use crate::ordinal::{FastGrowing, Ordinal};
use crate::reach::{bounded_reach_from, ReachError};
use crate::setops::{DefinablePredicate, SetError};

/// A total function `ℕ → ℕ` evaluated under a value cap.
#[derive(Clone)]
pub enum Oracle {
    Pow2,
    Identity,
    FAlpha(Ordinal),
    Custom(Arc<dyn Fn(u64) -> Option<u64> + Send + Sync>),
}

impl fmt::Debug for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Oracle::Pow2 => f.write_str("Pow2"),
            Oracle::Identity => f.write_str("Identity"),
            Oracle::FAlpha(a) => write!(f, "FAlpha({a})"),
            Oracle::Custom(_) => f.write_str("Custom"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WeakError {
    #[error("oracle value for {n} exceeds cap {cap}")]
    CapExceeded { n: u64, cap: u64 },
    #[error("bound {bound} is below the oracle value {value}")]
    BoundTooSmall { bound: u64, value: u64 },
    #[error("weak computers need at least 2 counters, found {0}")]
    Shape(usize),
    #[error(transparent)]
    Reach(#[from] ReachError),
    #[error(transparent)]
    Set(#[from] SetError),
}

impl Oracle {
    /// `f(n)` if it is at most `cap`.
    pub fn eval(&self, n: u64, cap: u64) -> Result<u64, WeakError> {
        let exceeded = WeakError::CapExceeded { n, cap };
        let v = match self {
            Oracle::Pow2 => 1u64.checked_shl(n as u32).filter(|_| n < 64),
            Oracle::Identity => Some(n),
            Oracle::FAlpha(a) => FastGrowing::new(BigUint::from(cap)).eval(a, &BigUint::from(n)).ok().and_then(|v| v.to_u64()),
            Oracle::Custom(f) => f(n),
        };
        v.filter(|&v| v <= cap).ok_or(exceeded)
    }
}

#[derive(Clone, Debug)]
pub struct WeakComputer {
    gvas: Gvas,
    oracle: Oracle,
}

/// Evidence that `(n, 0, 0) → (n', f(n), e)`.
#[derive(Clone, Debug)]
pub struct CoEvidence {
    pub target: Config,
    pub tree: FlowTree,
}

/// Bounded soundness report for one input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaReport {
    pub max_output: u64,
    /// Reached configurations whose output exceeds `f(n)`.
    pub violations: Vec<Config>,
}

impl WeakComputer {
    pub fn new(gvas: Gvas, oracle: Oracle) -> Result<Self, WeakError> {
        if gvas.dim() < 2 {
            return Err(WeakError::Shape(gvas.dim()));
        }
        Ok(WeakComputer { gvas, oracle })
    }

    pub fn gvas(&self) -> &Gvas {
        &self.gvas
    }

    pub fn oracle(&self) -> &Oracle {
        &self.oracle
    }

    pub fn aux(&self) -> usize {
        self.gvas.dim() - 2
    }

    fn input(&self, n: u64) -> Config {
        let mut v = vec![0; self.gvas.dim()];
        v[0] = n;
        Config(v)
    }

    fn value(&self, n: u64, bound: u64) -> Result<u64, WeakError> {
        let value = self.oracle.eval(n, u64::MAX)?;
        if value > bound {
            return Err(WeakError::BoundTooSmall { bound, value });
        }
        Ok(value)
    }

    /// All configurations reached from `(n, 0, 0)` inside `{0..bound}^d`.
    pub fn outputs(&self, n: u64, bound: u64) -> Result<Vec<Config>, WeakError> {
        let x = self.input(n);
        let t = bounded_reach_from(&self.gvas, bound, self.gvas.start(), std::slice::from_ref(&x))?;
        Ok(t.targets(Symbol::Nt(self.gvas.start()), &x))
    }
}

/// Searches for a run producing exactly `f(n)`. Requires `f(n) ≤ bound`.
pub fn check_co(w: &WeakComputer, n: u64, bound: u64) -> Result<Option<CoEvidence>, WeakError> {
    let f = w.value(n, bound)?;
    let x = w.input(n);
    let t = bounded_reach_from(&w.gvas, bound, w.gvas.start(), std::slice::from_ref(&x))?;
    let s = Symbol::Nt(w.gvas.start());
    let Some(target) = t.targets(s, &x).into_iter().find(|c| c[1] == f) else { return Ok(None) };
    let tree = witness_tree(&t, &x, s, &target).expect("table entry has a witness");
    Ok(Some(CoEvidence { target, tree }))
}

/// Enumerates every bounded run from `(n, 0, 0)` and reports outputs above `f(n)`.
pub fn check_sa(w: &WeakComputer, n: u64, bound: u64) -> Result<SaReport, WeakError> {
    let f = w.value(n, bound)?;
    let outs = w.outputs(n, bound)?;
    let max_output = outs.iter().map(|c| c[1]).max().unwrap_or(0);
    let violations = outs.into_iter().filter(|c| c[1] > f).collect();
    Ok(SaReport { max_output, violations })
}

/// Checks that the bounded maximum output is monotone over `pairs (n, m)`
/// with `n ≤ m`; returns the first offending pair.
pub fn monotonicity_probe(w: &WeakComputer, pairs: &[(u64, u64)], bound: u64) -> Result<Option<(u64, u64)>, WeakError> {
    for &(n, m) in pairs {
        let max_of = |k| -> Result<u64, WeakError> { Ok(w.outputs(k, bound)?.iter().map(|c| c[1]).max().unwrap_or(0)) };
        if n <= m && max_of(n)? > max_of(m)? {
            return Ok(Some((n, m)));
        }
    }
    Ok(None)
}

/// The graph predicate `{(x, y) : y ≤ f(x)}` of a weak computer, with
/// auxiliary counters `(x', e)`: `(1,0,1,0)* μ(L) (0,-1,0,0)*` where
/// `μ(a, b, e) = (0, b, a, e)`.
pub fn wc_to_definable(w: &WeakComputer) -> Result<DefinablePredicate, WeakError> {
    let d = w.gvas.dim() + 1;
    let mu = map_actions(&w.gvas, d, |a| {
        let mut v = vec![0, a[1], a[0]];
        v.extend_from_slice(&a[2..]);
        Action(v)
    })
    .map_err(SetError::from)?;
    let mut load = vec![0i64; d];
    load[0] = 1;
    load[2] = 1;
    let pre = repeat(&Action(load), "Load");
    let post = repeat(&Action::unit(d, 1, -1), "Drop");
    let g = concat_all(&[&pre, &mu, &post]).map_err(SetError::from)?;
    Ok(DefinablePredicate::new(g, 2, d - 2)?)
}

/// A weak computer for `f` from a predicate with the same members as
/// `{(x, y) : y ≤ f(x)}` (it suffices that members satisfy `y ≤ f(x)` and
/// contain the graph of `f`): `(1,0,0,0)^k μ(L) (-1,0,0,0)^k` with
/// `μ(a, b, e) = (-a, b, a, e)`.
pub fn definable_to_wc(p: &DefinablePredicate, oracle: Oracle) -> Result<WeakComputer, WeakError> {
    if p.arity() != 2 {
        return Err(WeakError::Set(SetError::ArityMismatch(p.arity(), 2)));
    }
    let d = p.gvas().dim() + 1;
    let mu = map_actions(p.gvas(), d, |a| {
        let mut v = vec![-a[0], a[1], a[0]];
        v.extend_from_slice(&a[2..]);
        Action(v)
    })
    .map_err(SetError::from)?;
    let g = sandwich(&mu, &Action::unit(d, 0, 1), &Action::unit(d, 0, -1)).map_err(SetError::from)?;
    WeakComputer::new(g, oracle)
}
