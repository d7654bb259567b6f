//! Definable predicates and their closure constructions.
//!
//! A predicate of arity `n` with `ℓ` auxiliary counters is a GVAS of
//! dimension `n + ℓ`; it defines `{x ∈ ℕ^n : 0 →_S (x, e) for some e}`.
//! Output counters come first, auxiliary counters after them, and every
//! budget counter introduced by [`budget_zero`] is appended last.
//!
//! Index sets are 0-based throughout this module.

use std::collections::BTreeSet;

use crate::grammar::{
    apply_morphism, concat_all, map_actions, repeat, sandwich, star, union as gunion, Action, Config, Gvas, GvasBuilder, GvasError,
};
use crate::reach::{bounded_reach_from, ReachError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SetError {
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("index {index} out of range for dimension {dim}")]
    InvalidIndex { index: usize, dim: usize },
    #[error("grammar dimension {dim} differs from arity {arity} + aux {aux}")]
    Shape { dim: usize, arity: usize, aux: usize },
    #[error(transparent)]
    Gvas(#[from] GvasError),
    #[error(transparent)]
    Reach(#[from] ReachError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefinablePredicate {
    gvas: Gvas,
    arity: usize,
    aux: usize,
    slack: u64,
}

/// Outcome of a bounded membership query. A bounded search can confirm
/// membership but never refute it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// Reached `(x, e)` with this `e`.
    Yes(Vec<u64>),
    Unknown,
}

impl DefinablePredicate {
    pub fn new(gvas: Gvas, arity: usize, aux: usize) -> Result<Self, SetError> {
        if gvas.dim() != arity + aux {
            return Err(SetError::Shape { dim: gvas.dim(), arity, aux });
        }
        Ok(DefinablePredicate { gvas, arity, aux, slack: 1 })
    }

    fn with_slack(mut self, slack: u64) -> Self {
        self.slack = slack.max(1);
        self
    }

    pub fn gvas(&self) -> &Gvas {
        &self.gvas
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn aux(&self) -> usize {
        self.aux
    }

    /// A grid bound under which every member with entries at most `target`
    /// should be confirmed by the constructions' budget counters.
    pub fn sufficient_bound(&self, target: u64) -> u64 {
        target.saturating_mul(self.slack)
    }

    /// Multiplier applied by [`DefinablePredicate::sufficient_bound`].
    pub fn slack(&self) -> u64 {
        self.slack
    }
}

/// Whether `x` is confirmed a member by runs within `{0..bound}^{n+ℓ}`.
pub fn member_bounded(p: &DefinablePredicate, x: &[u64], bound: u64) -> Result<Membership, SetError> {
    if x.len() != p.arity {
        return Err(SetError::ArityMismatch(x.len(), p.arity));
    }
    let t = bounded_reach_from(&p.gvas, bound, p.gvas.start(), &[Config::zero(p.gvas.dim())])?;
    let found = t.targets(crate::grammar::Symbol::Nt(p.gvas.start()), &Config::zero(p.gvas.dim())).into_iter().find(|c| c[..p.arity] == *x);
    Ok(found.map_or(Membership::Unknown, |c| Membership::Yes(c[p.arity..].to_vec())))
}

/// Every output vector confirmed within `{0..bound}^{n+ℓ}`.
pub fn members_bounded(p: &DefinablePredicate, bound: u64) -> Result<BTreeSet<Vec<u64>>, SetError> {
    let z = Config::zero(p.gvas.dim());
    let t = bounded_reach_from(&p.gvas, bound, p.gvas.start(), std::slice::from_ref(&z))?;
    Ok(t.targets(crate::grammar::Symbol::Nt(p.gvas.start()), &z).into_iter().map(|c| c[..p.arity].to_vec()).collect())
}

/// Places `a` at `offset` inside a zero vector of length `dim`.
fn embed(a: &[i64], offset: usize, dim: usize) -> Action {
    let mut v = vec![0; dim];
    v[offset..offset + a.len()].copy_from_slice(a);
    Action(v)
}

/// Pads the auxiliary block of `p` with zero counters up to `aux` entries.
fn pad_aux(p: &DefinablePredicate, aux: usize) -> Result<Gvas, SetError> {
    let d = p.arity + aux;
    Ok(map_actions(&p.gvas, d, |a| embed(a, 0, d))?)
}

pub fn union(p: &DefinablePredicate, q: &DefinablePredicate) -> Result<DefinablePredicate, SetError> {
    if p.arity != q.arity {
        return Err(SetError::ArityMismatch(p.arity, q.arity));
    }
    let aux = p.aux.max(q.aux);
    let g = gunion(&pad_aux(p, aux)?, &pad_aux(q, aux)?)?;
    Ok(DefinablePredicate::new(g, p.arity, aux)?.with_slack(p.slack.max(q.slack)))
}

/// `{(x, y) : x ∈ p, y ∈ q}`, laid out as `(x, y, e_p, e_q)`.
pub fn product(p: &DefinablePredicate, q: &DefinablePredicate) -> Result<DefinablePredicate, SetError> {
    let (n1, n2, l1, l2) = (p.arity, q.arity, p.aux, q.aux);
    let d = n1 + n2 + l1 + l2;
    let lift_p = map_actions(&p.gvas, d, |a| {
        let mut v = embed(&a[..n1], 0, d);
        v.0[n1 + n2..n1 + n2 + l1].copy_from_slice(&a[n1..]);
        v
    })?;
    let lift_q = map_actions(&q.gvas, d, |a| {
        let mut v = embed(&a[..n2], n1, d);
        v.0[n1 + n2 + l1..].copy_from_slice(&a[n2..]);
        v
    })?;
    let g = concat_all(&[&lift_p, &lift_q])?;
    Ok(DefinablePredicate::new(g, n1 + n2, l1 + l2)?.with_slack(p.slack.max(q.slack)))
}

/// Keeps the output coordinates in `keep` (in the given order); the others
/// move to the front of the auxiliary block.
pub fn project(p: &DefinablePredicate, keep: &[usize]) -> Result<DefinablePredicate, SetError> {
    let mut seen = vec![false; p.arity];
    for &i in keep {
        if i >= p.arity || seen[i] {
            return Err(SetError::InvalidIndex { index: i, dim: p.arity });
        }
        seen[i] = true;
    }
    let order: Vec<usize> = keep.iter().copied().chain((0..p.arity).filter(|i| !seen[*i])).chain(p.arity..p.arity + p.aux).collect();
    let d = p.gvas.dim();
    let g = map_actions(&p.gvas, d, |a| Action(order.iter().map(|&i| a[i]).collect()))?;
    Ok(DefinablePredicate::new(g, keep.len(), d - keep.len())?.with_slack(p.slack))
}

/// The linear set `b + ℕ·p₁ + ⋯ + ℕ·p_k` via `S → b P₁`, `Pᵢ → pᵢ Pᵢ | Pᵢ₊₁`.
pub fn linear_set(base: &[u64], periods: &[Vec<u64>]) -> Result<DefinablePredicate, SetError> {
    let n = base.len();
    if let Some(p) = periods.iter().find(|p| p.len() != n) {
        return Err(SetError::ArityMismatch(p.len(), n));
    }
    let to_action = |v: &[u64]| Action(v.iter().map(|&x| x as i64).collect());
    let mut b = GvasBuilder::new(n, "S");
    let s = b.start_id();
    let bs = b.a(to_action(base));
    if periods.is_empty() {
        b.rule(s, vec![bs]);
    } else {
        let ps: Vec<_> = (1..=periods.len()).map(|i| b.nt(&format!("P{i}"))).collect();
        b.rule(s, vec![bs, crate::grammar::Symbol::Nt(ps[0])]);
        for (i, per) in periods.iter().enumerate() {
            let a = b.a(to_action(per));
            b.rule(ps[i], vec![a, crate::grammar::Symbol::Nt(ps[i])]);
            let rest = ps.get(i + 1).map(|&q| vec![crate::grammar::Symbol::Nt(q)]).unwrap_or_default();
            b.rule(ps[i], rest);
        }
    }
    DefinablePredicate::new(b.build(), n, 0)
}

/// Restricts to runs ending with the counters in `zero_set` at zero.
///
/// Each action `a` becomes `(a, -Σ_{i∈I} a_i)` and the language is wrapped
/// as `a₊^k μ(L) a₋^k` with `a₊ = (0, 1)` and `a₋ = (0, -1)`, so the new last
/// counter is a budget that pays for every increment of a zeroed counter.
pub fn budget_zero(g: &Gvas, zero_set: &[usize]) -> Result<Gvas, SetError> {
    let d = g.dim();
    if let Some(&i) = zero_set.iter().find(|&&i| i >= d) {
        return Err(SetError::InvalidIndex { index: i, dim: d });
    }
    let mu = map_actions(g, d + 1, |a| {
        let mut v = a.0.clone();
        v.push(-zero_set.iter().map(|&i| a[i]).sum::<i64>());
        Action(v)
    })?;
    Ok(sandwich(&mu, &Action::unit(d + 1, d, 1), &Action::unit(d + 1, d, -1))?)
}

/// `p ∩ q` by copying a common value out of both products under a budget.
pub fn intersect(p: &DefinablePredicate, q: &DefinablePredicate) -> Result<DefinablePredicate, SetError> {
    if p.arity != q.arity {
        return Err(SetError::ArityMismatch(p.arity, q.arity));
    }
    let n = p.arity;
    let h = product(p, q)?;
    let (hd, l) = (h.gvas.dim(), p.aux + q.aux);
    let d = n + hd;
    let shifted = map_actions(&h.gvas, d, |a| embed(a, n, d))?;
    let copies: Vec<Gvas> = (0..n)
        .map(|i| {
            let mut v = vec![0i64; d];
            v[i] = 1;
            v[n + i] = -1;
            v[2 * n + i] = -1;
            repeat(&Action(v), &format!("C{}", i + 1))
        })
        .collect();
    let mut parts = vec![&shifted];
    parts.extend(copies.iter());
    let g = budget_zero(&concat_all(&parts)?, &(n..3 * n).collect::<Vec<_>>())?;
    let slack = 2 * n as u64 * p.slack.max(q.slack);
    Ok(DefinablePredicate::new(g, n, 2 * n + l + 1)?.with_slack(slack))
}

/// An equivalent predicate whose witnesses end with every auxiliary counter
/// at zero: outputs are transferred to a fresh output block and leftover
/// auxiliary values are drained.
pub fn make_resetting(p: &DefinablePredicate) -> Result<DefinablePredicate, SetError> {
    let (n, l) = (p.arity, p.aux);
    let d = n + l;
    let nd = n + d;
    let shifted = map_actions(&p.gvas, nd, |a| embed(a, n, nd))?;
    let mut pumps = Vec::new();
    for i in 0..n {
        let mut v = vec![0i64; nd];
        v[i] = 1;
        v[n + i] = -1;
        pumps.push(repeat(&Action(v), &format!("M{}", i + 1)));
    }
    for j in 0..l {
        pumps.push(repeat(&Action::unit(nd, 2 * n + j, -1), &format!("D{}", j + 1)));
    }
    let mut parts = vec![&shifted];
    parts.extend(pumps.iter());
    let g = budget_zero(&concat_all(&parts)?, &(n..nd).collect::<Vec<_>>())?;
    Ok(DefinablePredicate::new(g, n, d + 1)?.with_slack(d as u64 * p.slack))
}

/// All finite sums of members of `p`, including the empty sum.
pub fn periodic_hull(p: &DefinablePredicate) -> Result<DefinablePredicate, SetError> {
    let r = make_resetting(p)?;
    let slack = r.slack;
    Ok(DefinablePredicate::new(star(&r.gvas), r.arity, r.aux)?.with_slack(slack))
}

/// `{(x, z) : (x, y) ∈ r₁, (y, z) ∈ r₂}` for relations of equal arity `2n`.
///
/// The product `(x, y, y', z)` is followed by `(0, -eᵢ, -eᵢ, 0)*` pumps, and
/// the budget construction forces both middle blocks to zero, so `y = y'`.
/// The middle blocks then move to the auxiliary counters.
pub fn compose_relations(r1: &DefinablePredicate, r2: &DefinablePredicate) -> Result<DefinablePredicate, SetError> {
    if r1.arity != r2.arity || !r1.arity.is_multiple_of(2) {
        return Err(SetError::ArityMismatch(r1.arity, r2.arity));
    }
    let n = r1.arity / 2;
    let h = product(r1, r2)?;
    let d = h.gvas.dim();
    let pumps: Vec<Gvas> = (0..n)
        .map(|i| {
            let mut v = vec![0i64; d];
            v[n + i] = -1;
            v[2 * n + i] = -1;
            repeat(&Action(v), &format!("E{}", i + 1))
        })
        .collect();
    let mut parts = vec![&h.gvas];
    parts.extend(pumps.iter());
    let g = budget_zero(&concat_all(&parts)?, &(n..3 * n).collect::<Vec<_>>())?;
    let glued = DefinablePredicate::new(g, h.arity, h.aux + 1)?.with_slack(2 * n as u64 * h.slack);
    let keep: Vec<usize> = (0..n).chain(3 * n..4 * n).collect();
    project(&glued, &keep)
}

/// Convenience: the grammar `g` read as a predicate with all counters as outputs.
pub fn from_gvas(g: Gvas) -> DefinablePredicate {
    let n = g.dim();
    DefinablePredicate { gvas: g, arity: n, aux: 0, slack: 1 }
}

/// Lifts a grammar over ℤ^d to ℤ^{d+k} by inserting `k` zero counters at `offset`.
pub fn widen(g: &Gvas, offset: usize, k: usize) -> Result<Gvas, SetError> {
    let d = g.dim() + k;
    Ok(apply_morphism(g, d, |a| {
        let mut v = a[..offset].to_vec();
        v.extend(std::iter::repeat_n(0, k));
        v.extend_from_slice(&a[offset..]);
        vec![Action(v)]
    })?)
}
