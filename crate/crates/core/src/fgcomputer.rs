//! Grammars computing the fast-growing hierarchy below ω^ω.
//!
//! `G_d` has dimension `d + 2` with counters `(r, r̄, κ₀, …, κ_{d-1})`; a
//! configuration `⟨n, m, α⟩` stores the ordinal `α < ω^d` in the κ block as
//! coefficients. From `⟨n, 0, α⟩` the nonterminal `F` can reach
//! `⟨F_α(n), 0, α⟩` and never more than `F_α(n+m)` in total.

use std::fmt;

use num_bigint::BigUint;

use crate::flowtree::{FlowTree, Transition};
use crate::grammar::{derive_step, Action, Config, Gvas, GvasBuilder, NtId, Symbol, Word};
use crate::ordinal::{CapExceeded, FastGrowing, Ordinal};
use crate::reach::{bounded_reach, ReachError, ReachTable};
use crate::weakcomp::{Oracle, WeakComputer, WeakError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FgError {
    #[error("G_d needs d ≥ 1")]
    ZeroDimension,
    #[error("ordinal {alpha} is not below w^{d}")]
    OrdinalTooLarge { alpha: Ordinal, d: usize },
    #[error("limit index {i} must satisfy 0 < i < {d}")]
    BadLimitIndex { i: usize, d: usize },
    #[error(transparent)]
    CapExceeded(#[from] CapExceeded),
    #[error(transparent)]
    Reach(#[from] ReachError),
    #[error(transparent)]
    Weak(#[from] WeakError),
    #[error("derivation step {step} is not a single rewrite")]
    BadStep { step: usize },
}

const R: usize = 0;
const RBAR: usize = 1;
const K0: usize = 2;

/// Names of the G_d (and G_{F_α}) nonterminals.
pub const F: &str = "F";
pub const REC: &str = "Rec";
pub const POP: &str = "Pop";
pub const POP_OUT: &str = "Pop'";

pub fn lim_name(i: usize) -> String {
    format!("Lim_{i}")
}

fn inc(dim: usize, x: usize) -> Action {
    Action::unit(dim, x, 1)
}

fn dec(dim: usize, x: usize) -> Action {
    Action::unit(dim, x, -1)
}

/// Rule labels of [`build_gd`] in rule order: `F`, `Rec`, the `Lim_i`, then `Pop`.
pub fn gd_rule_labels(d: usize) -> Vec<String> {
    let mut v = vec!["R1".to_string(), "R2".to_string()];
    v.extend((1..d).map(|i| format!("R3.{i}")));
    v.extend(["R4", "R5"].map(String::from));
    for i in 1..d {
        v.push(format!("R8.{i}"));
        v.push(format!("R9.{i}"));
    }
    v.extend(["R6", "R7"].map(String::from));
    v
}

fn add_gd_rules(b: &mut GvasBuilder, d: usize) {
    let dim = d + 2;
    let k = |i: usize| K0 + i;
    let f = b.nt(F);
    let (ir, dr, irb, drb) = (b.a(inc(dim, R)), b.a(dec(dim, R)), b.a(inc(dim, RBAR)), b.a(dec(dim, RBAR)));
    let fs = Symbol::Nt(f);
    b.rule(f, vec![ir]);
    let rec = b.nt(REC);
    let (dk0, ik0) = (b.a(dec(dim, k(0))), b.a(inc(dim, k(0))));
    b.rule(f, vec![dk0, Symbol::Nt(rec), fs, ik0]);
    for i in 1..d {
        let lim = b.n(&lim_name(i));
        let w = vec![b.a(dec(dim, k(i))), b.a(inc(dim, k(i - 1))), lim, b.a(dec(dim, k(i - 1))), b.a(inc(dim, k(i)))];
        b.rule(f, w);
    }
    let pop = b.nt(POP);
    b.rule(rec, vec![Symbol::Nt(pop)]);
    b.rule(rec, vec![dr, irb, Symbol::Nt(rec), fs]);
    b.rule(pop, vec![]);
    b.rule(pop, vec![ir, drb, Symbol::Nt(pop)]);
    for i in 1..d {
        let lim = b.nt(&lim_name(i));
        b.rule(lim, vec![Symbol::Nt(pop), fs]);
        let w = vec![dr, irb, b.a(inc(dim, k(i - 1))), Symbol::Nt(lim), b.a(dec(dim, k(i - 1)))];
        b.rule(lim, w);
    }
}

/// `G_d` with start symbol `F`.
pub fn build_gd(d: usize) -> Result<Gvas, FgError> {
    if d == 0 {
        return Err(FgError::ZeroDimension);
    }
    let mut b = GvasBuilder::new(d + 2, F);
    add_gd_rules(&mut b, d);
    Ok(b.build())
}

fn check_alpha(alpha: &Ordinal, d: usize) -> Result<(), FgError> {
    if d == 0 {
        return Err(FgError::ZeroDimension);
    }
    if alpha.width() > d {
        return Err(FgError::OrdinalTooLarge { alpha: alpha.clone(), d });
    }
    Ok(())
}

/// `G_{F_α}`: `S → i_κ₀^{c₀} ⋯ i_κ_{d-1}^{c_{d-1}} F Pop'` on top of `G_d`,
/// where `Pop'` moves the result from `r` to the output counter `r̄`.
pub fn build_gfalpha(alpha: &Ordinal, d: usize) -> Result<Gvas, FgError> {
    check_alpha(alpha, d)?;
    let dim = d + 2;
    let mut b = GvasBuilder::new(dim, "S");
    let s = b.start_id();
    let mut w = Vec::new();
    for i in 0..d {
        for _ in 0..alpha.coeff(i) {
            w.push(b.a(inc(dim, K0 + i)));
        }
    }
    w.push(b.n(F));
    w.push(b.n(POP_OUT));
    b.rule(s, w);
    add_gd_rules(&mut b, d);
    let p = b.nt(POP_OUT);
    b.rule(p, vec![]);
    let w = vec![b.a(dec(dim, R)), b.a(inc(dim, RBAR)), Symbol::Nt(p)];
    b.rule(p, w);
    Ok(b.build())
}

/// The weak computer `G_{F_α}` for `F_α`.
pub fn falpha_computer(alpha: &Ordinal, d: usize) -> Result<WeakComputer, FgError> {
    Ok(WeakComputer::new(build_gfalpha(alpha, d)?, Oracle::FAlpha(alpha.clone()))?)
}

/// Coordinates view of a `G_d` configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FgConfig {
    pub n: u64,
    pub m: u64,
    pub alpha: Ordinal,
}

impl FgConfig {
    pub fn from_config(c: &Config) -> FgConfig {
        FgConfig { n: c[R], m: c[RBAR], alpha: Ordinal::from_coeffs(c[K0..].to_vec()) }
    }

    pub fn to_config(&self, d: usize) -> Config {
        let mut v = vec![self.n, self.m];
        v.extend(self.alpha.coeffs_padded(d));
        Config(v)
    }
}

impl fmt::Display for FgConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}, {}>", self.n, self.m, self.alpha)
    }
}

/// Symbol lookups into a built `G_d`.
struct Gd {
    g: Gvas,
    d: usize,
    f: NtId,
    rec: NtId,
    pop: NtId,
    lim: Vec<NtId>,
}

impl Gd {
    fn new(d: usize) -> Result<Gd, FgError> {
        let g = build_gd(d)?;
        let id = |n: &str| g.nt_by_name(n).expect("G_d nonterminal");
        let (f, rec, pop) = (id(F), id(REC), id(POP));
        let lim = (1..d).map(|i| id(&lim_name(i))).collect();
        Ok(Gd { d, f, rec, pop, lim, g })
    }

    fn act(&self, a: Action) -> Symbol {
        Symbol::Act(self.g.action_id(&a).expect("G_d action"))
    }

    fn inc(&self, x: usize) -> Symbol {
        self.act(inc(self.d + 2, x))
    }

    fn dec(&self, x: usize) -> Symbol {
        self.act(dec(self.d + 2, x))
    }

    fn cfg(&self, n: u64, m: u64, k: &[u64]) -> Config {
        let mut v = vec![n, m];
        v.extend_from_slice(k);
        Config(v)
    }
}

struct Builder<'a> {
    gd: &'a Gd,
    cap: u64,
    fg: FastGrowing,
}

impl Builder<'_> {
    fn leaf(&self, src: &Config, sym: Symbol) -> (FlowTree, Config) {
        let Symbol::Act(a) = sym else { unreachable!() };
        let dst = src.apply(self.gd.g.action(a)).expect("witness actions stay nonnegative");
        (FlowTree::leaf(Transition { src: src.clone(), sym, dst: dst.clone() }), dst)
    }

    /// Children built left to right; each closure receives the current configuration.
    fn node(&self, nt: NtId, src: &Config, kids: Vec<(FlowTree, Config)>) -> (FlowTree, Config) {
        let dst = kids.last().map_or(src.clone(), |k| k.1.clone());
        let t = FlowTree::new(Transition { src: src.clone(), sym: Symbol::Nt(nt), dst: dst.clone() }, kids.into_iter().map(|k| k.0).collect());
        (t, dst)
    }

    fn check(&self, v: u64) -> Result<(), FgError> {
        if v > self.cap {
            return Err(CapExceeded { cap: BigUint::from(self.cap) }.into());
        }
        Ok(())
    }

    fn pop(&self, c: &Config) -> (FlowTree, Config) {
        if c[RBAR] == 0 {
            return self.node(self.gd.pop, c, vec![]);
        }
        let a = self.leaf(c, self.gd.inc(R));
        let b = self.leaf(&a.1, self.gd.dec(RBAR));
        let rest = self.pop(&b.1);
        self.node(self.gd.pop, c, vec![a, b, rest])
    }

    /// `⟨n, 0, α⟩ →_F ⟨F_α(n), 0, α⟩`.
    fn f(&mut self, c: &Config) -> Result<(FlowTree, Config), FgError> {
        let gd = self.gd;
        let k = &c[K0..];
        let alpha = Ordinal::from_coeffs(k.to_vec());
        let out = if alpha.is_zero() {
            let a = self.leaf(c, gd.inc(R));
            self.node(gd.f, c, vec![a])
        } else if alpha.is_successor() {
            let a = self.leaf(c, gd.dec(K0));
            let n = c[R];
            let rec = self.rec(&a.1, n)?;
            let f = self.f(&rec.1)?;
            let b = self.leaf(&f.1, gd.inc(K0));
            self.node(gd.f, c, vec![a, rec, f, b])
        } else {
            let i = alpha.coeffs().iter().position(|&x| x != 0).expect("limit");
            let a = self.leaf(c, gd.dec(K0 + i));
            let b = self.leaf(&a.1, gd.inc(K0 + i - 1));
            let n = c[R];
            let lim = self.lim(i, &b.1, n)?;
            let e = self.leaf(&lim.1, gd.dec(K0 + i - 1));
            let f = self.leaf(&e.1, gd.inc(K0 + i));
            self.node(gd.f, c, vec![a, b, lim, e, f])
        };
        self.check(out.1[R])?;
        Ok(out)
    }

    /// `Rec` from `⟨j, n-j, β⟩` to `⟨F_β^j(n), 0, β⟩`.
    fn rec(&mut self, c: &Config, j: u64) -> Result<(FlowTree, Config), FgError> {
        let gd = self.gd;
        if j == 0 {
            let p = self.pop(c);
            return Ok(self.node(gd.rec, c, vec![p]));
        }
        let a = self.leaf(c, gd.dec(R));
        let b = self.leaf(&a.1, gd.inc(RBAR));
        let inner = self.rec(&b.1, j - 1)?;
        let f = self.f(&inner.1)?;
        Ok(self.node(gd.rec, c, vec![a, b, inner, f]))
    }

    /// `Lim_i` from `⟨j, n-j, γ + ω^{i-1}·(n-j+1)⟩`, unwinding to `⟨F_{λ(n)}(n), 0, γ + ω^{i-1}⟩`.
    fn lim(&mut self, i: usize, c: &Config, j: u64) -> Result<(FlowTree, Config), FgError> {
        let gd = self.gd;
        let nt = gd.lim[i - 1];
        if j == 0 {
            let p = self.pop(c);
            let f = self.f(&p.1)?;
            return Ok(self.node(nt, c, vec![p, f]));
        }
        let a = self.leaf(c, gd.dec(R));
        let b = self.leaf(&a.1, gd.inc(RBAR));
        let k = self.leaf(&b.1, gd.inc(K0 + i - 1));
        let inner = self.lim(i, &k.1, j - 1)?;
        let e = self.leaf(&inner.1, gd.dec(K0 + i - 1));
        Ok(self.node(nt, c, vec![a, b, k, inner, e]))
    }
}

/// A valid `G_d` flow tree for `⟨n, 0, α⟩ →_F ⟨F_α(n), 0, α⟩`, built by
/// following the successor and limit unfoldings. Fails if any intermediate
/// value exceeds `cap`. Returns the grammar the tree belongs to.
pub fn completeness_witness(alpha: &Ordinal, n: u64, d: usize, cap: u64) -> Result<(Gvas, FlowTree), FgError> {
    check_alpha(alpha, d)?;
    let gd = Gd::new(d)?;
    let mut b = Builder { gd: &gd, cap, fg: FastGrowing::new(BigUint::from(cap)) };
    // Reject early when the value is known to exceed the cap.
    b.fg.eval(alpha, &BigUint::from(n))?;
    let src = gd.cfg(n, 0, &alpha.coeffs_padded(d));
    let (t, _) = b.f(&src)?;
    Ok((gd.g, t))
}

/// Which unfolding [`derivation_check`] replays.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivationKind {
    /// `F ⟹ i_r`.
    Base,
    /// `F ⟹* d_κ₀ (d_r i_r̄)^n Pop F^{n+1} i_κ₀`.
    Successor,
    /// `F ⟹* d_κᵢ i_κ_{i-1} (d_r i_r̄ i_κ_{i-1})^n Pop F d_κ_{i-1}^{n+1} i_κᵢ`.
    Limit(usize),
    /// `Pop ⟹* (i_r d_r̄)^n`.
    Pop,
}

/// A replayed derivation: the sentential forms and the rule label used at each step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationTrace {
    pub words: Vec<Word>,
    pub rules: Vec<String>,
}

impl DerivationTrace {
    pub fn last(&self) -> &Word {
        self.words.last().expect("nonempty trace")
    }
}

/// Replays one of the `G_d` unfoldings, checks every step is a single
/// rewrite, and checks the final word against its closed form.
pub fn derivation_check(d: usize, kind: DerivationKind, n: u64) -> Result<(Gvas, DerivationTrace), FgError> {
    let gd = Gd::new(d)?;
    let g = &gd.g;
    let labels = gd_rule_labels(d);
    let nt = |x: NtId| Symbol::Nt(x);
    let (mut w, expected, plan): (Word, Word, Vec<(String, NtId)>) = match kind {
        DerivationKind::Base => (vec![nt(gd.f)], vec![gd.inc(R)], vec![("R1".into(), gd.f)]),
        DerivationKind::Successor => {
            let mut e = vec![gd.dec(K0)];
            for _ in 0..n {
                e.extend([gd.dec(R), gd.inc(RBAR)]);
            }
            e.push(nt(gd.pop));
            e.extend(std::iter::repeat_n(nt(gd.f), n as usize + 1));
            e.push(gd.inc(K0));
            let mut plan = vec![("R2".to_string(), gd.f)];
            plan.extend((0..n).map(|_| ("R5".to_string(), gd.rec)));
            plan.push(("R4".into(), gd.rec));
            (vec![nt(gd.f)], e, plan)
        }
        DerivationKind::Limit(i) => {
            if i == 0 || i >= d {
                return Err(FgError::BadLimitIndex { i, d });
            }
            let lim = gd.lim[i - 1];
            let mut e = vec![gd.dec(K0 + i), gd.inc(K0 + i - 1)];
            for _ in 0..n {
                e.extend([gd.dec(R), gd.inc(RBAR), gd.inc(K0 + i - 1)]);
            }
            e.extend([nt(gd.pop), nt(gd.f)]);
            e.extend(std::iter::repeat_n(gd.dec(K0 + i - 1), n as usize + 1));
            e.push(gd.inc(K0 + i));
            let mut plan = vec![(format!("R3.{i}"), gd.f)];
            plan.extend((0..n).map(|_| (format!("R9.{i}"), lim)));
            plan.push((format!("R8.{i}"), lim));
            (vec![nt(gd.f)], e, plan)
        }
        DerivationKind::Pop => {
            let mut e = Vec::new();
            for _ in 0..n {
                e.extend([gd.inc(R), gd.dec(RBAR)]);
            }
            let mut plan: Vec<(String, NtId)> = (0..n).map(|_| ("R7".to_string(), gd.pop)).collect();
            plan.push(("R6".into(), gd.pop));
            (vec![nt(gd.pop)], e, plan)
        }
    };
    let mut trace = DerivationTrace { words: vec![w.clone()], rules: Vec::new() };
    for (step, (label, x)) in plan.into_iter().enumerate() {
        let ri = labels.iter().position(|l| *l == label).expect("known label");
        let rule = &g.rules()[ri];
        debug_assert_eq!(rule.lhs, x);
        let pos = w.iter().position(|&s| s == nt(x)).ok_or(FgError::BadStep { step })?;
        let mut next = w[..pos].to_vec();
        next.extend_from_slice(&rule.rhs);
        next.extend_from_slice(&w[pos + 1..]);
        if !derive_step(g, &w).contains(&next) {
            return Err(FgError::BadStep { step });
        }
        trace.words.push(next.clone());
        trace.rules.push(label);
        w = next;
    }
    if w != expected {
        return Err(FgError::BadStep { step: trace.rules.len() });
    }
    Ok((gd.g, trace))
}

/// Which invariant [`safety_check`] verifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SafetySymbol {
    F,
    Rec,
    Pop,
    Lim(usize),
}

impl fmt::Display for SafetySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SafetySymbol::F => f.write_str(F),
            SafetySymbol::Rec => f.write_str(REC),
            SafetySymbol::Pop => f.write_str(POP),
            SafetySymbol::Lim(i) => f.write_str(&lim_name(*i)),
        }
    }
}

impl std::str::FromStr for SafetySymbol {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "F" => Ok(SafetySymbol::F),
            "Rec" => Ok(SafetySymbol::Rec),
            "Pop" => Ok(SafetySymbol::Pop),
            _ => s
                .strip_prefix("Lim_")
                .and_then(|i| i.parse().ok())
                .map(SafetySymbol::Lim)
                .ok_or_else(|| format!("unknown symbol {s}; expected F, Rec, Pop or Lim_i")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SafetyReport {
    pub symbol: SafetySymbol,
    pub entries_checked: u64,
    /// Largest `bound − (n'+m')` over entries whose bound is below the cap.
    pub max_slack: Option<u64>,
    /// Smallest such slack; zero means the invariant is tight somewhere.
    pub min_slack: Option<u64>,
    pub violations: Vec<(Config, Config)>,
}

/// The full `G_d` table at one bound, reusable across symbols.
pub struct SafetyChecker {
    d: usize,
    gd: Gd,
    table: ReachTable,
}

impl SafetyChecker {
    pub fn new(d: usize, bound: u64) -> Result<SafetyChecker, FgError> {
        let gd = Gd::new(d)?;
        let table = bounded_reach(&gd.g, bound)?;
        Ok(SafetyChecker { d, gd, table })
    }

    pub fn table(&self) -> &ReachTable {
        &self.table
    }

    pub fn gvas(&self) -> &Gvas {
        &self.gd.g
    }

    /// The symbols with an invariant in this `G_d`.
    pub fn symbols(&self) -> Vec<SafetySymbol> {
        let mut v = vec![SafetySymbol::F, SafetySymbol::Rec, SafetySymbol::Pop];
        v.extend((1..self.d).map(SafetySymbol::Lim));
        v
    }

    /// Largest `n' + m'` over `F`-entries from `src`.
    pub fn max_sum_from(&self, src: &FgConfig) -> Option<u64> {
        let c = src.to_config(self.d);
        self.table.targets(Symbol::Nt(self.gd.f), &c).iter().map(|t| t[R] + t[RBAR]).max()
    }

    pub fn check(&self, symbol: SafetySymbol) -> Result<SafetyReport, FgError> {
        let nt = match symbol {
            SafetySymbol::F => self.gd.f,
            SafetySymbol::Rec => self.gd.rec,
            SafetySymbol::Pop => self.gd.pop,
            SafetySymbol::Lim(i) if i >= 1 && i < self.d => self.gd.lim[i - 1],
            SafetySymbol::Lim(i) => return Err(FgError::BadLimitIndex { i, d: self.d }),
        };
        // Every target satisfies n' + m' ≤ 2·bound, so larger values need not be exact.
        let cap = 2 * self.table.bound() + 1;
        let mut fg = FastGrowing::new(BigUint::from(cap));
        let mut report = SafetyReport { symbol, entries_checked: 0, max_slack: None, min_slack: None, violations: Vec::new() };
        let mut last_src: Option<Config> = None;
        let mut limit: Option<u64> = None;
        self.table.for_each_entry(nt, |x, y| {
            if last_src.as_ref() != Some(x) {
                let s = FgConfig::from_config(x);
                let arg = s.n + s.m;
                limit = match symbol {
                    SafetySymbol::F => fg.eval_u64(&s.alpha, arg).ok(),
                    SafetySymbol::Rec => fg.iterate_u64(&s.alpha, s.n, arg).ok(),
                    SafetySymbol::Pop => Some(arg),
                    SafetySymbol::Lim(i) => {
                        let bumped = s.alpha.natural_sum(&Ordinal::from_coeffs({
                            let mut v = vec![0; i];
                            v[i - 1] = s.n;
                            v
                        }));
                        fg.eval_u64(&bumped, arg).ok()
                    }
                };
                last_src = Some(x.clone());
            }
            report.entries_checked += 1;
            let sum = y[R] + y[RBAR];
            let same_alpha = x[K0..] == y[K0..];
            let ok = same_alpha
                && match (symbol, limit) {
                    (SafetySymbol::Pop, Some(l)) => sum == l,
                    (_, Some(l)) => sum <= l,
                    (_, None) => true,
                };
            if !ok {
                report.violations.push((x.clone(), y.clone()));
            } else if let Some(l) = limit {
                let slack = l - sum.min(l);
                report.max_slack = Some(report.max_slack.map_or(slack, |m| m.max(slack)));
                report.min_slack = Some(report.min_slack.map_or(slack, |m| m.min(slack)));
            }
        });
        Ok(report)
    }
}

/// Builds the `G_d` table at `bound` and checks the invariant of `symbol`
/// on every entry.
pub fn safety_check(d: usize, symbol: SafetySymbol, bound: u64) -> Result<SafetyReport, FgError> {
    SafetyChecker::new(d, bound)?.check(symbol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_counts() {
        assert_eq!(build_gd(1).unwrap().rules().len(), 6);
        assert_eq!(build_gd(2).unwrap().rules().len(), 9);
        assert_eq!(gd_rule_labels(3).len(), 12);
        assert_eq!(build_gd(2).unwrap().dim(), 4);
    }

    #[test]
    fn witnesses_are_valid() {
        for (a, n, want) in [("0", 3, 4), ("1", 2, 5), ("2", 2, 23), ("w", 1, 7)] {
            let alpha: Ordinal = a.parse().unwrap();
            let d = alpha.width().max(1);
            let (g, t) = completeness_witness(&alpha, n, d, 1000).unwrap();
            crate::flowtree::validate_tree(&g, &t).unwrap();
            assert_eq!(t.label().dst[0], want, "F_{a}({n})");
        }
    }

    #[test]
    fn derivations_replay() {
        for n in 0..4 {
            derivation_check(2, DerivationKind::Successor, n).unwrap();
            derivation_check(2, DerivationKind::Limit(1), n).unwrap();
            derivation_check(1, DerivationKind::Pop, n).unwrap();
        }
        assert!(derivation_check(1, DerivationKind::Limit(1), 1).is_err());
    }
}
