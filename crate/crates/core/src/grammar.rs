//! The GVAS model: a context-free grammar whose terminals are integer vectors.
//!
//! Nonterminals and actions are interned and addressed by [`NtId`] and
//! [`ActionId`]. A [`Gvas`] built through [`GvasBuilder`] is *canonical*: its
//! nonterminals are numbered in discovery order (start symbol first, then
//! the rules of each nonterminal in turn), rules are grouped by left side,
//! and actions are numbered by first appearance. This is exactly the order
//! the text format recovers, so printing and re-parsing is the identity.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::ops::Deref;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NtId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Nt(NtId),
    Act(ActionId),
}

impl Symbol {
    pub fn is_nonterminal(self) -> bool {
        matches!(self, Symbol::Nt(_))
    }
}

/// A sentential form.
pub type Word = Vec<Symbol>;

/// An action vector in ℤ^d.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action(pub Vec<i64>);

impl Deref for Action {
    type Target = [i64];
    fn deref(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for Action {
    fn from(v: Vec<i64>) -> Self {
        Action(v)
    }
}

impl<const N: usize> From<[i64; N]> for Action {
    fn from(v: [i64; N]) -> Self {
        Action(v.to_vec())
    }
}

impl Action {
    pub fn zero(d: usize) -> Self {
        Action(vec![0; d])
    }

    /// The unit vector `e_i` scaled by `k`.
    pub fn unit(d: usize, i: usize, k: i64) -> Self {
        let mut v = vec![0; d];
        v[i] = k;
        Action(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// A configuration in ℕ^d. The derived order is lexicographic; use
/// [`Config::le_pointwise`] for the componentwise order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Config(pub Vec<u64>);

impl Deref for Config {
    type Target = [u64];
    fn deref(&self) -> &[u64] {
        &self.0
    }
}

impl From<Vec<u64>> for Config {
    fn from(v: Vec<u64>) -> Self {
        Config(v)
    }
}

impl<const N: usize> From<[u64; N]> for Config {
    fn from(v: [u64; N]) -> Self {
        Config(v.to_vec())
    }
}

impl Config {
    pub fn zero(d: usize) -> Self {
        Config(vec![0; d])
    }

    /// `self + a`, or `None` if some counter would go negative.
    pub fn apply(&self, a: &Action) -> Option<Config> {
        if a.len() != self.len() {
            return None;
        }
        self.0.iter().zip(a.iter()).map(|(&x, &d)| x.checked_add_signed(d)).collect::<Option<Vec<_>>>().map(Config)
    }

    pub fn add(&self, o: &Config) -> Config {
        Config(self.0.iter().zip(o.iter()).map(|(a, b)| a + b).collect())
    }

    /// `self - o` if `o ≤ self` componentwise.
    pub fn checked_sub(&self, o: &Config) -> Option<Config> {
        self.0.iter().zip(o.iter()).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>().map(Config)
    }

    pub fn le_pointwise(&self, o: &Config) -> bool {
        self.len() == o.len() && self.0.iter().zip(o.iter()).all(|(a, b)| a <= b)
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn max_entry(&self) -> u64 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub lhs: NtId,
    pub rhs: Word,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gvas {
    dim: usize,
    nonterminals: Vec<String>,
    actions: Vec<Action>,
    rules: Vec<Rule>,
    start: NtId,
}

/// Structural problems reported by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Defect {
    DimensionMismatch { action: ActionId, expected: usize, found: usize },
    UnknownNonterminal { rule: RuleId, id: NtId },
    UnknownAction { rule: RuleId, id: ActionId },
    UnknownStart,
    Unproductive { nt: NtId },
}

impl Defect {
    /// Whether the defect makes the grammar unusable (rather than merely wasteful).
    pub fn is_fatal(&self) -> bool {
        !matches!(self, Defect::Unproductive { .. })
    }
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::DimensionMismatch { action, expected, found } => {
                write!(f, "dimension mismatch: action #{} has length {found}, expected {expected}", action.0)
            }
            Defect::UnknownNonterminal { rule, id } => write!(f, "rule #{} uses unknown nonterminal #{}", rule.0, id.0),
            Defect::UnknownAction { rule, id } => write!(f, "rule #{} uses unknown action #{}", rule.0, id.0),
            Defect::UnknownStart => f.write_str("start symbol is not a nonterminal"),
            Defect::Unproductive { nt } => write!(f, "nonterminal #{} is unproductive", nt.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GvasError {
    #[error("invalid grammar: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Defect>),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("counter {coordinate} goes negative at position {position}")]
    NegativeCounter { coordinate: usize, position: usize },
    #[error("word contains a nonterminal at position {position}")]
    NotTerminal { position: usize },
    #[error("unknown nonterminal {0}")]
    UnknownName(String),
}

impl Gvas {
    /// Assembles a grammar from raw parts without any checks or renumbering.
    /// Use [`validate`] to inspect the result.
    pub fn from_parts(dim: usize, nonterminals: Vec<String>, actions: Vec<Action>, rules: Vec<Rule>, start: NtId) -> Self {
        Gvas { dim, nonterminals, actions, rules, start }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn start(&self) -> NtId {
        self.start
    }

    pub fn nonterminals(&self) -> &[String] {
        &self.nonterminals
    }

    pub fn nt_count(&self) -> usize {
        self.nonterminals.len()
    }

    pub fn nt_name(&self, id: NtId) -> &str {
        &self.nonterminals[id.0 as usize]
    }

    pub fn nt_by_name(&self, name: &str) -> Option<NtId> {
        self.nonterminals.iter().position(|n| n == name).map(|i| NtId(i as u32))
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn action(&self, id: ActionId) -> &Action {
        &self.actions[id.0 as usize]
    }

    pub fn action_id(&self, a: &Action) -> Option<ActionId> {
        self.actions.iter().position(|b| b == a).map(|i| ActionId(i as u32))
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, id: RuleId) -> &Rule {
        &self.rules[id.0 as usize]
    }

    pub fn rules_for(&self, nt: NtId) -> impl Iterator<Item = (RuleId, &Rule)> + '_ {
        self.rules.iter().enumerate().filter(move |(_, r)| r.lhs == nt).map(|(i, r)| (RuleId(i as u32), r))
    }

    /// The first rule `lhs → rhs`, if any.
    pub fn find_rule(&self, lhs: NtId, rhs: &[Symbol]) -> Option<RuleId> {
        self.rules.iter().position(|r| r.lhs == lhs && r.rhs == rhs).map(|i| RuleId(i as u32))
    }

    pub fn symbol_name(&self, s: Symbol) -> String {
        match s {
            Symbol::Nt(n) => self.nt_name(n).to_string(),
            Symbol::Act(a) => self.action(a).to_string(),
        }
    }

    pub fn word_to_string(&self, w: &[Symbol]) -> String {
        if w.is_empty() {
            return "eps".into();
        }
        w.iter().map(|&s| self.symbol_name(s)).collect::<Vec<_>>().join(" ")
    }

    /// A copy of this grammar with a different start symbol.
    pub fn with_start(&self, start: NtId) -> Gvas {
        canonicalize(&Gvas { start, ..self.clone() })
    }
}

/// Incremental, name-based construction of a canonical [`Gvas`].
#[derive(Debug, Clone)]
pub struct GvasBuilder {
    dim: usize,
    start: String,
    names: Vec<String>,
    name_ix: HashMap<String, NtId>,
    actions: Vec<Action>,
    action_ix: HashMap<Action, ActionId>,
    rules: Vec<Rule>,
}

impl GvasBuilder {
    pub fn new(dim: usize, start: &str) -> Self {
        let mut b = GvasBuilder {
            dim,
            start: start.to_string(),
            names: Vec::new(),
            name_ix: HashMap::new(),
            actions: Vec::new(),
            action_ix: HashMap::new(),
            rules: Vec::new(),
        };
        b.nt(start);
        b
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nt(&mut self, name: &str) -> NtId {
        if let Some(&id) = self.name_ix.get(name) {
            return id;
        }
        let id = NtId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.name_ix.insert(name.to_string(), id);
        id
    }

    pub fn has_name(&self, name: &str) -> bool {
        self.name_ix.contains_key(name)
    }

    /// A nonterminal named `base`, `base'`, `base''`, ... whichever is unused first.
    pub fn fresh(&mut self, base: &str) -> NtId {
        let mut name = base.to_string();
        while self.has_name(&name) {
            name.push('\'');
        }
        self.nt(&name)
    }

    pub fn act(&mut self, a: impl Into<Action>) -> ActionId {
        let a = a.into();
        if let Some(&id) = self.action_ix.get(&a) {
            return id;
        }
        let id = ActionId(self.actions.len() as u32);
        self.actions.push(a.clone());
        self.action_ix.insert(a, id);
        id
    }

    /// Symbol for action `a`.
    pub fn a(&mut self, a: impl Into<Action>) -> Symbol {
        Symbol::Act(self.act(a))
    }

    /// Symbol for nonterminal `name`.
    pub fn n(&mut self, name: &str) -> Symbol {
        Symbol::Nt(self.nt(name))
    }

    pub fn rule(&mut self, lhs: NtId, rhs: Word) -> RuleId {
        self.rules.push(Rule { lhs, rhs });
        RuleId(self.rules.len() as u32 - 1)
    }

    pub fn start_id(&self) -> NtId {
        self.name_ix[&self.start]
    }

    /// Copies all rules of `g`, renaming its nonterminals that clash with
    /// names already present. Returns the id of `g`'s start symbol.
    pub fn import(&mut self, g: &Gvas) -> NtId {
        self.import_mapped(g, |a| vec![a.clone()])
    }

    /// Like [`GvasBuilder::import`], but every action is replaced by the word `image(a)`.
    pub fn import_mapped(&mut self, g: &Gvas, mut image: impl FnMut(&Action) -> Vec<Action>) -> NtId {
        let map: Vec<NtId> = g.nonterminals.iter().map(|name| self.fresh(name)).collect();
        let images: Vec<Vec<ActionId>> = g.actions.iter().map(|a| image(a).into_iter().map(|b| self.act(b)).collect()).collect();
        for r in &g.rules {
            let mut rhs = Vec::new();
            for s in &r.rhs {
                match *s {
                    Symbol::Nt(n) => rhs.push(Symbol::Nt(map[n.0 as usize])),
                    Symbol::Act(a) => rhs.extend(images[a.0 as usize].iter().map(|&b| Symbol::Act(b))),
                }
            }
            self.rule(map[r.lhs.0 as usize], rhs);
        }
        map[g.start.0 as usize]
    }

    /// Finishes construction, renumbering into canonical first-appearance order.
    pub fn build(self) -> Gvas {
        let raw = Gvas { dim: self.dim, nonterminals: self.names, actions: self.actions, rules: self.rules, start: NtId(0) };
        canonicalize(&raw)
    }
}

/// Puts `g` in canonical form: nonterminals are numbered in discovery order
/// (the start symbol, then each nonterminal's rules scanned left to right in
/// turn), rules are grouped by left side in that order, and actions are
/// numbered by first appearance. Alternatives of one nonterminal keep their
/// relative order. Unused nonterminals and actions are dropped.
pub fn canonicalize(g: &Gvas) -> Gvas {
    let n = g.nonterminals.len();
    let mut by_lhs: Vec<Vec<&Rule>> = vec![Vec::new(); n];
    for r in &g.rules {
        by_lhs[r.lhs.0 as usize].push(r);
    }
    fn visit(x: NtId, new_id: &mut [Option<NtId>], order: &mut Vec<NtId>) -> NtId {
        *new_id[x.0 as usize].get_or_insert_with(|| {
            order.push(x);
            NtId(order.len() as u32 - 1)
        })
    }
    let mut new_id: Vec<Option<NtId>> = vec![None; n];
    let mut order: Vec<NtId> = Vec::new();
    visit(g.start, &mut new_id, &mut order);
    let mut act_map: HashMap<ActionId, ActionId> = HashMap::new();
    let mut actions = Vec::new();
    let mut rules = Vec::with_capacity(g.rules.len());
    let mut next = 0;
    let mut pending = 0;
    loop {
        if next == order.len() {
            // Nonterminals unreachable from the start keep their original order.
            while pending < n && (new_id[pending].is_some() || by_lhs[pending].is_empty()) {
                pending += 1;
            }
            if pending == n {
                break;
            }
            visit(NtId(pending as u32), &mut new_id, &mut order);
        }
        let old = order[next];
        let lhs = NtId(next as u32);
        next += 1;
        for r in &by_lhs[old.0 as usize] {
            let rhs = r
                .rhs
                .iter()
                .map(|&s| match s {
                    Symbol::Nt(x) => Symbol::Nt(visit(x, &mut new_id, &mut order)),
                    Symbol::Act(a) => Symbol::Act(*act_map.entry(a).or_insert_with(|| {
                        actions.push(g.actions[a.0 as usize].clone());
                        ActionId(actions.len() as u32 - 1)
                    })),
                })
                .collect();
            rules.push(Rule { lhs, rhs });
        }
    }
    let names = order.iter().map(|x| g.nonterminals[x.0 as usize].clone()).collect();
    Gvas { dim: g.dim, nonterminals: names, actions, rules, start: NtId(0) }
}

/// Reports every structural defect of `g`, fatal ones first.
pub fn validate(g: &Gvas) -> Vec<Defect> {
    let mut out = Vec::new();
    if g.start.0 as usize >= g.nt_count() {
        out.push(Defect::UnknownStart);
    }
    for (i, a) in g.actions.iter().enumerate() {
        if a.len() != g.dim {
            out.push(Defect::DimensionMismatch { action: ActionId(i as u32), expected: g.dim, found: a.len() });
        }
    }
    for (i, r) in g.rules.iter().enumerate() {
        let rule = RuleId(i as u32);
        if r.lhs.0 as usize >= g.nt_count() {
            out.push(Defect::UnknownNonterminal { rule, id: r.lhs });
        }
        for s in &r.rhs {
            match *s {
                Symbol::Nt(n) if n.0 as usize >= g.nt_count() => out.push(Defect::UnknownNonterminal { rule, id: n }),
                Symbol::Act(a) if a.0 as usize >= g.actions.len() => out.push(Defect::UnknownAction { rule, id: a }),
                _ => {}
            }
        }
    }
    if out.is_empty() {
        let productive = productive_set(g);
        for (i, p) in productive.iter().enumerate() {
            if !p {
                out.push(Defect::Unproductive { nt: NtId(i as u32) });
            }
        }
    }
    out
}

/// `Err` with the fatal defects of `g`, if any.
pub fn check_structure(g: &Gvas) -> Result<(), GvasError> {
    let fatal: Vec<_> = validate(g).into_iter().filter(Defect::is_fatal).collect();
    if fatal.is_empty() {
        Ok(())
    } else {
        Err(GvasError::Invalid(fatal))
    }
}

/// Nonterminals deriving at least one terminal word.
pub fn productive_set(g: &Gvas) -> Vec<bool> {
    let mut prod = vec![false; g.nt_count()];
    let mut changed = true;
    while changed {
        changed = false;
        for r in &g.rules {
            if !prod[r.lhs.0 as usize]
                && r.rhs.iter().all(|s| match *s {
                    Symbol::Nt(n) => prod[n.0 as usize],
                    Symbol::Act(_) => true,
                })
            {
                prod[r.lhs.0 as usize] = true;
                changed = true;
            }
        }
    }
    prod
}

/// Runs the terminal word `w` from `x`, failing at the first negative counter.
pub fn run_word(g: &Gvas, x: &Config, w: &[Symbol]) -> Result<Config, GvasError> {
    if x.len() != g.dim {
        return Err(GvasError::DimensionMismatch { expected: g.dim, found: x.len() });
    }
    let mut c = x.clone();
    for (position, s) in w.iter().enumerate() {
        let Symbol::Act(a) = *s else {
            return Err(GvasError::NotTerminal { position });
        };
        let a = g.action(a);
        for (coordinate, (v, d)) in c.0.iter_mut().zip(a.iter()).enumerate() {
            *v = v.checked_add_signed(*d).ok_or(GvasError::NegativeCounter { coordinate, position })?;
        }
    }
    Ok(c)
}

/// All words obtained from `w` by rewriting one nonterminal occurrence with one
/// rule, ordered by position and then rule order, without duplicates.
pub fn derive_step(g: &Gvas, w: &[Symbol]) -> Vec<Word> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, s) in w.iter().enumerate() {
        let Symbol::Nt(n) = *s else { continue };
        for (_, r) in g.rules_for(n) {
            let mut v = Vec::with_capacity(w.len() + r.rhs.len());
            v.extend_from_slice(&w[..i]);
            v.extend_from_slice(&r.rhs);
            v.extend_from_slice(&w[i + 1..]);
            if seen.insert(v.clone()) {
                out.push(v);
            }
        }
    }
    out
}

fn terminals_subsequence(w: &[Symbol], v: &[Symbol]) -> bool {
    let mut it = v.iter().filter(|s| !s.is_nonterminal());
    w.iter().filter(|s| !s.is_nonterminal()).all(|s| it.any(|t| t == s))
}

/// Searches for a derivation `u ⟹* v` of at most `max_steps` steps.
///
/// Returns the sentential forms of a shortest derivation (starting with `u`,
/// ending with `v`), or `None` when none exists within the budget.
pub fn derives(g: &Gvas, u: &[Symbol], v: &[Symbol], max_steps: usize) -> Option<Vec<Word>> {
    let mut parent: HashMap<Word, Option<Word>> = HashMap::new();
    let mut queue = VecDeque::new();
    parent.insert(u.to_vec(), None);
    queue.push_back((u.to_vec(), 0usize));
    while let Some((w, depth)) = queue.pop_front() {
        if w == v {
            let mut trace = vec![w.clone()];
            let mut cur = w;
            while let Some(Some(p)) = parent.get(&cur) {
                trace.push(p.clone());
                cur = p.clone();
            }
            trace.reverse();
            return Some(trace);
        }
        if depth == max_steps {
            continue;
        }
        for next in derive_step(g, &w) {
            // Terminals never disappear, so they must survive into v in order.
            if !parent.contains_key(&next) && terminals_subsequence(&next, v) {
                parent.insert(next.clone(), Some(w.clone()));
                queue.push_back((next, depth + 1));
            }
        }
    }
    None
}

/// The grammar with every action `a` replaced by the action word `image(a)`
/// over ℤ^{target_dim}.
pub fn apply_morphism(g: &Gvas, target_dim: usize, mut image: impl FnMut(&Action) -> Vec<Action>) -> Result<Gvas, GvasError> {
    let images: Vec<Vec<Action>> = g.actions.iter().map(&mut image).collect();
    if let Some(bad) = images.iter().flatten().find(|a| a.len() != target_dim) {
        return Err(GvasError::DimensionMismatch { expected: target_dim, found: bad.len() });
    }
    let mut actions = Vec::new();
    let mut ids: HashMap<Action, ActionId> = HashMap::new();
    let images: Vec<Vec<ActionId>> = images
        .into_iter()
        .map(|img| {
            img.into_iter()
                .map(|a| {
                    *ids.entry(a.clone()).or_insert_with(|| {
                        actions.push(a);
                        ActionId(actions.len() as u32 - 1)
                    })
                })
                .collect()
        })
        .collect();
    let rules = g
        .rules
        .iter()
        .map(|r| Rule {
            lhs: r.lhs,
            rhs: r
                .rhs
                .iter()
                .flat_map(|&s| match s {
                    Symbol::Nt(n) => vec![Symbol::Nt(n)],
                    Symbol::Act(a) => images[a.0 as usize].iter().map(|&b| Symbol::Act(b)).collect(),
                })
                .collect(),
        })
        .collect();
    Ok(canonicalize(&Gvas { dim: target_dim, nonterminals: g.nonterminals.clone(), actions, rules, start: g.start }))
}

/// Convenience: the morphism sending every action to a single action.
pub fn map_actions(g: &Gvas, target_dim: usize, mut f: impl FnMut(&Action) -> Action) -> Result<Gvas, GvasError> {
    apply_morphism(g, target_dim, |a| vec![f(a)])
}

fn same_dim(g1: &Gvas, g2: &Gvas) -> Result<(), GvasError> {
    if g1.dim != g2.dim {
        Err(GvasError::DimensionMismatch { expected: g1.dim, found: g2.dim })
    } else {
        Ok(())
    }
}

fn fresh_start(base: &str, gs: &[&Gvas]) -> String {
    let mut name = format!("{base}'");
    while gs.iter().any(|g| g.nt_by_name(&name).is_some()) {
        name.push('\'');
    }
    name
}

/// `S' → S₁ | S₂`.
pub fn union(g1: &Gvas, g2: &Gvas) -> Result<Gvas, GvasError> {
    same_dim(g1, g2)?;
    let s = fresh_start(g1.nt_name(g1.start), &[g1, g2]);
    let mut b = GvasBuilder::new(g1.dim, &s);
    let start = b.start_id();
    let s1 = b.import(g1);
    let s2 = b.import(g2);
    b.rule(start, vec![Symbol::Nt(s1)]);
    b.rule(start, vec![Symbol::Nt(s2)]);
    Ok(b.build())
}

/// `S' → S₁ S₂ ⋯ S_k`.
pub fn concat_all(gs: &[&Gvas]) -> Result<Gvas, GvasError> {
    let first = gs.first().expect("concat of no grammars");
    for g in gs {
        same_dim(first, g)?;
    }
    let s = fresh_start(first.nt_name(first.start), gs);
    let mut b = GvasBuilder::new(first.dim, &s);
    let start = b.start_id();
    let parts: Vec<Symbol> = gs.iter().map(|g| Symbol::Nt(b.import(g))).collect();
    b.rule(start, parts);
    Ok(b.build())
}

/// `S' → S₁ S₂`.
pub fn concat(g1: &Gvas, g2: &Gvas) -> Result<Gvas, GvasError> {
    concat_all(&[g1, g2])
}

/// `S' → ε | S S'`.
pub fn star(g: &Gvas) -> Gvas {
    let s = fresh_start(g.nt_name(g.start), &[g]);
    let mut b = GvasBuilder::new(g.dim, &s);
    let start = b.start_id();
    let s1 = b.import(g);
    b.rule(start, vec![]);
    b.rule(start, vec![Symbol::Nt(s1), Symbol::Nt(start)]);
    b.build()
}

/// `S' → pre S' post | S`, generating `pre^k L post^k`.
pub fn sandwich(g: &Gvas, pre: &Action, post: &Action) -> Result<Gvas, GvasError> {
    for a in [pre, post] {
        if a.len() != g.dim {
            return Err(GvasError::DimensionMismatch { expected: g.dim, found: a.len() });
        }
    }
    let s = fresh_start(g.nt_name(g.start), &[g]);
    let mut b = GvasBuilder::new(g.dim, &s);
    let start = b.start_id();
    let s1 = b.import(g);
    let (p, q) = (b.a(pre.clone()), b.a(post.clone()));
    b.rule(start, vec![p, Symbol::Nt(start), q]);
    b.rule(start, vec![Symbol::Nt(s1)]);
    Ok(b.build())
}

/// The grammar `S → a` generating the single action `a`.
pub fn single(a: &Action) -> Gvas {
    let mut b = GvasBuilder::new(a.len(), "S");
    let s = b.start_id();
    let x = b.a(a.clone());
    b.rule(s, vec![x]);
    b.build()
}

/// `S → a S | ε`, generating `a*`.
pub fn repeat(a: &Action, name: &str) -> Gvas {
    let mut b = GvasBuilder::new(a.len(), name);
    let s = b.start_id();
    let x = b.a(a.clone());
    b.rule(s, vec![x, Symbol::Nt(s)]);
    b.rule(s, vec![]);
    b.build()
}
