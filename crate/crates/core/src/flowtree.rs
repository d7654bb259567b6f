//! Flow trees: derivation trees whose nodes carry the configurations a run
//! passes through, together with the well-quasi-order `≤_G` on them,
//! substitution, and amalgamation.
//!
//! Positions are 1-based child paths; the root is the empty path `ε`.

use std::collections::{HashMap, VecDeque};
use std::fmt::{self, Write as _};
use std::rc::Rc;
use std::sync::Arc;

use crate::grammar::{ActionId, Config, Gvas, NtId, RuleId, Symbol};
use crate::reach::ReachTable;

/// A node label `c →_X d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub src: Config,
    pub sym: Symbol,
    pub dst: Config,
}

impl Transition {
    pub fn new(src: impl Into<Config>, sym: Symbol, dst: impl Into<Config>) -> Self {
        Transition { src: src.into(), sym, dst: dst.into() }
    }

    /// Same symbol and componentwise smaller endpoints.
    pub fn le(&self, o: &Transition) -> bool {
        self.sym == o.sym && self.src.le_pointwise(&o.src) && self.dst.le_pointwise(&o.dst)
    }

    pub fn lift(&self, d: &Lifting) -> Transition {
        Transition { src: self.src.add(&d.pre), sym: self.sym, dst: self.dst.add(&d.post) }
    }

    pub fn display(&self, g: &Gvas) -> String {
        format!("{} -{}-> {}", self.src, g.symbol_name(self.sym), self.dst)
    }
}

/// A pair `Δ = (a, b)` of nonnegative vectors added to source and target.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lifting {
    pub pre: Config,
    pub post: Config,
}

impl Lifting {
    pub fn new(pre: impl Into<Config>, post: impl Into<Config>) -> Self {
        Lifting { pre: pre.into(), post: post.into() }
    }

    pub fn zero(d: usize) -> Self {
        Lifting { pre: Config::zero(d), post: Config::zero(d) }
    }

    /// The lifting taking `s` to `t`, if `s ≤ t`.
    pub fn between(s: &Transition, t: &Transition) -> Option<Lifting> {
        if !s.le(t) {
            return None;
        }
        Some(Lifting { pre: t.src.checked_sub(&s.src)?, post: t.dst.checked_sub(&s.dst)? })
    }

    /// `Δ₁ ⋯ Δ_k`, defined when each `post` equals the next `pre`.
    pub fn chain(ds: &[Lifting]) -> Option<Lifting> {
        let first = ds.first()?;
        for w in ds.windows(2) {
            if w[0].post != w[1].pre {
                return None;
            }
        }
        Some(Lifting { pre: first.pre.clone(), post: ds.last()?.post.clone() })
    }

    pub fn add(&self, o: &Lifting) -> Lifting {
        Lifting { pre: self.pre.add(&o.pre), post: self.post.add(&o.post) }
    }
}

impl fmt::Display for Lifting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.pre, self.post)
    }
}

/// A 1-based child path.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn child(&self, i: usize) -> Position {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }

    pub fn concat(&self, o: &Position) -> Position {
        Position(self.0.iter().chain(&o.0).copied().collect())
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct Node {
    label: Transition,
    children: Vec<FlowTree>,
}

/// An immutable labelled tree; clones share structure.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlowTree(Arc<Node>);

impl FlowTree {
    pub fn new(label: Transition, children: Vec<FlowTree>) -> Self {
        FlowTree(Arc::new(Node { label, children }))
    }

    pub fn leaf(label: Transition) -> Self {
        Self::new(label, Vec::new())
    }

    pub fn label(&self) -> &Transition {
        &self.0.label
    }

    pub fn children(&self) -> &[FlowTree] {
        &self.0.children
    }

    pub fn arity(&self) -> usize {
        self.0.children.len()
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(FlowTree::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(FlowTree::depth).max().unwrap_or(0)
    }

    pub fn subtree(&self, p: &Position) -> Option<&FlowTree> {
        let mut t = self;
        for &i in &p.0 {
            t = t.children().get(i.checked_sub(1)?)?;
        }
        Some(t)
    }

    /// All positions in shortlex order (breadth-first).
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        let mut q = VecDeque::from([(Position::root(), self)]);
        while let Some((p, t)) = q.pop_front() {
            for (i, c) in t.children().iter().enumerate() {
                q.push_back((p.child(i + 1), c));
            }
            out.push(p);
        }
        out
    }

    /// `t + a`: adds `a` to every configuration in the tree.
    pub fn shift(&self, a: &Config) -> FlowTree {
        FlowTree::new(
            Transition { src: self.label().src.add(a), sym: self.label().sym, dst: self.label().dst.add(a) },
            self.children().iter().map(|c| c.shift(a)).collect(),
        )
    }

    /// The yield (sequence of leaf symbols that are actions).
    pub fn yield_word(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        fn go(t: &FlowTree, out: &mut Vec<Symbol>) {
            if t.children().is_empty() {
                if let Symbol::Act(_) = t.label().sym {
                    out.push(t.label().sym);
                }
            }
            for c in t.children() {
                go(c, out);
            }
        }
        go(self, &mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FlowError {
    #[error("position {0} is not in the tree")]
    PositionOutOfRange(Position),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("lifting chain is undefined")]
    ChainUndefined,
    #[error("embedding witness does not replay")]
    InvalidWitness,
    #[error("invalid flow tree: {0}")]
    InvalidTree(TreeDefect),
}

/// What is wrong at a node of an invalid flow tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DefectKind {
    DimensionMismatch,
    /// An action leaf whose target is not source plus action (or has children).
    BadAction,
    /// The children's symbols are not the right side of any rule.
    NoSuchRule,
    /// Consecutive children do not share configurations, or the chain does
    /// not start at the source / end at the target.
    BrokenChain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDefect {
    pub position: Position,
    pub kind: DefectKind,
}

impl fmt::Display for TreeDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at {}", self.kind, self.position)
    }
}

fn node_defect(g: &Gvas, t: &FlowTree) -> Option<DefectKind> {
    let l = t.label();
    if l.src.len() != g.dim() || l.dst.len() != g.dim() {
        return Some(DefectKind::DimensionMismatch);
    }
    match l.sym {
        Symbol::Act(a) => {
            let ok = (a.0 as usize) < g.actions().len() && t.children().is_empty() && l.src.apply(g.action(a)).as_ref() == Some(&l.dst);
            (!ok).then_some(DefectKind::BadAction)
        }
        Symbol::Nt(n) => {
            let syms: Vec<Symbol> = t.children().iter().map(|c| c.label().sym).collect();
            if g.find_rule(n, &syms).is_none() {
                return Some(DefectKind::NoSuchRule);
            }
            let mut cur = &l.src;
            for c in t.children() {
                if c.label().src != *cur {
                    return Some(DefectKind::BrokenChain);
                }
                cur = &c.label().dst;
            }
            (*cur != l.dst).then_some(DefectKind::BrokenChain)
        }
    }
}

/// Checks every node; reports the shallowest, then leftmost, violation.
pub fn validate_tree(g: &Gvas, t: &FlowTree) -> Result<(), TreeDefect> {
    let mut q = VecDeque::from([(Position::root(), t)]);
    while let Some((p, n)) = q.pop_front() {
        if let Some(kind) = node_defect(g, n) {
            return Err(TreeDefect { position: p, kind });
        }
        for (i, c) in n.children().iter().enumerate() {
            q.push_back((p.child(i + 1), c));
        }
    }
    Ok(())
}

/// Replayable evidence for `s ≤_G t`: the subtree `t' = t/anchor` matched
/// with the root of `s`, and one witness per child pair `(s_j, t'_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingWitness {
    pub anchor: Position,
    pub children: Vec<EmbeddingWitness>,
}

/// Flattened tree used by the quadratic searches.
struct Flat<'a> {
    nodes: Vec<&'a FlowTree>,
    kids: Vec<Vec<usize>>,
    /// Descendants of each node (itself included) in shortlex order, with
    /// their position relative to that node.
    desc: Vec<Vec<(usize, Position)>>,
}

impl<'a> Flat<'a> {
    fn new(t: &'a FlowTree) -> Self {
        let mut f = Flat { nodes: Vec::new(), kids: Vec::new(), desc: Vec::new() };
        fn go<'a>(t: &'a FlowTree, f: &mut Flat<'a>) -> usize {
            let id = f.nodes.len();
            f.nodes.push(t);
            f.kids.push(Vec::new());
            for c in t.children() {
                let k = go(c, f);
                f.kids[id].push(k);
            }
            id
        }
        go(t, &mut f);
        f.desc = vec![Vec::new(); f.nodes.len()];
        f
    }

    fn descendants(&mut self, v: usize) -> &[(usize, Position)] {
        if self.desc[v].is_empty() {
            let mut out = Vec::new();
            let mut q = VecDeque::from([(v, Position::root())]);
            while let Some((u, p)) = q.pop_front() {
                for (i, &k) in self.kids[u].iter().enumerate() {
                    q.push_back((k, p.child(i + 1)));
                }
                out.push((u, p));
            }
            self.desc[v] = out;
        }
        &self.desc[v]
    }
}

struct LeqSearch<'a> {
    s: Flat<'a>,
    t: Flat<'a>,
    /// `memo[(si, ti)] = Some(anchor)` when `s_si ≤_G t_ti`.
    memo: HashMap<(usize, usize), Option<(usize, Position)>>,
}

impl LeqSearch<'_> {
    fn le(&mut self, si: usize, ti: usize) -> Option<(usize, Position)> {
        if let Some(r) = self.memo.get(&(si, ti)) {
            return r.clone();
        }
        let s_label = self.s.nodes[si].label();
        let mut found = None;
        if s_label.le(self.t.nodes[ti].label()) {
            let cands = self.t.descendants(ti).to_vec();
            let arity = self.s.kids[si].len();
            for (u, p) in cands {
                if self.t.kids[u].len() != arity || !s_label.le(self.t.nodes[u].label()) {
                    continue;
                }
                let ok = (0..arity).all(|j| {
                    let (sj, uj) = (self.s.kids[si][j], self.t.kids[u][j]);
                    self.le(sj, uj).is_some()
                });
                if ok {
                    found = Some((u, p));
                    break;
                }
            }
        }
        self.memo.insert((si, ti), found.clone());
        found
    }

    fn witness(&mut self, si: usize, ti: usize) -> EmbeddingWitness {
        let (u, p) = self.le(si, ti).expect("witness requested for unrelated pair");
        let children = (0..self.s.kids[si].len()).map(|j| self.witness(self.s.kids[si][j], self.t.kids[u][j])).collect();
        EmbeddingWitness { anchor: p, children }
    }
}

/// Decides `s ≤_G t`. On success returns the lifting `Δ` from `root(s)` to
/// `root(t)` and a witness choosing, at each step, the shortest and then
/// lexicographically smallest matching subtree.
pub fn leq_g(s: &FlowTree, t: &FlowTree) -> Option<(Lifting, EmbeddingWitness)> {
    let mut search = LeqSearch { s: Flat::new(s), t: Flat::new(t), memo: HashMap::new() };
    search.le(0, 0)?;
    let w = search.witness(0, 0);
    Some((Lifting::between(s.label(), t.label())?, w))
}

/// Replays a witness for `s ≤_G t`.
pub fn check_witness(s: &FlowTree, t: &FlowTree, w: &EmbeddingWitness) -> bool {
    if !s.label().le(t.label()) {
        return false;
    }
    let Some(tp) = t.subtree(&w.anchor) else { return false };
    s.label().le(tp.label())
        && s.arity() == tp.arity()
        && w.children.len() == s.arity()
        && s.children().iter().zip(tp.children()).zip(&w.children).all(|((sj, tj), wj)| check_witness(sj, tj, wj))
}

/// `t[u]_p` assuming `root(t/p) ≤ root(u)`: the spine above `p` is lifted by
/// `Δ`, siblings left of the spine are shifted by `Δ.pre` and siblings right
/// of it by `Δ.post`.
fn graft(t: &FlowTree, p: &[usize], u: &FlowTree, d: &Lifting) -> FlowTree {
    match p.split_first() {
        None => u.clone(),
        Some((&i, rest)) => {
            let kids = t
                .children()
                .iter()
                .enumerate()
                .map(|(j, c)| match (j + 1).cmp(&i) {
                    std::cmp::Ordering::Less => c.shift(&d.pre),
                    std::cmp::Ordering::Equal => graft(c, rest, u, d),
                    std::cmp::Ordering::Greater => c.shift(&d.post),
                })
                .collect();
            FlowTree::new(t.label().lift(d), kids)
        }
    }
}

fn graft_checked(t: &FlowTree, p: &Position, u: &FlowTree) -> Result<FlowTree, FlowError> {
    let sub = t.subtree(p).ok_or_else(|| FlowError::PositionOutOfRange(p.clone()))?;
    let d = Lifting::between(sub.label(), u.label())
        .ok_or_else(|| FlowError::PreconditionViolated(format!("root at {p} is not below the root of the replacement")))?;
    Ok(graft(t, &p.0, u, &d))
}

/// `t[u]_p`, requiring `t/p ≤_G u`.
pub fn substitute(t: &FlowTree, p: &Position, u: &FlowTree) -> Result<FlowTree, FlowError> {
    let sub = t.subtree(p).ok_or_else(|| FlowError::PositionOutOfRange(p.clone()))?;
    if leq_g(sub, u).is_none() {
        return Err(FlowError::PreconditionViolated(format!("t/{p} ≤_G u does not hold")));
    }
    graft_checked(t, p, u)
}

/// Replaces the children of `t` by `us`, lifting the root by the chain of
/// the root-wise liftings `root(t_i) → root(u_i)`.
pub fn replace_children(t: &FlowTree, us: &[FlowTree]) -> Result<FlowTree, FlowError> {
    if us.len() != t.arity() {
        return Err(FlowError::PreconditionViolated(format!("expected {} children, got {}", t.arity(), us.len())));
    }
    let ds = t
        .children()
        .iter()
        .zip(us)
        .enumerate()
        .map(|(i, (ti, ui))| {
            Lifting::between(ti.label(), ui.label())
                .ok_or_else(|| FlowError::PreconditionViolated(format!("child {} is not lifted by its replacement", i + 1)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let d = Lifting::chain(&ds).ok_or(FlowError::ChainUndefined)?;
    Ok(FlowTree::new(t.label().lift(&d), us.to_vec()))
}

fn amalgamate_rec(s: &FlowTree, t1: &FlowTree, w1: &EmbeddingWitness, t2: &FlowTree, w2: &EmbeddingWitness) -> Result<FlowTree, FlowError> {
    let bad = || FlowError::InvalidWitness;
    let tp = t1.subtree(&w1.anchor).ok_or_else(bad)?;
    let tq = t2.subtree(&w2.anchor).ok_or_else(bad)?;
    let d1 = Lifting::between(s.label(), tp.label()).ok_or_else(bad)?;
    let kids = (0..s.arity())
        .map(|j| amalgamate_rec(&s.children()[j], &tp.children()[j], &w1.children[j], &tq.children()[j], &w2.children[j]))
        .collect::<Result<Vec<_>, _>>()?;
    let u = FlowTree::new(tq.label().lift(&d1), kids);
    let u2 = graft_checked(t2, &w2.anchor, &u)?;
    graft_checked(t1, &w1.anchor, &u2)
}

/// Combines `s ≤_G t₁` and `s ≤_G t₂` into a tree `s'` with `t₁ ≤_G s'`
/// and `t₂ ≤_G s'`, whose root is `root(s) + Δ₁ + Δ₂`.
pub fn amalgamate(s: &FlowTree, t1: &FlowTree, w1: &EmbeddingWitness, t2: &FlowTree, w2: &EmbeddingWitness) -> Result<FlowTree, FlowError> {
    if !check_witness(s, t1, w1) || !check_witness(s, t2, w2) {
        return Err(FlowError::InvalidWitness);
    }
    amalgamate_rec(s, t1, w1, t2, w2)
}

/// Read access to a labelled ordered tree.
pub trait LabelledTree {
    type Label;
    fn node_label(&self) -> &Self::Label;
    fn node_children(&self) -> &[Self]
    where
        Self: Sized;
}

impl LabelledTree for FlowTree {
    type Label = Transition;
    fn node_label(&self) -> &Transition {
        self.label()
    }
    fn node_children(&self) -> &[FlowTree] {
        self.children()
    }
}

/// Homeomorphic embedding: some subtree `t'` of `t` has a label above
/// `root(s)` and the children of `s` embed into an increasing subsequence
/// of the children of `t'`.
pub fn embeds<T: LabelledTree>(s: &T, t: &T, le: impl Fn(&T::Label, &T::Label) -> bool) -> bool {
    fn flatten<'a, T: LabelledTree>(t: &'a T, nodes: &mut Vec<&'a T>, kids: &mut Vec<Vec<usize>>) -> usize {
        let id = nodes.len();
        nodes.push(t);
        kids.push(Vec::new());
        for c in t.node_children() {
            let k = flatten(c, nodes, kids);
            kids[id].push(k);
        }
        id
    }
    let (mut sn, mut sk, mut tn, mut tk) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    flatten(s, &mut sn, &mut sk);
    flatten(t, &mut tn, &mut tk);
    // Preorder ids: children have larger ids than parents, so filling from
    // the back computes both tables bottom-up.
    let (ns, nt) = (sn.len(), tn.len());
    let mut at = vec![false; ns * nt];
    let mut anywhere = vec![false; ns * nt];
    for si in (0..ns).rev() {
        for ti in (0..nt).rev() {
            let mut ok = le(sn[si].node_label(), tn[ti].node_label());
            if ok {
                let mut it = tk[ti].iter();
                ok = sk[si].iter().all(|&sc| it.any(|&tc| anywhere[sc * nt + tc]));
            }
            at[si * nt + ti] = ok;
            anywhere[si * nt + ti] = ok || tk[ti].iter().any(|&tc| anywhere[si * nt + tc]);
        }
    }
    anywhere[0]
}

/// `s ⊑ t` on flow trees, with transitions compared by [`Transition::le`].
pub fn hom_embed(s: &FlowTree, t: &FlowTree) -> bool {
    embeds(s, t, Transition::le)
}

/// The rule (or action) applied at a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleRef {
    Rule(RuleId),
    Action(ActionId),
}

/// A node's rule together with `c₀ … c_k`: its source followed by the
/// targets of its children (for leaves, source and target).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Instance {
    pub rule: RuleRef,
    pub configs: Vec<Config>,
}

impl Instance {
    /// Same rule and componentwise smaller configurations.
    pub fn le(&self, o: &Instance) -> bool {
        self.rule == o.rule && self.configs.len() == o.configs.len() && self.configs.iter().zip(&o.configs).all(|(a, b)| a.le_pointwise(b))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdornedTree {
    pub label: Instance,
    pub children: Vec<AdornedTree>,
}

impl LabelledTree for AdornedTree {
    type Label = Instance;
    fn node_label(&self) -> &Instance {
        &self.label
    }
    fn node_children(&self) -> &[AdornedTree] {
        &self.children
    }
}

/// Relabels every node with its rule instance. Fails on invalid trees.
pub fn adorn(g: &Gvas, t: &FlowTree) -> Result<AdornedTree, FlowError> {
    validate_tree(g, t).map_err(FlowError::InvalidTree)?;
    fn go(g: &Gvas, t: &FlowTree) -> AdornedTree {
        let l = t.label();
        let rule = match l.sym {
            Symbol::Act(a) => RuleRef::Action(a),
            Symbol::Nt(n) => {
                let syms: Vec<Symbol> = t.children().iter().map(|c| c.label().sym).collect();
                RuleRef::Rule(g.find_rule(n, &syms).expect("validated"))
            }
        };
        let mut configs = vec![l.src.clone()];
        if t.children().is_empty() {
            configs.push(l.dst.clone());
        } else {
            configs.extend(t.children().iter().map(|c| c.label().dst.clone()));
        }
        AdornedTree { label: Instance { rule, configs }, children: t.children().iter().map(|c| go(g, c)).collect() }
    }
    Ok(go(g, t))
}

/// The alternative characterisation `root(s) ≤ root(t) ∧ adorn(s) ⊑ adorn(t)`.
pub fn leq_via_adorn(g: &Gvas, s: &FlowTree, t: &FlowTree) -> Result<bool, FlowError> {
    Ok(s.label().le(t.label()) && embeds(&adorn(g, s)?, &adorn(g, t)?, Instance::le))
}

/// Rebuilds a flow tree for `x →_X y` from the table's first-derivation witnesses.
pub fn witness_tree(table: &ReachTable, x: &Config, sym: Symbol, y: &Config) -> Option<FlowTree> {
    if !table.contains(sym, x, y) {
        return None;
    }
    let label = Transition { src: x.clone(), sym, dst: y.clone() };
    match sym {
        Symbol::Act(_) => Some(FlowTree::leaf(label)),
        Symbol::Nt(n) => {
            let (r, cs) = table.witness(n, x, y)?;
            let rhs = &table.gvas().rule(r).rhs;
            let kids = rhs.iter().enumerate().map(|(i, &s)| witness_tree(table, &cs[i], s, &cs[i + 1])).collect::<Option<Vec<_>>>()?;
            Some(FlowTree::new(label, kids))
        }
    }
}

type Gen = Rc<Vec<(FlowTree, usize)>>;

/// Exhaustive enumeration of valid flow trees with at most `max_nodes`
/// nodes and all configurations within `{0..bound}^d`.
pub struct TreeEnumerator<'g> {
    g: &'g Gvas,
    bound: u64,
    memo: HashMap<(Symbol, Config, usize), Gen>,
}

impl<'g> TreeEnumerator<'g> {
    pub fn new(g: &'g Gvas, bound: u64) -> Self {
        TreeEnumerator { g, bound, memo: HashMap::new() }
    }

    fn in_grid(&self, c: &Config) -> bool {
        c.iter().all(|&v| v <= self.bound)
    }

    /// Trees rooted at `sym` with source `c` and at most `n` nodes, with sizes.
    fn gen(&mut self, sym: Symbol, c: &Config, n: usize) -> Gen {
        if n == 0 {
            return Rc::new(Vec::new());
        }
        let key = (sym, c.clone(), n);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut out = Vec::new();
        match sym {
            Symbol::Act(a) => {
                if let Some(d) = c.apply(self.g.action(a)).filter(|d| self.in_grid(d)) {
                    out.push((FlowTree::leaf(Transition { src: c.clone(), sym, dst: d }), 1));
                }
            }
            Symbol::Nt(nt) => {
                let rules: Vec<Vec<Symbol>> = self.g.rules_for(nt).map(|(_, r)| r.rhs.clone()).collect();
                for rhs in rules {
                    if rhs.len() + 1 > n {
                        continue;
                    }
                    let mut partial: Vec<(Vec<FlowTree>, Config, usize)> = vec![(Vec::new(), c.clone(), 1)];
                    for (i, &x) in rhs.iter().enumerate() {
                        let rest = rhs.len() - i - 1;
                        let mut next = Vec::new();
                        for (kids, cur, used) in &partial {
                            let room = n - used - rest;
                            for (t, sz) in self.gen(x, cur, room).iter() {
                                let mut k = kids.clone();
                                k.push(t.clone());
                                next.push((k, t.label().dst.clone(), used + sz));
                            }
                        }
                        partial = next;
                    }
                    for (kids, dst, used) in partial {
                        out.push((FlowTree::new(Transition { src: c.clone(), sym, dst }, kids), used));
                    }
                }
            }
        }
        let v = Rc::new(out);
        self.memo.insert(key, v.clone());
        v
    }

    /// All trees rooted at `sym` from `c` with at most `max_nodes` nodes.
    pub fn from(&mut self, sym: Symbol, c: &Config, max_nodes: usize) -> Vec<FlowTree> {
        self.gen(sym, c, max_nodes).iter().map(|(t, _)| t.clone()).collect()
    }

    /// All trees rooted at `sym`, over every source in the grid.
    pub fn all(&mut self, sym: Symbol, max_nodes: usize) -> Vec<FlowTree> {
        let d = self.g.dim();
        let r = self.bound + 1;
        let total = r.pow(d as u32);
        let mut out = Vec::new();
        for mut ix in 0..total {
            let mut v = vec![0; d];
            for slot in v.iter_mut().rev() {
                *slot = ix % r;
                ix /= r;
            }
            out.extend(self.from(sym, &Config(v), max_nodes));
        }
        out
    }
}

/// Convenience wrapper over [`TreeEnumerator::all`] for the start symbol.
pub fn enumerate_trees(g: &Gvas, nt: NtId, bound: u64, max_nodes: usize) -> Vec<FlowTree> {
    TreeEnumerator::new(g, bound).all(Symbol::Nt(nt), max_nodes)
}

/// Graphviz rendering with one node per tree node.
pub fn to_dot(g: &Gvas, t: &FlowTree) -> String {
    let mut out = String::from("digraph flowtree {\n  node [shape=box, fontname=\"monospace\"];\n");
    let mut next = 0usize;
    fn go(g: &Gvas, t: &FlowTree, out: &mut String, next: &mut usize) -> usize {
        let id = *next;
        *next += 1;
        let l = t.label();
        let label = format!("{} →{} {}", l.src, g.symbol_name(l.sym), l.dst);
        writeln!(out, "  n{id} [label=\"{}\"];", label.replace('"', "\\\"")).unwrap();
        for c in t.children() {
            let k = go(g, c, out, next);
            writeln!(out, "  n{id} -> n{k};").unwrap();
        }
        id
    }
    go(g, t, &mut out, &mut next);
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{parse_gvas, parse_tree, print_tree};

    fn fig2() -> Gvas {
        parse_gvas("dim 1\nstart S\nS -> (3) T | (3) U\nT -> (-2) | V T\nU -> T\nV -> eps\n").unwrap()
    }

    const T0: &str = "((3 S 4) ((3 (3) 6)) ((6 U 4) ((6 T 4) ((6 (-2) 4)))))";
    const T1: &str = "((2 S 3) ((2 (3) 5)) ((5 T 3) ((5 (-2) 3))))";
    const T2: &str = "((3 S 4) ((3 (3) 6)) ((6 T 4) ((6 V 6)) ((6 T 4) ((6 (-2) 4)))))";

    #[test]
    fn ordering_trees_are_valid_and_round_trip() {
        let g = fig2();
        for src in [T0, T1, T2] {
            let t = parse_tree(&g, src).unwrap();
            validate_tree(&g, &t).unwrap();
            assert_eq!(print_tree(&g, &t), src);
        }
    }

    #[test]
    fn embedding_versus_ordering() {
        let g = fig2();
        let (t0, t1, t2) = (parse_tree(&g, T0).unwrap(), parse_tree(&g, T1).unwrap(), parse_tree(&g, T2).unwrap());
        assert!(hom_embed(&t1, &t0));
        assert!(leq_g(&t1, &t0).is_none());
        assert!(hom_embed(&t1, &t2));
        let (d, w) = leq_g(&t1, &t2).unwrap();
        assert_eq!(d, Lifting::new([1], [1]));
        assert!(check_witness(&t1, &t2, &w));
        assert_eq!(w.children[1].anchor, Position(vec![2]));
    }

    #[test]
    fn broken_root_reported_at_root() {
        let g = fig2();
        let bad = T1.replacen("(2 S 3)", "(2 S 5)", 1);
        let t = parse_tree(&g, &bad).unwrap();
        assert_eq!(validate_tree(&g, &t), Err(TreeDefect { position: Position::root(), kind: DefectKind::BrokenChain }));
    }
}
