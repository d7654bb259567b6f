//! Bounded reachability: for every symbol `X`, the relation `x →_X y` over
//! the grid `{0..B}^d` where every intermediate configuration of the run
//! also stays in the grid.
//!
//! The relation is the least fixpoint of the rules, computed by a worklist
//! over pair-insertion events. Each rule `T → A₀ X₁ A₁ ⋯ X_m A_m` (with `Aᵢ`
//! maximal action runs) is split into partial items: item `k` relates `c₀`
//! with the configuration after `A₀ X₁ ⋯ X_k A_k`. Action runs are applied
//! and inverted functionally, so only the items between nonterminals are
//! stored. A joined pair remembers the configuration where the last
//! nonterminal started, which is enough to rebuild every intermediate
//! configuration of the first derivation found.
//!
//! Two modes share the engine. [`bounded_reach`] saturates the whole grid.
//! [`bounded_reach_from`] only explores nonterminal calls that are demanded
//! from given sources; its entries for those sources agree with the full
//! table.

use std::collections::{BTreeSet, VecDeque};

use rustc_hash::FxHashSet;

use crate::grammar::{check_structure, Config, Gvas, GvasError, NtId, RuleId, Symbol};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReachError {
    #[error("resource limit exceeded: {what} needs {needed}, limit {limit}")]
    ResourceLimit { what: &'static str, needed: u128, limit: u128 },
    #[error(transparent)]
    Gvas(#[from] GvasError),
    #[error("configuration {0} lies outside the grid")]
    OutOfGrid(Config),
    #[error("unknown nonterminal")]
    UnknownNonterminal,
}

/// Caps on the work a fixpoint may do.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest admissible `(B+1)^d`.
    pub max_grid_points: u64,
    /// Total stored pairs across all relations.
    pub max_pairs: u64,
    /// A relation uses a dense bitset when `(B+1)^{2d}` is at most this many bits.
    pub dense_bits: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_grid_points: 1 << 22, max_pairs: 80_000_000, dense_bits: 1 << 28 }
    }
}

/// The grid `{0..bound}^dim`, indexed in lexicographic order.
#[derive(Debug, Clone)]
pub struct Grid {
    dim: usize,
    bound: u64,
    size: usize,
}

impl Grid {
    pub fn new(dim: usize, bound: u64, limits: &Limits) -> Result<Grid, ReachError> {
        let needed = (bound as u128 + 1).checked_pow(dim as u32).unwrap_or(u128::MAX);
        if needed > limits.max_grid_points as u128 || needed >= NONE as u128 {
            return Err(ReachError::ResourceLimit { what: "grid points", needed, limit: limits.max_grid_points as u128 });
        }
        Ok(Grid { dim, bound, size: needed as usize })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn contains(&self, c: &Config) -> bool {
        c.len() == self.dim && c.iter().all(|&v| v <= self.bound)
    }

    pub fn index(&self, c: &Config) -> Option<u32> {
        if !self.contains(c) {
            return None;
        }
        let r = self.bound + 1;
        Some(c.iter().fold(0u64, |acc, &v| acc * r + v) as u32)
    }

    pub fn config(&self, mut ix: u32) -> Config {
        let r = (self.bound + 1) as u32;
        let mut v = vec![0u64; self.dim];
        for slot in v.iter_mut().rev() {
            *slot = (ix % r) as u64;
            ix /= r;
        }
        Config(v)
    }

    /// All grid configurations in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = Config> + '_ {
        (0..self.size as u32).map(|i| self.config(i))
    }
}

enum PairSet {
    Dense { bits: Vec<u64>, n: u64 },
    Sparse { set: FxHashSet<u64>, n: u64 },
}

impl PairSet {
    fn new(n: usize, limits: &Limits) -> PairSet {
        let n = n as u64;
        if n * n <= limits.dense_bits {
            PairSet::Dense { bits: vec![0; (n * n).div_ceil(64) as usize], n }
        } else {
            PairSet::Sparse { set: FxHashSet::default(), n }
        }
    }

    fn insert(&mut self, a: u32, b: u32) -> bool {
        match self {
            PairSet::Dense { bits, n } => {
                let k = a as u64 * *n + b as u64;
                let (w, m) = ((k / 64) as usize, 1u64 << (k % 64));
                let fresh = bits[w] & m == 0;
                bits[w] |= m;
                fresh
            }
            PairSet::Sparse { set, n } => set.insert(a as u64 * *n + b as u64),
        }
    }

    fn contains(&self, a: u32, b: u32) -> bool {
        match self {
            PairSet::Dense { bits, n } => {
                let k = a as u64 * *n + b as u64;
                bits[(k / 64) as usize] & (1u64 << (k % 64)) != 0
            }
            PairSet::Sparse { set, n } => set.contains(&(a as u64 * *n + b as u64)),
        }
    }
}

#[derive(Clone, Copy)]
struct Edge {
    tgt: u32,
    rule: u32,
    via: u32,
}

#[derive(Clone, Copy)]
struct Back {
    src: u32,
    via: u32,
}

struct NtRel {
    set: PairSet,
    fwd: Vec<Vec<Edge>>,
    count: u64,
}

struct ItemRel {
    set: PairSet,
    bwd: Vec<Vec<Back>>,
}

struct CRule {
    lhs: u32,
    /// `A₀ … A_m` as action indices.
    segs: Vec<Vec<u32>>,
    /// `X₁ … X_m`.
    nts: Vec<u32>,
    /// Index of item 1 in the item table; items `1..m-1` are stored.
    item_base: usize,
}

struct Program {
    grid: Grid,
    step: Vec<Vec<u32>>,
    step_inv: Vec<Vec<u32>>,
    rules: Vec<CRule>,
    rules_of: Vec<Vec<u32>>,
    occurrences: Vec<Vec<(u32, u32)>>,
    n_items: usize,
}

impl Program {
    fn compile(g: &Gvas, grid: Grid) -> Program {
        let n = grid.size();
        let mut step = Vec::with_capacity(g.actions().len());
        let mut step_inv = Vec::with_capacity(g.actions().len());
        for a in g.actions() {
            let mut f = vec![NONE; n];
            let mut b = vec![NONE; n];
            for (i, slot) in f.iter_mut().enumerate() {
                let c = grid.config(i as u32);
                if let Some(t) = c.apply(a).and_then(|t| grid.index(&t)) {
                    *slot = t;
                    b[t as usize] = i as u32;
                }
            }
            step.push(f);
            step_inv.push(b);
        }
        let mut rules = Vec::new();
        let mut rules_of = vec![Vec::new(); g.nt_count()];
        let mut occurrences = vec![Vec::new(); g.nt_count()];
        let mut n_items = 0;
        for (ri, r) in g.rules().iter().enumerate() {
            let mut segs = vec![Vec::new()];
            let mut nts = Vec::new();
            for s in &r.rhs {
                match *s {
                    Symbol::Act(a) => segs.last_mut().unwrap().push(a.0),
                    Symbol::Nt(x) => {
                        nts.push(x.0);
                        occurrences[x.0 as usize].push((ri as u32, nts.len() as u32));
                        segs.push(Vec::new());
                    }
                }
            }
            let item_base = n_items;
            n_items += nts.len().saturating_sub(1);
            rules_of[r.lhs.0 as usize].push(ri as u32);
            rules.push(CRule { lhs: r.lhs.0, segs, nts, item_base });
        }
        Program { grid, step, step_inv, rules, rules_of, occurrences, n_items }
    }

    #[inline]
    fn apply(&self, seg: &[u32], mut x: u32) -> Option<u32> {
        for &a in seg {
            x = self.step[a as usize][x as usize];
            if x == NONE {
                return None;
            }
        }
        Some(x)
    }

    #[inline]
    fn invert(&self, seg: &[u32], mut x: u32) -> Option<u32> {
        for &a in seg.iter().rev() {
            x = self.step_inv[a as usize][x as usize];
            if x == NONE {
                return None;
            }
        }
        Some(x)
    }
}

enum Ev {
    Activate { nt: u32, c: u32 },
    Nt { nt: u32, src: u32, tgt: u32 },
    Item { rule: u32, k: u32, src: u32, tgt: u32 },
}

struct Engine<'p> {
    prog: &'p Program,
    rels: Vec<NtRel>,
    items: Vec<ItemRel>,
    active: Option<Vec<Vec<bool>>>,
    queue: VecDeque<Ev>,
    pairs: u64,
    limits: Limits,
}

impl<'p> Engine<'p> {
    fn new(prog: &'p Program, n_nts: usize, demand: bool, limits: Limits) -> Engine<'p> {
        let n = prog.grid.size();
        Engine {
            prog,
            rels: (0..n_nts).map(|_| NtRel { set: PairSet::new(n, &limits), fwd: vec![Vec::new(); n], count: 0 }).collect(),
            items: (0..prog.n_items).map(|_| ItemRel { set: PairSet::new(n, &limits), bwd: vec![Vec::new(); n] }).collect(),
            active: demand.then(|| vec![vec![false; n]; n_nts]),
            queue: VecDeque::new(),
            pairs: 0,
            limits,
        }
    }

    fn bump(&mut self) -> Result<(), ReachError> {
        self.pairs += 1;
        if self.pairs > self.limits.max_pairs {
            return Err(ReachError::ResourceLimit { what: "stored pairs", needed: self.pairs as u128, limit: self.limits.max_pairs as u128 });
        }
        Ok(())
    }

    fn is_active(&self, nt: u32, c: u32) -> bool {
        self.active.as_ref().is_none_or(|a| a[nt as usize][c as usize])
    }

    fn activate(&mut self, nt: u32, c: u32) {
        if let Some(a) = self.active.as_mut() {
            let slot = &mut a[nt as usize][c as usize];
            if !*slot {
                *slot = true;
                self.queue.push_back(Ev::Activate { nt, c });
            }
        }
    }

    fn insert_nt(&mut self, nt: u32, src: u32, tgt: u32, rule: u32, via: u32) -> Result<(), ReachError> {
        let rel = &mut self.rels[nt as usize];
        if rel.set.insert(src, tgt) {
            rel.fwd[src as usize].push(Edge { tgt, rule, via });
            rel.count += 1;
            self.bump()?;
            self.queue.push_back(Ev::Nt { nt, src, tgt });
        }
        Ok(())
    }

    /// Records `(c0, tgt)` for the prefix ending after `A_k` of rule `r`.
    fn emit(&mut self, r: u32, k: u32, c0: u32, tgt: u32, via: u32) -> Result<(), ReachError> {
        let rule = &self.prog.rules[r as usize];
        if k as usize == rule.nts.len() {
            return self.insert_nt(rule.lhs, c0, tgt, r, via);
        }
        let item = &mut self.items[rule.item_base + k as usize - 1];
        if item.set.insert(c0, tgt) {
            item.bwd[tgt as usize].push(Back { src: c0, via });
            self.bump()?;
            self.queue.push_back(Ev::Item { rule: r, k, src: c0, tgt });
        }
        Ok(())
    }

    fn activate_rule(&mut self, r: u32, c: u32) -> Result<(), ReachError> {
        let prog = self.prog;
        let rule = &prog.rules[r as usize];
        let Some(x) = prog.apply(&rule.segs[0], c) else { return Ok(()) };
        if rule.nts.is_empty() {
            return self.insert_nt(rule.lhs, c, x, r, NONE);
        }
        let x1 = rule.nts[0];
        self.activate(x1, x);
        let len = self.rels[x1 as usize].fwd[x as usize].len();
        for i in 0..len {
            let y = self.rels[x1 as usize].fwd[x as usize][i].tgt;
            if let Some(y2) = prog.apply(&rule.segs[1], y) {
                self.emit(r, 1, c, y2, x)?;
            }
        }
        Ok(())
    }

    fn on_nt(&mut self, nt: u32, x: u32, y: u32) -> Result<(), ReachError> {
        let prog = self.prog;
        for &(r, k) in &prog.occurrences[nt as usize] {
            let rule = &prog.rules[r as usize];
            let Some(y2) = prog.apply(&rule.segs[k as usize], y) else { continue };
            if k == 1 {
                if let Some(c0) = prog.invert(&rule.segs[0], x) {
                    if self.is_active(rule.lhs, c0) {
                        self.emit(r, 1, c0, y2, x)?;
                    }
                }
            } else {
                let item = rule.item_base + k as usize - 2;
                let len = self.items[item].bwd[x as usize].len();
                for i in 0..len {
                    let c0 = self.items[item].bwd[x as usize][i].src;
                    self.emit(r, k, c0, y2, x)?;
                }
            }
        }
        Ok(())
    }

    fn on_item(&mut self, r: u32, k: u32, c0: u32, x: u32) -> Result<(), ReachError> {
        let prog = self.prog;
        let rule = &prog.rules[r as usize];
        let next = rule.nts[k as usize];
        self.activate(next, x);
        let seg = &rule.segs[k as usize + 1];
        let len = self.rels[next as usize].fwd[x as usize].len();
        for i in 0..len {
            let y = self.rels[next as usize].fwd[x as usize][i].tgt;
            if let Some(y2) = prog.apply(seg, y) {
                self.emit(r, k + 1, c0, y2, x)?;
            }
        }
        Ok(())
    }

    fn run(&mut self) -> Result<(), ReachError> {
        while let Some(ev) = self.queue.pop_front() {
            match ev {
                Ev::Activate { nt, c } => {
                    let prog = self.prog;
                    for &r in &prog.rules_of[nt as usize] {
                        self.activate_rule(r, c)?;
                    }
                }
                Ev::Nt { nt, src, tgt } => self.on_nt(nt, src, tgt)?,
                Ev::Item { rule, k, src, tgt } => self.on_item(rule, k, src, tgt)?,
            }
        }
        Ok(())
    }
}

/// The saturated relations of a grammar over a bounded grid.
pub struct ReachTable {
    gvas: Gvas,
    prog: Program,
    rels: Vec<NtRel>,
    items: Vec<ItemRel>,
    active: Option<Vec<Vec<bool>>>,
}

impl std::fmt::Debug for ReachTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReachTable")
            .field("dim", &self.prog.grid.dim())
            .field("bound", &self.prog.grid.bound())
            .field("pairs", &self.rels.iter().map(|r| r.count).sum::<u64>())
            .finish()
    }
}

/// Full table over `{0..bound}^d` with default [`Limits`].
pub fn bounded_reach(g: &Gvas, bound: u64) -> Result<ReachTable, ReachError> {
    bounded_reach_with(g, bound, &Limits::default())
}

pub fn bounded_reach_with(g: &Gvas, bound: u64, limits: &Limits) -> Result<ReachTable, ReachError> {
    check_structure(g)?;
    let grid = Grid::new(g.dim(), bound, limits)?;
    let prog = Program::compile(g, grid);
    let (rels, items) = {
        let mut e = Engine::new(&prog, g.nt_count(), false, *limits);
        for (r, rule) in prog.rules.iter().enumerate() {
            if rule.nts.is_empty() {
                for c in 0..prog.grid.size() as u32 {
                    e.activate_rule(r as u32, c)?;
                }
            }
        }
        e.run()?;
        (e.rels, e.items)
    };
    Ok(ReachTable { gvas: g.clone(), prog, rels, items, active: None })
}

/// Demand-driven table: only the calls reachable from `(nt, c)` for `c` in
/// `sources` are explored. For every explored `(X, x)` the targets agree
/// with the full table.
pub fn bounded_reach_from(g: &Gvas, bound: u64, nt: NtId, sources: &[Config]) -> Result<ReachTable, ReachError> {
    bounded_reach_from_with(g, bound, nt, sources, &Limits::default())
}

pub fn bounded_reach_from_with(g: &Gvas, bound: u64, nt: NtId, sources: &[Config], limits: &Limits) -> Result<ReachTable, ReachError> {
    check_structure(g)?;
    if nt.0 as usize >= g.nt_count() {
        return Err(ReachError::UnknownNonterminal);
    }
    let grid = Grid::new(g.dim(), bound, limits)?;
    let ixs = sources.iter().map(|c| grid.index(c).ok_or_else(|| ReachError::OutOfGrid(c.clone()))).collect::<Result<Vec<_>, _>>()?;
    let prog = Program::compile(g, grid);
    let (rels, items, active) = {
        let mut e = Engine::new(&prog, g.nt_count(), true, *limits);
        for c in ixs {
            e.activate(nt.0, c);
        }
        e.run()?;
        (e.rels, e.items, e.active)
    };
    Ok(ReachTable { gvas: g.clone(), prog, rels, items, active })
}

impl ReachTable {
    pub fn gvas(&self) -> &Gvas {
        &self.gvas
    }

    pub fn grid(&self) -> &Grid {
        &self.prog.grid
    }

    pub fn bound(&self) -> u64 {
        self.prog.grid.bound()
    }

    /// Whether the entries of `nt` from `x` are complete. Always true for a
    /// full table.
    pub fn is_explored(&self, nt: NtId, x: &Config) -> bool {
        match (&self.active, self.grid().index(x)) {
            (_, None) => false,
            (None, _) => true,
            (Some(a), Some(i)) => a[nt.0 as usize][i as usize],
        }
    }

    /// `x →_X y` within the grid.
    pub fn contains(&self, sym: Symbol, x: &Config, y: &Config) -> bool {
        let (Some(i), Some(j)) = (self.grid().index(x), self.grid().index(y)) else { return false };
        match sym {
            Symbol::Act(a) => self.prog.step[a.0 as usize][i as usize] == j,
            Symbol::Nt(n) => self.rels[n.0 as usize].set.contains(i, j),
        }
    }

    /// Targets of `X` from `x`, sorted lexicographically.
    pub fn targets(&self, sym: Symbol, x: &Config) -> Vec<Config> {
        let Some(i) = self.grid().index(x) else { return Vec::new() };
        let mut ix: Vec<u32> = match sym {
            Symbol::Act(a) => {
                let t = self.prog.step[a.0 as usize][i as usize];
                if t == NONE {
                    vec![]
                } else {
                    vec![t]
                }
            }
            Symbol::Nt(n) => self.rels[n.0 as usize].fwd[i as usize].iter().map(|e| e.tgt).collect(),
        };
        ix.sort_unstable();
        ix.into_iter().map(|t| self.grid().config(t)).collect()
    }

    /// Number of pairs stored for `nt`.
    pub fn entry_count(&self, nt: NtId) -> u64 {
        self.rels[nt.0 as usize].count
    }

    /// All pairs of `nt`, sorted lexicographically.
    pub fn entries(&self, nt: NtId) -> Vec<(Config, Config)> {
        let mut out = Vec::new();
        self.for_each_entry(nt, |x, y| out.push((x.clone(), y.clone())));
        out
    }

    /// Visits all pairs of `nt` in lexicographic order without collecting them.
    pub fn for_each_entry(&self, nt: NtId, mut f: impl FnMut(&Config, &Config)) {
        let rel = &self.rels[nt.0 as usize];
        let mut tg = Vec::new();
        for (i, edges) in rel.fwd.iter().enumerate() {
            if edges.is_empty() {
                continue;
            }
            let x = self.grid().config(i as u32);
            tg.clear();
            tg.extend(edges.iter().map(|e| e.tgt));
            tg.sort_unstable();
            for &t in &tg {
                f(&x, &self.grid().config(t));
            }
        }
    }

    /// The rule and the configurations `c₀ … c_ℓ` of the first derivation
    /// that established `x →_T y`.
    pub fn witness(&self, nt: NtId, x: &Config, y: &Config) -> Option<(RuleId, Vec<Config>)> {
        let (i, j) = (self.grid().index(x)?, self.grid().index(y)?);
        let e = self.rels[nt.0 as usize].fwd[i as usize].iter().find(|e| e.tgt == j)?;
        let rule = &self.prog.rules[e.rule as usize];
        let m = rule.nts.len();
        // enter/exit configuration of each nonterminal, recovered backwards
        let mut spans = vec![(0u32, 0u32); m];
        let mut end = j;
        let mut via = e.via;
        for k in (1..=m).rev() {
            let exit = self.prog.invert(&rule.segs[k], end)?;
            spans[k - 1] = (via, exit);
            if k > 1 {
                let item = &self.items[rule.item_base + k - 2];
                let b = item.bwd[via as usize].iter().find(|b| b.src == i)?;
                end = via;
                via = b.via;
            }
        }
        let mut configs = vec![i];
        let mut cur = i;
        #[allow(clippy::needless_range_loop)]
        for k in 0..=m {
            for &a in &rule.segs[k] {
                cur = self.prog.step[a as usize][cur as usize];
                configs.push(cur);
            }
            if k < m {
                debug_assert_eq!(cur, spans[k].0);
                cur = spans[k].1;
                configs.push(cur);
            }
        }
        debug_assert_eq!(cur, j);
        Some((RuleId(e.rule), configs.into_iter().map(|c| self.grid().config(c)).collect()))
    }

    /// `{y : x →_u y}` for a sentential form `u`, composing the table's relations.
    pub fn reachable_from(&self, x: &Config, u: &[Symbol]) -> Result<BTreeSet<Config>, ReachError> {
        if !self.grid().contains(x) {
            return Err(ReachError::OutOfGrid(x.clone()));
        }
        let mut cur: BTreeSet<Config> = [x.clone()].into();
        for &s in u {
            cur = cur.iter().flat_map(|c| self.targets(s, c)).collect();
        }
        Ok(cur)
    }
}
