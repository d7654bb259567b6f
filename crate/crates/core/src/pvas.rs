//! Pushdown vector addition systems and their translation to and from GVAS.
//!
//! A stack word is written with its top on the left. An action
//! `(α, β, a)` pops `α`, pushes `β` and adds `a` to the counters.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::grammar::{Action, Config, Gvas, GvasBuilder, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StackSym(pub u32);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PvasAction {
    pub pop: Vec<StackSym>,
    pub push: Vec<StackSym>,
    pub delta: Action,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pvas {
    dim: usize,
    stack: Vec<String>,
    actions: Vec<PvasAction>,
}

/// Counters plus stack (top first).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PvasConfig {
    pub counters: Config,
    pub stack: Vec<StackSym>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PvasError {
    #[error("translation needs {needed} rules, limit {limit}")]
    ResourceLimit { needed: usize, limit: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

impl Pvas {
    pub fn new(dim: usize, stack: Vec<String>, actions: Vec<PvasAction>) -> Self {
        Pvas { dim, stack, actions }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn stack_alphabet(&self) -> &[String] {
        &self.stack
    }

    pub fn actions(&self) -> &[PvasAction] {
        &self.actions
    }

    pub fn symbol(&self, name: &str) -> Option<StackSym> {
        self.stack.iter().position(|s| s == name).map(|i| StackSym(i as u32))
    }

    pub fn name(&self, s: StackSym) -> &str {
        &self.stack[s.0 as usize]
    }

    pub fn word_to_string(&self, w: &[StackSym]) -> String {
        w.iter().map(|&s| self.name(s)).collect::<Vec<_>>().join(" ")
    }

    /// Successors of a configuration under one action each, in action order.
    pub fn step(&self, c: &PvasConfig) -> Vec<PvasConfig> {
        let mut out = Vec::new();
        for a in &self.actions {
            if !c.stack.starts_with(&a.pop) {
                continue;
            }
            let Some(counters) = c.counters.apply(&a.delta) else { continue };
            let mut stack = a.push.clone();
            stack.extend_from_slice(&c.stack[a.pop.len()..]);
            out.push(PvasConfig { counters, stack });
        }
        out
    }
}

/// The PVAS simulating leftmost derivations of `g` on its stack.
///
/// Every nonterminal is a stack symbol. A rule whose right side is a single
/// action `a` becomes `(T, ε, a)`; any other rule `T → w` becomes
/// `(T, w', 0)` where each action in `w` is replaced by a fresh stack symbol
/// `A_a`, and each such symbol gets a popping action `(A_a, ε, a)`.
pub fn gvas_to_pvas(g: &Gvas) -> Pvas {
    let mut stack: Vec<String> = g.nonterminals().to_vec();
    let mut act_sym: HashMap<u32, StackSym> = HashMap::new();
    let mut used = Vec::new();
    let zero = Action::zero(g.dim());
    let mut actions = Vec::new();
    for r in g.rules() {
        let t = StackSym(r.lhs.0);
        if let [Symbol::Act(a)] = r.rhs[..] {
            actions.push(PvasAction { pop: vec![t], push: vec![], delta: g.action(a).clone() });
            continue;
        }
        let push = r
            .rhs
            .iter()
            .map(|&s| match s {
                Symbol::Nt(n) => StackSym(n.0),
                Symbol::Act(a) => *act_sym.entry(a.0).or_insert_with(|| {
                    let mut name = format!("act{}", a.0);
                    while stack.contains(&name) {
                        name.push('\'');
                    }
                    stack.push(name);
                    used.push(a);
                    StackSym(stack.len() as u32 - 1)
                }),
            })
            .collect();
        actions.push(PvasAction { pop: vec![t], push, delta: zero.clone() });
    }
    for a in used {
        actions.push(PvasAction { pop: vec![act_sym[&a.0]], push: vec![], delta: g.action(a).clone() });
    }
    Pvas { dim: g.dim(), stack, actions }
}

/// Default cap on the number of rules produced by [`pvas_to_gvas`].
pub const DEFAULT_RULE_BUDGET: usize = 200_000;

/// A GVAS generating exactly the action words of runs from `initial` to the
/// empty stack.
///
/// When every action pops exactly one symbol and pushes at most two, each
/// stack symbol becomes a nonterminal (`Z → a β` for `(Z, β, a)`). Otherwise
/// the PVAS is first normalised into a pushdown system with control states
/// (a bottom marker handles empty pops) and the triple construction
/// `[p Z q]` is used.
pub fn pvas_to_gvas(p: &Pvas, initial: &[StackSym]) -> Result<Gvas, PvasError> {
    pvas_to_gvas_with(p, initial, DEFAULT_RULE_BUDGET)
}

pub fn pvas_to_gvas_with(p: &Pvas, initial: &[StackSym], rule_budget: usize) -> Result<Gvas, PvasError> {
    for a in &p.actions {
        if a.delta.len() != p.dim {
            return Err(PvasError::DimensionMismatch { expected: p.dim, found: a.delta.len() });
        }
    }
    if p.actions.iter().all(|a| a.pop.len() == 1 && a.push.len() <= 2) {
        simple_translation(p, initial, rule_budget)
    } else {
        triple_translation(p, initial, rule_budget)
    }
}

fn fresh_name(base: &str, taken: &[String]) -> String {
    let mut n = base.to_string();
    while taken.contains(&n) {
        n.push('\'');
    }
    n
}

fn simple_translation(p: &Pvas, initial: &[StackSym], budget: usize) -> Result<Gvas, PvasError> {
    let needed = p.actions.len() + 1;
    if needed > budget {
        return Err(PvasError::ResourceLimit { needed, limit: budget });
    }
    let start = fresh_name("Start", &p.stack);
    let mut b = GvasBuilder::new(p.dim, &start);
    let s = b.start_id();
    let init = initial.iter().map(|&z| b.n(p.name(z))).collect();
    b.rule(s, init);
    for a in &p.actions {
        let lhs = b.nt(p.name(a.pop[0]));
        let mut rhs = Vec::new();
        if !a.delta.is_zero() {
            rhs.push(b.a(a.delta.clone()));
        }
        rhs.extend(a.push.iter().map(|&z| b.n(p.name(z))));
        b.rule(lhs, rhs);
    }
    Ok(b.build())
}

/// A normalised pushdown transition: in state `from` pop `sym`, move to
/// state `to`, push `push` (length ≤ 2) and add `delta`.
struct Trans {
    from: usize,
    sym: usize,
    to: usize,
    push: Vec<usize>,
    delta: Action,
}

fn triple_translation(p: &Pvas, initial: &[StackSym], budget: usize) -> Result<Gvas, PvasError> {
    let nsym = p.stack.len() + 1;
    let bottom = p.stack.len();
    let mut n_states = 1;
    let mut trans: Vec<Trans> = Vec::new();
    let zero = Action::zero(p.dim);
    let fresh_state = |n: &mut usize| {
        *n += 1;
        *n - 1
    };
    // Pops `top`, then pushes `push` in steps of at most two symbols, ending
    // in state 0 with `delta` applied on the first step.
    let emit_push = |trans: &mut Vec<Trans>, n: &mut usize, from: usize, top: usize, push: &[usize], delta: Action| {
        if push.len() <= 2 {
            trans.push(Trans { from, sym: top, to: 0, push: push.to_vec(), delta });
            return;
        }
        // Push the deepest two first, then repeatedly pop the top and push it
        // back under one more symbol.
        let m = push.len();
        let mut state = fresh_state(n);
        trans.push(Trans { from, sym: top, to: state, push: vec![push[m - 2], push[m - 1]], delta });
        for k in (0..m - 2).rev() {
            let next = if k == 0 { 0 } else { fresh_state(n) };
            trans.push(Trans { from: state, sym: push[k + 1], to: next, push: vec![push[k], push[k + 1]], delta: zero.clone() });
            state = next;
        }
    };
    for a in &p.actions {
        let pop: Vec<usize> = a.pop.iter().map(|s| s.0 as usize).collect();
        let push: Vec<usize> = a.push.iter().map(|s| s.0 as usize).collect();
        if pop.is_empty() {
            // Fires on any top symbol, including the bottom marker.
            for z in 0..nsym {
                let mut w = push.clone();
                w.push(z);
                emit_push(&mut trans, &mut n_states, 0, z, &w, a.delta.clone());
            }
            continue;
        }
        let mut state = 0;
        for &z in &pop[..pop.len() - 1] {
            let next = fresh_state(&mut n_states);
            trans.push(Trans { from: state, sym: z, to: next, push: vec![], delta: zero.clone() });
            state = next;
        }
        let last = *pop.last().unwrap();
        // A final one-symbol pop that pushes more than two symbols is split
        // through additional states.
        emit_push(&mut trans, &mut n_states, state, last, &push, a.delta.clone());
    }
    trans.push(Trans { from: 0, sym: bottom, to: 0, push: vec![], delta: zero.clone() });

    let sym_name = |z: usize| if z == bottom { "Bot".to_string() } else { p.name(StackSym(z as u32)).to_string() };
    let nt_name = |q: usize, z: usize, r: usize| format!("[{q} {} {r}]", sym_name(z));
    let start = "Start".to_string();
    let mut b = GvasBuilder::new(p.dim, &start);
    let s = b.start_id();
    let mut by_from: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, t) in trans.iter().enumerate() {
        by_from.entry((t.from, t.sym)).or_default().push(i);
    }
    let mut seen: HashSet<(usize, usize, usize)> = HashSet::new();
    let mut queue = VecDeque::new();
    let mut rules = 0usize;
    let mut want = |key: (usize, usize, usize), b: &mut GvasBuilder, queue: &mut VecDeque<_>| {
        if seen.insert(key) {
            queue.push_back(key);
        }
        b.n(&nt_name(key.0, key.1, key.2))
    };
    // `Seq i q` pops the remaining initial word from state `q`; a multi-symbol
    // pop may leave a control state other than 0 between two initial symbols.
    let init: Vec<usize> = initial.iter().map(|z| z.0 as usize).chain([bottom]).collect();
    let seq_name = |i: usize, q: usize| format!("Seq{i}_{q}");
    let first = b.n(&seq_name(0, 0));
    b.rule(s, vec![first]);
    let mut wanted_seq: VecDeque<(usize, usize)> = VecDeque::from([(0, 0)]);
    let mut seen_seq: HashSet<(usize, usize)> = HashSet::from([(0, 0)]);
    while let Some((i, q)) = wanted_seq.pop_front() {
        let lhs = b.nt(&seq_name(i, q));
        if i + 1 == init.len() {
            let x = want((q, init[i], 0), &mut b, &mut queue);
            b.rule(lhs, vec![x]);
            continue;
        }
        for r in 0..n_states {
            let x = want((q, init[i], r), &mut b, &mut queue);
            let y = b.n(&seq_name(i + 1, r));
            if seen_seq.insert((i + 1, r)) {
                wanted_seq.push_back((i + 1, r));
            }
            b.rule(lhs, vec![x, y]);
        }
    }
    while let Some((q, z, r)) = queue.pop_front() {
        let lhs = b.nt(&nt_name(q, z, r));
        for &ti in by_from.get(&(q, z)).map(Vec::as_slice).unwrap_or(&[]) {
            let t = &trans[ti];
            let mut bodies: Vec<Vec<Symbol>> = Vec::new();
            let lead: Vec<Symbol> = if t.delta.is_zero() { vec![] } else { vec![b.a(t.delta.clone())] };
            match t.push[..] {
                [] if t.to == r => bodies.push(lead.clone()),
                [] => {}
                [y] => {
                    let mut w = lead.clone();
                    w.push(want((t.to, y, r), &mut b, &mut queue));
                    bodies.push(w);
                }
                [y1, y2] => {
                    for mid in 0..n_states {
                        let mut w = lead.clone();
                        w.push(want((t.to, y1, mid), &mut b, &mut queue));
                        w.push(want((mid, y2, r), &mut b, &mut queue));
                        bodies.push(w);
                    }
                }
                _ => unreachable!("normalised pushes have length at most two"),
            }
            for w in bodies {
                rules += 1;
                if rules > budget {
                    return Err(PvasError::ResourceLimit { needed: rules, limit: budget });
                }
                b.rule(lhs, w);
            }
        }
    }
    Ok(b.build())
}

/// Breadth-first exploration from `start`, keeping counters within
/// `counter_bound`, stack height within `stack_bound`, and at most
/// `step_bound` steps.
pub fn pvas_bounded_explore(p: &Pvas, start: &PvasConfig, counter_bound: u64, stack_bound: usize, step_bound: usize) -> BTreeSet<PvasConfig> {
    let ok = |c: &PvasConfig| c.counters.iter().all(|&v| v <= counter_bound) && c.stack.len() <= stack_bound;
    let mut seen = BTreeSet::new();
    if !ok(start) {
        return seen;
    }
    seen.insert(start.clone());
    let mut frontier = vec![start.clone()];
    for _ in 0..step_bound {
        let mut next = Vec::new();
        for c in &frontier {
            for d in p.step(c) {
                if ok(&d) && seen.insert(d.clone()) {
                    next.push(d);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    seen
}
