#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use gvas::grammar::{run_word, Action, Config, Gvas, GvasBuilder, NtId, Symbol, Word};
use gvas::text::parse_gvas;
use rand::Rng;

pub const POWER2: &str = "dim 1\nstart S\nS -> (1) | (-1) S T\nT -> (0) | (-1) T (2)\n";
pub const TWO_RULES: &str = "dim 2\nstart S\nS -> S S | (-1,2) | (2,-1)\n";
pub const ORDERING: &str = "dim 1\nstart S\nS -> (3) T | (3) U\nT -> (-2) | V T\nU -> T\nV -> eps\n";
pub const POWER2_SET: &str = "dim 2\nstart S\nS -> (0,1) | (1,0) S T\nT -> (0,0) | (0,-1) T (0,2)\n";

pub const T0: &str = "((3 S 4) ((3 (3) 6)) ((6 U 4) ((6 T 4) ((6 (-2) 4)))))";
pub const T1: &str = "((2 S 3) ((2 (3) 5)) ((5 T 3) ((5 (-2) 3))))";
pub const T2: &str = "((3 S 4) ((3 (3) 6)) ((6 T 4) ((6 V 6)) ((6 T 4) ((6 (-2) 4)))))";

pub fn g(src: &str) -> Gvas {
    parse_gvas(src).expect("fixture parses")
}

pub fn c(v: &[u64]) -> Config {
    Config(v.to_vec())
}

/// Terminal words of `L(nt)` with at most `max_len` actions, found by
/// leftmost rewriting; forms with more than `max_nts` nonterminals are dropped.
pub fn words_upto(g: &Gvas, nt: NtId, max_len: usize, max_nts: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([vec![Symbol::Nt(nt)]]);
    while let Some(w) = queue.pop_front() {
        let Some(i) = w.iter().position(|s| matches!(s, Symbol::Nt(_))) else {
            out.insert(w);
            continue;
        };
        let Symbol::Nt(x) = w[i] else { unreachable!() };
        for r in g.rules().iter().filter(|r| r.lhs == x) {
            let mut next = w[..i].to_vec();
            next.extend_from_slice(&r.rhs);
            next.extend_from_slice(&w[i + 1..]);
            let acts = next.iter().filter(|s| matches!(s, Symbol::Act(_))).count();
            let nts = next.len() - acts;
            if acts <= max_len && nts <= max_nts && seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    out
}

/// Runs `w` from `x`, requiring every intermediate configuration to stay in `{0..bound}^d`.
pub fn run_in_grid(g: &Gvas, x: &Config, w: &[Symbol], bound: u64) -> Option<Config> {
    let mut cur = x.clone();
    for s in w {
        cur = run_word(g, &cur, std::slice::from_ref(s)).ok()?;
        if cur.iter().any(|&v| v > bound) {
            return None;
        }
    }
    Some(cur)
}

pub fn grid(dim: usize, bound: u64) -> Vec<Config> {
    let mut out = vec![Config(vec![])];
    for _ in 0..dim {
        out = out.into_iter().flat_map(|c| (0..=bound).map(move |v| Config([c.0.clone(), vec![v]].concat()))).collect();
    }
    out
}

/// Pairs realized by some word of length at most `max_len`: leftmost
/// derivations from `nt`, running each action as soon as it is leftmost.
pub fn word_oracle(g: &Gvas, nt: NtId, bound: u64, max_len: usize) -> BTreeSet<(Config, Config)> {
    let max_nts = max_len.min(8);
    let mut out = BTreeSet::new();
    for x in grid(g.dim(), bound) {
        let mut best: BTreeMap<(Config, Word), usize> = BTreeMap::new();
        let mut queue = VecDeque::from([(x.clone(), vec![Symbol::Nt(nt)], 0usize)]);
        while let Some((cur, form, used)) = queue.pop_front() {
            let Some((&head, rest)) = form.split_first() else {
                out.insert((x.clone(), cur));
                continue;
            };
            let mut push = |cur: Config, form: Word, used: usize| {
                let nts = form.iter().filter(|s| matches!(s, Symbol::Nt(_))).count();
                let acts = form.len() - nts;
                if used + acts > max_len || nts > max_nts {
                    return;
                }
                let key = (cur.clone(), form.clone());
                if best.get(&key).is_some_and(|&u| u <= used) {
                    return;
                }
                best.insert(key, used);
                queue.push_back((cur, form, used));
            };
            match head {
                Symbol::Act(_) => {
                    if let Some(y) = run_in_grid(g, &cur, &[head], bound) {
                        push(y, rest.to_vec(), used + 1);
                    }
                }
                Symbol::Nt(n) => {
                    for r in g.rules().iter().filter(|r| r.lhs == n) {
                        push(cur.clone(), [r.rhs.as_slice(), rest].concat(), used);
                    }
                }
            }
        }
    }
    out
}

/// Kleene iteration of the rule equations over explicit pair sets.
pub fn kleene_oracle(g: &Gvas, bound: u64) -> Vec<BTreeSet<(Config, Config)>> {
    let pts = grid(g.dim(), bound);
    let mut rel: Vec<BTreeSet<(Config, Config)>> = vec![BTreeSet::new(); g.nt_count()];
    loop {
        let mut changed = false;
        for r in g.rules() {
            for x in &pts {
                let mut cur: BTreeSet<Config> = BTreeSet::from([x.clone()]);
                for s in &r.rhs {
                    cur = cur
                        .iter()
                        .flat_map(|y| -> Vec<Config> {
                            match *s {
                                Symbol::Act(a) => y.apply(g.action(a)).filter(|z| z.iter().all(|&v| v <= bound)).into_iter().collect(),
                                Symbol::Nt(n) => rel[n.0 as usize].iter().filter(|(p, _)| p == y).map(|(_, q)| q.clone()).collect(),
                            }
                        })
                        .collect();
                }
                for y in cur {
                    changed |= rel[r.lhs.0 as usize].insert((x.clone(), y));
                }
            }
        }
        if !changed {
            return rel;
        }
    }
}

/// A random grammar with at most `max_rules` rules over `nts` nonterminals.
pub fn random_gvas(rng: &mut impl Rng, dim: usize, nts: usize, max_rules: usize) -> Gvas {
    let names: Vec<String> = (0..nts).map(|i| format!("N{i}")).collect();
    let mut b = GvasBuilder::new(dim, &names[0]);
    let ids: Vec<NtId> = names.iter().map(|n| b.nt(n)).collect();
    let rules = rng.random_range(1..=max_rules);
    for k in 0..rules {
        let lhs = if k < nts { ids[k] } else { ids[rng.random_range(0..nts)] };
        let len = rng.random_range(0..=3);
        let mut w = Vec::new();
        for _ in 0..len {
            if rng.random_bool(0.35) {
                w.push(Symbol::Nt(ids[rng.random_range(0..nts)]));
            } else {
                let a: Vec<i64> = (0..dim).map(|_| rng.random_range(-2..=2)).collect();
                w.push(b.a(Action(a)));
            }
        }
        b.rule(lhs, w);
    }
    b.build()
}

pub fn table_pairs(t: &gvas::ReachTable, nt: NtId) -> BTreeSet<(Config, Config)> {
    t.entries(nt).into_iter().collect()
}

pub fn group(pairs: &BTreeSet<(Config, Config)>) -> BTreeMap<Config, BTreeSet<Config>> {
    let mut m: BTreeMap<Config, BTreeSet<Config>> = BTreeMap::new();
    for (x, y) in pairs {
        m.entry(x.clone()).or_default().insert(y.clone());
    }
    m
}
