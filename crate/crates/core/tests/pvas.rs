mod common;

use std::collections::BTreeSet;

use common::*;
use gvas::grammar::{Action, Config, Gvas, Symbol};
use gvas::pvas::{gvas_to_pvas, pvas_bounded_explore, pvas_to_gvas, Pvas, PvasAction, PvasConfig, StackSym};
use gvas::reach::bounded_reach;
use gvas::text::{parse_pvas, parse_stack_word, print_pvas};

fn from(p: &Pvas, counters: &[u64], stack: &str) -> PvasConfig {
    PvasConfig { counters: c(counters), stack: parse_stack_word(p, stack).unwrap() }
}

/// Counter values reachable with an empty stack.
fn emptied(p: &Pvas, start: &PvasConfig, bound: u64, stack: usize) -> BTreeSet<Config> {
    pvas_bounded_explore(p, start, bound, stack, 10_000).into_iter().filter(|c| c.stack.is_empty()).map(|c| c.counters).collect()
}

fn gvas_targets(g: &Gvas, x: &[u64], bound: u64) -> BTreeSet<Config> {
    bounded_reach(g, bound).unwrap().targets(Symbol::Nt(g.start()), &c(x)).into_iter().collect()
}

#[test]
fn single_steps() {
    let p = gvas_to_pvas(&g(TWO_RULES));
    let next = p.step(&from(&p, &[2, 2], "S"));
    assert_eq!(next[0], from(&p, &[2, 2], "S S"));
    assert!(p.step(&from(&p, &[0, 0], "S")).iter().all(|c| c.counters == c2(0, 0)));
    assert!(p.step(&from(&p, &[3, 3], "_")).is_empty());
}

fn c2(a: u64, b: u64) -> Config {
    c(&[a, b])
}

#[test]
fn remark_run() {
    let p = gvas_to_pvas(&g(TWO_RULES));
    assert_eq!(print_pvas(&p), "dim 2\nstack S\naction S / S S / (0,0)\naction S / _ / (-1,2)\naction S / _ / (2,-1)\n");
    assert!(emptied(&p, &from(&p, &[2, 2], "S"), 8, 8).contains(&c2(2, 5)));
    let start = from(&p, &[2, 2], "S");
    assert_eq!(pvas_bounded_explore(&p, &start, 8, 8, 0), [start].into());
}

#[test]
fn epsilon_grammar() {
    let p = gvas_to_pvas(&g("dim 1\nstart S\nS -> eps\n"));
    let seen = pvas_bounded_explore(&p, &from(&p, &[3], "S"), 5, 4, 10);
    assert_eq!(seen, [from(&p, &[3], "S"), from(&p, &[3], "_")].into());
}

#[test]
fn power_two_as_pvas() {
    let g = g(POWER2);
    let p = gvas_to_pvas(&g);
    assert_eq!(p.actions().len(), 6);
    assert!(emptied(&p, &from(&p, &[3], "S"), 8, 12).contains(&c(&[2])));
    assert_eq!(emptied(&p, &from(&p, &[3], "S"), 8, 16), gvas_targets(&g, &[3], 8));
}

#[test]
fn round_trips_preserve_bounded_reach() {
    for (src, bound) in [(TWO_RULES, 8), (POWER2, 8), (ORDERING, 8)] {
        let g = g(src);
        let p = gvas_to_pvas(&g);
        let back = pvas_to_gvas(&p, &[StackSym(g.start().0)]).unwrap();
        let (t, u) = (bounded_reach(&g, bound).unwrap(), bounded_reach(&back, bound).unwrap());
        for x in common::grid(g.dim(), bound) {
            assert_eq!(t.targets(Symbol::Nt(g.start()), &x), u.targets(Symbol::Nt(back.start()), &x), "{src} from {x}");
        }
    }
}

#[test]
fn general_actions_use_the_triple_construction() {
    let p = parse_pvas("dim 1\nstack A B\naction A B / _ / (1)\naction A / A A B / (-1)\naction B / _ / (2)\n").unwrap();
    for init in ["A B", "A", "A A B B"] {
        let w = parse_stack_word(&p, init).unwrap();
        let g = pvas_to_gvas(&p, &w).unwrap();
        for x in 0..=4 {
            let want = emptied(&p, &from(&p, &[x], init), 6, 12);
            assert_eq!(gvas_targets(&g, &[x], 6), want, "{init} from {x}");
        }
    }
}

#[test]
fn degenerate_pvas() {
    let none = Pvas::new(1, vec!["Z".into()], vec![]);
    let g = pvas_to_gvas(&none, &[StackSym(0)]).unwrap();
    assert!(gvas_targets(&g, &[2], 4).is_empty());
    let g = pvas_to_gvas(&none, &[]).unwrap();
    assert_eq!(gvas_targets(&g, &[2], 4), [c(&[2])].into());
    let one = Pvas::new(1, vec!["Z".into()], vec![PvasAction { pop: vec![StackSym(0)], push: vec![], delta: Action(vec![3]) }]);
    let g = pvas_to_gvas(&one, &[StackSym(0)]).unwrap();
    assert_eq!(gvas_targets(&g, &[1], 8), [c(&[4])].into());
}

#[test]
fn text_round_trip() {
    let src = "dim 1\nstack A B\naction A B / _ / (1)\naction A / A A B / (-1)\naction _ / B / (0)\n";
    let p = parse_pvas(src).unwrap();
    assert_eq!(print_pvas(&p), src);
    assert_eq!(parse_pvas(&print_pvas(&p)).unwrap(), p);
}
