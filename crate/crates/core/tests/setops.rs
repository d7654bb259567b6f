mod common;

use std::collections::BTreeSet;

use common::*;
use gvas::grammar::{validate, Gvas};
use gvas::setops::*;

fn ones(v: &[u64]) -> BTreeSet<Vec<u64>> {
    v.iter().map(|&x| vec![x]).collect()
}

fn pow2_set() -> DefinablePredicate {
    DefinablePredicate::new(g(POWER2_SET), 2, 0).unwrap()
}

fn upto(s: BTreeSet<Vec<u64>>, limit: u64) -> BTreeSet<Vec<u64>> {
    s.into_iter().filter(|v| v.iter().sum::<u64>() <= limit).collect()
}

#[test]
fn membership_is_one_sided() {
    let p = pow2_set();
    assert!(matches!(member_bounded(&p, &[3, 8], 8).unwrap(), Membership::Yes(e) if e.is_empty()));
    for bound in [8, 12, 16] {
        assert_eq!(member_bounded(&p, &[3, 9], bound).unwrap(), Membership::Unknown);
    }
    assert_eq!(member_bounded(&p, &[3, 8], 7).unwrap(), Membership::Unknown);
    assert!(matches!(member_bounded(&p, &[3], 8), Err(SetError::ArityMismatch(1, 2))));
    let eps = from_gvas(g("dim 2\nstart S\nS -> eps\n"));
    assert!(matches!(member_bounded(&eps, &[0, 0], 0).unwrap(), Membership::Yes(_)));
}

#[test]
fn example_predicate_members() {
    let want: BTreeSet<Vec<u64>> = (0..=4u64).flat_map(|x| (1..=(1u64 << x).min(8)).map(move |y| vec![x, y])).collect();
    assert_eq!(members_bounded(&pow2_set(), 8).unwrap().into_iter().filter(|v| v[0] <= 4).collect::<BTreeSet<_>>(), want);
}

#[test]
fn linear_sets() {
    let p = linear_set(&[0, 1], &[vec![1, 0], vec![1, 1]]).unwrap();
    assert!(members_bounded(&p, 4).unwrap().contains(&vec![2, 2]));
    assert!(!members_bounded(&p, 4).unwrap().contains(&vec![0, 0]));
    assert_eq!(members_bounded(&linear_set(&[3, 1], &[]).unwrap(), 5).unwrap(), [vec![3, 1]].into());
    assert_eq!(members_bounded(&linear_set(&[0], &[vec![2]]).unwrap(), 9).unwrap(), ones(&[0, 2, 4, 6, 8]));
}

#[test]
fn union_product_project() {
    let even = linear_set(&[0], &[vec![2]]).unwrap();
    let odd = linear_set(&[1], &[vec![2]]).unwrap();
    let u = union(&even, &odd).unwrap();
    assert_eq!(members_bounded(&u, 8).unwrap(), ones(&[0, 1, 2, 3, 4, 5, 6, 7, 8]));
    assert!(matches!(union(&even, &pow2_set()), Err(SetError::ArityMismatch(1, 2))));

    let p = pow2_set();
    let sq = product(&p, &p).unwrap();
    assert_eq!(sq.arity(), 4);
    let m = members_bounded(&sq, 4).unwrap();
    assert!(m.contains(&vec![1, 2, 2, 4]));
    assert!(m.iter().all(|v| v[1] >= 1 && v[1] <= 1 << v[0] && v[3] >= 1 && v[3] <= 1 << v[2]));

    let first = project(&p, &[0]).unwrap();
    assert_eq!((first.arity(), first.aux()), (1, 1));
    assert_eq!(members_bounded(&first, 5).unwrap(), ones(&[0, 1, 2, 3, 4, 5]));
    let second = project(&p, &[1]).unwrap();
    assert_eq!(members_bounded(&second, 4).unwrap(), ones(&[1, 2, 3, 4]));
    assert!(matches!(project(&p, &[2]), Err(SetError::InvalidIndex { index: 2, dim: 2 })));
}

/// Checks the budget identity for `g` and `zero` on the grid of side `bound`,
/// using `big` as the internal bound of the transformed grammar.
fn budget_identity(g: &Gvas, zero: &[usize], bound: u64, big: u64) {
    let d = g.dim();
    let gi = from_gvas(budget_zero(g, zero).unwrap());
    assert_eq!(gi.gvas().dim(), d + 1);
    let reach_i = members_bounded(&gi, big).unwrap();
    let reach_g = members_bounded(&from_gvas(g.clone()), big).unwrap();
    for v in &reach_i {
        assert_eq!(v[d], 0, "budget left over in {v:?}");
        assert!(zero.iter().all(|&i| v[i] == 0));
        assert!(reach_g.contains(&v[..d]));
    }
    for x in members_bounded(&from_gvas(g.clone()), bound).unwrap() {
        if zero.iter().all(|&i| x[i] == 0) {
            let mut y = x.clone();
            y.push(0);
            assert!(reach_i.contains(&y), "{x:?} missing");
        }
    }
}

#[test]
fn budget_zero_examples() {
    let eps = g("dim 1\nstart S\nS -> eps\n");
    assert_eq!(members_bounded(&from_gvas(budget_zero(&eps, &[0]).unwrap()), 4).unwrap(), [vec![0, 0]].into());
    let inc = g("dim 1\nstart S\nS -> (1)\n");
    assert!(members_bounded(&from_gvas(budget_zero(&inc, &[0]).unwrap()), 6).unwrap().is_empty());
    assert!(matches!(budget_zero(&inc, &[1]), Err(SetError::InvalidIndex { index: 1, dim: 1 })));

    let p = g(POWER2_SET);
    let none = members_bounded(&from_gvas(budget_zero(&p, &[]).unwrap()), 6).unwrap();
    let plain = members_bounded(&from_gvas(p.clone()), 6).unwrap();
    assert_eq!(none, plain.iter().map(|v| [v.as_slice(), &[0]].concat()).collect());
}

#[test]
fn budget_identity_on_test_grammars() {
    budget_identity(&g(POWER2_SET), &[0], 4, 8);
    budget_identity(&g(POWER2_SET), &[1], 4, 8);
    let shuffle = g("dim 2\nstart S\nS -> (1,0) S (0,1) | (2,2) S (-1,-1) | (0,-1) S (1,0) | eps\n");
    budget_identity(&shuffle, &[0], 3, 9);
    budget_identity(&shuffle, &[1], 3, 9);
    budget_identity(&shuffle, &[0, 1], 3, 9);
}

#[test]
fn intersections() {
    let two = linear_set(&[0], &[vec![2]]).unwrap();
    let three = linear_set(&[0], &[vec![3]]).unwrap();
    let both = intersect(&two, &three).unwrap();
    assert_eq!(upto(members_bounded(&both, 22).unwrap(), 11), ones(&[0, 6]));
    assert!(both.sufficient_bound(6) >= 12);

    let same = intersect(&two, &two).unwrap();
    assert_eq!(upto(members_bounded(&same, 16).unwrap(), 8), ones(&[0, 2, 4, 6, 8]));

    let odd = linear_set(&[1], &[vec![2]]).unwrap();
    assert!(members_bounded(&intersect(&two, &odd).unwrap(), 16).unwrap().is_empty());
    assert!(matches!(intersect(&two, &pow2_set()), Err(SetError::ArityMismatch(1, 2))));
}

#[test]
fn intersection_with_a_superset() {
    let p = pow2_set();
    let pos = linear_set(&[0, 1], &[vec![1, 0], vec![0, 1]]).unwrap();
    let r = intersect(&p, &pos).unwrap();
    let got = members_bounded(&r, 6).unwrap();
    assert!(got.iter().all(|v| v[1] >= 1 && v[1] <= 1 << v[0]));
    assert_eq!(upto(got, 3), upto(members_bounded(&p, 6).unwrap(), 3));
}

#[test]
fn resetting() {
    let p = pow2_set();
    let r = make_resetting(&p).unwrap();
    assert_eq!(r.arity(), 2);
    assert!(r.gvas().actions().iter().all(|a| a[..2].iter().all(|&v| v >= 0)));
    let got = members_bounded(&r, 8).unwrap();
    assert_eq!(upto(got, 4), upto(members_bounded(&p, 8).unwrap(), 4));

    let lin = linear_set(&[1], &[vec![3]]).unwrap();
    let r = make_resetting(&lin).unwrap();
    assert_eq!(upto(members_bounded(&r, 8).unwrap(), 4), ones(&[1, 4]));
}

/// Sums of members of `base` within `bound`, by saturation.
fn closure(base: &BTreeSet<Vec<u64>>, bound: u64) -> BTreeSet<Vec<u64>> {
    let mut out: BTreeSet<Vec<u64>> = [vec![0; base.iter().next().map_or(1, Vec::len)]].into();
    loop {
        let next: BTreeSet<Vec<u64>> = out
            .iter()
            .flat_map(|a| base.iter().map(move |b| a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<u64>>()))
            .filter(|v| v.iter().all(|&x| x <= bound))
            .collect();
        let before = out.len();
        out.extend(next);
        if out.len() == before {
            return out;
        }
    }
}

#[test]
fn periodic_hulls() {
    let two = linear_set(&[2], &[]).unwrap();
    let h = periodic_hull(&two).unwrap();
    assert_eq!(upto(members_bounded(&h, 8).unwrap(), 8), ones(&[0, 2, 4, 6, 8]));

    let empty = DefinablePredicate::new(g("dim 1\nstart S\nS -> S (1)\n"), 1, 0).unwrap();
    assert_eq!(members_bounded(&periodic_hull(&empty).unwrap(), 6).unwrap(), ones(&[0]));

    let five = union(&linear_set(&[5], &[]).unwrap(), &linear_set(&[3], &[]).unwrap()).unwrap();
    let h = periodic_hull(&five).unwrap();
    assert_eq!(upto(members_bounded(&h, 10).unwrap(), 10), closure(&ones(&[3, 5]), 10));
}

#[test]
fn compositions() {
    let succ = linear_set(&[0, 1], &[vec![1, 1]]).unwrap();
    let two = compose_relations(&succ, &succ).unwrap();
    assert_eq!(two.arity(), 2);
    let got = members_bounded(&two, 6).unwrap();
    assert!(got.iter().all(|v| v[1] == v[0] + 2));
    assert!((0..=1).all(|x| got.contains(&vec![x, x + 2])));

    let double = linear_set(&[0, 0], &[vec![1, 2]]).unwrap();
    let four = compose_relations(&double, &double).unwrap();
    let got = members_bounded(&four, 8).unwrap();
    assert!(got.iter().all(|v| v[1] == 4 * v[0]));
    assert!(got.contains(&vec![0, 0]) && got.contains(&vec![1, 4]));

    let id = linear_set(&[0, 0], &[vec![1, 1]]).unwrap();
    let same = compose_relations(&succ, &id).unwrap();
    let got = members_bounded(&same, 6).unwrap();
    assert!(got.iter().all(|v| v[1] == v[0] + 1));
    assert!((0..=2).all(|x| got.contains(&vec![x, x + 1])));

    assert!(matches!(compose_relations(&linear_set(&[0], &[]).unwrap(), &linear_set(&[0], &[]).unwrap()), Err(SetError::ArityMismatch(1, 1))));
}

#[test]
fn transformers_emit_valid_grammars() {
    let p = pow2_set();
    let lin = linear_set(&[1], &[vec![2]]).unwrap();
    let all = [
        union(&lin, &lin).unwrap(),
        product(&p, &lin).unwrap(),
        project(&p, &[1]).unwrap(),
        intersect(&lin, &lin).unwrap(),
        make_resetting(&p).unwrap(),
        periodic_hull(&lin).unwrap(),
        compose_relations(&p, &p).unwrap(),
    ];
    for q in all {
        assert!(validate(q.gvas()).iter().all(|d| !d.is_fatal()));
        assert_eq!(q.gvas().dim(), q.arity() + q.aux());
    }
}
