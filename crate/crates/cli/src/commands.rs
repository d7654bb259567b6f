use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Result};
use num_bigint::BigUint;
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use gvas::fgcomputer::{self, SafetyChecker, SafetySymbol};
use gvas::flowtree::{self, TreeEnumerator};
use gvas::grammar::{validate, Config};
use gvas::ordinal::{FastGrowing, Ordinal};
use gvas::pvas;
use gvas::reach::bounded_reach;
use gvas::setops::{self, DefinablePredicate, Membership};
use gvas::text::{parse_stack_word, print_gvas, print_predicate, print_pvas, print_tree};
use gvas::weakcomp::{self, Oracle, WeakComputer};

use crate::exit::{Usage, DOMAIN};
use crate::{input, Cli, Command, Format, SetOp};

/// Bumped whenever a JSON report changes shape.
const SCHEMA_VERSION: u64 = 1;

pub struct Output {
    pub text: String,
    pub status: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, status: 0 }
    }

    fn with_status(text: String, ok: bool) -> Self {
        Output { text, status: if ok { 0 } else { DOMAIN } }
    }
}

fn lines<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string() + "\n").collect()
}

fn report(format: Format, kind: &str, mut body: Value, text: String) -> String {
    match format {
        Format::Text => text,
        Format::Json => {
            let obj = body.as_object_mut().expect("report bodies are objects");
            obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
            obj.insert("report".into(), json!(kind));
            body.to_string() + "\n"
        }
    }
}

fn default_d(alpha: &Ordinal, d: Option<usize>) -> usize {
    d.unwrap_or(alpha.width().max(1))
}

pub fn run(cli: &Cli) -> Result<Output> {
    let fmt = cli.format;
    match &cli.command {
        Command::Validate(a) => {
            let g = input::gvas(&a.grammar)?;
            let defects = validate(&g);
            let fatal = defects.iter().any(|d| d.is_fatal());
            let text = if defects.is_empty() { "ok\n".to_string() } else { lines(&defects) };
            let body = json!({ "ok": !fatal, "defects": defects.iter().map(|d| d.to_string()).collect::<Vec<_>>() });
            Ok(Output::with_status(report(fmt, "validate", body, text), !fatal))
        }
        Command::Reach { grammar, bound, from, symbol } => {
            let g = input::gvas(grammar)?;
            let sym = input::symbol(&g, symbol.as_deref())?;
            let pairs: Vec<(Config, Config)> = match from {
                Some(x) => {
                    let x = input::config(x, g.dim())?;
                    let t = gvas::reach::bounded_reach_from(&g, *bound, nt_of(sym)?, std::slice::from_ref(&x))?;
                    let mut ys = t.targets(sym, &x);
                    ys.sort();
                    ys.into_iter().map(|y| (x.clone(), y)).collect()
                }
                None => {
                    let t = bounded_reach(&g, *bound)?;
                    let mut v = t.entries(nt_of(sym)?);
                    v.sort();
                    v
                }
            };
            let text = match from {
                Some(_) => lines(pairs.iter().map(|(_, y)| y)),
                None => lines(pairs.iter().map(|(x, y)| format!("{x} -> {y}"))),
            };
            let body = json!({
                "symbol": g.symbol_name(sym),
                "bound": bound,
                "pairs": pairs.iter().map(|(x, y)| json!({ "from": x.0, "to": y.0 })).collect::<Vec<_>>(),
            });
            Ok(Output::ok(report(fmt, "reach", body, text)))
        }
        Command::Enumerate { grammar, bound, max_nodes, symbol, from, sample } => {
            let g = input::gvas(grammar)?;
            let sym = input::symbol(&g, symbol.as_deref())?;
            let mut e = TreeEnumerator::new(&g, *bound);
            let mut trees = match from {
                Some(x) => e.from(sym, &input::config(x, g.dim())?, *max_nodes),
                None => e.all(sym, *max_nodes),
            };
            if let Some(k) = sample {
                let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                trees = trees.choose_multiple(&mut rng, *k).cloned().collect();
            }
            let printed: Vec<String> = trees.iter().map(|t| print_tree(&g, t)).collect();
            let body = json!({ "count": printed.len(), "trees": printed });
            Ok(Output::ok(report(fmt, "enumerate", body, lines(&printed))))
        }
        Command::WitnessTree { grammar, bound, from, to, symbol } => {
            let g = input::gvas(grammar)?;
            let sym = input::symbol(&g, symbol.as_deref())?;
            let (x, y) = (input::config(from, g.dim())?, input::config(to, g.dim())?);
            let t = gvas::reach::bounded_reach_from(&g, *bound, nt_of(sym)?, std::slice::from_ref(&x))?;
            match flowtree::witness_tree(&t, &x, sym, &y) {
                Some(tree) => Ok(Output::ok(print_tree(&g, &tree) + "\n")),
                None => Ok(Output::with_status(format!("{x} -{}-> {y} not reachable at bound {bound}\n", g.symbol_name(sym)), false)),
            }
        }
        Command::Witness { alpha, n, d, cap } => {
            let a = input::ordinal(alpha)?;
            let (g, t) = fgcomputer::completeness_witness(&a, *n, default_d(&a, *d), *cap)?;
            Ok(Output::ok(print_tree(&g, &t) + "\n"))
        }
        Command::Leq { grammar, s, t } => {
            let g = input::gvas(grammar)?;
            let (s, t) = (input::tree(&g, s)?, input::tree(&g, t)?);
            let r = flowtree::leq_g(&s, &t);
            let text = match &r {
                Some((d, w)) => format!("related with lifting {d}\nanchor {}\n", w.anchor),
                None => "not related\n".to_string(),
            };
            let body = json!({
                "related": r.is_some(),
                "lifting": r.as_ref().map(|(d, _)| json!({ "pre": d.pre.0, "post": d.post.0 })),
            });
            Ok(Output::with_status(report(fmt, "leq", body, text), r.is_some()))
        }
        Command::Amalgamate { grammar, s, t1, t2 } => {
            let g = input::gvas(grammar)?;
            let (s, t1, t2) = (input::tree(&g, s)?, input::tree(&g, t1)?, input::tree(&g, t2)?);
            let (Some((_, w1)), Some((_, w2))) = (flowtree::leq_g(&s, &t1), flowtree::leq_g(&s, &t2)) else {
                return Ok(Output::with_status("s is not below both trees\n".into(), false));
            };
            let u = flowtree::amalgamate(&s, &t1, &w1, &t2, &w2)?;
            Ok(Output::ok(print_tree(&g, &u) + "\n"))
        }
        Command::ToPvas(a) => Ok(Output::ok(print_pvas(&pvas::gvas_to_pvas(&input::gvas(&a.grammar)?)))),
        Command::FromPvas { pvas: path, init } => {
            let p = input::pvas(path)?;
            let w = parse_stack_word(&p, init)?;
            Ok(Output::ok(print_gvas(&pvas::pvas_to_gvas(&p, &w)?)))
        }
        Command::Setop(op) => setop(op),
        Command::Member { predicate, x, bound } => {
            let p = input::predicate(predicate)?;
            let x = input::config(x, p.arity())?;
            let m = setops::member_bounded(&p, &x.0, *bound)?;
            let (text, body) = match &m {
                Membership::Yes(e) if e.is_empty() => ("yes\n".to_string(), json!({ "member": true, "aux": e })),
                Membership::Yes(e) => (format!("yes with aux {}\n", Config(e.clone())), json!({ "member": true, "aux": e })),
                Membership::Unknown => ("unknown\n".to_string(), json!({ "member": Value::Null })),
            };
            Ok(Output::with_status(report(fmt, "member", body, text), matches!(m, Membership::Yes(_))))
        }
        Command::GenFalpha { alpha, d, base } => {
            let a = input::ordinal(alpha)?;
            let d = default_d(&a, *d);
            let g = if *base { fgcomputer::build_gd(d)? } else { fgcomputer::build_gfalpha(&a, d)? };
            Ok(Output::ok(print_gvas(&g)))
        }
        Command::FalphaEval { alpha, n, cap } => {
            let a = input::ordinal(alpha)?;
            let cap = BigUint::from_str(cap).map_err(|_| Usage(format!("cap `{cap}` is not a natural number")))?;
            let v = FastGrowing::new(cap).eval(&a, &BigUint::from(*n))?;
            let body = json!({ "alpha": a.to_string(), "n": n, "value": v.to_string() });
            Ok(Output::ok(report(fmt, "falpha-eval", body, format!("{v}\n"))))
        }
        Command::Safety { d, bound, symbol } => safety(fmt, *d, *bound, symbol.as_deref()),
        Command::CheckWeak { grammar, oracle, n, bound, predicate } => {
            let oracle = parse_oracle(oracle)?;
            let w = if *predicate {
                weakcomp::definable_to_wc(&input::predicate(grammar)?, oracle)?
            } else {
                WeakComputer::new(input::gvas(grammar)?, oracle)?
            };
            check_weak(fmt, &w, n, *bound)
        }
        Command::Dot { grammar, tree } => {
            let g = input::gvas(grammar)?;
            Ok(Output::ok(flowtree::to_dot(&g, &input::tree(&g, tree)?)))
        }
    }
}

fn nt_of(s: gvas::Symbol) -> Result<gvas::grammar::NtId> {
    match s {
        gvas::Symbol::Nt(n) => Ok(n),
        gvas::Symbol::Act(_) => bail!(Usage("expected a nonterminal".into())),
    }
}

fn setop(op: &SetOp) -> Result<Output> {
    let two = |p: &Path, q: &Path| -> Result<(DefinablePredicate, DefinablePredicate)> { Ok((input::predicate(p)?, input::predicate(q)?)) };
    let out = match op {
        SetOp::Union { p, q } => two(p, q).and_then(|(p, q)| Ok(setops::union(&p, &q)?))?,
        SetOp::Product { p, q } => two(p, q).and_then(|(p, q)| Ok(setops::product(&p, &q)?))?,
        SetOp::Intersect { p, q } => two(p, q).and_then(|(p, q)| Ok(setops::intersect(&p, &q)?))?,
        SetOp::Compose { p, q } => two(p, q).and_then(|(p, q)| Ok(setops::compose_relations(&p, &q)?))?,
        SetOp::Project { p, keep } => setops::project(&input::predicate(p)?, keep)?,
        SetOp::Hull { p } => setops::periodic_hull(&input::predicate(p)?)?,
        SetOp::Resetting { p } => setops::make_resetting(&input::predicate(p)?)?,
        SetOp::BudgetZero { grammar, zero } => return Ok(Output::ok(print_gvas(&setops::budget_zero(&input::gvas(grammar)?, zero)?))),
    };
    Ok(Output::ok(print_predicate(&out)))
}

fn parse_oracle(s: &str) -> Result<Oracle> {
    match s {
        "pow2" => Ok(Oracle::Pow2),
        "identity" => Ok(Oracle::Identity),
        _ => match s.strip_prefix("falpha:") {
            Some(a) => Ok(Oracle::FAlpha(input::ordinal(a)?)),
            None => bail!(Usage(format!("unknown oracle `{s}`; expected pow2, identity or falpha:<ordinal>"))),
        },
    }
}

fn safety(fmt: Format, d: usize, bound: u64, symbol: Option<&str>) -> Result<Output> {
    let checker = SafetyChecker::new(d, bound)?;
    let symbols = match symbol {
        Some(s) => vec![SafetySymbol::from_str(s).map_err(Usage)?],
        None => checker.symbols(),
    };
    let mut text = format!("{:<8} {:>10} {:>10} {:>10}\n", "symbol", "entries", "max_slack", "violations");
    let mut rows = Vec::new();
    let mut clean = true;
    for s in symbols {
        let r = checker.check(s)?;
        let slack = r.max_slack.map_or("-".to_string(), |v| v.to_string());
        writeln!(text, "{:<8} {:>10} {:>10} {:>10}", s.to_string(), r.entries_checked, slack, r.violations.len()).unwrap();
        clean &= r.violations.is_empty();
        rows.push(json!({
            "symbol": s.to_string(),
            "entries": r.entries_checked,
            "max_slack": r.max_slack,
            "min_slack": r.min_slack,
            "violations": r.violations.iter().map(|(x, y)| json!({ "from": x.0, "to": y.0 })).collect::<Vec<_>>(),
        }));
    }
    let body = json!({ "d": d, "bound": bound, "symbols": rows });
    Ok(Output::with_status(report(fmt, "safety", body, text), clean))
}

fn check_weak(fmt: Format, w: &WeakComputer, inputs: &[u64], bound: u64) -> Result<Output> {
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut good = true;
    for &n in inputs {
        let co = weakcomp::check_co(w, n, bound)?;
        let sa = weakcomp::check_sa(w, n, bound)?;
        let f = w.oracle().eval(n, bound)?;
        let ok = co.is_some() && sa.violations.is_empty();
        good &= ok;
        let shown = co.as_ref().map_or("none".to_string(), |e| e.target.to_string());
        writeln!(text, "n={n} f={f} co={shown} max={} violations={}", sa.max_output, sa.violations.len()).unwrap();
        rows.push(json!({
            "n": n,
            "f": f,
            "complete": co.is_some(),
            "target": co.map(|e| e.target.0),
            "max_output": sa.max_output,
            "violations": sa.violations.iter().map(|c| c.0.clone()).collect::<Vec<_>>(),
        }));
    }
    let body = json!({ "bound": bound, "inputs": rows });
    Ok(Output::with_status(report(fmt, "check-weak", body, text), good))
}
