//! Plain-text formats: grammars, predicates, PVAS descriptions, flow trees,
//! configurations and ordinals. Every printer here is inverted by the
//! matching parser.
//!
//! ```text
//! # arity 1 aux 0        (predicate files only)
//! dim 2
//! start S
//! S -> S S | (-1,2) | (2,-1)
//! T -> eps
//! ```

use std::fmt::{self, Write as _};

use crate::flowtree::{FlowTree, Transition};
use crate::grammar::{Action, Config, Gvas, GvasBuilder, Symbol};
use crate::ordinal::Ordinal;
use crate::pvas::{Pvas, PvasAction, StackSym};
use crate::setops::DefinablePredicate;

/// A syntax error with a 1-based source position and the tokens that would
/// have been accepted there.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: expected ", self.line, self.col)?;
        match self.expected.as_slice() {
            [one] => f.write_str(one)?,
            many => write!(f, "one of {}", many.join(", "))?,
        }
        write!(f, ", found {}", self.found)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    Comma,
    Arrow,
    Pipe,
    Slash,
    Plus,
    Star,
    Caret,
    Newline,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(i) => write!(f, "`{i}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::Newline => f.write_str("end of line"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    for (li, line) in src.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line: li + 1, col });
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if is_ident_start(c) {
                let j = (i..chars.len()).find(|&j| !is_ident_char(chars[j])).unwrap_or(chars.len());
                push(&mut out, Tok::Ident(chars[i..j].iter().collect()));
                i = j;
                continue;
            }
            let digits_from = |k: usize| (k..chars.len()).find(|&j| !chars[j].is_ascii_digit()).unwrap_or(chars.len());
            if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
                let j = digits_from(i + 1);
                let text: String = chars[i..j].iter().collect();
                let v = text.parse::<i64>().map_err(|_| ParseError {
                    line: li + 1,
                    col,
                    expected: vec!["integer in range".into()],
                    found: format!("`{text}`"),
                })?;
                push(&mut out, Tok::Int(v));
                i = j;
                continue;
            }
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '|' => Tok::Pipe,
                '/' => Tok::Slash,
                '+' => Tok::Plus,
                '*' => Tok::Star,
                '^' => Tok::Caret,
                '-' if chars.get(i + 1) == Some(&'>') => {
                    i += 1;
                    Tok::Arrow
                }
                '→' => Tok::Arrow,
                _ => {
                    return Err(ParseError { line: li + 1, col, expected: vec!["a token".into()], found: format!("`{c}`") });
                }
            };
            push(&mut out, tok);
            i += 1;
        }
        out.push(Spanned { tok: Tok::Newline, line: li + 1, col: chars.len() + 1 });
    }
    let line = src.lines().count().max(1);
    out.push(Spanned { tok: Tok::Eof, line, col: src.lines().last().map_or(1, |l| l.chars().count() + 1) });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    skip_newlines: bool,
}

impl Parser {
    fn new(src: &str, skip_newlines: bool) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(src)?, pos: 0, skip_newlines })
    }

    fn skip(&mut self) {
        if self.skip_newlines {
            while self.toks[self.pos].tok == Tok::Newline {
                self.pos += 1;
            }
        }
    }

    fn peek(&mut self) -> &Tok {
        self.skip();
        &self.toks[self.pos].tok
    }

    fn next(&mut self) -> Tok {
        self.skip();
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&mut self, expected: &[&str]) -> ParseError {
        self.skip();
        let s = &self.toks[self.pos];
        ParseError { line: s.line, col: s.col, expected: expected.iter().map(|e| e.to_string()).collect(), found: s.tok.to_string() }
    }

    /// Error positioned at the previously consumed token.
    fn error_prev(&self, expected: &str, found: String) -> ParseError {
        let s = &self.toks[self.pos.saturating_sub(1)];
        ParseError { line: s.line, col: s.col, expected: vec![expected.into()], found }
    }

    fn expect(&mut self, t: Tok, name: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.next();
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            _ => Err(self.error(&[what])),
        }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        match *self.peek() {
            Tok::Int(v) => {
                self.next();
                Ok(v)
            }
            _ => Err(self.error(&["integer"])),
        }
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        let v = self.int()?;
        u64::try_from(v).map_err(|_| self.error_prev("natural number", format!("`{v}`")))
    }

    /// A tuple that must have `dim` entries; the error points at its `(`.
    fn sized_tuple(&mut self, dim: usize) -> Result<Vec<i64>, ParseError> {
        self.skip();
        let (line, col) = (self.toks[self.pos].line, self.toks[self.pos].col);
        let v = self.tuple()?;
        if v.len() != dim {
            return Err(ParseError { line, col, expected: vec![format!("tuple of length {dim}")], found: format!("tuple of length {}", v.len()) });
        }
        Ok(v)
    }

    /// `(i, j, ...)`, possibly empty.
    fn tuple(&mut self) -> Result<Vec<i64>, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut v = Vec::new();
        if *self.peek() == Tok::RParen {
            self.next();
            return Ok(v);
        }
        loop {
            v.push(self.int()?);
            match self.next() {
                Tok::Comma => continue,
                Tok::RParen => return Ok(v),
                _ => {
                    self.pos -= 1;
                    return Err(self.error(&["`,`", "`)`"]));
                }
            }
        }
    }

    fn end_of_line(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Newline | Tok::Eof => {
                self.next();
                Ok(())
            }
            _ => Err(self.error(&["end of line"])),
        }
    }

    fn blank_lines(&mut self) {
        while self.toks[self.pos].tok == Tok::Newline {
            self.pos += 1;
        }
    }

    fn at_eof(&mut self) -> bool {
        self.blank_lines();
        self.toks[self.pos].tok == Tok::Eof
    }
}

enum RawSym {
    Nt(String),
    /// An action together with the position of its `(`.
    Act(Vec<i64>, usize, usize),
}

/// Parses the grammar text format.
pub fn parse_gvas(src: &str) -> Result<Gvas, ParseError> {
    let mut p = Parser::new(src, false)?;
    let mut dim = None;
    let mut start = None;
    let mut rules: Vec<(String, Vec<RawSym>)> = Vec::new();
    while !p.at_eof() {
        let head = p.ident("`dim`, `start` or a rule")?;
        match head.as_str() {
            "dim" if dim.is_none() && *p.peek() != Tok::Arrow => {
                dim = Some(p.nat()? as usize);
            }
            "start" if start.is_none() && *p.peek() != Tok::Arrow => {
                start = Some(p.ident("start nonterminal")?);
            }
            _ => {
                if head == "eps" {
                    return Err(p.error_prev("nonterminal", "`eps`".into()));
                }
                p.expect(Tok::Arrow, "`->`")?;
                loop {
                    let mut rhs = Vec::new();
                    loop {
                        match p.peek().clone() {
                            Tok::Ident(s) if s == "eps" || s == "ε" => {
                                p.next();
                                if !rhs.is_empty() {
                                    return Err(p.error_prev("symbol", "`eps`".into()));
                                }
                                break;
                            }
                            Tok::Ident(s) => {
                                p.next();
                                rhs.push(RawSym::Nt(s));
                            }
                            Tok::LParen => {
                                let (line, col) = (p.toks[p.pos].line, p.toks[p.pos].col);
                                rhs.push(RawSym::Act(p.tuple()?, line, col));
                            }
                            _ if rhs.is_empty() => return Err(p.error(&["symbol", "`eps`"])),
                            _ => break,
                        }
                    }
                    rules.push((head.clone(), rhs));
                    if *p.peek() == Tok::Pipe {
                        p.next();
                    } else {
                        break;
                    }
                }
            }
        }
        p.end_of_line()?;
    }
    let dim = dim.ok_or_else(|| p.error(&["`dim`"]))?;
    let start = start.ok_or_else(|| p.error(&["`start`"]))?;
    let mut b = GvasBuilder::new(dim, &start);
    for (lhs, rhs) in rules {
        let l = b.nt(&lhs);
        let mut w = Vec::with_capacity(rhs.len());
        for s in rhs {
            w.push(match s {
                RawSym::Nt(n) => b.n(&n),
                RawSym::Act(v, line, col) if v.len() != dim => {
                    return Err(ParseError {
                        line,
                        col,
                        expected: vec![format!("tuple of length {dim}")],
                        found: format!("tuple of length {}", v.len()),
                    });
                }
                RawSym::Act(v, ..) => b.a(v),
            });
        }
        b.rule(l, w);
    }
    Ok(b.build())
}

/// Prints a grammar; consecutive rules with the same left side share a line.
pub fn print_gvas(g: &Gvas) -> String {
    let mut out = format!("dim {}\nstart {}\n", g.dim(), g.nt_name(g.start()));
    let mut prev = None;
    for r in g.rules() {
        if prev == Some(r.lhs) {
            out.push_str(" | ");
        } else {
            if prev.is_some() {
                out.push('\n');
            }
            write!(out, "{} -> ", g.nt_name(r.lhs)).unwrap();
        }
        out.push_str(&g.word_to_string(&r.rhs));
        prev = Some(r.lhs);
    }
    if prev.is_some() {
        out.push('\n');
    }
    out
}

/// Parses a predicate file: a grammar preceded by a `# arity N aux L` header.
pub fn parse_predicate(src: &str) -> Result<DefinablePredicate, ParseError> {
    let (line, arity, aux) = src
        .lines()
        .enumerate()
        .find_map(|(i, l)| {
            let w: Vec<&str> = l.trim_start_matches('#').split_whitespace().collect();
            let header = l.trim_start().starts_with('#') && w.len() == 4 && w[0] == "arity" && w[2] == "aux";
            header.then(|| Some((i + 1, w[1].parse::<usize>().ok()?, w[3].parse::<usize>().ok()?)))
        })
        .flatten()
        .ok_or_else(|| ParseError { line: 1, col: 1, expected: vec!["`# arity N aux L` header".into()], found: "no header".into() })?;
    let g = parse_gvas(src)?;
    DefinablePredicate::new(g, arity, aux).map_err(|e| ParseError {
        line,
        col: 1,
        expected: vec!["arity + aux equal to the grammar dimension".into()],
        found: e.to_string(),
    })
}

pub fn print_predicate(p: &DefinablePredicate) -> String {
    format!("# arity {} aux {}\n{}", p.arity(), p.aux(), print_gvas(p.gvas()))
}

/// Parses the PVAS text format (`dim`, `stack`, then `action pop / push / delta` lines).
pub fn parse_pvas(src: &str) -> Result<Pvas, ParseError> {
    let mut p = Parser::new(src, false)?;
    let mut dim = None;
    let mut stack: Option<Vec<String>> = None;
    let mut actions = Vec::new();
    while !p.at_eof() {
        let head = p.ident("`dim`, `stack` or `action`")?;
        match head.as_str() {
            "dim" => dim = Some(p.nat()? as usize),
            "stack" => {
                let mut names = Vec::new();
                while let Tok::Ident(s) = p.peek().clone() {
                    p.next();
                    names.push(s);
                }
                stack = Some(names);
            }
            "action" => {
                let names = stack.as_ref().ok_or_else(|| p.error_prev("`stack` line before actions", "`action`".into()))?;
                let dim = dim.ok_or_else(|| p.error_prev("`dim` line before actions", "`action`".into()))?;
                let mut words = Vec::new();
                for _ in 0..2 {
                    let mut w = Vec::new();
                    loop {
                        match p.peek().clone() {
                            Tok::Ident(s) if s == "_" => {
                                p.next();
                            }
                            Tok::Ident(s) => {
                                p.next();
                                let ix = names.iter().position(|n| *n == s).ok_or_else(|| p.error_prev("declared stack symbol", format!("`{s}`")))?;
                                w.push(StackSym(ix as u32));
                            }
                            Tok::Slash => break,
                            _ => return Err(p.error(&["stack symbol", "`_`", "`/`"])),
                        }
                    }
                    p.expect(Tok::Slash, "`/`")?;
                    words.push(w);
                }
                let delta = p.sized_tuple(dim)?;
                let push = words.pop().unwrap();
                let pop = words.pop().unwrap();
                actions.push(PvasAction { pop, push, delta: Action(delta) });
            }
            _ => return Err(p.error_prev("`dim`, `stack` or `action`", format!("`{head}`"))),
        }
        p.end_of_line()?;
    }
    let dim = dim.ok_or_else(|| p.error(&["`dim`"]))?;
    let stack = stack.ok_or_else(|| p.error(&["`stack`"]))?;
    Ok(Pvas::new(dim, stack, actions))
}

pub fn print_pvas(p: &Pvas) -> String {
    let mut out = format!("dim {}\nstack {}\n", p.dim(), p.stack_alphabet().join(" "));
    for a in p.actions() {
        let w = |w: &[StackSym]| if w.is_empty() { "_".to_string() } else { p.word_to_string(w) };
        writeln!(out, "action {} / {} / {}", w(&a.pop), w(&a.push), a.delta).unwrap();
    }
    out
}

/// A stack word such as `S S` or `_`.
pub fn parse_stack_word(p: &Pvas, src: &str) -> Result<Vec<StackSym>, ParseError> {
    let mut out = Vec::new();
    for (i, w) in src.split_whitespace().enumerate() {
        if w == "_" {
            continue;
        }
        let ix = p.symbol(w).ok_or_else(|| ParseError { line: 1, col: i + 1, expected: vec!["stack symbol".into()], found: format!("`{w}`") })?;
        out.push(ix);
    }
    Ok(out)
}

fn print_config_into(out: &mut String, c: &Config) {
    if c.len() == 1 {
        write!(out, "{}", c[0]).unwrap();
    } else {
        write!(out, "{c}").unwrap();
    }
}

/// Prints a flow tree as `(LABEL CHILD*)` with `LABEL = (src symbol dst)`.
/// One-dimensional configurations are written as bare numbers.
pub fn print_tree(g: &Gvas, t: &FlowTree) -> String {
    fn go(g: &Gvas, t: &FlowTree, out: &mut String) {
        let l = t.label();
        out.push_str("((");
        print_config_into(out, &l.src);
        write!(out, " {} ", g.symbol_name(l.sym)).unwrap();
        print_config_into(out, &l.dst);
        out.push(')');
        for c in t.children() {
            out.push(' ');
            go(g, c, out);
        }
        out.push(')');
    }
    let mut out = String::new();
    go(g, t, &mut out);
    out
}

/// Parses a flow tree in the format written by [`print_tree`]. The symbols
/// are resolved against `g`; the tree itself is not validated.
pub fn parse_tree(g: &Gvas, src: &str) -> Result<FlowTree, ParseError> {
    let mut p = Parser::new(src, true)?;
    let t = tree_rec(g, &mut p)?;
    if !p.at_eof_any() {
        return Err(p.error(&["end of input"]));
    }
    Ok(t)
}

impl Parser {
    fn at_eof_any(&mut self) -> bool {
        *self.peek() == Tok::Eof
    }

    fn config(&mut self, dim: usize) -> Result<Config, ParseError> {
        let v = match self.peek().clone() {
            Tok::Int(_) => vec![self.int()?],
            Tok::LParen => self.tuple()?,
            _ => return Err(self.error(&["configuration"])),
        };
        if v.len() != dim {
            return Err(self.error_prev(&format!("configuration of dimension {dim}"), format!("{} entries", v.len())));
        }
        v.into_iter()
            .map(|x| u64::try_from(x).ok())
            .collect::<Option<Vec<_>>>()
            .map(Config)
            .ok_or_else(|| self.error_prev("natural numbers", "a negative entry".into()))
    }
}

fn tree_rec(g: &Gvas, p: &mut Parser) -> Result<FlowTree, ParseError> {
    p.expect(Tok::LParen, "`(`")?;
    p.expect(Tok::LParen, "`(` opening a label")?;
    let src = p.config(g.dim())?;
    let sym = match p.peek().clone() {
        Tok::Ident(s) => {
            p.next();
            Symbol::Nt(g.nt_by_name(&s).ok_or_else(|| p.error_prev("nonterminal of the grammar", format!("`{s}`")))?)
        }
        Tok::LParen => {
            let v = Action(p.tuple()?);
            Symbol::Act(g.action_id(&v).ok_or_else(|| p.error_prev("action of the grammar", v.to_string()))?)
        }
        _ => return Err(p.error(&["symbol"])),
    };
    let dst = p.config(g.dim())?;
    p.expect(Tok::RParen, "`)` closing a label")?;
    let mut kids = Vec::new();
    while *p.peek() == Tok::LParen {
        kids.push(tree_rec(g, p)?);
    }
    p.expect(Tok::RParen, "`)`")?;
    Ok(FlowTree::new(Transition { src, sym, dst }, kids))
}

/// Parses a configuration: `(a,b,...)`, or a bare number in dimension 1.
pub fn parse_config(src: &str, dim: usize) -> Result<Config, ParseError> {
    let mut p = Parser::new(src, true)?;
    let c = p.config(dim)?;
    if !p.at_eof_any() {
        return Err(p.error(&["end of input"]));
    }
    Ok(c)
}

/// Parses an action vector `(a,b,...)`.
pub fn parse_action(src: &str) -> Result<Action, ParseError> {
    let mut p = Parser::new(src, true)?;
    let v = p.tuple()?;
    if !p.at_eof_any() {
        return Err(p.error(&["end of input"]));
    }
    Ok(Action(v))
}

/// Parses `w^K*C + ... + w*C + C`; exponents must strictly decrease.
pub fn parse_ordinal(src: &str) -> Result<Ordinal, ParseError> {
    let mut p = Parser::new(src, true)?;
    let mut coeffs: Vec<u64> = Vec::new();
    let mut last_exp: Option<u64> = None;
    loop {
        let (exp, c) = match p.peek().clone() {
            Tok::Int(_) => (0, p.nat()?),
            Tok::Ident(s) if s == "w" || s == "ω" => {
                p.next();
                let e = if *p.peek() == Tok::Caret {
                    p.next();
                    p.nat()?
                } else {
                    1
                };
                let c = if *p.peek() == Tok::Star {
                    p.next();
                    p.nat()?
                } else {
                    1
                };
                (e, c)
            }
            _ => return Err(p.error(&["`w`", "natural number"])),
        };
        if last_exp.is_some_and(|l| exp >= l) {
            return Err(p.error_prev("strictly decreasing exponents", format!("exponent {exp}")));
        }
        if c == 0 && (last_exp.is_some() || exp > 0 || *p.peek() == Tok::Plus) {
            return Err(p.error_prev("nonzero coefficient", "`0`".into()));
        }
        if exp > 4096 {
            return Err(p.error_prev("exponent at most 4096", format!("{exp}")));
        }
        if coeffs.len() <= exp as usize {
            coeffs.resize(exp as usize + 1, 0);
        }
        coeffs[exp as usize] = c;
        last_exp = Some(exp);
        match p.peek() {
            Tok::Plus => {
                p.next();
            }
            Tok::Eof => break,
            _ => return Err(p.error(&["`+`", "end of input"])),
        }
    }
    Ok(Ordinal::from_coeffs(coeffs))
}
