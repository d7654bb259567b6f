use std::io::Read;
use std::path::Path;

use anyhow::{Context, Result};
use gvas::flowtree::FlowTree;
use gvas::grammar::{Config, Gvas, Symbol};
use gvas::ordinal::Ordinal;
use gvas::pvas::Pvas;
use gvas::setops::DefinablePredicate;
use gvas::text;

use crate::exit::Usage;

pub fn read(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| anyhow::Error::new(Usage(format!("cannot read {}: {e}", path.display()))))
}

fn located<T>(path: &Path, r: Result<T, text::ParseError>) -> Result<T> {
    r.map_err(|e| anyhow::Error::new(e).context(format!("in {}", path.display())))
}

pub fn gvas(path: &Path) -> Result<Gvas> {
    located(path, text::parse_gvas(&read(path)?))
}

pub fn pvas(path: &Path) -> Result<Pvas> {
    located(path, text::parse_pvas(&read(path)?))
}

pub fn predicate(path: &Path) -> Result<DefinablePredicate> {
    located(path, text::parse_predicate(&read(path)?))
}

pub fn tree(g: &Gvas, path: &Path) -> Result<FlowTree> {
    located(path, text::parse_tree(g, read(path)?.trim()))
}

pub fn config(src: &str, dim: usize) -> Result<Config> {
    Ok(text::parse_config(src, dim)?)
}

pub fn ordinal(src: &str) -> Result<Ordinal> {
    Ok(text::parse_ordinal(src)?)
}

/// The named nonterminal, or the start symbol.
pub fn symbol(g: &Gvas, name: Option<&str>) -> Result<Symbol> {
    match name {
        None => Ok(Symbol::Nt(g.start())),
        Some(n) => g.nt_by_name(n).map(Symbol::Nt).ok_or_else(|| Usage(format!("unknown nonterminal `{n}`")).into()),
    }
}
