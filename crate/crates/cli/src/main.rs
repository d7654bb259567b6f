//! `gvas`: command-line access to the grammar-controlled VAS toolkit.
//!
//! Exit status: 0 on success, 1 when the answer is negative or a domain
//! precondition fails, 2 on usage and parse errors, 3 when a resource
//! limit or value cap is hit.

mod commands;
mod exit;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "gvas", version, about = "Bounded analysis of grammar-controlled vector addition systems")]
pub struct Cli {
    /// Output format for report-producing subcommands.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for subcommands that sample.
    #[arg(long, global = true, default_value_t = 0x5eed_2024)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

/// A grammar file (`-` for standard input).
#[derive(Args, Debug)]
pub struct GrammarArg {
    pub grammar: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Report structural defects; fails on fatal ones.
    Validate(GrammarArg),
    /// Bounded reachability: targets from one source, or every pair.
    Reach {
        grammar: PathBuf,
        #[arg(long)]
        bound: u64,
        /// Source configuration such as `(3)`; omit for all pairs.
        #[arg(long)]
        from: Option<String>,
        /// Nonterminal to query (defaults to the start symbol).
        #[arg(long)]
        symbol: Option<String>,
    },
    /// List flow trees of bounded size, one S-expression per line.
    Enumerate {
        grammar: PathBuf,
        #[arg(long)]
        bound: u64,
        #[arg(long, default_value_t = 8)]
        max_nodes: usize,
        #[arg(long)]
        symbol: Option<String>,
        #[arg(long)]
        from: Option<String>,
        /// Print a seeded random sample of this many trees instead of all.
        #[arg(long)]
        sample: Option<usize>,
    },
    /// A flow tree witnessing one bounded reachability pair.
    WitnessTree {
        grammar: PathBuf,
        #[arg(long)]
        bound: u64,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        symbol: Option<String>,
    },
    /// The constructed `G_d` tree for `<n, 0, α> → <F_α(n), 0, α>`.
    Witness {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        n: u64,
        /// Defaults to the smallest `d` with `α < ω^d`.
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 1 << 16)]
        cap: u64,
    },
    /// Decide the flow-tree ordering `s ≤ t`.
    Leq {
        grammar: PathBuf,
        #[arg(long)]
        s: PathBuf,
        #[arg(long)]
        t: PathBuf,
    },
    /// Combine `s ≤ t1` and `s ≤ t2` into a common upper bound.
    Amalgamate {
        grammar: PathBuf,
        #[arg(long)]
        s: PathBuf,
        #[arg(long)]
        t1: PathBuf,
        #[arg(long)]
        t2: PathBuf,
    },
    /// Translate a grammar into a pushdown VAS.
    ToPvas(GrammarArg),
    /// Translate a pushdown VAS into a grammar.
    FromPvas {
        pvas: PathBuf,
        /// Initial stack word, top first; `_` is empty.
        #[arg(long)]
        init: String,
    },
    /// Closure constructions on predicate files.
    #[command(subcommand)]
    Setop(SetOp),
    /// Bounded membership in a predicate.
    Member {
        predicate: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        bound: u64,
    },
    /// Emit `G_{F_α}`, or `G_d` alone with `--base`.
    GenFalpha {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        base: bool,
    },
    /// Evaluate `F_α(n)` exactly, failing above the cap.
    FalphaEval {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        n: u64,
        /// Decimal cap on every intermediate value.
        #[arg(long, default_value = "1000000000000000000000000000000")]
        cap: String,
    },
    /// Check the `G_d` safety invariants on a full bounded table.
    Safety {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        bound: u64,
        /// `F`, `Rec`, `Pop` or `Lim_i`; all symbols when omitted.
        #[arg(long)]
        symbol: Option<String>,
    },
    /// Bounded completeness and soundness of a weak computer.
    CheckWeak {
        /// A grammar, or a predicate file with `--predicate`.
        grammar: PathBuf,
        /// `pow2`, `identity` or `falpha:<ordinal>`.
        #[arg(long)]
        oracle: String,
        /// Inputs to check, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        #[arg(long)]
        bound: u64,
        /// Read a graph predicate and build the computer from it.
        #[arg(long)]
        predicate: bool,
    },
    /// Graphviz rendering of a flow tree.
    Dot { grammar: PathBuf, tree: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum SetOp {
    Union {
        p: PathBuf,
        q: PathBuf,
    },
    Product {
        p: PathBuf,
        q: PathBuf,
    },
    /// Keep the listed output coordinates (0-based, comma separated).
    Project {
        p: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        keep: Vec<usize>,
    },
    Intersect {
        p: PathBuf,
        q: PathBuf,
    },
    Hull {
        p: PathBuf,
    },
    /// Restrict a plain grammar to runs ending with the given counters at zero.
    BudgetZero {
        grammar: PathBuf,
        #[arg(long, value_delimiter = ',')]
        zero: Vec<usize>,
    },
    Resetting {
        p: PathBuf,
    },
    Compose {
        p: PathBuf,
        q: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.status)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::status_of(&e))
        }
    }
}
