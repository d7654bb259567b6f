//! Grammar-controlled vector addition systems.
//!
//! A GVAS is a context-free grammar whose terminals are integer vectors,
//! read as counter updates on `ℕ^d`. This crate computes bounded
//! reachability relations, works with flow trees and their embedding
//! order, converts to and from pushdown VAS, combines definable sets and
//! builds grammars computing the fast-growing hierarchy.
//!
//! ```
//! use gvas::{text::parse_gvas, reach::bounded_reach, grammar::{Config, Symbol}};
//!
//! let g = parse_gvas("dim 1\nstart S\nS -> (1) S (-1) | eps\n").unwrap();
//! let t = bounded_reach(&g, 3).unwrap();
//! let s = Symbol::Nt(g.start());
//! assert!(t.contains(s, &Config(vec![0]), &Config(vec![0])));
//! assert!(!t.contains(s, &Config(vec![0]), &Config(vec![1])));
//! ```

pub mod fgcomputer;
pub mod flowtree;
pub mod grammar;
pub mod ordinal;
pub mod pvas;
pub mod reach;
pub mod setops;
pub mod text;
pub mod weakcomp;

pub use flowtree::FlowTree;
pub use grammar::{Action, Config, Gvas, GvasBuilder, GvasError, Symbol};
pub use ordinal::Ordinal;
pub use reach::{bounded_reach, ReachTable};

// The guide's listings run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/grammars.md")]
    mod grammars {}
    #[doc = include_str!("../../../book/src/reachability.md")]
    mod reachability {}
    #[doc = include_str!("../../../book/src/flow-trees.md")]
    mod flow_trees {}
    #[doc = include_str!("../../../book/src/pvas.md")]
    mod pvas {}
    #[doc = include_str!("../../../book/src/definable-sets.md")]
    mod definable_sets {}
    #[doc = include_str!("../../../book/src/weak-computers.md")]
    mod weak_computers {}
    #[doc = include_str!("../../../book/src/fast-growing.md")]
    mod fast_growing {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
