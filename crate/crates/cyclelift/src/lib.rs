//! Exact computations with special cycles on the Bruhat-Tits tree of a
//! `p`-adic hermitian plane, the formal Shimura lift of `q`-expansions, and
//! symbolic verification of the identity between orthogonal and unitary
//! generating series on a Shimura curve.

pub mod bttree;
pub mod error;
pub mod identity;
pub mod localcycles;
pub mod numth;
pub mod padic;
pub mod qseries;
pub mod quadfield;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/arithmetic.md")]
    mod arithmetic {}
    #[doc = include_str!("../../../book/src/tree.md")]
    mod tree {}
    #[doc = include_str!("../../../book/src/local-cycles.md")]
    mod local_cycles {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/identities.md")]
    mod identities {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
