#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod exact;
pub mod fixtures;
pub mod linalg;
pub mod matrix;
pub mod weights;
pub mod diagram;
pub mod ncalg;
pub mod deform;
pub mod fo;
pub mod potential;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/exact.md")]
    mod exact {}
    #[doc = include_str!("../../../book/src/matrices.md")]
    mod matrices {}
    #[doc = include_str!("../../../book/src/weights.md")]
    mod weights {}
    #[doc = include_str!("../../../book/src/diagrams.md")]
    mod diagrams {}
    #[doc = include_str!("../../../book/src/rewriting.md")]
    mod rewriting {}
    #[doc = include_str!("../../../book/src/deformations.md")]
    mod deformations {}
    #[doc = include_str!("../../../book/src/mixed.md")]
    mod mixed {}
    #[doc = include_str!("../../../book/src/elliptic.md")]
    mod elliptic {}
    #[doc = include_str!("../../../book/src/superpotentials.md")]
    mod superpotentials {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
