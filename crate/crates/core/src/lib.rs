//! Graph-manifold notation, moves and first homology for Dehn fillings of
//! chain-link complements.

pub mod catalog;
pub mod chains;
pub mod exactalg;
pub mod homology;
pub mod manifolds;
pub mod moves;
pub mod notation;
pub mod symmetry;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    struct Overview;
    #[doc = include_str!("../../../book/src/notation.md")]
    struct Notation;
    #[doc = include_str!("../../../book/src/homology.md")]
    struct Homology;
    #[doc = include_str!("../../../book/src/moves.md")]
    struct Moves;
    #[doc = include_str!("../../../book/src/catalog.md")]
    struct Catalog;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
