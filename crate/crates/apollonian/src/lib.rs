//! Enumeration and number-theoretic statistics for bounded integral
//! Apollonian circle packings.
//!
//! The library works with exact integer curvatures throughout: quadruple
//! algebra and the group action ([`quadruple`]), pruned tree traversal and
//! curvature histograms ([`enumerate`], [`histogram`]), orbit structure and
//! residue profiles modulo d ([`orbits`]), local density constants
//! ([`densities`]), prime-curvature and kissing-prime statistics
//! ([`primestats`]), local-global exception scans ([`localglobal`]), and SVG
//! rendering of packings ([`render`]). The `apollonian` binary exposes the
//! same operations as subcommands ([`cli`]).

pub mod cli;
pub mod densities;
pub mod enumerate;
pub mod error;
pub mod histogram;
pub mod localglobal;
pub mod orbits;
pub mod primes;
pub mod primestats;
pub mod quadruple;
pub mod render;

mod numfmt;
mod sums;

pub use error::{Error, Result};
pub use quadruple::{descartes_form, reduce_to_root, PackingDescriptor, Quadruple};
