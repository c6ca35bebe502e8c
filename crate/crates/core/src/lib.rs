//! An executable laboratory for the adaptive massively parallel computation
//! (AMPC) model and the query-complexity machinery around it.
//!
//! The crate is organized as six modules:
//!
//! - [`boolfn`] — bit strings over edge slots, graph instances in the
//!   adjacency-matrix encoding, promise-function families (one-cycle versus
//!   k-cycle, promise majority), and the canonical hard distribution.
//! - [`poly`] — exact multilinear polynomials over rationals, interpolation
//!   on the Boolean cube, and the transcript-driven extraction of a low-degree
//!   polynomial from an adaptive algorithm.
//! - [`qc`] — oracles for deterministic query complexity, certificate
//!   complexity, approximate certificate complexity, the sensitive-block
//!   lower-bound framework, and the cubed-degree upper-bound check.
//! - [`ampc`] — the round-based simulator itself: keys, values, distributed
//!   data stores, adaptive machines, capacity accounting, and transcripts.
//! - [`algos`] — concrete AMPC algorithms (prefix sums, edge-list extraction,
//!   adjacency-list construction with a degree guard, the cycle solver) and
//!   the round lower-bound calculators.
//! - [`adversary`] — the query-game adversary for cycle identification, its
//!   phase transition, consistency witnesses, and game harness.
//!
//! All probability and coefficient arithmetic is exact (big rationals); no
//! floating point participates in any verdict. Randomness, where offered,
//! flows from a single 64-bit seed through a named generator (see [`rng`]).

pub mod adversary;
pub mod algos;
pub mod ampc;
pub mod boolfn;
pub mod error;
pub mod poly;
pub mod qc;
pub mod rng;
pub mod util;

pub use error::{Error, Result};
