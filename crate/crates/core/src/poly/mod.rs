//! Exact multilinear polynomials on the Boolean cube, interpolation, and the
//! extraction of a low-degree polynomial from an adaptive algorithm's
//! transcripts.
//!
//! A multilinear polynomial over variables `x_0 … x_{N-1}` is stored as a
//! sparse map from variable subsets (bit masks) to nonzero rational
//! coefficients. On `{0,1}^N` such polynomials are in bijection with
//! functions on the cube; [`interpolate`] inverts evaluation. Products reduce
//! `x_i² → x_i`, so the product of two multilinear polynomials is again the
//! unique multilinear polynomial agreeing with their pointwise product on the
//! cube.
//!
//! [`extract`] builds, from the full run sweep of an adaptive algorithm over
//! all inputs, indicator polynomials for query sequences and stored multisets
//! round by round, and composes them into a polynomial that equals the
//! algorithm's answer on every input while keeping degree at most
//! `S^(2·rounds)`.

mod cube;
mod extract;
mod mixture;
mod multilinear;

pub use cube::CubeTable;
pub use extract::{extract_polynomial, AuditRow, ExtractOptions, Extraction, TranscriptIndex};
pub use mixture::{mixture_check, MixtureReport};
pub use multilinear::{interpolate, interpolate_rational, DumpEntry, MultilinearPolynomial};

/// Largest variable count for dense cube sweeps (tables of 2^N entries).
pub const MAX_DENSE_VARS: usize = 20;

#[cfg(test)]
mod tests;
