//! Boolean inputs for the laboratory: bit strings over edge slots, graphs in
//! the adjacency-matrix encoding, promise-function families, and the
//! canonical hard distribution over a promise.
//!
//! A graph on `n` labeled vertices is a bit string over the `n(n-1)/2` edge
//! slots in the canonical pair order `(0,1), (0,2), …, (0,n-1), (1,2), …`.
//! The one-cycle-versus-k-cycles family (`enumerate_ockc`) and promise
//! majority (`promise_majority`) are built here by exhaustive enumeration,
//! with guards on sizes where materializing the promise set is infeasible.

mod bits;
mod distribution;
mod families;
mod graph;

pub use bits::BitString;
pub use distribution::CanonicalDistribution;
pub use families::{
    enumerate_ockc, ockc_counts, promise_majority, sample_fixed_weight, sample_ockc_instance,
    OCKC_ENUM_MAX_N,
};
pub use graph::{cycle_structure, edge_index, slot_count, slot_endpoints, GraphInstance};
pub(crate) use families::ockc_guard;

use crate::error::{Error, Result};

/// Verdict of [`PromiseFunction::classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    One,
    Zero,
    /// Not in the promise set; the function is undefined here.
    Invalid,
}

/// A partial Boolean function given by explicit, disjoint sets of 1-inputs
/// and 0-inputs over `n_bits` slots. Both lists are kept sorted and
/// deduplicated, so two values built from the same sets compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromiseFunction {
    n_bits: usize,
    ones: Vec<BitString>,
    zeros: Vec<BitString>,
}

impl PromiseFunction {
    /// Builds a promise function, sorting and deduplicating both classes.
    ///
    /// Errors if either class is empty, if any string has the wrong length,
    /// or if the classes intersect.
    pub fn new(n_bits: usize, mut ones: Vec<BitString>, mut zeros: Vec<BitString>) -> Result<Self> {
        if ones.is_empty() || zeros.is_empty() {
            return Err(Error::invalid("promise function needs at least one instance per class"));
        }
        for x in ones.iter().chain(zeros.iter()) {
            if x.len() != n_bits {
                return Err(Error::invalid(format!(
                    "instance has {} bits, expected {n_bits}",
                    x.len()
                )));
            }
        }
        ones.sort_unstable();
        ones.dedup();
        zeros.sort_unstable();
        zeros.dedup();
        // Disjointness: both lists are sorted, so a merge-style walk finds
        // any common element in linear time.
        let (mut i, mut j) = (0, 0);
        while i < ones.len() && j < zeros.len() {
            match ones[i].cmp(&zeros[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    return Err(Error::invalid(format!(
                        "instance {} appears in both classes",
                        ones[i].to_hex()
                    )))
                }
            }
        }
        Ok(PromiseFunction { n_bits, ones, zeros })
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    /// Sorted 1-instances.
    pub fn ones(&self) -> &[BitString] {
        &self.ones
    }

    /// Sorted 0-instances.
    pub fn zeros(&self) -> &[BitString] {
        &self.zeros
    }

    /// Number of promise inputs, `|ones| + |zeros|`.
    pub fn promise_size(&self) -> usize {
        self.ones.len() + self.zeros.len()
    }

    /// All promise inputs: ones first, then zeros (each sorted).
    pub fn promise_iter(&self) -> impl Iterator<Item = (&BitString, bool)> {
        self.ones
            .iter()
            .map(|x| (x, true))
            .chain(self.zeros.iter().map(|x| (x, false)))
    }

    pub fn classify(&self, x: &BitString) -> Classification {
        if x.len() != self.n_bits {
            return Classification::Invalid;
        }
        if self.ones.binary_search(x).is_ok() {
            Classification::One
        } else if self.zeros.binary_search(x).is_ok() {
            Classification::Zero
        } else {
            Classification::Invalid
        }
    }

    /// Function value on a promise input, `None` off the promise.
    pub fn value(&self, x: &BitString) -> Option<bool> {
        match self.classify(x) {
            Classification::One => Some(true),
            Classification::Zero => Some(false),
            Classification::Invalid => None,
        }
    }
}

#[cfg(test)]
mod tests;
