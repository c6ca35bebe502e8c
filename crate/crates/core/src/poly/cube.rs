//! Dense 0/1-valued functions on the Boolean cube, stored as bitsets.
//!
//! The round-by-round polynomial construction only ever manipulates
//! indicator functions of events over the input cube, so instead of sparse
//! polynomial arithmetic each intermediate object is a truth table:
//! products become AND, sums of disjoint indicators become OR (with the
//! disjointness checked), and subtraction is checked containment. The
//! sparse coefficient form is recovered at the end for degree audits.

use num::BigRational;

use super::multilinear::{mobius_i64, MultilinearPolynomial};
use super::MAX_DENSE_VARS;
use crate::error::{Error, Result};

/// A function `{0,1}^N → {0,1}` tabulated as a bitset indexed by point mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeTable {
    n_vars: usize,
    words: Vec<u64>,
}

impl CubeTable {
    pub fn zero(n_vars: usize) -> Self {
        assert!(
            n_vars <= MAX_DENSE_VARS,
            "cube table over {n_vars} variables exceeds the {MAX_DENSE_VARS}-variable guard"
        );
        let bits = 1usize << n_vars;
        CubeTable {
            n_vars,
            words: vec![0; bits.div_ceil(64)],
        }
    }

    pub fn ones(n_vars: usize) -> Self {
        let mut t = Self::zero(n_vars);
        for w in &mut t.words {
            *w = u64::MAX;
        }
        t.mask_tail();
        t
    }

    /// Tabulates a predicate over all `2^N` points.
    pub fn from_fn(n_vars: usize, mut f: impl FnMut(u32) -> bool) -> Self {
        let mut t = Self::zero(n_vars);
        for point in 0..1u32 << n_vars {
            if f(point) {
                t.set(point, true);
            }
        }
        t
    }

    fn mask_tail(&mut self) {
        let bits = 1usize << self.n_vars;
        let rem = bits % 64;
        if rem != 0 {
            *self.words.last_mut().unwrap() &= (1u64 << rem) - 1;
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn get(&self, point: u32) -> bool {
        let i = point as usize;
        debug_assert!(i < 1usize << self.n_vars);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, point: u32, value: bool) {
        let i = point as usize;
        debug_assert!(i < 1usize << self.n_vars);
        if value {
            self.words[i / 64] |= 1u64 << (i % 64);
        } else {
            self.words[i / 64] &= !(1u64 << (i % 64));
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Pointwise product of indicators.
    pub fn and(&self, other: &Self) -> Self {
        assert_eq!(self.n_vars, other.n_vars);
        CubeTable {
            n_vars: self.n_vars,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    /// Sum of indicators, valid only when the supports are disjoint (the sum
    /// must stay 0/1-valued); overlap is reported as an error rather than
    /// silently clamped, since it means the events being added can co-occur.
    pub fn or_disjoint(&self, other: &Self) -> Result<Self> {
        assert_eq!(self.n_vars, other.n_vars);
        if self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0) {
            return Err(Error::invalid(
                "sum of indicators with overlapping supports is not an indicator",
            ));
        }
        Ok(CubeTable {
            n_vars: self.n_vars,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
        })
    }

    /// Difference of indicators, valid only when `other ⊆ self` pointwise;
    /// a point set in `other` but not in `self` is reported as an error.
    pub fn subtract_subset(&self, other: &Self) -> Result<Self> {
        assert_eq!(self.n_vars, other.n_vars);
        if self.words.iter().zip(&other.words).any(|(a, b)| b & !a != 0) {
            return Err(Error::invalid(
                "difference of indicators where the subtrahend is not contained in the minuend",
            ));
        }
        Ok(CubeTable {
            n_vars: self.n_vars,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & !b)
                .collect(),
        })
    }

    /// `1 − f` pointwise.
    pub fn complement(&self) -> Self {
        let mut t = CubeTable {
            n_vars: self.n_vars,
            words: self.words.iter().map(|w| !w).collect(),
        };
        t.mask_tail();
        t
    }

    pub fn iter_points(&self) -> impl Iterator<Item = u32> + '_ {
        (0..1u32 << self.n_vars).filter(move |&p| self.get(p))
    }

    /// The sparse multilinear polynomial matching this table on the cube.
    /// Coefficients are integers (Möbius transform of a 0/1 vector).
    pub fn to_polynomial(&self) -> MultilinearPolynomial {
        let size = 1usize << self.n_vars;
        let mut v: Vec<i64> = (0..size).map(|m| i64::from(self.get(m as u32))).collect();
        mobius_i64(self.n_vars, &mut v);
        MultilinearPolynomial::from_terms(
            self.n_vars,
            v.iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(m, &c)| (m as u32, BigRational::from_integer(c.into()))),
        )
        .expect("masks produced by enumeration are in range")
    }

    /// Degree of the matching multilinear polynomial, without materializing
    /// the coefficient map.
    pub fn degree(&self) -> usize {
        let size = 1usize << self.n_vars;
        let mut v: Vec<i64> = (0..size).map(|m| i64::from(self.get(m as u32))).collect();
        mobius_i64(self.n_vars, &mut v);
        v.iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(m, _)| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }
}
