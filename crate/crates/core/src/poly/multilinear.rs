//! The sparse multilinear polynomial type and cube interpolation.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::Serialize;

use super::MAX_DENSE_VARS;
use crate::error::{Error, Result};

/// A multilinear polynomial: `p(x) = Σ_T c_T · Π_{i∈T} x_i` with exact
/// rational coefficients, stored sparsely (zero coefficients absent).
/// Variable subsets are bit masks, so at most 32 variables are supported;
/// dense operations are further guarded by [`MAX_DENSE_VARS`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultilinearPolynomial {
    n_vars: usize,
    coeffs: BTreeMap<u32, BigRational>,
}

impl MultilinearPolynomial {
    pub fn zero(n_vars: usize) -> Self {
        assert!(n_vars <= 32, "at most 32 variables");
        MultilinearPolynomial {
            n_vars,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(n_vars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(n_vars);
        if !c.is_zero() {
            p.coeffs.insert(0, c);
        }
        p
    }

    /// The polynomial `x_i`.
    pub fn variable(n_vars: usize, i: usize) -> Self {
        assert!(i < n_vars);
        let mut p = Self::zero(n_vars);
        p.coeffs.insert(1 << i, BigRational::one());
        p
    }

    /// Builds from explicit (mask, coefficient) pairs; zero coefficients are
    /// dropped, duplicate masks are summed.
    pub fn from_terms(n_vars: usize, terms: impl IntoIterator<Item = (u32, BigRational)>) -> Result<Self> {
        let mut p = Self::zero(n_vars);
        for (mask, c) in terms {
            if n_vars < 32 && mask >= (1u32 << n_vars) {
                return Err(Error::invalid(format!("term mask {mask:#x} out of range for {n_vars} variables")));
            }
            p.add_term(mask, c);
        }
        Ok(p)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficient(&self, mask: u32) -> BigRational {
        self.coeffs.get(&mask).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &BigRational)> {
        self.coeffs.iter().map(|(&m, c)| (m, c))
    }

    /// Total degree: the largest set size with a nonzero coefficient
    /// (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.coeffs
            .keys()
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    fn add_term(&mut self, mask: u32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(mask) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n_vars, other.n_vars);
        let mut out = self.clone();
        for (&m, c) in &other.coeffs {
            out.add_term(m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n_vars, other.n_vars);
        let mut out = self.clone();
        for (&m, c) in &other.coeffs {
            out.add_term(m, -c.clone());
        }
        out
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        if factor.is_zero() {
            return Self::zero(self.n_vars);
        }
        MultilinearPolynomial {
            n_vars: self.n_vars,
            coeffs: self.coeffs.iter().map(|(&m, c)| (m, c * factor)).collect(),
        }
    }

    /// Multilinear product: the unique multilinear polynomial agreeing with
    /// `self · other` on `{0,1}^N` (monomials combine by set union, reducing
    /// any `x_i²` to `x_i`).
    pub fn multilinear_product(&self, other: &Self) -> Self {
        assert_eq!(self.n_vars, other.n_vars);
        let mut out = Self::zero(self.n_vars);
        for (&ma, ca) in &self.coeffs {
            for (&mb, cb) in &other.coeffs {
                out.add_term(ma | mb, ca * cb);
            }
        }
        out
    }

    /// Value at a cube point given as a bit mask of the variables set to 1:
    /// `Σ_{T ⊆ point} c_T`.
    pub fn evaluate(&self, point: u32) -> BigRational {
        let mut acc = BigRational::zero();
        for (&m, c) in &self.coeffs {
            if m & !point == 0 {
                acc += c;
            }
        }
        acc
    }

    /// Values at every cube point, index = point mask, via a subset-sum
    /// (zeta) transform over the coefficient vector. Guarded by
    /// [`MAX_DENSE_VARS`].
    pub fn evaluate_all(&self) -> Result<Vec<BigRational>> {
        if self.n_vars > MAX_DENSE_VARS {
            return Err(Error::invalid(format!(
                "dense evaluation over {} variables exceeds the {MAX_DENSE_VARS}-variable guard",
                self.n_vars
            )));
        }
        let size = 1usize << self.n_vars;
        let mut v = vec![BigRational::zero(); size];
        for (&m, c) in &self.coeffs {
            v[m as usize] = c.clone();
        }
        for bit in 0..self.n_vars {
            let step = 1usize << bit;
            for mask in 0..size {
                if mask & step != 0 {
                    let lower = v[mask ^ step].clone();
                    v[mask] += lower;
                }
            }
        }
        Ok(v)
    }

    /// Dump entries in the canonical report order: ascending set size, then
    /// ascending variable list.
    pub fn dump_entries(&self) -> Vec<DumpEntry> {
        let mut entries: Vec<DumpEntry> = self
            .coeffs
            .iter()
            .map(|(&m, c)| DumpEntry {
                vars: (0..self.n_vars).filter(|i| m >> i & 1 == 1).collect(),
                coef: rational_string(c),
            })
            .collect();
        entries.sort_by(|a, b| (a.vars.len(), &a.vars).cmp(&(b.vars.len(), &b.vars)));
        entries
    }
}

/// One line of a polynomial dump: the variable subset and the coefficient as
/// a reduced fraction string (`"-3/2"`, `"1"`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DumpEntry {
    pub vars: Vec<usize>,
    pub coef: String,
}

/// Reduced fraction rendering; the denominator is omitted when 1.
pub(crate) fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// The unique multilinear polynomial taking the given 0/1 values on the cube
/// (index = point mask). Inclusion-exclusion over subsets runs in
/// `N·2^N` integer operations.
pub fn interpolate(n_vars: usize, values: impl Fn(u32) -> bool) -> Result<MultilinearPolynomial> {
    if n_vars > MAX_DENSE_VARS {
        return Err(Error::invalid(format!(
            "interpolation over {n_vars} variables exceeds the {MAX_DENSE_VARS}-variable guard"
        )));
    }
    let size = 1usize << n_vars;
    let mut v: Vec<i64> = (0..size).map(|m| i64::from(values(m as u32))).collect();
    mobius_i64(n_vars, &mut v);
    MultilinearPolynomial::from_terms(
        n_vars,
        v.iter().enumerate().filter(|(_, &c)| c != 0).map(|(m, &c)| {
            (m as u32, BigRational::from_integer(BigInt::from(c)))
        }),
    )
}

/// Rational-valued interpolation (used for round trips and mixtures).
pub fn interpolate_rational(n_vars: usize, values: &[BigRational]) -> Result<MultilinearPolynomial> {
    if n_vars > MAX_DENSE_VARS {
        return Err(Error::invalid(format!(
            "interpolation over {n_vars} variables exceeds the {MAX_DENSE_VARS}-variable guard"
        )));
    }
    let size = 1usize << n_vars;
    if values.len() != size {
        return Err(Error::invalid(format!("expected {size} cube values, got {}", values.len())));
    }
    let mut v = values.to_vec();
    for bit in 0..n_vars {
        let step = 1usize << bit;
        for mask in 0..size {
            if mask & step != 0 {
                let lower = v[mask ^ step].clone();
                v[mask] -= lower;
            }
        }
    }
    MultilinearPolynomial::from_terms(
        n_vars,
        v.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(m, c)| (m as u32, c)),
    )
}

/// In-place Möbius transform over the subset lattice: on return `v[T]` holds
/// `Σ_{U ⊆ T} (-1)^{|T\U|} v_in[U]`, the multilinear coefficient of `T` for
/// the function the vector tabulated.
pub(crate) fn mobius_i64(n_vars: usize, v: &mut [i64]) {
    debug_assert_eq!(v.len(), 1 << n_vars);
    for bit in 0..n_vars {
        let step = 1usize << bit;
        for mask in 0..v.len() {
            if mask & step != 0 {
                v[mask] -= v[mask ^ step];
            }
        }
    }
}

/// Maximum distance from a set of rational values to the nearest of {0, 1}.
pub(crate) fn distance_to_bits(value: &BigRational) -> BigRational {
    let to_zero = value.abs();
    let to_one = (value - BigRational::one()).abs();
    if to_zero < to_one {
        to_zero
    } else {
        to_one
    }
}
