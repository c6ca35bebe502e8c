//! Round lower bounds for the cycle promise at a given capacity, computed
//! by the two reductions from rounds to query complexity.
//!
//! Both bounds have the shape `R ≥ (1/6) · log_S(argument)`:
//!
//! - **Deterministic depth route.** An R-round capacity-S algorithm
//!   collapses to a decision tree of depth at most `S^(6R)`, and the
//!   decision-tree depth of the cycle promise at n vertices is at least
//!   `n²/512`; halving for the collapse overhead leaves
//!   `R ≥ (1/6)·log_S(n²/1024)`.
//! - **Randomized certificate route.** The same collapse bounds the
//!   1/6-error certificate complexity by `2·S^(6R)`, and that complexity
//!   is at least `n/4`, leaving `R ≥ (1/6)·log_S(n/8)`.
//!
//! Results are exact rationals whenever the logarithm is rational — that
//! is, whenever the argument and the capacity are powers of one common
//! base, which covers the power-of-two parameter grids the laboratory
//! runs on — and an f64 approximation otherwise. A nonpositive bound is
//! vacuous (zero rounds are always "allowed") and is clamped to 0 with a
//! flag.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, ToPrimitive, Zero};
use serde::ser::Serializer;
use serde::Serialize;

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// report type
// ---------------------------------------------------------------------------

/// Which reduction produced a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundRoute {
    /// Decision-tree depth of the promise function, via the deterministic
    /// collapse.
    DeterministicDepth,
    /// Bounded-error certificate complexity, via the randomized collapse.
    RandomizedCertificate,
}

/// One evaluated round lower bound. `exact` is the bound as a rational
/// when the logarithm is rational (always so after clamping); `approx` is
/// the same number as an f64 and is the value to plot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: u64,
    pub s: u64,
    pub route: BoundRoute,
    /// The query-complexity lower bound fed into the reduction (n²/512
    /// for the depth route, n/4 for the certificate route).
    #[serde(serialize_with = "ser_ratio")]
    pub complexity_used: BigRational,
    /// The argument of log_S in the final formula (complexity over the
    /// collapse overhead).
    #[serde(serialize_with = "ser_ratio")]
    pub log_argument: BigRational,
    /// The bound as an exact rational, when log_S(argument) is rational.
    #[serde(serialize_with = "ser_opt_ratio")]
    pub exact: Option<BigRational>,
    pub approx: f64,
    /// True when the raw formula was nonpositive and reported as 0.
    pub clamped: bool,
}

fn ser_ratio<S: Serializer>(r: &BigRational, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

fn ser_opt_ratio<S: Serializer>(
    r: &Option<BigRational>,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => ser.serialize_some(&format!("{}/{}", r.numer(), r.denom())),
        None => ser.serialize_none(),
    }
}

// ---------------------------------------------------------------------------
// the two routes
// ---------------------------------------------------------------------------

/// Deterministic-depth round lower bound: `(1/6)·log_S(n²/1024)`,
/// clamped to 0 when vacuous.
pub fn det_round_lower_bound(n: u64, s: u64) -> Result<BoundReport> {
    check_params(n, s)?;
    let complexity = BigRational::new(BigInt::from(n) * BigInt::from(n), BigInt::from(512));
    evaluate(n, s, BoundRoute::DeterministicDepth, complexity)
}

/// Randomized-certificate round lower bound: `(1/6)·log_S(n/8)`,
/// clamped to 0 when vacuous.
pub fn rand_round_lower_bound(n: u64, s: u64) -> Result<BoundReport> {
    check_params(n, s)?;
    let complexity = BigRational::new(BigInt::from(n), BigInt::from(4));
    evaluate(n, s, BoundRoute::RandomizedCertificate, complexity)
}

fn check_params(n: u64, s: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("the input length n must be at least 1"));
    }
    if s < 2 {
        return Err(Error::invalid(format!(
            "capacity {s} is below 2; log base must exceed 1"
        )));
    }
    Ok(())
}

fn evaluate(n: u64, s: u64, route: BoundRoute, complexity: BigRational) -> Result<BoundReport> {
    // Both reductions pay a factor-2 collapse overhead inside the log.
    let argument = &complexity / BigRational::from_integer(BigInt::from(2));
    let one = BigRational::one();
    let (exact, approx, clamped) = if argument < one {
        (Some(BigRational::zero()), 0.0, true)
    } else if argument == one {
        (Some(BigRational::zero()), 0.0, false)
    } else {
        match exact_log_sixth(&argument, s) {
            Some(r) => {
                let a = r.to_f64().unwrap_or(f64::NAN);
                (Some(r), a, false)
            }
            None => {
                let a = argument.to_f64().map_or(f64::NAN, |v| v.ln())
                    / (6.0 * (s as f64).ln());
                (None, a, false)
            }
        }
    };
    Ok(BoundReport {
        n,
        s,
        route,
        complexity_used: complexity,
        log_argument: argument,
        exact,
        approx,
        clamped,
    })
}

// ---------------------------------------------------------------------------
// exact-rational logarithms
// ---------------------------------------------------------------------------

/// `(1/6)·log_s(argument)` as an exact rational, when the argument's
/// numerator and denominator are both powers of s's primitive base.
fn exact_log_sixth(argument: &BigRational, s: u64) -> Option<BigRational> {
    let (base, j) = primitive_power_base(s);
    let x = power_exponent(argument.numer(), base)?;
    let y = power_exponent(argument.denom(), base)?;
    let num = BigInt::from(x) - BigInt::from(y);
    debug_assert!(num.is_positive(), "argument > 1 must give a positive log");
    Some(BigRational::new(num, BigInt::from(6 * u64::from(j))))
}

/// Writes `s = base^j` with `j` as large as possible (so `base` is not
/// itself a perfect power). `s = 10` gives `(10, 1)`; `64` gives `(2, 6)`.
fn primitive_power_base(s: u64) -> (u64, u32) {
    debug_assert!(s >= 2);
    for j in (2..=s.ilog2()).rev() {
        let r = nth_root(s, j);
        if r >= 2 && r.checked_pow(j) == Some(s) {
            return (r, j);
        }
    }
    (s, 1)
}

/// Integer `j`-th root of `s`, rounded down.
fn nth_root(s: u64, j: u32) -> u64 {
    let mut r = (s as f64).powf(1.0 / f64::from(j)).round() as u64;
    while r > 1 && r.checked_pow(j).is_none_or(|p| p > s) {
        r -= 1;
    }
    while (r + 1).checked_pow(j).is_some_and(|p| p <= s) {
        r += 1;
    }
    r
}

/// The exponent `e` with `m = base^e`, if one exists (`m = 1` gives 0).
fn power_exponent(m: &BigInt, base: u64) -> Option<u64> {
    debug_assert!(base >= 2 && m.is_positive());
    let b = BigInt::from(base);
    let mut m = m.clone();
    let mut e = 0u64;
    while m > BigInt::one() {
        let (q, r) = m.div_rem(&b);
        if !r.is_zero() {
            return None;
        }
        m = q;
        e += 1;
    }
    Some(e)
}
