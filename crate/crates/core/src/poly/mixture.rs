//! Averaging extracted polynomials over a distribution of seeds and
//! measuring how well the average tracks a promise function.
//!
//! For a randomized procedure drawn from a finite family, each member's
//! extracted polynomial gives that member's accept indicator; the weighted
//! average is the overall accept probability as a polynomial. The check
//! below forms that average exactly and reports its worst error against the
//! target function over the promise, so a claimed error bound (e.g. 1/3)
//! can be verified by exact rational comparison.

use num::{BigRational, One, Signed, Zero};

use super::multilinear::{distance_to_bits, rational_string, MultilinearPolynomial};
use crate::boolfn::{BitString, PromiseFunction};
use crate::error::{Error, Result};

/// Result of an exact mixture evaluation against a promise function.
#[derive(Debug, Clone)]
pub struct MixtureReport {
    /// The weighted-average polynomial `Σ w_i · p_i`.
    pub mixture: MultilinearPolynomial,
    /// Total degree of the mixture (≤ max component degree).
    pub degree: usize,
    /// `max_{x ∈ promise} |mixture(x) − f(x)|`, with a witness point.
    pub max_promise_error: BigRational,
    pub worst_promise_point: Option<BitString>,
    /// `max_{x ∉ promise} dist(mixture(x), {0,1})`, if any point is off the
    /// promise. Purely diagnostic: the target is undefined there, but a
    /// mixture of accept indicators should still look like a probability.
    pub max_off_promise_deviation: Option<BigRational>,
}

impl MixtureReport {
    /// Whether the worst promise error is at most `bound`.
    pub fn meets(&self, bound: &BigRational) -> bool {
        self.max_promise_error <= *bound
    }

    /// `"≤ a/b"`-style rendering of the worst error for reports.
    pub fn error_string(&self) -> String {
        rational_string(&self.max_promise_error)
    }
}

/// Forms the exact weighted average of `components` and measures it against
/// `f`. Weights must be nonnegative and sum to exactly 1; every component
/// must be a polynomial over `f`'s input variables.
pub fn mixture_check(
    f: &PromiseFunction,
    components: &[(BigRational, MultilinearPolynomial)],
) -> Result<MixtureReport> {
    if components.is_empty() {
        return Err(Error::invalid("a mixture needs at least one component"));
    }
    let n_vars = f.n_bits();
    let mut weight_sum = BigRational::zero();
    let mut mixture = MultilinearPolynomial::zero(n_vars);
    for (w, p) in components {
        if w.is_negative() {
            return Err(Error::invalid(format!("negative mixture weight {}", rational_string(w))));
        }
        if p.n_vars() != n_vars {
            return Err(Error::invalid(format!(
                "mixture component over {} variables, target over {n_vars}",
                p.n_vars()
            )));
        }
        weight_sum += w;
        mixture = mixture.add(&p.scale(w));
    }
    if !weight_sum.is_one() {
        return Err(Error::invalid(format!(
            "mixture weights sum to {}, expected 1",
            rational_string(&weight_sum)
        )));
    }

    let values = mixture.evaluate_all()?;
    let mut max_promise_error = BigRational::zero();
    let mut worst_promise_point = None;
    let mut max_off_promise_deviation: Option<BigRational> = None;
    for (mask, value) in values.iter().enumerate() {
        let x = BitString::from_mask(n_vars, mask as u64);
        match f.value(&x) {
            Some(target) => {
                let target = if target { BigRational::one() } else { BigRational::zero() };
                let err = (value - target).abs();
                if err > max_promise_error {
                    max_promise_error = err;
                    worst_promise_point = Some(x);
                }
            }
            None => {
                let dev = distance_to_bits(value);
                if max_off_promise_deviation.as_ref().is_none_or(|cur| dev > *cur) {
                    max_off_promise_deviation = Some(dev);
                }
            }
        }
    }

    Ok(MixtureReport {
        degree: mixture.degree(),
        mixture,
        max_promise_error,
        worst_promise_point,
        max_off_promise_deviation,
    })
}
