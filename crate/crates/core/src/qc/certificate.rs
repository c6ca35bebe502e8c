//! Certificate complexity: exact, and under an exact label-error budget.

use num::{BigRational, Zero};

use crate::boolfn::{BitString, PromiseFunction};
use crate::error::{Error, Result};
use crate::util::binomial;

/// Default cap on the number of admissible error sets enumerated by the
/// approximate oracle.
pub const DEFAULT_ERROR_SET_CAP: u64 = 2_000_000;

fn mask_of(x: &BitString) -> u64 {
    assert!(x.len() <= 64);
    x.iter_ones().fold(0u64, |m, i| m | 1 << i)
}

// -------------------------------------------------------------------
// Minimum hitting sets
// -------------------------------------------------------------------

fn hits_all(diffs: &[u64], chosen: u64) -> bool {
    diffs.iter().all(|&d| d & chosen != 0)
}

/// Size of a smallest slot set intersecting every difference mask, by
/// branch-and-bound on the least-covered mask.
fn min_hitting_set(diffs: &[u64]) -> usize {
    fn greedy(diffs: &[u64]) -> usize {
        let mut chosen = 0u64;
        let mut size = 0;
        while let Some(&next) = diffs.iter().find(|&&d| d & chosen == 0) {
            // Take the bit of an uncovered mask that covers the most masks.
            let bit = (0..64)
                .filter(|&i| next >> i & 1 == 1)
                .max_by_key(|&i| {
                    diffs
                        .iter()
                        .filter(|&&d| d & chosen == 0 && d >> i & 1 == 1)
                        .count()
                })
                .expect("difference masks are nonzero");
            chosen |= 1 << bit;
            size += 1;
        }
        size
    }

    fn descend(diffs: &[u64], chosen: u64, size: usize, best: &mut usize) {
        let Some(&next) = diffs
            .iter()
            .filter(|&&d| d & chosen == 0)
            .min_by_key(|d| d.count_ones())
        else {
            *best = (*best).min(size);
            return;
        };
        if size + 1 >= *best {
            return;
        }
        let mut bits = next;
        while bits != 0 {
            let bit = bits & bits.wrapping_neg();
            bits ^= bit;
            descend(diffs, chosen | bit, size + 1, best);
        }
    }

    if diffs.is_empty() {
        return 0;
    }
    let mut best = greedy(diffs);
    descend(diffs, 0, 0, &mut best);
    best
}

/// Certificate size of instance `i` under the given labels: the least
/// number of slots separating it from every instance labeled differently.
fn instance_certificate(masks: &[u64], labels: &[bool], i: usize) -> usize {
    let diffs: Vec<u64> = masks
        .iter()
        .zip(labels)
        .filter(|&(_, &l)| l != labels[i])
        .map(|(&m, _)| m ^ masks[i])
        .collect();
    min_hitting_set(&diffs)
}

fn certificate_value(masks: &[u64], labels: &[bool]) -> usize {
    (0..masks.len())
        .map(|i| instance_certificate(masks, labels, i))
        .max()
        .unwrap_or(0)
}

// -------------------------------------------------------------------
// Exact certificate complexity
// -------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct CertificateReport {
    /// `max` over promise inputs of the per-instance minimum.
    pub value: usize,
    /// Per-instance minima, in promise order (ones before zeros).
    pub per_instance: Vec<usize>,
    /// First promise input attaining the maximum.
    pub witness_instance: BitString,
    /// Lexicographically least minimum certificate on that instance.
    pub witness_slots: Vec<usize>,
}

/// Exact certificate complexity with per-instance minima and a canonical
/// witness. A certificate for `x` is a slot set `C` such that every
/// promise input agreeing with `x` on `C` shares its label; equivalently,
/// `C` hits every difference mask against oppositely-labeled inputs, so
/// each per-instance minimum is a minimum hitting set.
pub fn certificate_complexity(f: &PromiseFunction) -> Result<CertificateReport> {
    if f.n_bits() > 64 {
        return Err(Error::invalid(format!(
            "certificate search supports at most 64 slots, got {}",
            f.n_bits()
        )));
    }
    let masks: Vec<u64> = f.promise_iter().map(|(x, _)| mask_of(x)).collect();
    let labels: Vec<bool> = f.promise_iter().map(|(_, v)| v).collect();

    let per_instance: Vec<usize> = (0..masks.len())
        .map(|i| instance_certificate(&masks, &labels, i))
        .collect();
    let value = per_instance.iter().copied().max().unwrap_or(0);
    let argmax = per_instance.iter().position(|&c| c == value).unwrap_or(0);
    let witness_instance = f
        .promise_iter()
        .nth(argmax)
        .map(|(x, _)| x.clone())
        .expect("promise function has at least one instance");

    // Lexicographically least certificate of minimum size, scanned over
    // size-`value` combinations of the slots that occur in some difference.
    let diffs: Vec<u64> = masks
        .iter()
        .zip(&labels)
        .filter(|&(_, &l)| l != labels[argmax])
        .map(|(&m, _)| m ^ masks[argmax])
        .collect();
    let union = diffs.iter().fold(0u64, |u, d| u | d);
    let candidates: Vec<usize> = (0..64).filter(|&i| union >> i & 1 == 1).collect();
    let mut witness_slots = Vec::new();
    combinations(candidates.len(), value, |combo| {
        let chosen = combo.iter().fold(0u64, |m, &j| m | 1 << candidates[j]);
        if hits_all(&diffs, chosen) {
            witness_slots = combo.iter().map(|&j| candidates[j]).collect();
            false
        } else {
            true
        }
    });

    Ok(CertificateReport { value, per_instance, witness_instance, witness_slots })
}

/// Visits size-`k` index combinations of `0..n` in lexicographic order
/// until `visit` returns `false`.
fn combinations(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        if !visit(&combo) {
            return;
        }
        // Advance the rightmost index that still has room.
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if combo[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        combo[i] += 1;
        for j in i + 1..k {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

// -------------------------------------------------------------------
// Approximate certificate complexity
// -------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ApproxCertificate {
    /// Least certificate complexity over all admissible relabelings.
    pub value: usize,
    /// First error set attaining it (size-then-lexicographic order).
    pub error_set: Vec<BitString>,
    /// Number of admissible error sets (the whole search space).
    pub candidates: u128,
}

/// δ-approximate certificate complexity: the minimum, over error sets `E`
/// of weighted mass at most δ, of the certificate complexity after
/// flipping the labels on `E`. A 1-instance weighs `1/(2|V₁|)`, a
/// 0-instance `1/(2|V₀|)`; all mass arithmetic is exact. At δ = 0 this
/// is exactly [`certificate_complexity`].
pub fn approx_certificate_complexity(
    f: &PromiseFunction,
    delta: &BigRational,
) -> Result<ApproxCertificate> {
    approx_certificate_complexity_with_cap(f, delta, DEFAULT_ERROR_SET_CAP)
}

/// [`approx_certificate_complexity`] with an explicit cap on the number
/// of admissible error sets. The count is computed up front; if it
/// exceeds the cap, the error carries the unflipped certificate
/// complexity as the partial upper bound.
pub fn approx_certificate_complexity_with_cap(
    f: &PromiseFunction,
    delta: &BigRational,
    cap: u64,
) -> Result<ApproxCertificate> {
    if delta < &BigRational::zero() {
        return Err(Error::invalid("error budget δ must be nonnegative"));
    }
    let base = certificate_complexity(f)?;
    if delta.is_zero() {
        return Ok(ApproxCertificate { value: base.value, error_set: Vec::new(), candidates: 1 });
    }

    let v1 = f.ones().len();
    let v0 = f.zeros().len();
    let mass_one = BigRational::new(1.into(), (2 * v1 as i64).into());
    let mass_zero = BigRational::new(1.into(), (2 * v0 as i64).into());

    // Count the admissible error sets exactly before enumerating any.
    let mut candidates: u128 = 0;
    let mut max_size = 0usize;
    let mut overflow = false;
    'count: for e1 in 0..=v1 {
        let m1 = BigRational::from_integer((e1 as i64).into()) * &mass_one;
        if m1 > *delta {
            break;
        }
        for e0 in 0..=v0 {
            let total = &m1 + BigRational::from_integer((e0 as i64).into()) * &mass_zero;
            if total > *delta {
                break;
            }
            max_size = max_size.max(e1 + e0);
            let block = binomial(v1 as u64, e1 as u64)
                .checked_mul(binomial(v0 as u64, e0 as u64));
            match block.and_then(|b| candidates.checked_add(b)) {
                Some(c) => candidates = c,
                None => {
                    overflow = true;
                    break 'count;
                }
            }
        }
    }
    if overflow || candidates > u128::from(cap) {
        return Err(Error::ResourceLimit {
            what: "admissible error sets".into(),
            budget: cap,
            lower: None,
            upper: Some(base.value as u64),
        });
    }

    let masks: Vec<u64> = f.promise_iter().map(|(x, _)| mask_of(x)).collect();
    let base_labels: Vec<bool> = f.promise_iter().map(|(_, v)| v).collect();
    let total = masks.len();

    let mut best = base.value;
    let mut best_set: Vec<usize> = Vec::new();
    'sizes: for size in 1..=max_size {
        let mut stop = false;
        combinations(total, size, |combo| {
            let e1 = combo.iter().filter(|&&i| i < v1).count();
            let e0 = size - e1;
            let mass = BigRational::from_integer((e1 as i64).into()) * &mass_one
                + BigRational::from_integer((e0 as i64).into()) * &mass_zero;
            if mass > *delta {
                return true;
            }
            let mut labels = base_labels.clone();
            for &i in combo {
                labels[i] = !labels[i];
            }
            // A relabeling with one class emptied is constant on the
            // promise: the empty certificate works everywhere.
            let value = if labels.iter().all(|&l| l == labels[0]) {
                0
            } else {
                certificate_value(&masks, &labels)
            };
            if value < best {
                best = value;
                best_set = combo.to_vec();
            }
            if best == 0 {
                stop = true;
                return false;
            }
            true
        });
        if stop {
            break 'sizes;
        }
    }

    let instances: Vec<&BitString> = f.promise_iter().map(|(x, _)| x).collect();
    Ok(ApproxCertificate {
        value: best,
        error_set: best_set.iter().map(|&i| instances[i].clone()).collect(),
        candidates,
    })
}
