//! Randomized algorithms as weighted families of deterministic ones, and
//! their error against a promise function.

use num::{BigRational, One, Signed, ToPrimitive, Zero};
use rand::Rng as _;

use super::exec::{run, RunConfig};
use super::program::AmpcAlgorithm;
use crate::boolfn::{BitString, CanonicalDistribution, PromiseFunction};
use crate::error::{Error, Result};
use crate::rng;

/// A probability distribution over deterministic algorithms: members with
/// exact rational weights summing to 1. Running on input `x` means drawing
/// a member by weight and running it.
pub struct RandomizedAlgorithm<A> {
    members: Vec<(BigRational, A)>,
}

impl<A: AmpcAlgorithm> RandomizedAlgorithm<A> {
    /// Uniform weights over a nonempty member list.
    pub fn uniform(members: Vec<A>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::invalid("a randomized algorithm needs at least one member"));
        }
        let w = BigRational::new(1.into(), (members.len() as i64).into());
        Ok(RandomizedAlgorithm {
            members: members.into_iter().map(|a| (w.clone(), a)).collect(),
        })
    }

    /// Explicit weights; they must be nonnegative and sum to exactly 1.
    pub fn weighted(members: Vec<(BigRational, A)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::invalid("a randomized algorithm needs at least one member"));
        }
        if members.iter().any(|(w, _)| w.is_negative()) {
            return Err(Error::invalid("member weights must be nonnegative"));
        }
        let total: BigRational = members.iter().map(|(w, _)| w.clone()).sum();
        if !total.is_one() {
            return Err(Error::invalid(format!("member weights sum to {total}, expected 1")));
        }
        Ok(RandomizedAlgorithm { members })
    }

    pub fn members(&self) -> &[(BigRational, A)] {
        &self.members
    }

    /// Exact probability that a weight-drawn member fails to answer `target`
    /// on `x` (a wrong answer and no answer both count as failures).
    pub fn error_on(&self, x: &BitString, target: bool, config: &RunConfig) -> Result<BigRational> {
        let mut wrong = BigRational::zero();
        for (w, algo) in &self.members {
            let report = run(algo, x, config)?;
            if report.outcome.bit() != Some(target) {
                wrong += w;
            }
        }
        Ok(wrong)
    }
}

/// `Exact` enumerates the whole promise and every member; `Sampled` draws
/// inputs from the canonical promise distribution and members by weight.
#[derive(Debug, Clone)]
pub enum ErrorMode {
    Exact,
    Sampled { samples: u64, seed: u64 },
}

/// Error report. In exact mode `max_error` is the true worst-case error
/// over the promise and `per_input` tabulates every promise input; in
/// sampled mode `max_error` is the observed failure rate under the
/// canonical input distribution (a point estimate, not a maximum) and
/// `per_input` is empty.
#[derive(Debug, Clone)]
pub struct ErrorEstimate {
    pub max_error: BigRational,
    pub worst_input: Option<BitString>,
    pub per_input: Vec<(BitString, BigRational)>,
    pub samples: Option<u64>,
}

pub fn estimate_error<A: AmpcAlgorithm>(
    alg: &RandomizedAlgorithm<A>,
    f: &PromiseFunction,
    mode: &ErrorMode,
    config: &RunConfig,
) -> Result<ErrorEstimate> {
    match mode {
        ErrorMode::Exact => {
            let mut per_input = Vec::with_capacity(f.promise_size());
            let mut max_error = BigRational::zero();
            let mut worst_input = None;
            for (x, target) in f.promise_iter() {
                let err = alg.error_on(x, target, config)?;
                if err > max_error {
                    max_error = err.clone();
                    worst_input = Some(x.clone());
                }
                per_input.push((x.clone(), err));
            }
            Ok(ErrorEstimate {
                max_error,
                worst_input,
                per_input,
                samples: None,
            })
        }
        ErrorMode::Sampled { samples, seed } => {
            if *samples == 0 {
                return Err(Error::invalid("sampled error estimation needs at least one sample"));
            }
            let mut rng = rng::from_seed(*seed);
            let dist = CanonicalDistribution::new(f);
            // Cumulative weights as floats: member selection is the one
            // place sampling trades exactness for speed, and the estimate
            // is a point estimate regardless.
            let mut cumulative = Vec::with_capacity(alg.members.len());
            let mut acc = 0.0f64;
            for (w, _) in &alg.members {
                acc += w.to_f64().unwrap_or(0.0);
                cumulative.push(acc);
            }
            let mut wrong: u64 = 0;
            for _ in 0..*samples {
                let x = dist.sample(&mut rng);
                let target = f.value(x).expect("sampled inputs lie on the promise");
                let u: f64 = rng.gen_range(0.0..acc.max(1.0));
                let idx = cumulative
                    .partition_point(|c| *c <= u)
                    .min(alg.members.len() - 1);
                let report = run(&alg.members[idx].1, x, config)?;
                if report.outcome.bit() != Some(target) {
                    wrong += 1;
                }
            }
            Ok(ErrorEstimate {
                max_error: BigRational::new((wrong as i64).into(), (*samples as i64).into()),
                worst_input: None,
                per_input: Vec::new(),
                samples: Some(*samples),
            })
        }
    }
}
