//! The canonical hard distribution over a promise: half the mass uniform on
//! 1-instances, half uniform on 0-instances.

use num::{BigRational, FromPrimitive, Zero};
use rand::Rng as _;

use super::{BitString, PromiseFunction};
use crate::rng::Rng;

/// Exact weights for the canonical distribution over a promise function:
/// each 1-instance carries mass `1/(2·|ones|)`, each 0-instance
/// `1/(2·|zeros|)`.
#[derive(Debug, Clone)]
pub struct CanonicalDistribution<'a> {
    f: &'a PromiseFunction,
    weight_one: BigRational,
    weight_zero: BigRational,
}

impl<'a> CanonicalDistribution<'a> {
    pub fn new(f: &'a PromiseFunction) -> Self {
        let two = |m: usize| BigRational::from_usize(2 * m).expect("class size fits");
        CanonicalDistribution {
            f,
            weight_one: two(f.ones().len()).recip(),
            weight_zero: two(f.zeros().len()).recip(),
        }
    }

    pub fn function(&self) -> &'a PromiseFunction {
        self.f
    }

    /// Mass of a single promise instance (0 for non-promise strings).
    pub fn weight(&self, x: &BitString) -> BigRational {
        match self.f.classify(x) {
            super::Classification::One => self.weight_one.clone(),
            super::Classification::Zero => self.weight_zero.clone(),
            super::Classification::Invalid => BigRational::zero(),
        }
    }

    pub fn weight_of_one_instance(&self) -> &BigRational {
        &self.weight_one
    }

    pub fn weight_of_zero_instance(&self) -> &BigRational {
        &self.weight_zero
    }

    /// Total mass of a set of instances, counting multiplicity once per
    /// distinct instance (the caller is expected to pass a deduplicated set).
    pub fn mass<'b>(&self, set: impl IntoIterator<Item = &'b BitString>) -> BigRational {
        set.into_iter().map(|x| self.weight(x)).sum()
    }

    /// Draws an instance: a fair coin for the class, then a uniform index.
    pub fn sample(&self, rng: &mut Rng) -> &'a BitString {
        if rng.gen::<bool>() {
            &self.f.ones()[rng.gen_range(0..self.f.ones().len())]
        } else {
            &self.f.zeros()[rng.gen_range(0..self.f.zeros().len())]
        }
    }
}
