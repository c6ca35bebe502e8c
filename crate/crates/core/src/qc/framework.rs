//! Sensitive-block families: local data certifying global lower bounds
//! on approximate certificate complexity.

use std::fmt;

use num::{BigRational, One, ToPrimitive, Zero};
use serde::Serialize;

use crate::boolfn::{
    cycle_structure, edge_index, slot_count, BitString, Classification, GraphInstance,
    PromiseFunction,
};
use crate::error::{Error, Result};
use crate::util::FastMap;

/// Per-1-instance families of slot blocks whose flips land in the zero
/// class, with the parameters (K, δ) the certification argument uses.
#[derive(Clone, Debug)]
pub struct SensitiveBlockFamily {
    k: BigRational,
    delta: BigRational,
    /// `blocks[i]` lists the blocks of the i-th 1-instance (promise
    /// order); each block is a sorted list of slot indices.
    blocks: Vec<Vec<Vec<usize>>>,
}

impl SensitiveBlockFamily {
    pub fn new(k: BigRational, delta: BigRational, blocks: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if k <= BigRational::zero() {
            return Err(Error::invalid("block family needs K > 0"));
        }
        let half = BigRational::new(1.into(), 2.into());
        if delta <= BigRational::zero() || delta >= half {
            return Err(Error::invalid("block family needs 0 < δ < 1/2"));
        }
        Ok(SensitiveBlockFamily { k, delta, blocks })
    }

    pub fn k(&self) -> &BigRational {
        &self.k
    }

    pub fn delta(&self) -> &BigRational {
        &self.delta
    }

    pub fn blocks(&self) -> &[Vec<Vec<usize>>] {
        &self.blocks
    }
}

/// One failed hypothesis of the certification argument.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum FrameworkViolation {
    /// Flipping this block of this 1-instance does not land in the zero
    /// class.
    FlipEscapes { instance: usize, block: usize },
    /// Two blocks of this 1-instance share a slot.
    BlocksOverlap { instance: usize },
    /// This 1-instance lists fewer than 2K blocks.
    TooFewBlocks { instance: usize, listed: usize },
    /// This 0-instance is hit by more than d flips.
    DegreeExceeded { zero_instance: usize, degree: usize },
}

impl fmt::Display for FrameworkViolation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameworkViolation::FlipEscapes { instance, block } => {
                write!(out, "flip of block {block} on 1-instance {instance} leaves the zero class")
            }
            FrameworkViolation::BlocksOverlap { instance } => {
                write!(out, "blocks of 1-instance {instance} overlap")
            }
            FrameworkViolation::TooFewBlocks { instance, listed } => {
                write!(out, "1-instance {instance} lists {listed} blocks, fewer than 2K")
            }
            FrameworkViolation::DegreeExceeded { zero_instance, degree } => {
                write!(out, "0-instance {zero_instance} absorbs {degree} flips, more than d")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct FrameworkReport {
    pub k: BigRational,
    pub delta: BigRational,
    /// Zero-side degree cap `d = (1/(2δ) − 1) · K · |V₁|/|V₀|`.
    pub d: BigRational,
    /// `⌈K⌉` when every hypothesis holds: the certified lower bound on
    /// the δ-approximate certificate complexity. Complexities are
    /// integers, so a half-integer K rounds up.
    pub certified: Option<usize>,
    pub violations: Vec<FrameworkViolation>,
}

/// Verifies the three hypotheses of the sensitive-block argument:
/// (i) every listed block flips its 1-instance into the zero class,
/// (ii) every 1-instance lists at least 2K pairwise-disjoint blocks, and
/// (iii) no 0-instance absorbs more than `d = (1/(2δ)−1)·K·|V₁|/|V₀|`
/// flips. When all hold, any relabeling of mass ≤ δ must leave some
/// 1-instance with K disjoint still-valid blocks, so every certificate
/// for it needs a slot per block: C_δ ≥ K. Violations are reported as
/// data, not errors.
pub fn check_framework(
    fam: &SensitiveBlockFamily,
    f: &PromiseFunction,
) -> Result<FrameworkReport> {
    if fam.blocks.len() != f.ones().len() {
        return Err(Error::invalid(format!(
            "family lists blocks for {} 1-instances, function has {}",
            fam.blocks.len(),
            f.ones().len()
        )));
    }
    for blocks in &fam.blocks {
        for block in blocks {
            if block.iter().any(|&slot| slot >= f.n_bits()) {
                return Err(Error::invalid("block slot out of range"));
            }
        }
    }

    let mut violations = Vec::new();
    let two_k = BigRational::from_integer(2.into()) * &fam.k;
    let mut absorbed: FastMap<BitString, usize> = FastMap::default();

    for (i, (x, blocks)) in f.ones().iter().zip(&fam.blocks).enumerate() {
        let mut seen = BitString::zero(f.n_bits());
        let mut overlap = false;
        for (j, block) in blocks.iter().enumerate() {
            let flipped = x.with_flipped(block);
            match f.classify(&flipped) {
                Classification::Zero => *absorbed.entry(flipped).or_insert(0) += 1,
                _ => violations.push(FrameworkViolation::FlipEscapes { instance: i, block: j }),
            }
            for &slot in block {
                if seen.get(slot) {
                    overlap = true;
                }
                seen.set(slot, true);
            }
        }
        if overlap {
            violations.push(FrameworkViolation::BlocksOverlap { instance: i });
        }
        let listed = BigRational::from_integer((blocks.len() as i64).into());
        if listed < two_k {
            violations.push(FrameworkViolation::TooFewBlocks { instance: i, listed: blocks.len() });
        }
    }

    let ratio = BigRational::new(
        (f.ones().len() as i64).into(),
        (f.zeros().len() as i64).into(),
    );
    let inv = (BigRational::one() / (BigRational::from_integer(2.into()) * &fam.delta))
        - BigRational::one();
    let d = inv * &fam.k * ratio;
    for (zi, y) in f.zeros().iter().enumerate() {
        let degree = absorbed.get(y).copied().unwrap_or(0);
        if BigRational::from_integer((degree as i64).into()) > d {
            violations.push(FrameworkViolation::DegreeExceeded { zero_instance: zi, degree });
        }
    }

    let certified = if violations.is_empty() {
        Some(fam.k.ceil().to_integer().to_usize().unwrap_or(usize::MAX))
    } else {
        None
    };
    Ok(FrameworkReport {
        k: fam.k.clone(),
        delta: fam.delta.clone(),
        d,
        certified,
        violations,
    })
}

/// The opposite-edge block family for a full-cycle-versus-two-half-cycles
/// promise on an even number of vertices: for each Hamiltonian cycle, each
/// of the n/2 opposite edge pairs yields the 4-slot block {the two deleted
/// cycle edges, the two edges closing the leftover paths into half
/// cycles}. Parameters are K = n/4, δ = 1/6.
pub fn opposite_edge_blocks(f: &PromiseFunction, n: usize) -> Result<SensitiveBlockFamily> {
    if n < 6 || n % 2 != 0 {
        return Err(Error::invalid(format!(
            "opposite-edge blocks need an even vertex count of at least 6, got {n}"
        )));
    }
    if f.n_bits() != slot_count(n) {
        return Err(Error::invalid(format!(
            "function has {} slots, expected {} for {n} vertices",
            f.n_bits(),
            slot_count(n)
        )));
    }

    let half = n / 2;
    let mut blocks = Vec::with_capacity(f.ones().len());
    for x in f.ones() {
        let g = GraphInstance::from_bits(n, x.clone())?;
        if cycle_structure(&g) != Some(vec![n]) {
            return Err(Error::invalid(
                "every 1-instance must be a single full-length cycle",
            ));
        }
        // Walk the cycle from vertex 0, starting toward its smaller
        // neighbor so the traversal is canonical.
        let mut order = Vec::with_capacity(n);
        order.push(0);
        let mut prev = usize::MAX;
        let mut cur = 0;
        for _ in 1..n {
            let next = g
                .neighbors(cur)
                .into_iter()
                .find(|&v| v != prev)
                .expect("cycle vertices have two neighbors");
            order.push(next);
            prev = cur;
            cur = next;
        }

        let mut family = Vec::with_capacity(half);
        for i in 0..half {
            let a = order[i];
            let b = order[(i + 1) % n];
            let c = order[(i + half) % n];
            let d = order[(i + half + 1) % n];
            // Deleting (a,b) and (c,d) leaves the paths b..c and d..a;
            // the new edges (b,c) and (d,a) close them into half cycles.
            let mut block = vec![
                edge_index(n, a, b)?,
                edge_index(n, c, d)?,
                edge_index(n, b, c)?,
                edge_index(n, d, a)?,
            ];
            block.sort_unstable();
            family.push(block);
        }
        blocks.push(family);
    }

    SensitiveBlockFamily::new(
        BigRational::new((n as i64).into(), 4.into()),
        BigRational::new(1.into(), 6.into()),
        blocks,
    )
}
