//! Deterministic query depth by memoized minimax over restrictions.

use serde::Serialize;

use crate::boolfn::{BitString, PromiseFunction};
use crate::error::{Error, Result};
use crate::poly::CubeTable;
use crate::util::FastMap;

/// Default cap on minimax node expansions before giving up.
pub const DEFAULT_DEPTH_NODE_BUDGET: u64 = 1 << 26;

fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

// -------------------------------------------------------------------
// Restrictions
// -------------------------------------------------------------------

/// A partial assignment of input slots: each slot is fixed to a bit or
/// free. This is the state of the depth search; a restriction is
/// consistent with a promise function iff at least one promise input
/// agrees with every fixed slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    n_slots: usize,
    fixed: u64,
    ones: u64,
}

impl Restriction {
    /// The all-free restriction on `n_slots` slots (at most 64).
    pub fn free(n_slots: usize) -> Result<Self> {
        if n_slots == 0 || n_slots > 64 {
            return Err(Error::invalid(format!(
                "restrictions support 1..=64 slots, got {n_slots}"
            )));
        }
        Ok(Restriction { n_slots, fixed: 0, ones: 0 })
    }

    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    pub fn is_free(&self, slot: usize) -> bool {
        assert!(slot < self.n_slots);
        self.fixed >> slot & 1 == 0
    }

    /// The fixed value of a slot, or `None` if it is free.
    pub fn value(&self, slot: usize) -> Option<bool> {
        if self.is_free(slot) {
            None
        } else {
            Some(self.ones >> slot & 1 == 1)
        }
    }

    pub fn assign(&mut self, slot: usize, value: bool) {
        assert!(slot < self.n_slots);
        self.fixed |= 1 << slot;
        if value {
            self.ones |= 1 << slot;
        } else {
            self.ones &= !(1 << slot);
        }
    }

    pub fn release(&mut self, slot: usize) {
        assert!(slot < self.n_slots);
        self.fixed &= !(1 << slot);
        self.ones &= !(1 << slot);
    }

    pub fn free_count(&self) -> usize {
        self.n_slots - self.fixed.count_ones() as usize
    }

    /// Whether `x` matches every fixed slot.
    pub fn agrees(&self, x: &BitString) -> bool {
        assert_eq!(x.len(), self.n_slots);
        let mut slots = self.fixed;
        while slots != 0 {
            let i = slots.trailing_zeros() as usize;
            slots &= slots - 1;
            if x.get(i) != (self.ones >> i & 1 == 1) {
                return false;
            }
        }
        true
    }

    /// Whether at least one promise input agrees with the fixed slots.
    pub fn is_consistent_with(&self, f: &PromiseFunction) -> bool {
        f.promise_iter().any(|(x, _)| self.agrees(x))
    }
}

// -------------------------------------------------------------------
// Promise-function depth
// -------------------------------------------------------------------

struct DepthSolver {
    n_slots: usize,
    /// Bit `j` set iff promise member `j` is a 1-instance.
    one_members: u128,
    /// `slot_values[i][b]`: members whose slot `i` holds bit `b`.
    slot_values: Vec<[u128; 2]>,
    /// Depth of the subgame at (free-slot mask, consistent member set).
    /// Two restrictions with the same free slots and the same consistent
    /// members have identical subgames, so this collapses the 3^N
    /// restriction space to its reachable quotient.
    memo: FastMap<(u64, u128), u8>,
    nodes: u64,
    budget: u64,
}

impl DepthSolver {
    fn new(f: &PromiseFunction, budget: u64) -> Result<Self> {
        let n_slots = f.n_bits();
        if n_slots > 64 {
            return Err(Error::invalid(format!(
                "depth search supports at most 64 slots, got {n_slots}"
            )));
        }
        if f.promise_size() > 128 {
            return Err(Error::invalid(format!(
                "depth search supports at most 128 promise inputs, got {}",
                f.promise_size()
            )));
        }
        let mut one_members = 0u128;
        let mut slot_values = vec![[0u128; 2]; n_slots];
        for (j, (x, value)) in f.promise_iter().enumerate() {
            if value {
                one_members |= 1 << j;
            }
            for (i, masks) in slot_values.iter_mut().enumerate() {
                masks[usize::from(x.get(i))] |= 1 << j;
            }
        }
        Ok(DepthSolver {
            n_slots,
            one_members,
            slot_values,
            memo: FastMap::default(),
            nodes: 0,
            budget,
        })
    }

    fn all_members(&self) -> u128 {
        self.slot_values.first().map_or(0, |m| m[0] | m[1])
    }

    fn solve(&mut self, free: u64, members: u128) -> Result<u8> {
        let ones = members & self.one_members;
        if members == 0 || ones == 0 || ones == members {
            return Ok(0);
        }
        if let Some(&d) = self.memo.get(&(free, members)) {
            return Ok(d);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::ResourceLimit {
                what: "depth-search node expansions".into(),
                budget: self.budget,
                lower: Some(1),
                upper: Some(self.n_slots as u64),
            });
        }
        // Querying every remaining free slot isolates single inputs, so the
        // free count always suffices.
        let mut best = free.count_ones() as u8;
        let mut slots = free;
        while slots != 0 {
            let i = slots.trailing_zeros() as usize;
            slots &= slots - 1;
            let child_free = free & !(1u64 << i);
            let mut worst = 0u8;
            for b in 0..2 {
                let child = members & self.slot_values[i][b];
                if child == 0 {
                    continue; // no consistent completion: free branch
                }
                worst = worst.max(self.solve(child_free, child)?);
                if worst + 1 >= best {
                    break; // this slot cannot beat the best one found
                }
            }
            if worst + 1 < best {
                best = worst + 1;
                if best == 1 {
                    break;
                }
            }
        }
        self.memo.insert((free, members), best);
        Ok(best)
    }

    fn witness(&mut self, free: u64, members: u128) -> Result<DecisionTree> {
        if members == 0 {
            return Ok(DecisionTree::Unreachable);
        }
        let ones = members & self.one_members;
        if ones == 0 || ones == members {
            return Ok(DecisionTree::Leaf(ones != 0));
        }
        let target = self.solve(free, members)?;
        let mut slots = free;
        while slots != 0 {
            let i = slots.trailing_zeros() as usize;
            slots &= slots - 1;
            let child_free = free & !(1u64 << i);
            let zero = members & self.slot_values[i][0];
            let one = members & self.slot_values[i][1];
            let mut worst = 0u8;
            for child in [zero, one] {
                if child != 0 {
                    worst = worst.max(self.solve(child_free, child)?);
                }
            }
            if worst + 1 == target {
                // Lowest-index optimal slot: any choice yields the same
                // depth, so the tie-break only fixes a canonical witness.
                return Ok(DecisionTree::Query {
                    slot: i,
                    zero: Box::new(self.witness(child_free, zero)?),
                    one: Box::new(self.witness(child_free, one)?),
                });
            }
        }
        Err(Error::ConsistencyBreach(
            "depth search found no slot matching its own optimum".into(),
        ))
    }
}

/// A witness decision tree for the deterministic query depth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DecisionTree {
    /// No promise input reaches this branch.
    Unreachable,
    /// All promise inputs reaching this branch share this value.
    Leaf(bool),
    /// Query `slot` and descend by its value.
    Query {
        slot: usize,
        zero: Box<DecisionTree>,
        one: Box<DecisionTree>,
    },
}

impl DecisionTree {
    pub fn depth(&self) -> usize {
        match self {
            DecisionTree::Unreachable | DecisionTree::Leaf(_) => 0,
            DecisionTree::Query { zero, one, .. } => 1 + zero.depth().max(one.depth()),
        }
    }

    /// Runs the tree on an input; `None` on an unreachable branch.
    pub fn decide(&self, x: &BitString) -> Option<bool> {
        match self {
            DecisionTree::Unreachable => None,
            DecisionTree::Leaf(v) => Some(*v),
            DecisionTree::Query { slot, zero, one } => {
                if x.get(*slot) {
                    one.decide(x)
                } else {
                    zero.decide(x)
                }
            }
        }
    }
}

/// Least depth of a decision tree correct on every promise input.
///
/// Minimax recurrence: a restriction consistent only with inputs of one
/// value costs 0; otherwise it costs `1 + min` over free slots of the
/// `max` over the two answers, where an answer no promise input can give
/// is free. Memoized on (free slots, consistent member set).
pub fn det_query_complexity(f: &PromiseFunction) -> Result<usize> {
    det_query_complexity_with_budget(f, DEFAULT_DEPTH_NODE_BUDGET)
}

/// [`det_query_complexity`] with an explicit node budget. Exceeding the
/// budget reports the trivial bounds still standing (1 and the slot
/// count) — a larger budget is the only way to tighten them.
pub fn det_query_complexity_with_budget(f: &PromiseFunction, budget: u64) -> Result<usize> {
    let mut solver = DepthSolver::new(f, budget)?;
    let members = solver.all_members();
    Ok(solver.solve(low_mask(solver.n_slots), members)? as usize)
}

/// The depth together with one optimal decision tree (ties broken toward
/// the lowest slot index, purely to make the witness canonical).
pub fn decision_tree(f: &PromiseFunction, budget: u64) -> Result<(usize, DecisionTree)> {
    let mut solver = DepthSolver::new(f, budget)?;
    let members = solver.all_members();
    let free = low_mask(solver.n_slots);
    let value = solver.solve(free, members)? as usize;
    let tree = solver.witness(free, members)?;
    Ok((value, tree))
}

// -------------------------------------------------------------------
// Total functions
// -------------------------------------------------------------------

/// Deterministic query depth of a total function given as a truth table.
/// Restrictions of a total function are subcubes, so the memo is keyed on
/// the (fixed slots, fixed values) pair directly.
pub fn det_query_complexity_total(table: &CubeTable) -> usize {
    fn constant_on(table: &CubeTable, fixed: u32, ones: u32, n: usize) -> bool {
        let free = !fixed & low_mask(n) as u32;
        let first = table.get(ones);
        let mut sub = free;
        loop {
            if table.get(ones | sub) != first {
                return false;
            }
            if sub == 0 {
                return true;
            }
            sub = (sub - 1) & free;
        }
    }

    fn solve(
        table: &CubeTable,
        memo: &mut FastMap<(u32, u32), u8>,
        fixed: u32,
        ones: u32,
        n: usize,
    ) -> u8 {
        if constant_on(table, fixed, ones, n) {
            return 0;
        }
        if let Some(&d) = memo.get(&(fixed, ones)) {
            return d;
        }
        let mut best = (n as u32 - fixed.count_ones()) as u8;
        let mut slots = !fixed & low_mask(n) as u32;
        while slots != 0 {
            let bit = slots & slots.wrapping_neg();
            slots ^= bit;
            let zero = solve(table, memo, fixed | bit, ones, n);
            let worst = if zero + 1 >= best {
                zero
            } else {
                zero.max(solve(table, memo, fixed | bit, ones | bit, n))
            };
            if worst + 1 < best {
                best = worst + 1;
                if best == 1 {
                    break;
                }
            }
        }
        memo.insert((fixed, ones), best);
        best
    }

    let n = table.n_vars();
    if n == 0 {
        return 0;
    }
    solve(table, &mut FastMap::default(), 0, 0, n) as usize
}

/// Depth-versus-degree report for a total function.
#[derive(Clone, Debug, Serialize)]
pub struct MidrijanisReport {
    pub query_depth: usize,
    pub degree: usize,
    /// Whether `query_depth ≤ 2 · degree³` — the classical cubic bound
    /// relating decision-tree depth to polynomial degree.
    pub holds: bool,
}

/// Computes depth and degree of a total function and tests the cubic
/// relation `D ≤ 2·deg³` between them.
pub fn midrijanis_check(table: &CubeTable) -> MidrijanisReport {
    let query_depth = det_query_complexity_total(table);
    let degree = table.degree();
    MidrijanisReport {
        query_depth,
        degree,
        holds: query_depth <= 2 * degree.pow(3),
    }
}
