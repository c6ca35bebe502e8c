//! Concrete algorithms for the store-and-query model, plus the round
//! lower-bound calculators they are measured against.
//!
//! The centerpiece is [`solve_ockc`], a solver for the one-cycle-versus-k-
//! cycles promise that runs in `O(log_S n)` rounds: it builds per-vertex
//! neighbor lists with shallow aggregation trees, then repeatedly squares a
//! table of walk shortcuts ([`SuccessorLink`]) until a single probe from the
//! start vertex reveals the length of its cycle. Around it sit the two
//! classic data-movement subroutines every such algorithm leans on —
//! [`prefix_sum`] and [`matrix_to_edge_list`] — and a general
//! [`build_adjacency_lists`] with an in-model degree guard.
//!
//! Every machine here is budgeted against the capacity `S` of the simulator
//! in `ampc`: a machine receives at most `S` response values (an empty
//! response costs one), writes at most `S` pairs, and no key may collect
//! more than `S` values. The arities and stride constants below are all
//! derived from those three laws; each constructor documents its own
//! accounting. Valid inputs run clean under strict enforcement — the tests
//! assert this — while malformed inputs at worst stop machines under
//! lenient enforcement and surface as a missing answer or an in-model error
//! message, never as a simulator crash.

mod adjacency;
mod bounds;
mod prefix;
mod solve;

pub use adjacency::{build_adjacency_lists, matrix_to_edge_list, AdjacencyLists, EdgeList};
pub use bounds::{det_round_lower_bound, rand_round_lower_bound, BoundReport, BoundRoute};
pub use prefix::{prefix_sum, PrefixSum};
pub use solve::{solve_ockc, OckcSolver, SuccessorLink};


/// `ceil(x / d)` for positive `d`.
pub(crate) fn ceil_div(x: usize, d: usize) -> usize {
    x.div_ceil(d)
}

/// Sizes of the aggregation-tree levels above a base of `count` items when
/// every node merges up to `arity` children: `[ceil(count/arity), ...]`
/// down to a single root. `count` must be at least 2 — a base of one item
/// needs no tree, and callers special-case it.
pub(crate) fn tree_levels(count: usize, arity: usize) -> Vec<usize> {
    debug_assert!(count >= 2 && arity >= 2);
    let mut sizes = Vec::new();
    let mut size = count;
    loop {
        size = ceil_div(size, arity);
        sizes.push(size);
        if size == 1 {
            return sizes;
        }
    }
}

/// Smallest `t` with `base^t >= x` (for `base >= 2`, `x >= 1`).
#[cfg(test)]
pub(crate) fn ceil_log(base: u64, x: u64) -> usize {
    debug_assert!(base >= 2 && x >= 1);
    let mut t = 0;
    let mut reach: u64 = 1;
    while reach < x {
        reach = reach.saturating_mul(base);
        t += 1;
    }
    t
}

/// The `j`-th vertex other than `u`, in ascending order.
pub(crate) fn nth_other(u: usize, j: usize) -> usize {
    if j < u {
        j
    } else {
        j + 1
    }
}

/// Input key for the matrix slot joining `u` with its `j`-th potential
/// neighbor (the `j`-th vertex other than `u`, ascending).
pub(crate) fn incident_slot_key(n: usize, u: usize, j: usize) -> crate::ampc::Key {
    let w = nth_other(u, j);
    let slot = crate::boolfn::edge_index(n, u.min(w), u.max(w))
        .expect("vertex indices fit the slot grid");
    crate::ampc::Key::input(slot)
}
