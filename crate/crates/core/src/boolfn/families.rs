//! The concrete promise families: one cycle versus k cycles, and promise
//! majority.

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{edge_index, slot_count, BitString, GraphInstance, PromiseFunction};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Guard for exhaustive enumeration: above this vertex count the promise set
/// does not fit comfortably in memory ((n-1)!/2 Hamiltonian cycles; already
/// ≈ 2·10⁷ strings at n = 12, on the order of a gigabyte).
pub const OCKC_ENUM_MAX_N: usize = 12;

pub(crate) fn ockc_guard(n: usize, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::invalid(format!("k = {k}: need at least two cycles to distinguish")));
    }
    if n == 0 || n % k != 0 {
        return Err(Error::invalid(format!("k = {k} must divide n = {n}")));
    }
    if n / k < 3 {
        return Err(Error::invalid(format!(
            "cycle length n/k = {} is below 3; no simple graph realizes it",
            n / k
        )));
    }
    Ok(())
}

/// Exact class sizes for the one-cycle-versus-k-cycles promise, computed from
/// the cycle-structure counting formulas rather than by enumeration:
/// `(n-1)!/2` Hamiltonian cycles, and
/// `n! / ((n/k)!^k · k!) · ((n/k - 1)!/2)^k` configurations of k disjoint
/// (n/k)-cycles.
pub fn ockc_counts(n: usize, k: usize) -> Result<(u128, u128)> {
    ockc_guard(n, k)?;
    let fact = |m: usize| -> u128 { (1..=m as u128).product::<u128>().max(1) };
    let ones = fact(n - 1) / 2;
    let m = n / k;
    let partitions = fact(n) / (fact(m).pow(k as u32) * fact(k));
    let per_block = fact(m - 1) / 2;
    Ok((ones, partitions * per_block.pow(k as u32)))
}

/// Enumerates the full one-cycle-versus-k-cycles promise on `n` vertices:
/// 1-instances are the labeled Hamiltonian cycles, 0-instances the disjoint
/// unions of k cycles of length n/k. Guarded to `n ≤ OCKC_ENUM_MAX_N`.
pub fn enumerate_ockc(n: usize, k: usize) -> Result<PromiseFunction> {
    ockc_guard(n, k)?;
    if n > OCKC_ENUM_MAX_N {
        return Err(Error::invalid(format!(
            "n = {n} exceeds the enumeration guard {OCKC_ENUM_MAX_N}; use the samplers instead"
        )));
    }
    let n_bits = slot_count(n);

    let mut ones = Vec::new();
    let rest: Vec<usize> = (1..n).collect();
    permute(&rest, &mut Vec::with_capacity(n - 1), &mut |perm| {
        // Fix vertex 0 first and keep one direction per cycle by requiring
        // the successor of 0 to be smaller than its predecessor.
        if perm[0] < perm[n - 2] {
            ones.push(cycle_bits(n, std::iter::once(0).chain(perm.iter().copied())));
        }
    });

    let mut zeros = Vec::new();
    let all: Vec<usize> = (0..n).collect();
    equal_partitions(&all, n / k, &mut Vec::new(), &mut |blocks| {
        // Cross product of the cycle choices within each block.
        let mut per_block_cycles: Vec<Vec<BitString>> = Vec::with_capacity(blocks.len());
        for block in blocks {
            let mut cycles = Vec::new();
            let tail: Vec<usize> = block[1..].to_vec();
            permute(&tail, &mut Vec::with_capacity(tail.len()), &mut |perm| {
                if perm[0] < perm[perm.len() - 1] {
                    cycles.push(cycle_bits(n, std::iter::once(block[0]).chain(perm.iter().copied())));
                }
            });
            per_block_cycles.push(cycles);
        }
        let mut choice = vec![0usize; per_block_cycles.len()];
        loop {
            let mut bits = BitString::zero(n_bits);
            for (b, cycles) in per_block_cycles.iter().enumerate() {
                for slot in cycles[choice[b]].iter_ones() {
                    bits.set(slot, true);
                }
            }
            zeros.push(bits);
            // Odometer increment over the per-block choices.
            let mut pos = 0;
            loop {
                if pos == choice.len() {
                    return;
                }
                choice[pos] += 1;
                if choice[pos] < per_block_cycles[pos].len() {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
        }
    });

    PromiseFunction::new(n_bits, ones, zeros)
}

/// Edge bits of the cycle visiting the vertices in iteration order.
fn cycle_bits(n: usize, order: impl Iterator<Item = usize>) -> BitString {
    let verts: Vec<usize> = order.collect();
    let mut bits = BitString::zero(slot_count(n));
    for i in 0..verts.len() {
        let u = verts[i];
        let v = verts[(i + 1) % verts.len()];
        bits.set(edge_index(n, u, v).expect("cycle vertices in range"), true);
    }
    bits
}

/// Calls `f` for every permutation of `items` (recursive, lexicographic in
/// the input order).
fn permute(items: &[usize], prefix: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if prefix.len() == items.len() {
        f(prefix);
        return;
    }
    for &x in items {
        if !prefix.contains(&x) {
            prefix.push(x);
            permute(items, prefix, f);
            prefix.pop();
        }
    }
}

/// Calls `f` for every partition of `remaining` into unordered blocks of
/// exactly `block_size`, each block sorted ascending. Blocks are anchored at
/// the least remaining element, so each unordered partition appears once.
fn equal_partitions(
    remaining: &[usize],
    block_size: usize,
    acc: &mut Vec<Vec<usize>>,
    f: &mut impl FnMut(&[Vec<usize>]),
) {
    if remaining.is_empty() {
        f(acc);
        return;
    }
    let anchor = remaining[0];
    let rest = &remaining[1..];
    // Choose block_size - 1 companions for the anchor.
    let mut companions = vec![0usize; block_size - 1];
    choose(rest, &mut companions, 0, 0, &mut |chosen| {
        let mut block = Vec::with_capacity(block_size);
        block.push(anchor);
        block.extend_from_slice(chosen);
        let next: Vec<usize> = rest.iter().copied().filter(|v| !chosen.contains(v)).collect();
        acc.push(block);
        equal_partitions(&next, block_size, acc, f);
        acc.pop();
    });
}

/// Calls `f` for every way to fill `slots` with an ascending selection from
/// `pool` starting at index `from`.
fn choose(
    pool: &[usize],
    slots: &mut Vec<usize>,
    depth: usize,
    from: usize,
    f: &mut impl FnMut(&[usize]),
) {
    if depth == slots.len() {
        f(slots);
        return;
    }
    for i in from..pool.len() {
        slots[depth] = pool[i];
        choose(pool, slots, depth + 1, i + 1, f);
    }
}

/// Promise majority on an odd number of bits: 1-instances have weight
/// `(n+1)/2`, 0-instances weight `(n-1)/2`. Guarded to `n_bits ≤ 25`.
pub fn promise_majority(n_bits: usize) -> Result<PromiseFunction> {
    if n_bits % 2 == 0 || n_bits < 3 {
        return Err(Error::invalid(format!("promise majority needs an odd bit count ≥ 3, got {n_bits}")));
    }
    if n_bits > 25 {
        return Err(Error::invalid(format!(
            "n_bits = {n_bits} exceeds the enumeration guard 25 (class sizes are central binomials)"
        )));
    }
    let heavy = (n_bits + 1) / 2;
    let mut ones = Vec::new();
    let mut zeros = Vec::new();
    let pool: Vec<usize> = (0..n_bits).collect();
    for (weight, out) in [(heavy, &mut ones), (heavy - 1, &mut zeros)] {
        let mut slots = vec![0usize; weight];
        choose(&pool, &mut slots, 0, 0, &mut |chosen| {
            out.push(BitString::from_slots(n_bits, chosen).expect("slots in range"));
        });
    }
    PromiseFunction::new(n_bits, ones, zeros)
}

/// Samples a uniformly random instance of the requested class of the
/// one-cycle-versus-k-cycles promise, without materializing the promise set.
/// Usable at any feasible `n` (the instance itself is `n(n-1)/2` bits).
pub fn sample_ockc_instance(n: usize, k: usize, one_instance: bool, rng: &mut Rng) -> Result<GraphInstance> {
    ockc_guard(n, k)?;
    let mut verts: Vec<usize> = (0..n).collect();
    verts.shuffle(rng);
    let mut g = GraphInstance::empty(n);
    if one_instance {
        close_cycle(&mut g, &verts)?;
    } else {
        let m = n / k;
        for block in verts.chunks(m) {
            close_cycle(&mut g, block)?;
        }
    }
    Ok(g)
}

fn close_cycle(g: &mut GraphInstance, order: &[usize]) -> Result<()> {
    for i in 0..order.len() {
        g.set_edge(order[i], order[(i + 1) % order.len()], true)?;
    }
    Ok(())
}

/// Uniformly random string of a fixed weight.
pub fn sample_fixed_weight(n_bits: usize, weight: usize, rng: &mut Rng) -> BitString {
    debug_assert!(weight <= n_bits);
    // Floyd's algorithm for a uniform weight-sized subset.
    let mut chosen: Vec<usize> = Vec::with_capacity(weight);
    for j in n_bits - weight..n_bits {
        let t = rng.gen_range(0..=j);
        if chosen.contains(&t) {
            chosen.push(j);
        } else {
            chosen.push(t);
        }
    }
    BitString::from_slots(n_bits, &chosen).expect("slots in range")
}
