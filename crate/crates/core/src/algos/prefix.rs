//! Prefix sums over a fixed sequence, as a multi-round algorithm.
//!
//! The sequence is baked into the machines (it is data of the algorithm,
//! not part of the queryable input), so round 1 needs no queries at all:
//! leaf machines emit block sums directly. An aggregation tree of arity
//! `S−1` then runs up to the root, the root hands each child its offset,
//! offsets cascade back down, and the leaf blocks emit the final sums. A
//! sequence that fits one machine's write budget skips all of that and is
//! answered in a single round.
//!
//! Budget accounting per machine, against capacity `S`:
//! - leaf block (round 1): no queries, 1 write;
//! - up node: at most `S−1` single-valued keys read, 1 write;
//! - down node: its own offset plus at most `S−1` child sums — exactly `S`
//!   values in the worst case — and at most `S−1` offset writes;
//! - leaf emitter: one offset read, at most `S−1` output writes;
//! - sum holder: one read, one write (a round's writes are all the next
//!   round can see, so sums the down pass needs again are re-written each
//!   round in between).

use std::sync::Arc;

use super::tree_levels;
use crate::ampc::{AmpcAlgorithm, Key, NonAdaptive, RosterEntry, Value};
use crate::error::{Error, Result};

/// Prefix sums of a baked-in sequence: after the final round, key
/// `("psum", i)` holds `a_1 + ... + a_i` for `i = 1..=P`. Sums wrap modulo
/// 2⁶⁴, matching what a sequential `wrapping_add` scan produces.
pub struct PrefixSum {
    values: Arc<Vec<u64>>,
    arity: usize,
    /// Block counts per tree level; `level_sizes[0]` is the number of leaf
    /// blocks and the last entry is 1 (the root). Empty in the
    /// single-machine case.
    level_sizes: Vec<usize>,
}

/// Builds the prefix-sum algorithm for `values` under capacity `capacity`.
pub fn prefix_sum(values: &[u64], capacity: u64) -> Result<PrefixSum> {
    if values.is_empty() {
        return Err(Error::invalid("prefix sums need at least one value"));
    }
    if capacity < 4 {
        return Err(Error::invalid(format!(
            "capacity {capacity} is below 4, too small for the aggregation tree"
        )));
    }
    let p = values.len();
    let arity = (capacity - 1) as usize;
    let level_sizes = if p <= capacity as usize {
        Vec::new()
    } else {
        // p > capacity > arity - 1, so the leaf level has at least 2 blocks.
        tree_levels(p, arity)
    };
    Ok(PrefixSum {
        values: Arc::new(values.to_vec()),
        arity,
        level_sizes,
    })
}

impl PrefixSum {
    fn p(&self) -> usize {
        self.values.len()
    }

    /// Number of tree levels (leaf blocks are level 1, the root is level L).
    fn top(&self) -> usize {
        self.level_sizes.len()
    }

    /// Items covered by node `j` of level `level`: a range of the level
    /// below (level 1 covers the values themselves).
    fn span(&self, level: usize, j: usize) -> std::ops::Range<usize> {
        let below = if level == 1 {
            self.p()
        } else {
            self.level_sizes[level - 2]
        };
        let lo = j * self.arity;
        lo..below.min(lo + self.arity)
    }

    fn sum_key(level: usize, j: usize) -> Key {
        Key::new("ps", &[level as i64, j as i64])
    }

    fn offset_key(level: usize, j: usize) -> Key {
        Key::new("po", &[level as i64, j as i64])
    }

    /// Key holding the prefix sum of the first `i + 1` values (0-indexed
    /// position, 1-indexed key coordinate).
    pub fn output_key(i: usize) -> Key {
        Key::new("psum", &[i as i64 + 1])
    }

    fn block_sum(&self, level1_block: usize) -> u64 {
        self.span(1, level1_block)
            .fold(0u64, |acc, i| acc.wrapping_add(self.values[i]))
    }
}

impl AmpcAlgorithm for PrefixSum {
    fn input_len(&self) -> usize {
        0
    }

    fn rounds(&self) -> usize {
        if self.level_sizes.is_empty() {
            1
        } else {
            2 * self.top() - 1
        }
    }

    fn roster(&self, round: usize) -> Vec<RosterEntry> {
        let mut roster = Vec::new();
        let mut next_id = 0u64;
        let mut push = |roster: &mut Vec<RosterEntry>, program: NonAdaptive| {
            roster.push(RosterEntry::new(next_id, program));
            next_id += 1;
        };

        if self.level_sizes.is_empty() {
            // Everything fits one machine: emit all the sums at once.
            let values = Arc::clone(&self.values);
            push(
                &mut roster,
                NonAdaptive::new(Vec::new(), move |_| {
                    let mut acc = 0u64;
                    values
                        .iter()
                        .enumerate()
                        .map(|(i, &v)| {
                            acc = acc.wrapping_add(v);
                            (Self::output_key(i), Value::scalar(acc))
                        })
                        .collect()
                }),
            );
            return roster;
        }

        let top = self.top();
        if round == 1 {
            // Leaf blocks emit their sums without touching the store.
            for j in 0..self.level_sizes[0] {
                let sum = self.block_sum(j);
                push(
                    &mut roster,
                    NonAdaptive::new(Vec::new(), move |_| {
                        vec![(Self::sum_key(1, j), Value::scalar(sum))]
                    }),
                );
            }
        } else if round < top {
            // Aggregation continues upward: level `round` sums.
            let level = round;
            for j in 0..self.level_sizes[level - 1] {
                let queries: Vec<Key> = self.span(level, j).map(|c| Self::sum_key(level - 1, c)).collect();
                push(
                    &mut roster,
                    NonAdaptive::new(queries, move |resps| {
                        let sum = resps
                            .iter()
                            .fold(0u64, |acc, r| acc.wrapping_add(r.first().map_or(0, |v| v.word(0))));
                        vec![(Self::sum_key(level, j), Value::scalar(sum))]
                    }),
                );
            }
        } else if round == top {
            // The root turns around: it reads its children's sums and hands
            // each child its offset (the root's own offset is zero).
            let children = self.span(top, 0);
            let queries: Vec<Key> = children.clone().map(|c| Self::sum_key(top - 1, c)).collect();
            let base = children.start;
            push(
                &mut roster,
                NonAdaptive::new(queries, move |resps| {
                    let mut acc = 0u64;
                    resps
                        .iter()
                        .enumerate()
                        .map(|(i, r)| {
                            let here = acc;
                            acc = acc.wrapping_add(r.first().map_or(0, |v| v.word(0)));
                            (Self::offset_key(top - 1, base + i), Value::scalar(here))
                        })
                        .collect()
                }),
            );
        } else if round < 2 * top - 1 {
            // Offsets cascade down: level `level` nodes split their offset
            // among their children.
            let level = 2 * top - round;
            for j in 0..self.level_sizes[level - 1] {
                let children = self.span(level, j);
                let mut queries = vec![Self::offset_key(level, j)];
                queries.extend(children.clone().map(|c| Self::sum_key(level - 1, c)));
                let base = children.start;
                push(
                    &mut roster,
                    NonAdaptive::new(queries, move |resps| {
                        let mut acc = resps[0].first().map_or(0, |v| v.word(0));
                        resps[1..]
                            .iter()
                            .enumerate()
                            .map(|(i, r)| {
                                let here = acc;
                                acc = acc.wrapping_add(r.first().map_or(0, |v| v.word(0)));
                                (Self::offset_key(level - 1, base + i), Value::scalar(here))
                            })
                            .collect()
                    }),
                );
            }
        } else {
            // Final round: each leaf block reads its offset and emits the
            // prefix sums of its own values.
            for j in 0..self.level_sizes[0] {
                let block = self.span(1, j);
                let values = Arc::clone(&self.values);
                push(
                    &mut roster,
                    NonAdaptive::new(vec![Self::offset_key(1, j)], move |resps| {
                        let mut acc = resps[0].first().map_or(0, |v| v.word(0));
                        block
                            .map(|i| {
                                acc = acc.wrapping_add(values[i]);
                                (Self::output_key(i), Value::scalar(acc))
                            })
                            .collect()
                    }),
                );
            }
        }

        // A round's writes are all the next round can see, so sums that the
        // down pass will read again are re-written by holder machines each
        // round in between (level m is consumed on the way down at round
        // 2·top − m − 1).
        for m in 1..=top.saturating_sub(2) {
            if round >= m + 1 && round <= 2 * top - m - 2 {
                for j in 0..self.level_sizes[m - 1] {
                    let key = Self::sum_key(m, j);
                    push(
                        &mut roster,
                        NonAdaptive::new(vec![key], move |resps| {
                            resps[0].iter().map(|&v| (key, v)).collect()
                        }),
                    );
                }
            }
        }
        roster
    }
}
