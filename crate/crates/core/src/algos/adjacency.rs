//! Adjacency preprocessing: neighbor lists with a degree guard, and a
//! globally labeled edge list.
//!
//! Both algorithms read the input as the upper-triangle bit matrix of a
//! graph on `n` vertices (slot `(u,v)` is bit `edge_index(n,u,v)`).
//!
//! [`build_adjacency_lists`] publishes each vertex's neighbors under
//! `("nbr", u)`. The per-key law caps a key at `S` values, so a vertex of
//! degree above `S` must be caught *before* anything writes its list —
//! writing first and checking later would abort the run instead of
//! reporting. The build therefore stages: scanners park neighbors in
//! per-chunk shards and write chunk counts; a count tree computes exact
//! degrees; publishers then copy only lists that fit; an OR-tree funnels
//! any violation into a single message under `("err",())` naming the
//! smallest offending vertex; and holder machines re-write the published
//! lists until the funnel finishes. Every slot is scanned from both
//! endpoints, so
//! a vertex's whole degree computation stays inside its own `n−1` slots and
//! the trees stay `log_S n` shallow.
//!
//! [`matrix_to_edge_list`] numbers the present edges `1..=m` in slot order:
//! scanner groups partition the slots, group counts run through a prefix
//! tree, and each group then labels its own edges from its prefix total.
//! Dedicated holder machines re-write each group's found edges — and the
//! counts and sums the tree's down pass will need again — every round in
//! between, since a round's machines can only see the store the previous
//! round left behind.

use super::{ceil_div, incident_slot_key, nth_other, tree_levels};
use crate::ampc::{AmpcAlgorithm, Key, NonAdaptive, RosterEntry, Value};
use crate::boolfn::{slot_count, slot_endpoints};
use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// shared scanning plumbing
// ---------------------------------------------------------------------------

fn check_graph_params(n: usize, capacity: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid(format!("a graph input needs n >= 2 vertices, got {n}")));
    }
    if capacity < 4 {
        return Err(Error::invalid(format!(
            "capacity {capacity} is below 4; the scan groups would be empty"
        )));
    }
    Ok(())
}

/// Neighbors found in a response batch to incident-slot queries
/// `lo..hi` of vertex `u` (ascending `w` order, so the list is sorted).
fn found_neighbors(u: usize, lo: usize, resps: &[Vec<Value>]) -> Vec<u64> {
    resps
        .iter()
        .enumerate()
        .filter(|(_, r)| r.first().and_then(Value::as_bit) == Some(true))
        .map(|(i, _)| nth_other(u, lo + i) as u64)
        .collect()
}

// ---------------------------------------------------------------------------
// adjacency lists with a degree guard
// ---------------------------------------------------------------------------

/// Builds `("nbr", u)` neighbor lists for every vertex of degree at most
/// `S`, and writes a single `("err",())` message if any degree exceeds `S`.
pub struct AdjacencyLists {
    n: usize,
    capacity: u64,
    /// Slots scanned per chunk machine: `S−2`.
    chunk_width: usize,
    /// Tree arity: `S−1` single-valued keys read per node.
    arity: usize,
    /// Chunks per vertex.
    chunks: usize,
    /// Count-tree level sizes over the chunks (empty when one chunk covers
    /// a whole row — then degrees cannot exceed `S` and round 1 publishes
    /// directly).
    count_levels: Vec<usize>,
    /// OR-tree level sizes over the vertices, for the error funnel.
    err_levels: Vec<usize>,
}

/// Plans the adjacency build for `n` vertices under capacity `capacity`.
pub fn build_adjacency_lists(n: usize, capacity: u64) -> Result<AdjacencyLists> {
    check_graph_params(n, capacity)?;
    let chunk_width = (capacity - 2) as usize;
    let arity = (capacity - 1) as usize;
    let chunks = ceil_div(n - 1, chunk_width);
    let (count_levels, err_levels) = if chunks == 1 {
        (Vec::new(), Vec::new())
    } else {
        (tree_levels(chunks, arity), tree_levels(n, arity))
    };
    Ok(AdjacencyLists {
        n,
        capacity,
        chunk_width,
        arity,
        chunks,
        count_levels,
        err_levels,
    })
}

impl AdjacencyLists {
    fn shard_key(u: usize, c: usize) -> Key {
        Key::new("nl", &[u as i64, c as i64])
    }

    fn count_key(level: usize, u: usize, j: usize) -> Key {
        Key::new("dc", &[level as i64, u as i64, j as i64])
    }

    fn degree_key(u: usize) -> Key {
        Key::new("deg", &[u as i64])
    }

    fn bad_key(u: usize) -> Key {
        Key::new("bad", &[u as i64])
    }

    fn err_node_key(level: usize, j: usize) -> Key {
        Key::new("er", &[level as i64, j as i64])
    }

    /// Final list key.
    pub fn neighbor_key(u: usize) -> Key {
        Key::new("nbr", &[u as i64])
    }

    /// The error-message key: holds `(vertex, degree)` for the smallest
    /// vertex whose degree exceeds the capacity, if any.
    pub fn error_key() -> Key {
        Key::new("err", &[])
    }

    fn chunk_range(&self, c: usize) -> std::ops::Range<usize> {
        let lo = c * self.chunk_width;
        lo..(self.n - 1).min(lo + self.chunk_width)
    }

    fn depth_counts(&self) -> usize {
        self.count_levels.len()
    }

    fn depth_err(&self) -> usize {
        self.err_levels.len()
    }
}

impl AmpcAlgorithm for AdjacencyLists {
    fn input_len(&self) -> usize {
        slot_count(self.n)
    }

    fn rounds(&self) -> usize {
        if self.chunks == 1 {
            1
        } else {
            // In the chunked case n ≥ S > arity, so the error funnel is at
            // least two levels deep and the publish round is never last.
            1 + self.depth_counts() + self.depth_err()
        }
    }

    fn roster(&self, round: usize) -> Vec<RosterEntry> {
        let mut roster = Vec::new();
        let mut next_id = 0u64;
        let mut push = |roster: &mut Vec<RosterEntry>, program: NonAdaptive| {
            roster.push(RosterEntry::new(next_id, program));
            next_id += 1;
        };
        let n = self.n;
        let d1 = self.depth_counts();

        if round == 1 {
            // Scanners. With a single chunk the whole row fits one machine
            // and the degree is at most S−2: publish immediately.
            for u in 0..n {
                for c in 0..self.chunks {
                    let range = self.chunk_range(c);
                    let queries: Vec<Key> = range.clone().map(|j| incident_slot_key(n, u, j)).collect();
                    let direct = self.chunks == 1;
                    push(
                        &mut roster,
                        NonAdaptive::new(queries, move |resps| {
                            let found = found_neighbors(u, range.start, &resps);
                            if found.is_empty() {
                                return Vec::new();
                            }
                            let target = if direct {
                                Self::neighbor_key(u)
                            } else {
                                Self::shard_key(u, c)
                            };
                            let mut writes: Vec<(Key, Value)> =
                                found.iter().map(|&w| (target, Value::scalar(w))).collect();
                            if !direct {
                                writes.push((
                                    Self::count_key(0, u, c),
                                    Value::scalar(found.len() as u64),
                                ));
                            }
                            writes
                        }),
                    );
                }
            }
            return roster;
        }

        // Holder machines keep the shards alive until the publish round.
        if round <= 1 + d1 {
            for u in 0..n {
                for c in 0..self.chunks {
                    let key = Self::shard_key(u, c);
                    push(
                        &mut roster,
                        NonAdaptive::new(vec![key], move |resps| {
                            resps[0].iter().map(|&v| (key, v)).collect()
                        }),
                    );
                }
            }
        }

        // Count tree: level `round − 1`, one tree per vertex.
        if round <= 1 + d1 {
            let level = round - 1;
            let below = if level == 1 {
                self.chunks
            } else {
                self.count_levels[level - 2]
            };
            let capacity = self.capacity;
            for u in 0..n {
                for j in 0..self.count_levels[level - 1] {
                    let lo = j * self.arity;
                    let hi = below.min(lo + self.arity);
                    let queries: Vec<Key> =
                        (lo..hi).map(|c| Self::count_key(level - 1, u, c)).collect();
                    let is_top = level == d1;
                    push(
                        &mut roster,
                        NonAdaptive::new(queries, move |resps| {
                            let deg: u64 = resps
                                .iter()
                                .map(|r| r.first().map_or(0, |v| v.word(0)))
                                .sum();
                            if deg == 0 {
                                Vec::new()
                            } else if !is_top {
                                vec![(Self::count_key(level, u, j), Value::scalar(deg))]
                            } else if deg > capacity {
                                vec![
                                    (Self::degree_key(u), Value::scalar(deg)),
                                    (Self::bad_key(u), Value::pair(u as u64, deg)),
                                ]
                            } else {
                                vec![(Self::degree_key(u), Value::scalar(deg))]
                            }
                        }),
                    );
                }
            }
        }

        // Publishers: one round after the degrees are known.
        if round == 2 + d1 {
            let capacity = self.capacity;
            for u in 0..n {
                for c in 0..self.chunks {
                    let queries = vec![Self::degree_key(u), Self::shard_key(u, c)];
                    push(
                        &mut roster,
                        NonAdaptive::new(queries, move |resps| {
                            let deg = resps[0].first().map_or(0, |v| v.word(0));
                            if deg > capacity {
                                return Vec::new();
                            }
                            resps[1].iter().map(|&v| (Self::neighbor_key(u), v)).collect()
                        }),
                    );
                }
            }
        }

        // Published lists must survive to the final store, so holder
        // machines re-write them while the error funnel finishes.
        if round > 2 + d1 {
            for u in 0..n {
                let key = Self::neighbor_key(u);
                push(
                    &mut roster,
                    NonAdaptive::new(vec![key], move |resps| {
                        resps[0].iter().map(|&v| (key, v)).collect()
                    }),
                );
            }
        }

        // Error funnel: OR-tree over the per-vertex bad flags, keeping the
        // smallest flagged vertex. Level `l` runs in round `1 + d1 + l`.
        if round > 1 + d1 && round <= 1 + d1 + self.depth_err() {
            let level = round - 1 - d1;
            let below = if level == 1 {
                n
            } else {
                self.err_levels[level - 2]
            };
            let is_top = level == self.depth_err();
            for j in 0..self.err_levels[level - 1] {
                let lo = j * self.arity;
                let hi = below.min(lo + self.arity);
                let queries: Vec<Key> = (lo..hi)
                    .map(|c| {
                        if level == 1 {
                            Self::bad_key(c)
                        } else {
                            Self::err_node_key(level - 1, c)
                        }
                    })
                    .collect();
                push(
                    &mut roster,
                    NonAdaptive::new(queries, move |resps| {
                        let first_bad = resps.iter().find_map(|r| r.first().copied());
                        match first_bad {
                            None => Vec::new(),
                            Some(v) if is_top => vec![(Self::error_key(), v)],
                            Some(v) => vec![(Self::err_node_key(level, j), v)],
                        }
                    }),
                );
            }
        }

        roster
    }
}

// ---------------------------------------------------------------------------
// edge-list extraction
// ---------------------------------------------------------------------------

/// Labels the present edges `1..=m` in slot order: after the final round,
/// key `("edge", j)` holds the endpoint pair of edge `j`.
pub struct EdgeList {
    n: usize,
    /// Slots per scanner group: `S−2` (the groups partition the slots).
    group_width: usize,
    arity: usize,
    groups: usize,
    /// Prefix-tree level sizes over the group counts; `level_sizes[0]` is
    /// `ceil(groups/arity)` and the last entry is 1. When the counts fit a
    /// single node this is `[1]`.
    level_sizes: Vec<usize>,
}

/// Plans the edge-list extraction for `n` vertices under `capacity`.
pub fn matrix_to_edge_list(n: usize, capacity: u64) -> Result<EdgeList> {
    check_graph_params(n, capacity)?;
    let group_width = (capacity - 2) as usize;
    let arity = (capacity - 1) as usize;
    let groups = ceil_div(slot_count(n), group_width).max(1);
    let level_sizes = if groups == 1 {
        vec![1]
    } else {
        tree_levels(groups, arity)
    };
    Ok(EdgeList {
        n,
        group_width,
        arity,
        groups,
        level_sizes,
    })
}

impl EdgeList {
    fn group_key(g: usize) -> Key {
        Key::new("grp", &[g as i64])
    }

    fn count_leaf_key(g: usize) -> Key {
        Key::new("cnt", &[g as i64])
    }

    fn sum_key(level: usize, j: usize) -> Key {
        Key::new("ms", &[level as i64, j as i64])
    }

    fn offset_key(level: usize, j: usize) -> Key {
        Key::new("mo", &[level as i64, j as i64])
    }

    /// Per-group prefix totals: `("mps", g)` holds `c_g = m_1 + ... + m_g`.
    fn prefix_key(g: usize) -> Key {
        Key::new("mps", &[g as i64])
    }

    /// Output key for the `j`-th edge, 1-based.
    pub fn edge_key(j: usize) -> Key {
        Key::new("edge", &[j as i64])
    }

    fn group_range(&self, g: usize) -> std::ops::Range<usize> {
        let lo = g * self.group_width;
        lo..slot_count(self.n).min(lo + self.group_width)
    }

    fn top(&self) -> usize {
        self.level_sizes.len()
    }

    /// Children of node `j` at `level` (level 1 reads the leaf counts).
    fn node_range(&self, level: usize, j: usize) -> std::ops::Range<usize> {
        let below = if level == 1 {
            self.groups
        } else {
            self.level_sizes[level - 2]
        };
        let lo = j * self.arity;
        lo..below.min(lo + self.arity)
    }
}

impl AmpcAlgorithm for EdgeList {
    fn input_len(&self) -> usize {
        slot_count(self.n)
    }

    fn rounds(&self) -> usize {
        2 * self.top() + 1
    }

    fn roster(&self, round: usize) -> Vec<RosterEntry> {
        let mut roster = Vec::new();
        let mut next_id = 0u64;
        let mut push = |roster: &mut Vec<RosterEntry>, program: NonAdaptive| {
            roster.push(RosterEntry::new(next_id, program));
            next_id += 1;
        };
        let n = self.n;
        let top = self.top();
        let last = self.rounds();

        if round == 1 {
            // Group scanners: park found edges under the group key and
            // write the group count for the prefix tree.
            for g in 0..self.groups {
                let range = self.group_range(g);
                let queries: Vec<Key> = range.clone().map(Key::input).collect();
                push(
                    &mut roster,
                    NonAdaptive::new(queries, move |resps| {
                        let mut writes: Vec<(Key, Value)> = resps
                            .iter()
                            .enumerate()
                            .filter(|(_, r)| r.first().and_then(Value::as_bit) == Some(true))
                            .map(|(i, _)| {
                                let (u, v) = slot_endpoints(n, range.start + i)
                                    .expect("slot index within the grid");
                                (Self::group_key(g), Value::pair(u as u64, v as u64))
                            })
                            .collect();
                        if !writes.is_empty() {
                            writes.push((
                                Self::count_leaf_key(g),
                                Value::scalar(writes.len() as u64),
                            ));
                        }
                        writes
                    }),
                );
            }
            return roster;
        }

        // Holders re-write the parked edges every intermediate round.
        if round < last {
            for g in 0..self.groups {
                let key = Self::group_key(g);
                push(
                    &mut roster,
                    NonAdaptive::new(vec![key], move |resps| {
                        resps[0].iter().map(|&v| (key, v)).collect()
                    }),
                );
            }
        }

        // The down pass re-reads the leaf counts and intermediate sums long
        // after they were written, and a round's writes are all the next
        // round can see — so holders carry them forward too. Level-m sums
        // are consumed on the way down at round 2·top − m.
        if top >= 2 && round >= 2 && round <= 2 * top - 1 {
            for g in 0..self.groups {
                let key = Self::count_leaf_key(g);
                push(
                    &mut roster,
                    NonAdaptive::new(vec![key], move |resps| {
                        resps[0].iter().map(|&v| (key, v)).collect()
                    }),
                );
            }
        }
        for m in 1..=top.saturating_sub(2) {
            if round >= m + 2 && round <= 2 * top - m - 1 {
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

        if round >= 2 && round <= top {
            // Up pass: level `round − 1` sums (the root turns around below).
            let level = round - 1;
            for j in 0..self.level_sizes[level - 1] {
                let children = self.node_range(level, j);
                let queries: Vec<Key> = children
                    .map(|c| {
                        if level == 1 {
                            Self::count_leaf_key(c)
                        } else {
                            Self::sum_key(level - 1, c)
                        }
                    })
                    .collect();
                push(
                    &mut roster,
                    NonAdaptive::new(queries, move |resps| {
                        let sum: u64 = resps
                            .iter()
                            .map(|r| r.first().map_or(0, |v| v.word(0)))
                            .sum();
                        if sum == 0 {
                            Vec::new()
                        } else {
                            vec![(Self::sum_key(level, j), Value::scalar(sum))]
                        }
                    }),
                );
            }
        }

        if round == top + 1 {
            // Root: read the children and hand each its offset. With a
            // single level the children are the leaf counts themselves and
            // the root writes the per-group prefix totals directly.
            let children = self.node_range(top, 0);
            let base = children.start;
            let queries: Vec<Key> = children
                .map(|c| {
                    if top == 1 {
                        Self::count_leaf_key(c)
                    } else {
                        Self::sum_key(top - 1, c)
                    }
                })
                .collect();
            push(
                &mut roster,
                NonAdaptive::new(queries, move |resps| {
                    let mut acc = 0u64;
                    resps
                        .iter()
                        .enumerate()
                        .map(|(i, r)| {
                            let v = r.first().map_or(0, |v| v.word(0));
                            if top == 1 {
                                acc += v;
                                (Self::prefix_key(base + i), Value::scalar(acc))
                            } else {
                                let here = acc;
                                acc += v;
                                (Self::offset_key(top - 1, base + i), Value::scalar(here))
                            }
                        })
                        .collect()
                }),
            );
        }

        if round > top + 1 && round < last {
            // Down pass: level `2·top + 1 − round` distributes offsets; at
            // level 1 the node reads the leaf counts and writes the
            // per-group prefix totals.
            let level = 2 * top + 1 - round;
            for j in 0..self.level_sizes[level - 1] {
                let children = self.node_range(level, j);
                let base = children.start;
                let mut queries = vec![Self::offset_key(level, j)];
                queries.extend(children.map(|c| {
                    if level == 1 {
                        Self::count_leaf_key(c)
                    } else {
                        Self::sum_key(level - 1, c)
                    }
                }));
                push(
                    &mut roster,
                    NonAdaptive::new(queries, move |resps| {
                        let mut acc = resps[0].first().map_or(0, |v| v.word(0));
                        resps[1..]
                            .iter()
                            .enumerate()
                            .map(|(i, r)| {
                                let v = r.first().map_or(0, |v| v.word(0));
                                if level == 1 {
                                    acc += v;
                                    (Self::prefix_key(base + i), Value::scalar(acc))
                                } else {
                                    let here = acc;
                                    acc += v;
                                    (Self::offset_key(level - 1, base + i), Value::scalar(here))
                                }
                            })
                            .collect()
                    }),
                );
            }
        }

        if round == last {
            // Labelers: group g's edges get labels c_g − m_g + 1 ..= c_g.
            for g in 0..self.groups {
                let queries = vec![Self::prefix_key(g), Self::group_key(g)];
                push(
                    &mut roster,
                    NonAdaptive::new(queries, move |resps| {
                        let total = resps[0].first().map_or(0, |v| v.word(0));
                        let edges = &resps[1];
                        let base = total - edges.len() as u64;
                        edges
                            .iter()
                            .enumerate()
                            .map(|(t, &v)| (Self::edge_key(base as usize + t + 1), v))
                            .collect()
                    }),
                );
            }
        }

        roster
    }
}
