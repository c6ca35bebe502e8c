//! The cycle-promise solver: decides "one n-cycle or k short cycles" in
//! O(log_S n) rounds against the capacity-S store model.
//!
//! The input is the upper-triangle bit matrix of a graph promised to be a
//! disjoint union of cycles — either a single n-cycle (answer 1) or k
//! cycles of length n/k (answer 0). The solver works in three phases:
//!
//! 1. **Neighbor discovery.** Per-vertex chunk scanners read the vertex's
//!    incident matrix slots and a merge tree of arity `S−1` folds the
//!    chunks into one compact value per vertex under `("nbr", u)`: the
//!    sorted neighbor pair packed into a *single* value, so every later
//!    read of a neighbor list costs one budget unit, not two. A vertex
//!    whose slot row breaks the degree-2 promise gets a marker value
//!    instead, a flag under `("bd", u)`, and an OR-tree funnels the
//!    smallest flagged vertex into `("err", ())`.
//! 2. **Link doubling.** For every vertex and both start directions, a
//!    seed machine walks `S−1` steps (one query per step, resolving each
//!    step by excluding the vertex it came from) and writes a
//!    [`SuccessorLink`]. Each later round, walker machines chain
//!    `floor(S/3)` links of the previous level, multiplying the hop
//!    distance by the stride per round until one link spans at least n
//!    edges. Every link also carries the position of the walk's first
//!    visit to a fixed *anchor* vertex, and chaining keeps that "first
//!    visit" exact — so the top-level link of the anchor itself records
//!    the anchor's own cycle length.
//! 3. **Answer probe.** One machine reads the anchor's top link; a first
//!    return after exactly n edges means the anchor's cycle is the full
//!    n-cycle, anything shorter means the k-cycle side of the promise.
//!
//! Budget accounting against capacity `S` (responses are single values
//! throughout, so cost = number of queries):
//! - chunk scanner: ≤ S−2 slot reads, ≤ 2 writes;
//! - merge / error-tree node: ≤ S−1 key reads, ≤ 2 writes;
//! - seed walker: (S−1 steps) + 1 orientation read = S reads, 1 write;
//! - link walker: floor(S/3) reads, 1 write;
//! - probe: 1 read, ≤ 1 write.
//!
//! On inputs outside the promise every machine aborts silently (writes
//! nothing) at the first malformed response, so runs stay within budget
//! even in strict mode and finish with no answer plus the in-model error
//! message.

use rand::Rng as _;

use super::{ceil_div, incident_slot_key, nth_other, tree_levels};
use crate::ampc::{Action, AdaptiveProgram, AmpcAlgorithm, Key, NonAdaptive, RosterEntry, Value};
use crate::boolfn::{ockc_guard, slot_count};
use crate::error::{Error, Result};
use crate::rng;

/// Marker word for "this vertex's neighborhood broke the promise".
const BAD: u64 = u64::MAX;

// ---------------------------------------------------------------------------
// compressed walk links
// ---------------------------------------------------------------------------

/// One compressed step of the cycle walk: starting at `owner` in direction
/// `direction`, following the cycle for `hops` edges lands on `target`,
/// arriving so that `continue_dir` indexes the onward neighbor in
/// `target`'s sorted pair. `anchor_offset` is the position (1-based, ≤
/// `hops`) of the walk's first visit to the solver's anchor vertex, if it
/// visits it at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuccessorLink {
    pub owner: usize,
    /// Doubling level: 0 is the seed walk, each level multiplies the hop
    /// distance by the stride.
    pub level: usize,
    /// Start direction at the owner: index into its sorted neighbor pair.
    pub direction: u8,
    pub target: usize,
    /// Edges traversed; always ≥ 1.
    pub hops: u64,
    /// Index of the onward neighbor in the target's sorted pair.
    pub continue_dir: u8,
    /// 1-based position of the walk's first visit to the anchor, if any.
    pub anchor_offset: Option<u64>,
}

impl SuccessorLink {
    /// Packs the link into the store value format.
    pub fn encode(&self) -> Value {
        Value::new(&[
            self.target as u64,
            self.hops,
            u64::from(self.continue_dir),
            self.anchor_offset.unwrap_or(0),
        ])
    }

    /// Decodes a stored link value written for `(owner, level, direction)`.
    pub fn decode(owner: usize, level: usize, direction: u8, value: &Value) -> Result<Self> {
        let w = value.as_slice();
        if w.len() != 4 {
            return Err(Error::invalid(format!(
                "a walk link has 4 words, found {}",
                w.len()
            )));
        }
        if w[2] > 1 {
            return Err(Error::invalid(format!("onward direction {} is not 0/1", w[2])));
        }
        if w[1] == 0 {
            return Err(Error::invalid("a walk link must cover at least one hop"));
        }
        Ok(SuccessorLink {
            owner,
            level,
            direction,
            target: w[0] as usize,
            hops: w[1],
            continue_dir: w[2] as u8,
            anchor_offset: (w[3] > 0).then_some(w[3]),
        })
    }
}

// ---------------------------------------------------------------------------
// solver plan
// ---------------------------------------------------------------------------

/// The cycle-promise solver as a store-model algorithm. Build with
/// [`solve_ockc`]; run with [`crate::ampc::run`].
pub struct OckcSolver {
    n: usize,
    k: usize,
    capacity: u64,
    seedless: bool,
    /// The walk anchor: vertex 0, or seed-derived via [`with_seed`].
    ///
    /// [`with_seed`]: OckcSolver::with_seed
    anchor: u64,
    /// Matrix slots per chunk scanner: `S−2`.
    chunk_width: usize,
    /// Fan-in of the merge and error trees: `S−1`.
    arity: usize,
    /// Chunks per vertex row.
    chunks: usize,
    /// Merge-tree level sizes over the chunks (empty when one chunk covers
    /// a whole row and scanners publish neighbor pairs directly).
    merge_levels: Vec<usize>,
    /// Error-tree level sizes over the vertices.
    err_levels: Vec<usize>,
    /// `spans[l]` = hop distance of a level-l link: (S−1) · stride^l.
    spans: Vec<u64>,
    /// Links chained per doubling round: `floor(S/3)`.
    stride: u64,
}

/// Plans the cycle-promise solver for parameters `(n, k)` under capacity
/// `capacity`. `seedless` pins the walk anchor to vertex 0 and makes
/// [`OckcSolver::with_seed`] a no-op, so the whole run is deterministic.
pub fn solve_ockc(n: usize, k: usize, capacity: u64, seedless: bool) -> Result<OckcSolver> {
    ockc_guard(n, k)?;
    if capacity < 8 {
        return Err(Error::invalid(format!(
            "capacity {capacity} is below 8; the walk needs stride at least 2 \
             plus an orientation step"
        )));
    }
    let chunk_width = (capacity - 2) as usize;
    let arity = (capacity - 1) as usize;
    let chunks = ceil_div(n - 1, chunk_width);
    let merge_levels = if chunks == 1 {
        Vec::new()
    } else {
        tree_levels(chunks, arity)
    };
    let err_levels = tree_levels(n, arity);
    let stride = capacity / 3;
    let mut spans = vec![capacity - 1];
    while *spans.last().expect("spans start nonempty") < n as u64 {
        let next = spans.last().unwrap().saturating_mul(stride);
        spans.push(next);
    }
    // The error funnel must finish no later than the answer probe; pad the
    // doubling schedule if the funnel is deeper (padding never triggers for
    // the stride/arity combinations in range, but keeps the plan total).
    while spans.len() - 1 + 2 < err_levels.len() {
        let next = spans.last().unwrap().saturating_mul(stride);
        spans.push(next);
    }
    Ok(OckcSolver {
        n,
        k,
        capacity,
        seedless,
        anchor: 0,
        chunk_width,
        arity,
        chunks,
        merge_levels,
        err_levels,
        spans,
        stride,
    })
}

impl OckcSolver {
    /// Re-derives the walk anchor from `seed`. A no-op for seedless
    /// solvers. The roster depends on the seed but never on the input.
    pub fn with_seed(mut self, seed: u64) -> Self {
        if !self.seedless {
            let mut rng = rng::substream(seed, "walk-anchor", 0);
            self.anchor = rng.gen_range(0..self.n as u64);
        }
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    /// The vertex whose cycle length the answer probe measures.
    pub fn anchor(&self) -> u64 {
        self.anchor
    }

    /// Links chained per doubling round.
    pub fn stride(&self) -> u64 {
        self.stride
    }

    /// Hop distances per doubling level; `walk_spans()[0]` is the seed
    /// walk length and the last entry is ≥ n.
    pub fn walk_spans(&self) -> &[u64] {
        &self.spans
    }

    /// Depth of the neighbor merge tree (0 when scanners publish directly).
    pub fn merge_depth(&self) -> usize {
        self.merge_levels.len()
    }

    fn doubling_rounds(&self) -> usize {
        self.spans.len() - 1
    }

    /// Partial neighbor sets during merging, level ≥ 0.
    fn merge_key(level: usize, u: usize, j: usize) -> Key {
        Key::new("nb", &[level as i64, u as i64, j as i64])
    }

    /// Final per-vertex neighbor pair (single packed value).
    pub fn neighbor_key(u: usize) -> Key {
        Key::new("nbr", &[u as i64])
    }

    /// Per-vertex promise-violation flag.
    fn flag_key(u: usize) -> Key {
        Key::new("bd", &[u as i64])
    }

    fn err_node_key(level: usize, j: usize) -> Key {
        Key::new("er", &[level as i64, j as i64])
    }

    /// In-model error message: the smallest vertex that broke the degree-2
    /// promise, as a single scalar.
    pub fn error_key() -> Key {
        Key::new("err", &[])
    }

    /// Compressed link for `(owner, direction)` at a doubling level.
    pub fn link_key(level: usize, owner: usize, direction: u8) -> Key {
        Key::new("lk", &[level as i64, owner as i64, i64::from(direction)])
    }

    fn chunk_range(&self, c: usize) -> std::ops::Range<usize> {
        let lo = c * self.chunk_width;
        lo..(self.n - 1).min(lo + self.chunk_width)
    }

    /// Children of node `j` at `level` of a tree whose leaves number
    /// `leaves` and whose level sizes are `sizes`.
    fn node_range(&self, sizes: &[usize], leaves: usize, level: usize, j: usize) -> std::ops::Range<usize> {
        let below = if level == 1 { leaves } else { sizes[level - 2] };
        let lo = j * self.arity;
        lo..below.min(lo + self.arity)
    }
}

// ---------------------------------------------------------------------------
// machine programs
// ---------------------------------------------------------------------------

/// Round-1 scanner: reads the incident slots of vertex `u` with neighbor
/// indices `lo..hi` and emits the found neighbors as one packed value (or
/// the violation marker on 3+ finds). When one chunk covers the whole row
/// (`direct`), the scanner is also the publisher and flags promise breaks.
struct ChunkScan {
    n: usize,
    u: usize,
    next: usize,
    hi: usize,
    count: u64,
    found: [u64; 2],
    out: Key,
    direct: bool,
}

impl ChunkScan {
    fn finish(&self) -> Action {
        let clean = match self.count {
            0 => None,
            1 => Some(Value::scalar(self.found[0])),
            2 => Some(Value::pair(self.found[0], self.found[1])),
            _ => None,
        };
        let mut writes = Vec::new();
        if self.direct {
            // Whole row seen: anything but a clean degree-2 pair breaks
            // the promise.
            match clean {
                Some(v) if self.count == 2 => writes.push((self.out, v)),
                _ => {
                    writes.push((self.out, Value::pair(BAD, BAD)));
                    writes.push((Self::flag(self.u), Value::scalar(self.u as u64)));
                }
            }
        } else {
            match clean {
                Some(v) => writes.push((self.out, v)),
                None if self.count == 0 => {}
                None => writes.push((self.out, Value::pair(BAD, BAD))),
            }
        }
        Action::Finish(writes)
    }

    fn flag(u: usize) -> Key {
        OckcSolver::flag_key(u)
    }
}

impl AdaptiveProgram for ChunkScan {
    fn resume(&mut self, response: Option<&[Value]>) -> Action {
        if let Some(resp) = response {
            let j = self.next - 1;
            if resp.first().and_then(Value::as_bit) == Some(true) {
                if self.count < 2 {
                    self.found[self.count as usize] = nth_other(self.u, j) as u64;
                }
                self.count += 1;
                if self.count > 2 {
                    // Already a violation; no need to finish the chunk.
                    return self.finish();
                }
            }
        }
        if self.next < self.hi {
            let key = incident_slot_key(self.n, self.u, self.next);
            self.next += 1;
            return Action::Query(key);
        }
        self.finish()
    }
}

/// State of a seed walker.
enum SeedState {
    /// Walking; the pending query is the neighbor pair of `cur`.
    Advance,
    /// Arrived; the pending query re-reads the target's pair to orient.
    Orient,
}

/// Seed walker for `(u, dir)`: walks `steps` edges from `u` starting
/// toward its `dir`-th neighbor, then writes the level-0 link.
struct LinkSeed {
    n: u64,
    anchor: u64,
    u: u64,
    dir: u8,
    steps: u64,
    pos: u64,
    prev: u64,
    cur: u64,
    anchor_off: u64,
    state: SeedState,
}

impl LinkSeed {
    /// Extracts a valid sorted neighbor pair or gives up.
    fn pair(&self, resp: &[Value]) -> Option<(u64, u64)> {
        if resp.len() != 1 {
            return None;
        }
        let w = resp[0].as_slice();
        if w.len() != 2 || w[0] >= self.n || w[1] >= self.n || w[0] == w[1] {
            return None;
        }
        Some((w[0], w[1]))
    }
}

impl AdaptiveProgram for LinkSeed {
    fn resume(&mut self, response: Option<&[Value]>) -> Action {
        let Some(resp) = response else {
            return Action::Query(OckcSolver::neighbor_key(self.u as usize));
        };
        let Some((a, b)) = self.pair(resp) else {
            return Action::Finish(Vec::new());
        };
        if let SeedState::Orient = self.state {
            // `resp` is the target's pair; record which side continues
            // the walk (the side we did not arrive from).
            let cont = if a == self.prev {
                1
            } else if b == self.prev {
                0
            } else {
                return Action::Finish(Vec::new());
            };
            let link = SuccessorLink {
                owner: self.u as usize,
                level: 0,
                direction: self.dir,
                target: self.cur as usize,
                hops: self.steps,
                continue_dir: cont,
                anchor_offset: (self.anchor_off > 0).then_some(self.anchor_off),
            };
            return Action::Finish(vec![(
                OckcSolver::link_key(0, self.u as usize, self.dir),
                link.encode(),
            )]);
        }
        // Advancing: `resp` is the pair of `cur`; pick the next vertex.
        let next = if self.pos == 0 {
            if self.dir == 0 {
                a
            } else {
                b
            }
        } else if a == self.prev {
            b
        } else if b == self.prev {
            a
        } else {
            return Action::Finish(Vec::new());
        };
        self.pos += 1;
        self.prev = self.cur;
        self.cur = next;
        if self.cur == self.anchor && self.anchor_off == 0 {
            self.anchor_off = self.pos;
        }
        if self.pos == self.steps {
            self.state = SeedState::Orient;
        }
        Action::Query(OckcSolver::neighbor_key(self.cur as usize))
    }
}

/// Doubling walker for `(u, dir)` at `level`: chains `stride` links of the
/// previous level and writes the combined link.
struct LinkHop {
    n: u64,
    level: usize,
    stride: u64,
    span_prev: u64,
    u: u64,
    dir0: u8,
    taken: u64,
    cur: u64,
    cur_dir: u8,
    acc: u64,
    anchor_off: u64,
}

impl AdaptiveProgram for LinkHop {
    fn resume(&mut self, response: Option<&[Value]>) -> Action {
        if let Some(resp) = response {
            if resp.len() != 1 {
                return Action::Finish(Vec::new());
            }
            let w = resp[0].as_slice();
            // [target, hops, onward dir, anchor offset], hops must match
            // the level's fixed span for offsets to compose exactly.
            if w.len() != 4 || w[0] >= self.n || w[1] != self.span_prev || w[2] > 1 || w[3] > w[1]
            {
                return Action::Finish(Vec::new());
            }
            if self.anchor_off == 0 && w[3] > 0 {
                self.anchor_off = self.acc + w[3];
            }
            self.acc += self.span_prev;
            self.cur = w[0];
            self.cur_dir = w[2] as u8;
            self.taken += 1;
            if self.taken == self.stride {
                let link = SuccessorLink {
                    owner: self.u as usize,
                    level: self.level,
                    direction: self.dir0,
                    target: self.cur as usize,
                    hops: self.acc,
                    continue_dir: self.cur_dir,
                    anchor_offset: (self.anchor_off > 0).then_some(self.anchor_off),
                };
                return Action::Finish(vec![(
                    OckcSolver::link_key(self.level, self.u as usize, self.dir0),
                    link.encode(),
                )]);
            }
        }
        Action::Query(OckcSolver::link_key(
            self.level - 1,
            self.cur as usize,
            self.cur_dir,
        ))
    }
}

// ---------------------------------------------------------------------------
// roster assembly
// ---------------------------------------------------------------------------

impl AmpcAlgorithm for OckcSolver {
    fn input_len(&self) -> usize {
        slot_count(self.n)
    }

    fn rounds(&self) -> usize {
        3 + self.merge_depth() + self.doubling_rounds()
    }

    fn roster(&self, round: usize) -> Vec<RosterEntry> {
        let mut roster = Vec::new();
        let mut next_id = 0u64;
        let n = self.n;
        let d1 = self.merge_depth();
        let d2 = self.err_levels.len();
        let last = self.rounds();

        if round == 1 {
            for u in 0..n {
                for c in 0..self.chunks {
                    let range = self.chunk_range(c);
                    let direct = self.chunks == 1;
                    let out = if direct {
                        Self::neighbor_key(u)
                    } else {
                        Self::merge_key(0, u, c)
                    };
                    roster.push(RosterEntry::new(
                        next_id,
                        ChunkScan {
                            n,
                            u,
                            next: range.start,
                            hi: range.end,
                            count: 0,
                            found: [0; 2],
                            out,
                            direct,
                        },
                    ));
                    next_id += 1;
                }
            }
            return roster;
        }

        // Merge tree: level `round − 1`, one tree per vertex.
        if round <= 1 + d1 {
            let level = round - 1;
            let is_top = level == d1;
            let n64 = n as u64;
            for u in 0..n {
                for j in 0..self.merge_levels[level - 1] {
                    let children = self.node_range(&self.merge_levels, self.chunks, level, j);
                    let queries: Vec<Key> = children
                        .map(|c| Self::merge_key(level - 1, u, c))
                        .collect();
                    roster.push(RosterEntry::new(
                        next_id,
                        NonAdaptive::new(queries, move |resps| {
                            let mut words: Vec<u64> = Vec::new();
                            let mut bad = false;
                            for r in &resps {
                                if r.len() > 1 {
                                    bad = true;
                                }
                                for v in r.iter().take(1) {
                                    for &w in v.as_slice() {
                                        if w >= n64 || words.len() >= 2 {
                                            bad = true;
                                        } else {
                                            words.push(w);
                                        }
                                    }
                                }
                            }
                            words.sort_unstable();
                            if words.len() == 2 && words[0] == words[1] {
                                bad = true;
                            }
                            let merged = if bad {
                                Some(Value::pair(BAD, BAD))
                            } else {
                                match words[..] {
                                    [] => None,
                                    [a] => Some(Value::scalar(a)),
                                    [a, b, ..] => Some(Value::pair(a, b)),
                                }
                            };
                            if !is_top {
                                return match merged {
                                    Some(v) => vec![(Self::merge_key(level, u, j), v)],
                                    None => Vec::new(),
                                };
                            }
                            // Top of the tree: publish the pair, or flag
                            // the vertex on any promise break (including
                            // degree 0 and 1).
                            match merged {
                                Some(v) if !bad && v.as_slice().len() == 2 => {
                                    vec![(Self::neighbor_key(u), v)]
                                }
                                _ => vec![
                                    (Self::neighbor_key(u), Value::pair(BAD, BAD)),
                                    (Self::flag_key(u), Value::scalar(u as u64)),
                                ],
                            }
                        }),
                    ));
                    next_id += 1;
                }
            }
        }

        // Seed walkers, one round after the neighbor pairs are published.
        if round == 2 + d1 {
            for u in 0..n {
                for dir in 0..2u8 {
                    roster.push(RosterEntry::new(
                        next_id,
                        LinkSeed {
                            n: n as u64,
                            anchor: self.anchor,
                            u: u as u64,
                            dir,
                            steps: self.spans[0],
                            pos: 0,
                            prev: BAD,
                            cur: u as u64,
                            anchor_off: 0,
                            state: SeedState::Advance,
                        },
                    ));
                    next_id += 1;
                }
            }
        }

        // Doubling walkers: level `round − 2 − d1`.
        if round > 2 + d1 && round < last {
            let level = round - 2 - d1;
            for u in 0..n {
                for dir in 0..2u8 {
                    roster.push(RosterEntry::new(
                        next_id,
                        LinkHop {
                            n: n as u64,
                            level,
                            stride: self.stride,
                            span_prev: self.spans[level - 1],
                            u: u as u64,
                            dir0: dir,
                            taken: 0,
                            cur: u as u64,
                            cur_dir: dir,
                            acc: 0,
                            anchor_off: 0,
                        },
                    ));
                    next_id += 1;
                }
            }
        }

        // Answer probe: the anchor's top link records the first return to
        // the anchor; a full-length first return means the single n-cycle.
        if round == last {
            let anchor = self.anchor as usize;
            let top = self.doubling_rounds();
            let n64 = n as u64;
            roster.push(RosterEntry::new(
                next_id,
                NonAdaptive::new(vec![Self::link_key(top, anchor, 0)], move |resps| {
                    let Some(v) = resps[0].first() else {
                        return Vec::new();
                    };
                    if resps[0].len() != 1 || v.as_slice().len() != 4 {
                        return Vec::new();
                    }
                    let off = v.word(3);
                    if off == 0 {
                        return Vec::new();
                    }
                    vec![(Key::answer(), Value::scalar(u64::from(off == n64)))]
                }),
            ));
            next_id += 1;
        }

        // Error funnel: level `round − 1 − d1` of the OR-tree over the
        // per-vertex flags, propagating the smallest flagged vertex.
        if round > 1 + d1 && round <= 1 + d1 + d2 {
            let level = round - 1 - d1;
            let is_top = level == d2;
            for j in 0..self.err_levels[level - 1] {
                let children = self.node_range(&self.err_levels, n, level, j);
                let queries: Vec<Key> = children
                    .map(|c| {
                        if level == 1 {
                            Self::flag_key(c)
                        } else {
                            Self::err_node_key(level - 1, c)
                        }
                    })
                    .collect();
                roster.push(RosterEntry::new(
                    next_id,
                    NonAdaptive::new(queries, move |resps| {
                        let first = resps.iter().find_map(|r| r.first().copied());
                        match first {
                            None => Vec::new(),
                            Some(v) if is_top => vec![(Self::error_key(), v)],
                            Some(v) => vec![(Self::err_node_key(level, j), v)],
                        }
                    }),
                ));
                next_id += 1;
            }
        }

        // Holders carry the emitted error message through to the final
        // store once the funnel has finished early.
        if round > 1 + d1 + d2 && round <= last {
            let key = Self::error_key();
            roster.push(RosterEntry::new(
                next_id,
                NonAdaptive::new(vec![key], move |resps| {
                    resps[0].iter().map(|&v| (key, v)).collect()
                }),
            ));
        }

        roster
    }
}
