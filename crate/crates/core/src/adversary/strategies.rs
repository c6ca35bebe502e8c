//! Querier strategies for the edge-query game.
//!
//! A strategy sees only the trace of its own queries and the answers given so
//! far, and produces either the next edge to ask about or a final verdict.
//! Strategies therefore stay honest: nothing here can inspect the answering
//! side's internal state, and a seeded strategy is a pure function of the
//! seed and the trace prefix, which keeps recorded games replayable.

use rand::seq::SliceRandom;

use super::{QueryAnswer, TraceRecord};
use crate::boolfn::{cycle_structure, edge_index, slot_count, slot_endpoints, GraphInstance};
use crate::rng;

/// One move of the querier: ask about an edge, or commit to a verdict
/// (`true` = the hidden graph is a single full cycle).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyMove {
    Ask(usize, usize),
    Answer(bool),
}

/// A querier. `next_move` sees the full trace so far and nothing else.
pub trait QueryStrategy {
    fn next_move(&mut self, trace: &[TraceRecord]) -> StrategyMove;
}

/// The graph of edges answered YES in a trace.
fn granted_graph(n: usize, trace: &[TraceRecord]) -> GraphInstance {
    let mut g = GraphInstance::empty(n);
    for rec in trace {
        if rec.a == QueryAnswer::Yes {
            g.set_edge(rec.q[0], rec.q[1], true).expect("trace queries are valid edges");
        }
    }
    g
}

/// Verdict once every slot is decided: the YES-graph then *is* the hidden
/// configuration, so report whether it is one full cycle.
fn full_reveal_verdict(n: usize, trace: &[TraceRecord]) -> bool {
    cycle_structure(&granted_graph(n, trace)) == Some(vec![n])
}

// ------------------------------------------------------------- full sweeps --

/// Asks every edge slot in ascending order, then answers from the revealed
/// graph. The simplest certificate-complete querier: after all slots the
/// answer is forced.
#[derive(Debug, Clone)]
pub struct SweepStrategy {
    n: usize,
}

impl SweepStrategy {
    pub fn new(n: usize) -> Self {
        SweepStrategy { n }
    }
}

impl QueryStrategy for SweepStrategy {
    fn next_move(&mut self, trace: &[TraceRecord]) -> StrategyMove {
        if trace.len() < slot_count(self.n) {
            let (u, v) = slot_endpoints(self.n, trace.len()).expect("slot below slot_count");
            StrategyMove::Ask(u, v)
        } else {
            StrategyMove::Answer(full_reveal_verdict(self.n, trace))
        }
    }
}

/// Asks every edge slot once in a seeded random order, then answers from the
/// revealed graph.
#[derive(Debug, Clone)]
pub struct RandomStrategy {
    n: usize,
    order: Vec<usize>,
}

impl RandomStrategy {
    pub fn new(n: usize, seed: u64) -> Self {
        let mut order: Vec<usize> = (0..slot_count(n)).collect();
        order.shuffle(&mut rng::substream(seed, "random-strategy", 0));
        RandomStrategy { n, order }
    }
}

impl QueryStrategy for RandomStrategy {
    fn next_move(&mut self, trace: &[TraceRecord]) -> StrategyMove {
        match self.order.get(trace.len()) {
            Some(&slot) => {
                let (u, v) = slot_endpoints(self.n, slot).expect("slot below slot_count");
                StrategyMove::Ask(u, v)
            }
            None => StrategyMove::Answer(full_reveal_verdict(self.n, trace)),
        }
    }
}

// -------------------------------------------------------------- path walk --

/// Grows the cycle through vertex 0 edge by edge: extends whichever end of
/// the revealed path through 0 comes first, asking candidate neighbors in
/// label order, and answers as soon as the path closes into a cycle (a full
/// cycle means verdict `true`, a shorter one `false`). Falls back to a sweep
/// if both ends run out of candidates.
#[derive(Debug, Clone)]
pub struct WalkStrategy {
    n: usize,
}

impl WalkStrategy {
    pub fn new(n: usize) -> Self {
        WalkStrategy { n }
    }

    /// The component of vertex 0 in the YES-graph as an ordered vertex path,
    /// plus whether it has closed into a cycle.
    fn path_through_zero(granted: &GraphInstance) -> (Vec<usize>, bool) {
        let nbrs = granted.neighbors(0);
        if nbrs.is_empty() {
            return (vec![0], false);
        }
        // Walk one direction to its end, then the other.
        let walk = |mut prev: usize, mut cur: usize| -> (Vec<usize>, bool) {
            let mut out = Vec::new();
            loop {
                out.push(cur);
                if cur == 0 {
                    return (out, true); // returned to the start: closed cycle
                }
                let next = granted.neighbors(cur).into_iter().find(|&w| w != prev);
                match next {
                    Some(w) => {
                        prev = cur;
                        cur = w;
                    }
                    None => return (out, false),
                }
            }
        };
        let (right, closed) = walk(0, nbrs[0]);
        if closed {
            let mut path = vec![0];
            path.extend(right.iter().take(right.len() - 1));
            return (path, true);
        }
        let mut path = match nbrs.get(1) {
            Some(&second) => {
                let (left, _) = walk(0, second);
                let mut p: Vec<usize> = left.into_iter().rev().collect();
                p.push(0);
                p
            }
            None => vec![0],
        };
        path.extend(right);
        (path, false)
    }
}

impl QueryStrategy for WalkStrategy {
    fn next_move(&mut self, trace: &[TraceRecord]) -> StrategyMove {
        let n = self.n;
        let granted = granted_graph(n, trace);
        let (path, closed) = Self::path_through_zero(&granted);
        if closed {
            return StrategyMove::Answer(path.len() == n);
        }

        let mut asked = vec![false; slot_count(n)];
        for rec in trace {
            let slot = edge_index(n, rec.q[0], rec.q[1])
                .expect("trace queries are valid edges");
            asked[slot] = true;
        }
        let on_path = {
            let mut mask = vec![false; n];
            for &v in &path {
                mask[v] = true;
            }
            mask
        };

        // Candidates for an endpoint: the opposite endpoint (the closing
        // edge) and everything off the path, in label order.
        let ends = [path[0], *path.last().expect("path is nonempty")];
        for (i, &e) in ends.iter().enumerate() {
            let other = ends[1 - i];
            for w in 0..n {
                let extends = !on_path[w] || (w == other && e != other);
                if w == e || !extends {
                    continue;
                }
                let slot = edge_index(n, e, w).expect("distinct in-range pair");
                if !asked[slot] {
                    return StrategyMove::Ask(e, w);
                }
            }
        }

        // Both ends exhausted: sweep the remaining slots.
        if let Some(slot) = (0..slot_count(n)).find(|&s| !asked[s]) {
            let (u, v) = slot_endpoints(n, slot).expect("slot below slot_count");
            return StrategyMove::Ask(u, v);
        }
        StrategyMove::Answer(full_reveal_verdict(n, trace))
    }
}
