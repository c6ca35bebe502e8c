//! Graphs on labeled vertices as bit strings over edge slots.

use serde::{Deserialize, Serialize};

use super::BitString;
use crate::error::{Error, Result};

/// Number of edge slots for `n` vertices.
pub fn slot_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Canonical slot index of the edge `{u, v}`: pairs are ordered
/// `(0,1), (0,2), …, (0,n-1), (1,2), …, (n-2,n-1)`.
pub fn edge_index(n: usize, u: usize, v: usize) -> Result<usize> {
    if u == v {
        return Err(Error::invalid(format!("self-loop ({u},{u}) has no slot")));
    }
    if u >= n || v >= n {
        return Err(Error::invalid(format!("edge ({u},{v}) out of range for n={n}")));
    }
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    Ok(a * n - a * (a + 1) / 2 + (b - a - 1))
}

/// Endpoints `(u, v)` with `u < v` of a slot index.
pub fn slot_endpoints(n: usize, idx: usize) -> Result<(usize, usize)> {
    if idx >= slot_count(n) {
        return Err(Error::invalid(format!("slot {idx} out of range for n={n}")));
    }
    let mut base = 0;
    for u in 0..n - 1 {
        let row = n - 1 - u;
        if idx < base + row {
            return Ok((u, u + 1 + (idx - base)));
        }
        base += row;
    }
    unreachable!("idx checked against slot_count");
}

/// Serialized form of an instance: vertex count plus an explicit edge list.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct InstanceFile {
    n: usize,
    edges: Vec<(usize, usize)>,
}

/// A graph instance: `n` vertices and a bit string over the edge slots.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GraphInstance {
    n: usize,
    bits: BitString,
}

impl GraphInstance {
    pub fn empty(n: usize) -> Self {
        GraphInstance {
            n,
            bits: BitString::zero(slot_count(n)),
        }
    }

    /// Wraps an existing slot string; the length must be `slot_count(n)`.
    pub fn from_bits(n: usize, bits: BitString) -> Result<Self> {
        if bits.len() != slot_count(n) {
            return Err(Error::invalid(format!(
                "bit string has {} slots, expected {} for n={n}",
                bits.len(),
                slot_count(n)
            )));
        }
        Ok(GraphInstance { n, bits })
    }

    /// Builds an instance from an edge list, rejecting self-loops, duplicate
    /// edges, and out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            let idx = edge_index(n, u, v)?;
            if g.bits.get(idx) {
                return Err(Error::invalid(format!("duplicate edge ({u},{v})")));
            }
            g.bits.set(idx, true);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    pub fn into_bits(self) -> BitString {
        self.bits
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        edge_index(self.n, u, v).map(|i| self.bits.get(i)).unwrap_or(false)
    }

    pub fn set_edge(&mut self, u: usize, v: usize, present: bool) -> Result<()> {
        let idx = edge_index(self.n, u, v)?;
        self.bits.set(idx, present);
        Ok(())
    }

    pub fn edge_count(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn degree(&self, v: usize) -> usize {
        (0..self.n).filter(|&w| w != v && self.has_edge(v, w)).count()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&w| w != v && self.has_edge(v, w)).collect()
    }

    /// Edge list in canonical slot order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.bits
            .iter_ones()
            .map(|idx| slot_endpoints(self.n, idx).expect("slot in range"))
            .collect()
    }

    /// JSON form `{"n": …, "edges": [[u, v], …]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&InstanceFile {
            n: self.n,
            edges: self.edges(),
        })
        .expect("instance serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(s)?;
        Self::from_edges(file.n, &file.edges)
    }
}

/// Decomposes a graph into cycles if it is a disjoint union of simple cycles
/// covering all vertices (every vertex of degree exactly 2); returns the
/// sorted cycle lengths, or `None` if the graph has any other shape.
pub fn cycle_structure(g: &GraphInstance) -> Option<Vec<usize>> {
    let n = g.n();
    let mut adj: Vec<Vec<usize>> = vec![Vec::with_capacity(2); n];
    for (u, v) in g.edges() {
        adj[u].push(v);
        adj[v].push(u);
        if adj[u].len() > 2 || adj[v].len() > 2 {
            return None;
        }
    }
    if adj.iter().any(|a| a.len() != 2) {
        return None;
    }
    // Every vertex having degree exactly 2 already forces a disjoint union
    // of simple cycles; walk each one to measure its length.
    let mut seen = vec![false; n];
    let mut lengths = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let (mut prev, mut cur) = (start, start);
        loop {
            seen[cur] = true;
            len += 1;
            // Never step back across the edge just used; on the first step
            // `prev == cur`, which matches no neighbor.
            let next = if adj[cur][0] != prev { adj[cur][0] } else { adj[cur][1] };
            prev = cur;
            cur = next;
            if cur == start {
                break;
            }
        }
        lengths.push(len);
    }
    lengths.sort_unstable();
    Some(lengths)
}
