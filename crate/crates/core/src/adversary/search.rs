//! Exact searches for cycle configurations over a partially decided edge set.
//!
//! All questions here have the same shape: given a graph of still-possible
//! edges and a subgraph of edges already promised to be present, is there a
//! disjoint union of `cycles` equal-length cycles covering every vertex that
//! contains all promised edges and uses only possible ones? `cycles = 1` asks
//! for a single full cycle. The searches are exact and deterministic: promised
//! paths are contracted to segments, segments are assembled by backtracking in
//! a fixed canonical order (lowest segment first, neighbors in label order),
//! and every recursion step spends one unit of a caller-supplied node budget.

use crate::boolfn::{slot_count, slot_endpoints, GraphInstance};
use crate::error::{Error, Result};

// ---------------------------------------------------------------- budgets --

/// A node-expansion budget shared across the searches of one operation.
#[derive(Debug)]
pub(crate) struct NodeBudget {
    left: u64,
    initial: u64,
}

impl NodeBudget {
    pub(crate) fn new(limit: u64) -> Self {
        NodeBudget { left: limit, initial: limit }
    }

    fn spend(&mut self) -> Result<()> {
        if self.left == 0 {
            return Err(Error::ResourceLimit {
                what: "configuration assembly search".into(),
                budget: self.initial,
                lower: None,
                upper: None,
            });
        }
        self.left -= 1;
        Ok(())
    }
}

// ------------------------------------------------------------ union-find --

struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[small] = big;
        self.size[big] += self.size[small];
    }

    fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    fn component_size(&mut self, v: usize) -> usize {
        let r = self.find(v);
        self.size[r]
    }
}

// ------------------------------------------------- promised-edge geometry --

/// A maximal promised path, stored as its vertex sequence. Isolated vertices
/// are singleton segments. `verts[0] <= verts[last]` canonically.
struct Segment {
    verts: Vec<usize>,
}

impl Segment {
    fn first(&self) -> usize {
        self.verts[0]
    }

    fn last(&self) -> usize {
        *self.verts.last().expect("segments are nonempty")
    }
}

/// The promised edges split into path segments and finished cycles, or `None`
/// when some vertex already has more than two promised edges (no disjoint
/// cycle cover can contain such a vertex).
struct Decomposition {
    segments: Vec<Segment>,
    cycles: Vec<Vec<usize>>,
}

fn decompose(required: &GraphInstance) -> Option<Decomposition> {
    let n = required.n();
    let mut adj: Vec<Vec<usize>> = vec![Vec::with_capacity(2); n];
    for (u, v) in required.edges() {
        adj[u].push(v);
        adj[v].push(u);
        if adj[u].len() > 2 || adj[v].len() > 2 {
            return None;
        }
    }

    let mut seen = vec![false; n];
    let mut segments = Vec::new();
    let mut cycles = Vec::new();

    // Paths first: walk from each unvisited endpoint (degree < 2).
    for s in 0..n {
        if seen[s] || adj[s].len() == 2 {
            continue;
        }
        seen[s] = true;
        let mut verts = vec![s];
        let (mut prev, mut cur) = (s, s);
        loop {
            let next = adj[cur].iter().copied().find(|&w| w != prev);
            match next {
                Some(w) if !seen[w] => {
                    seen[w] = true;
                    verts.push(w);
                    prev = cur;
                    cur = w;
                }
                _ => break,
            }
        }
        if verts[0] > *verts.last().unwrap() {
            verts.reverse();
        }
        segments.push(Segment { verts });
    }

    // Whatever is left unvisited has degree exactly 2: finished cycles.
    for s in 0..n {
        if seen[s] || adj[s].is_empty() {
            continue;
        }
        let mut verts = vec![s];
        seen[s] = true;
        let (mut prev, mut cur) = (s, adj[s][0]);
        while cur != s {
            seen[cur] = true;
            verts.push(cur);
            let next = if adj[cur][0] != prev { adj[cur][0] } else { adj[cur][1] };
            prev = cur;
            cur = next;
        }
        cycles.push(verts);
    }

    segments.sort_by_key(|s| (s.first(), s.last()));
    Some(Decomposition { segments, cycles })
}

// -------------------------------------------------------------- assembler --

struct Assembler<'a> {
    allowed: &'a GraphInstance,
    segments: Vec<Segment>,
    cycle_len: usize,
    used: Vec<bool>,
    /// Current chain as (segment index, reversed) in traversal order.
    chain: Vec<(usize, bool)>,
    chain_verts: usize,
    /// Chains already closed into cycles, kept for witness reconstruction.
    done: Vec<Vec<(usize, bool)>>,
    cycles_left: usize,
    budget: &'a mut NodeBudget,
}

impl Assembler<'_> {
    fn entry_port(&self, seg: usize, reversed: bool) -> usize {
        let s = &self.segments[seg];
        if reversed { s.last() } else { s.first() }
    }

    fn exit_port(&self, seg: usize, reversed: bool) -> usize {
        let s = &self.segments[seg];
        if reversed { s.first() } else { s.last() }
    }

    fn chain_exit(&self) -> usize {
        let &(seg, rev) = self.chain.last().expect("chain is nonempty");
        self.exit_port(seg, rev)
    }

    fn chain_entry(&self) -> usize {
        let &(seg, rev) = self.chain.first().expect("chain is nonempty");
        self.entry_port(seg, rev)
    }

    /// Depth-first assembly. On success the finished chains stay in `done`.
    fn search(&mut self) -> Result<bool> {
        self.budget.spend()?;

        if self.chain.is_empty() {
            if self.cycles_left == 0 {
                return Ok(self.used.iter().all(|&u| u));
            }
            let Some(anchor) = (0..self.segments.len()).find(|&i| !self.used[i]) else {
                return Ok(false);
            };
            // A cycle's edge set does not depend on traversal direction, so
            // the lowest segment of each cycle is always entered at its first
            // port; only later segments need both orientations.
            self.used[anchor] = true;
            self.chain.push((anchor, false));
            self.chain_verts = self.segments[anchor].verts.len();
            let ok = self.chain_verts <= self.cycle_len && self.search()?;
            if !ok {
                self.chain.pop();
                self.chain_verts = 0;
                self.used[anchor] = false;
            }
            return Ok(ok);
        }

        let exit = self.chain_exit();

        if self.chain_verts == self.cycle_len {
            // The chain spans a whole cycle: it must close onto its entry.
            if !self.allowed.has_edge(exit, self.chain_entry()) {
                return Ok(false);
            }
            let finished = std::mem::take(&mut self.chain);
            self.chain_verts = 0;
            self.cycles_left -= 1;
            self.done.push(finished);
            let ok = self.search()?;
            if !ok {
                let finished = self.done.pop().expect("pushed above");
                self.cycles_left += 1;
                self.chain = finished;
                self.chain_verts = self.cycle_len;
            }
            return Ok(ok);
        }

        for seg in 0..self.segments.len() {
            if self.used[seg] {
                continue;
            }
            let size = self.segments[seg].verts.len();
            if self.chain_verts + size > self.cycle_len {
                continue;
            }
            let orientations: &[bool] = if size == 1 { &[false] } else { &[false, true] };
            for &rev in orientations {
                if !self.allowed.has_edge(exit, self.entry_port(seg, rev)) {
                    continue;
                }
                self.used[seg] = true;
                self.chain.push((seg, rev));
                self.chain_verts += size;
                if self.search()? {
                    return Ok(true);
                }
                self.chain.pop();
                self.chain_verts -= size;
                self.used[seg] = false;
            }
        }
        Ok(false)
    }
}

// ----------------------------------------------------------- entry points --

/// Searches for a disjoint union of `cycles` cycles, each on exactly
/// `n / cycles` vertices, covering all vertices, containing every `required`
/// edge, and using only `allowed` edges. Returns the canonical first witness
/// of the backtracking order, `None` if no such configuration exists, or a
/// resource-limit error when the node budget runs out.
pub(crate) fn find_configuration(
    allowed: &GraphInstance,
    required: &GraphInstance,
    cycles: usize,
    budget: &mut NodeBudget,
) -> Result<Option<GraphInstance>> {
    let n = allowed.n();
    debug_assert_eq!(required.n(), n);
    debug_assert!(cycles >= 1 && n % cycles == 0);
    let cycle_len = n / cycles;
    debug_assert!(cycle_len >= 3);

    if !required.bits().is_subset_of(allowed.bits()) {
        return Ok(None);
    }
    let Some(dec) = decompose(required) else {
        return Ok(None);
    };
    // Finished required cycles must have exactly the target length, and no
    // promised path may already overflow one cycle.
    if dec.cycles.len() > cycles || dec.cycles.iter().any(|c| c.len() != cycle_len) {
        return Ok(None);
    }
    if dec.segments.iter().any(|s| s.verts.len() > cycle_len) {
        return Ok(None);
    }

    let mut asm = Assembler {
        allowed,
        used: vec![false; dec.segments.len()],
        segments: dec.segments,
        cycle_len,
        chain: Vec::new(),
        chain_verts: 0,
        done: Vec::new(),
        cycles_left: cycles - dec.cycles.len(),
        budget,
    };
    if !asm.search()? {
        return Ok(None);
    }

    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(n);
    for cycle in &dec.cycles {
        for i in 0..cycle.len() {
            edges.push((cycle[i], cycle[(i + 1) % cycle.len()]));
        }
    }
    for chain in &asm.done {
        let mut ports: Vec<(usize, usize)> = Vec::new();
        for &(seg, rev) in chain {
            let s = &asm.segments[seg];
            for w in s.verts.windows(2) {
                edges.push((w[0], w[1]));
            }
            let (entry, exit) = if rev { (s.last(), s.first()) } else { (s.first(), s.last()) };
            ports.push((entry, exit));
        }
        for i in 0..ports.len() {
            let from = ports[i].1;
            let to = ports[(i + 1) % ports.len()].0;
            edges.push((from, to));
        }
    }
    let witness = GraphInstance::from_edges(n, &edges)?;
    debug_assert!(required.bits().is_subset_of(witness.bits()));
    debug_assert!(witness.bits().is_subset_of(allowed.bits()));
    Ok(Some(witness))
}

/// The least configuration in the crate's slot order (a set bit sorts before
/// a clear one, so low-numbered edges are preferred greedily). Equivalent to
/// fixing each undecided slot in ascending order: keep the edge if some valid
/// configuration still contains everything kept so far plus it, otherwise
/// discard it for good.
pub(crate) fn least_configuration(
    allowed: &GraphInstance,
    required: &GraphInstance,
    cycles: usize,
    budget: &mut NodeBudget,
) -> Result<Option<GraphInstance>> {
    let n = allowed.n();
    let cycle_len = n / cycles;
    if find_configuration(allowed, required, cycles, budget)?.is_none() {
        return Ok(None);
    }

    let mut fixed = required.clone();
    let mut room = allowed.clone();
    let mut deg: Vec<usize> = (0..n).map(|v| fixed.degree(v)).collect();
    let mut dsu = Dsu::new(n);
    for (u, v) in fixed.edges() {
        dsu.union(u, v);
    }

    for slot in 0..slot_count(n) {
        if !room.bits().get(slot) || fixed.bits().get(slot) {
            continue;
        }
        let (u, v) = slot_endpoints(n, slot)?;

        // Local exclusions that need no search: a saturated endpoint, a cycle
        // closed before its time, or two chains too long to share a cycle.
        let local_reject = deg[u] == 2 || deg[v] == 2 || {
            if dsu.same(u, v) {
                dsu.component_size(u) != cycle_len
            } else {
                dsu.component_size(u) + dsu.component_size(v) > cycle_len
            }
        };
        if local_reject {
            room.set_edge(u, v, false)?;
            continue;
        }

        let mut trial = fixed.clone();
        trial.set_edge(u, v, true)?;
        if find_configuration(&room, &trial, cycles, budget)?.is_some() {
            fixed = trial;
            deg[u] += 1;
            deg[v] += 1;
            dsu.union(u, v);
        } else {
            room.set_edge(u, v, false)?;
        }
    }

    debug_assert_eq!(fixed.edge_count(), n);
    Ok(Some(fixed))
}
