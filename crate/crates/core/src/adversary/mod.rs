//! An answer-forcing environment for the edge-query cycle-identification game.
//!
//! The querier asks one edge at a time about a hidden graph on `n` labeled
//! vertices that is promised to be either a single full cycle or `k` disjoint
//! cycles of length `n/k`. The environment never fixes the graph up front.
//! Instead it keeps two edge sets — `possible`, the edges not yet denied
//! (initially all of them), and `granted`, the edges already confirmed — and
//! answers so that both promise classes stay realizable for as long as it
//! can. While that holds (phase 1), a fresh query `(u, v)` is denied when any
//! of three guards fires, and confirmed otherwise:
//!
//! 1. one endpoint already has two confirmed edges;
//! 2. both endpoints already touch confirmed edges;
//! 3. both endpoints have been charged fewer than `n/4k` denials so far.
//!
//! Confirmed edges therefore grow as vertex-disjoint paths, and a vertex must
//! pay `n/4k` denials before its first confirmation, which is what makes any
//! successful querier pay at least `n²/128k²` denials in total. Once the
//! confirmed paths touch more than `n/4k − 1` vertices, the environment
//! commits to one concrete configuration consistent with everything said so
//! far (phase 2) and answers from it; decided edges are re-answered from
//! memory in both phases with no state change.
//!
//! [`play`] drives a pluggable [`QueryStrategy`] against this environment,
//! checking the structural invariants after every query, and returns a
//! replayable trace. [`Adversary::consistency_check`] exhibits one witness
//! per promise class via exact backtracking search, and
//! [`edge_count_lemma_check`] verifies the counting fact the denial budget
//! rests on.

use serde::Serialize;

use crate::boolfn::{cycle_structure, edge_index, ockc_guard, slot_count, GraphInstance};
use crate::error::{Error, Result};

mod search;
mod strategies;
#[cfg(test)]
mod tests;

use search::{find_configuration, least_configuration, NodeBudget};
pub use strategies::{QueryStrategy, RandomStrategy, StrategyMove, SweepStrategy, WalkStrategy};

/// Node-expansion budget for one search-backed operation (a consistency
/// check, a commitment, or a final-answerability check). Generous for the
/// intended range `n ≤ 64`; exceeding it is reported as a resource-limit
/// error, never as a wrong verdict.
const DEFAULT_SEARCH_BUDGET: u64 = 2_000_000;

/// Vertex-count threshold `28k` above which the existence guarantees (both
/// witnesses at the phase boundary) are enforced as hard errors rather than
/// informational notes.
fn guarantees_enforced(n: usize, k: usize) -> bool {
    n >= 28 * k
}

// ---------------------------------------------------------------- answers --

/// Answer to a single edge query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QueryAnswer {
    #[serde(rename = "YES")]
    Yes,
    #[serde(rename = "NO")]
    No,
}

impl std::fmt::Display for QueryAnswer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            QueryAnswer::Yes => "YES",
            QueryAnswer::No => "NO",
        })
    }
}

/// One line of a game trace. Serializes to the interchange form
/// `{"q": [u, v], "a": "YES"|"NO", "phase": 1|2, "totalNo": int}`.
#[derive(Debug, Clone, Serialize)]
pub struct TraceRecord {
    pub q: [usize; 2],
    pub a: QueryAnswer,
    pub phase: u8,
    #[serde(rename = "totalNo")]
    pub total_no: u64,
}

// ------------------------------------------------------------------ state --

/// The answering environment. See the module docs for the answering rule.
#[derive(Debug, Clone)]
pub struct Adversary {
    n: usize,
    k: usize,
    /// Edges not yet denied. Starts complete.
    possible: GraphInstance,
    /// Edges confirmed present. Always a subset of `possible`; vertex-disjoint
    /// paths until commitment, a subset of the committed graph afterwards.
    granted: GraphInstance,
    /// Denials charged to each vertex.
    no_count: Vec<u64>,
    /// Denials given in total (equals denied-edge count).
    total_no: u64,
    /// The configuration committed to at the phase boundary.
    committed: Option<GraphInstance>,
    /// `total_no` snapshotted when the commitment happened.
    phase1_no_count: Option<u64>,
    /// When set, commitment picks a k-cycle configuration instead of a full
    /// cycle (coverage aid; the default branch is the full cycle).
    commit_to_split: bool,
    search_budget: u64,
    /// Invariant findings below the enforcement threshold, informational.
    notes: Vec<String>,
}

/// A fresh environment for `n` vertices and `k` cycles, with every edge
/// possible and nothing granted. Requires `k ≥ 2`, `k | n`, and `n/k ≥ 3`.
pub fn new_adversary(n: usize, k: usize) -> Result<Adversary> {
    ockc_guard(n, k)?;
    let mut possible = GraphInstance::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            possible.set_edge(u, v, true)?;
        }
    }
    Ok(Adversary {
        n,
        k,
        possible,
        granted: GraphInstance::empty(n),
        no_count: vec![0; n],
        total_no: 0,
        committed: None,
        phase1_no_count: None,
        commit_to_split: false,
        search_budget: DEFAULT_SEARCH_BUDGET,
        notes: Vec::new(),
    })
}

impl Adversary {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// 1 before commitment, 2 after.
    pub fn phase(&self) -> u8 {
        if self.committed.is_some() { 2 } else { 1 }
    }

    /// Edges not yet denied.
    pub fn possible(&self) -> &GraphInstance {
        &self.possible
    }

    /// Edges confirmed present.
    pub fn granted(&self) -> &GraphInstance {
        &self.granted
    }

    /// The committed configuration, once phase 2 has begun.
    pub fn committed(&self) -> Option<&GraphInstance> {
        self.committed.as_ref()
    }

    pub fn total_no(&self) -> u64 {
        self.total_no
    }

    /// Denial total at the moment of commitment.
    pub fn phase1_no_count(&self) -> Option<u64> {
        self.phase1_no_count
    }

    /// Informational invariant findings (only possible below the `28k`
    /// enforcement threshold, where the existence guarantees may fail).
    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    /// Makes a later commitment pick the k-cycle branch instead of the full
    /// cycle. No effect once committed.
    pub fn prefer_split_commitment(&mut self, yes: bool) {
        self.commit_to_split = yes;
    }

    /// Overrides the node budget for search-backed operations.
    pub fn with_search_budget(mut self, budget: u64) -> Self {
        self.search_budget = budget;
        self
    }

    // ---------------------------------------------------------- answering --

    /// Answers one edge query. Decided edges are re-answered from memory with
    /// zero state change; fresh edges go through the phase-1 guards or, once
    /// the confirmed paths are large enough, trigger commitment and are
    /// answered from the committed configuration.
    pub fn process_query(&mut self, u: usize, v: usize) -> Result<QueryAnswer> {
        let slot = edge_index(self.n, u, v)?;
        if self.granted.bits().get(slot) {
            return Ok(QueryAnswer::Yes);
        }
        if !self.possible.bits().get(slot) {
            return Ok(QueryAnswer::No);
        }

        let answer = if self.committed.is_none() && self.phase1_gate_holds() {
            self.answer_by_guards(u, v)?
        } else {
            if self.committed.is_none() {
                self.transition(true)?;
            }
            let present = self.committed.as_ref().expect("committed above").has_edge(u, v);
            if present {
                self.granted.set_edge(u, v, true)?;
                QueryAnswer::Yes
            } else {
                self.deny(u, v)?;
                QueryAnswer::No
            }
        };
        self.audit_state()?;
        Ok(answer)
    }

    /// Still in phase 1: the confirmed paths touch at most `n/4k − 1`
    /// vertices, i.e. `4k(|touched| + 1) ≤ n`.
    fn phase1_gate_holds(&self) -> bool {
        4 * self.k * (self.granted_vertex_count() + 1) <= self.n
    }

    fn granted_vertex_count(&self) -> usize {
        (0..self.n).filter(|&v| self.granted.degree(v) > 0).count()
    }

    /// The three denial guards, in order; confirmation otherwise.
    fn answer_by_guards(&mut self, u: usize, v: usize) -> Result<QueryAnswer> {
        let (du, dv) = (self.granted.degree(u), self.granted.degree(v));
        let k4 = 4 * self.k as u64;
        let n = self.n as u64;
        let deny = du == 2
            || dv == 2
            || (du >= 1 && dv >= 1)
            || (k4 * self.no_count[u] < n && k4 * self.no_count[v] < n);
        if deny {
            self.deny(u, v)?;
            Ok(QueryAnswer::No)
        } else {
            self.granted.set_edge(u, v, true)?;
            Ok(QueryAnswer::Yes)
        }
    }

    fn deny(&mut self, u: usize, v: usize) -> Result<()> {
        self.possible.set_edge(u, v, false)?;
        self.no_count[u] += 1;
        self.no_count[v] += 1;
        self.total_no += 1;
        Ok(())
    }

    // --------------------------------------------------------- commitment --

    /// Commits to one concrete configuration consistent with every answer so
    /// far: the least full cycle in slot order, or the least k-cycle
    /// configuration under [`prefer_split_commitment`](Self::prefer_split_commitment).
    /// Idempotent. Called by [`process_query`](Self::process_query) when the
    /// phase-1 gate fails; calling it directly forces the transition early.
    pub fn commit_phase2(&mut self) -> Result<()> {
        self.transition(false)
    }

    fn transition(&mut self, natural: bool) -> Result<()> {
        if self.committed.is_some() {
            return Ok(());
        }
        if natural {
            self.audit_boundary()?;
        }
        self.phase1_no_count = Some(self.total_no);
        let cycles = if self.commit_to_split { self.k } else { 1 };
        let mut budget = NodeBudget::new(self.search_budget);
        let cfg = least_configuration(&self.possible, &self.granted, cycles, &mut budget)?
            .ok_or_else(|| {
                Error::ConsistencyBreach(format!(
                    "no {}-cycle configuration survives the recorded answers",
                    cycles
                ))
            })?;
        self.committed = Some(cfg);
        Ok(())
    }

    // ------------------------------------------------------------- audits --

    /// Structural invariants, checked after every query. Before commitment:
    /// confirmed edges form vertex-disjoint paths touching at most
    /// `n/4k + 1` vertices, and every path endpoint or untouched vertex
    /// keeps at least `(4k−1)n/4k − |touched| − 1` possible neighbors among
    /// untouched vertices. After commitment: `granted ⊆ committed ⊆ possible`.
    /// Denial accounting (`total_no` = denied-edge count) is checked in both
    /// phases. Violations are hard errors at `n ≥ 28k`, notes below.
    fn audit_state(&mut self) -> Result<()> {
        let mut breaches = Vec::new();

        if self.total_no as usize != slot_count(self.n) - self.possible.edge_count() {
            // Denial accounting is internal bookkeeping: always fatal.
            return Err(Error::ConsistencyBreach(format!(
                "denial count {} disagrees with {} denied edges",
                self.total_no,
                slot_count(self.n) - self.possible.edge_count()
            )));
        }

        match &self.committed {
            Some(cfg) => {
                if !self.granted.bits().is_subset_of(cfg.bits()) {
                    breaches.push("a confirmed edge is missing from the committed graph".into());
                }
                if !cfg.bits().is_subset_of(self.possible.bits()) {
                    breaches.push("the committed graph uses a denied edge".into());
                }
            }
            None => breaches.extend(self.path_phase_breaches()),
        }

        self.settle(breaches)
    }

    fn path_phase_breaches(&self) -> Vec<String> {
        let n = self.n;
        let k4 = 4 * self.k;
        let mut out = Vec::new();

        let deg: Vec<usize> = (0..n).map(|v| self.granted.degree(v)).collect();
        if let Some(v) = (0..n).find(|&v| deg[v] > 2) {
            out.push(format!("vertex {v} has {} confirmed edges", deg[v]));
            return out; // everything below assumes a path structure
        }

        // Disjoint paths ⟺ acyclic here; count components over touched
        // vertices and check |touched| = edges + components.
        let touched: Vec<bool> = deg.iter().map(|&d| d > 0).collect();
        let vy = touched.iter().filter(|&&t| t).count();
        let mut seen = vec![false; n];
        let mut components = 0;
        let mut acyclic = true;
        for s in 0..n {
            if seen[s] || deg[s] != 1 {
                continue;
            }
            components += 1;
            let (mut prev, mut cur) = (s, s);
            loop {
                seen[cur] = true;
                match self.granted.neighbors(cur).into_iter().find(|&w| w != prev) {
                    Some(w) if !seen[w] => {
                        prev = cur;
                        cur = w;
                    }
                    _ => break,
                }
            }
        }
        if (0..n).any(|v| touched[v] && !seen[v]) {
            acyclic = false; // a touched component with no endpoint is a cycle
            out.push("confirmed edges contain a closed cycle before commitment".into());
        }
        if acyclic && vy != self.granted.edge_count() + components {
            out.push(format!(
                "path accounting broke: {vy} touched vertices, {} edges, {components} paths",
                self.granted.edge_count()
            ));
        }

        if k4 * vy > n + k4 {
            out.push(format!("{vy} touched vertices exceed the n/4k + 1 ceiling"));
        }

        // Neighbor floor for path endpoints and untouched vertices:
        // 4k · |possible neighbors off the paths| ≥ (4k−1)n − 4k(vy+1).
        let floor = ((k4 - 1) * n) as i128 - (k4 * (vy + 1)) as i128;
        for p in 0..n {
            if deg[p] == 2 {
                continue; // interior path vertices are exempt
            }
            let open = (0..n)
                .filter(|&x| x != p && !touched[x] && self.possible.has_edge(p, x))
                .count();
            if ((k4 * open) as i128) < floor {
                out.push(format!(
                    "vertex {p} has only {open} possible neighbors off the paths \
                     (the floor requires 4k·{open} ≥ {floor})"
                ));
                break;
            }
        }

        out
    }

    /// Boundary guarantees, checked when the phase-1 gate fails naturally:
    /// the confirmed paths touch at least `n/4k` vertices, at least
    /// `n²/128k²` denials were paid, and both promise classes still admit a
    /// consistent configuration.
    fn audit_boundary(&mut self) -> Result<()> {
        let (n, k) = (self.n, self.k);
        let mut breaches = Vec::new();

        // The two counting bounds are only exact when 4k divides n, so they
        // are enforced (rather than noted) only in that case.
        let divisible = n % (4 * k) == 0;
        let vy = self.granted_vertex_count();
        if 4 * k * vy < n {
            let msg = format!("commitment at {vy} touched vertices, below n/4k");
            if divisible {
                breaches.push(msg);
            } else {
                self.notes.push(msg);
            }
        }
        let paid = 128 * (k as u128) * (k as u128) * self.total_no as u128;
        if paid < (n as u128) * (n as u128) {
            let msg = format!("only {} denials paid before commitment, below n²/128k²", self.total_no);
            if divisible {
                breaches.push(msg);
            } else {
                self.notes.push(msg);
            }
        }

        let mut budget = NodeBudget::new(self.search_budget);
        if find_configuration(&self.possible, &self.granted, 1, &mut budget)?.is_none() {
            breaches.push("no full-cycle configuration exists at the boundary".into());
        }
        if find_configuration(&self.possible, &self.granted, k, &mut budget)?.is_none() {
            breaches.push("no split configuration exists at the boundary".into());
        }

        self.settle(breaches)
    }

    /// Routes invariant findings: hard errors at `n ≥ 28k`, notes below.
    fn settle(&mut self, breaches: Vec<String>) -> Result<()> {
        if breaches.is_empty() {
            return Ok(());
        }
        if guarantees_enforced(self.n, self.k) {
            Err(Error::ConsistencyBreach(breaches.join("; ")))
        } else {
            self.notes.extend(breaches);
            Ok(())
        }
    }

    // ------------------------------------------------------- consistency --

    /// Exhibits one consistent configuration per promise class, or `None`
    /// for a class that the answers so far have ruled out. Only meaningful
    /// before commitment; afterwards the committed configuration settles it.
    pub fn consistency_check(&self) -> Result<ConsistencyReport> {
        if self.committed.is_some() {
            return Err(Error::invalid(
                "consistency check applies before commitment; the committed \
                 configuration already decides the game",
            ));
        }
        let mut budget = NodeBudget::new(self.search_budget);
        Ok(ConsistencyReport {
            hamiltonian_witness: find_configuration(&self.possible, &self.granted, 1, &mut budget)?,
            k_cycle_witness: find_configuration(&self.possible, &self.granted, self.k, &mut budget)?,
        })
    }

    /// Whether both promise classes remain realizable given every answer so
    /// far (in either phase). A querier verdict given while this holds could
    /// still be refuted.
    fn both_classes_consistent(&self) -> Result<bool> {
        let mut budget = NodeBudget::new(self.search_budget);
        Ok(
            find_configuration(&self.possible, &self.granted, 1, &mut budget)?.is_some()
                && find_configuration(&self.possible, &self.granted, self.k, &mut budget)?
                    .is_some(),
        )
    }
}

/// Witnesses from [`Adversary::consistency_check`]: one consistent
/// configuration per promise class, where one still exists.
#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    /// A full cycle containing all confirmed and no denied edges.
    pub hamiltonian_witness: Option<GraphInstance>,
    /// A k-cycle configuration containing all confirmed and no denied edges.
    pub k_cycle_witness: Option<GraphInstance>,
}

impl ConsistencyReport {
    pub fn both_consistent(&self) -> bool {
        self.hamiltonian_witness.is_some() && self.k_cycle_witness.is_some()
    }
}

// ------------------------------------------------------------------- play --

/// Outcome of one full game.
#[derive(Debug, Clone, Serialize)]
pub struct GameReport {
    /// Queries asked (including re-queries of decided edges).
    pub queries: usize,
    pub yes: u64,
    pub no: u64,
    /// Denial total at the phase boundary; `None` if commitment never
    /// happened.
    pub phase1_no_count: Option<u64>,
    /// Whether the final verdict was actually forced: `false` means both
    /// promise classes were still realizable when the strategy answered, so
    /// the environment could have refuted it.
    pub final_answerable: bool,
    /// The strategy's verdict (`true` = one full cycle).
    pub output: Option<bool>,
    /// Informational invariant notes accumulated by the environment.
    pub notes: Vec<String>,
    pub trace: Vec<TraceRecord>,
}

impl GameReport {
    /// The trace as one JSON object per line, in play order.
    pub fn trace_jsonl(&self) -> String {
        self.trace
            .iter()
            .map(|r| serde_json::to_string(r).expect("trace records serialize"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Runs a strategy against the environment until it gives a verdict. Every
/// answer goes through the environment's per-query audits; a strategy that
/// asks more queries than there are edge slots without ever answering is
/// malformed.
pub fn play(st: &mut Adversary, strategy: &mut dyn QueryStrategy) -> Result<GameReport> {
    let cap = slot_count(st.n);
    let mut trace: Vec<TraceRecord> = Vec::new();
    let (mut yes, mut no) = (0u64, 0u64);

    loop {
        match strategy.next_move(&trace) {
            StrategyMove::Ask(u, v) => {
                if trace.len() == cap {
                    return Err(Error::MalformedStrategy(format!(
                        "no verdict after {cap} queries (enough to ask every edge slot)"
                    )));
                }
                let a = st.process_query(u, v)?;
                match a {
                    QueryAnswer::Yes => yes += 1,
                    QueryAnswer::No => no += 1,
                }
                trace.push(TraceRecord { q: [u, v], a, phase: st.phase(), total_no: st.total_no });
            }
            StrategyMove::Answer(verdict) => {
                let refutable = st.both_classes_consistent()?;
                return Ok(GameReport {
                    queries: trace.len(),
                    yes,
                    no,
                    phase1_no_count: st.phase1_no_count,
                    final_answerable: !refutable,
                    output: Some(verdict),
                    notes: st.notes.clone(),
                    trace,
                });
            }
        }
    }
}

// ------------------------------------------------------ edge-count lemma --

/// Counting fact behind the denial budget: in a cycle `h` on `n` vertices,
/// for any vertex sets `A` and `B` of size at least `m` each with
/// `n/2 ≤ m ≤ n`, at least `2m − n` cycle edges run between `A` and `B`
/// (one endpoint in each, in either orientation). Validates the inputs,
/// counts, and reports whether the bound held.
pub fn edge_count_lemma_check(
    h: &GraphInstance,
    a: &[usize],
    b: &[usize],
    m: usize,
) -> Result<bool> {
    let n = h.n();
    if cycle_structure(h) != Some(vec![n]) {
        return Err(Error::invalid("the host graph must be a single cycle on all vertices"));
    }
    if 2 * m < n || m > n {
        return Err(Error::invalid(format!("m = {m} is outside [n/2, n] for n = {n}")));
    }
    let set_mask = |name: &str, verts: &[usize]| -> Result<Vec<bool>> {
        let mut mask = vec![false; n];
        for &v in verts {
            if v >= n {
                return Err(Error::invalid(format!("{name} contains {v}, out of range for n = {n}")));
            }
            if mask[v] {
                return Err(Error::invalid(format!("{name} lists vertex {v} twice")));
            }
            mask[v] = true;
        }
        Ok(mask)
    };
    let in_a = set_mask("A", a)?;
    let in_b = set_mask("B", b)?;
    if a.len() < m || b.len() < m {
        return Err(Error::invalid(format!(
            "sets of {} and {} vertices cannot both reach size m = {m}",
            a.len(),
            b.len()
        )));
    }

    let crossing = h
        .edges()
        .iter()
        .filter(|&&(u, v)| (in_a[u] && in_b[v]) || (in_b[u] && in_a[v]))
        .count();
    Ok(crossing >= 2 * m - n)
}
