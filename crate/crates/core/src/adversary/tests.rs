use proptest::prelude::*;

use super::*;
use crate::boolfn::{cycle_structure, enumerate_ockc, slot_count, GraphInstance};
use crate::qc::det_query_complexity;

/// Fixed script: asks a list of edges in order, then gives a verdict.
struct Script {
    asks: Vec<(usize, usize)>,
    verdict: bool,
}

impl QueryStrategy for Script {
    fn next_move(&mut self, trace: &[TraceRecord]) -> StrategyMove {
        match self.asks.get(trace.len()) {
            Some(&(u, v)) => StrategyMove::Ask(u, v),
            None => StrategyMove::Answer(self.verdict),
        }
    }
}

/// Asks the same edge forever and never answers.
struct Stubborn;

impl QueryStrategy for Stubborn {
    fn next_move(&mut self, _: &[TraceRecord]) -> StrategyMove {
        StrategyMove::Ask(0, 1)
    }
}

/// The cycle 0-1-…-(n-1)-0.
fn ring(n: usize) -> GraphInstance {
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    GraphInstance::from_edges(n, &edges).expect("ring is simple")
}

// ----------------------------------------------------------- fresh states --

#[test]
fn fresh_state_offers_every_edge() {
    let st = new_adversary(16, 2).unwrap();
    assert_eq!(st.possible().edge_count(), 120);
    assert_eq!(st.granted().edge_count(), 0);
    assert_eq!(st.phase(), 1);
    assert_eq!(st.total_no(), 0);
    assert_eq!(st.phase1_no_count(), None);
    assert!(st.committed().is_none());
}

#[test]
fn unusable_parameters_are_rejected() {
    assert!(new_adversary(6, 3).is_err()); // cycle length 2
    assert!(new_adversary(7, 2).is_err()); // k does not divide n
    assert!(new_adversary(8, 4).is_err()); // cycle length 2
    assert!(new_adversary(9, 1).is_err()); // nothing to distinguish
    assert!(new_adversary(6, 2).is_ok());
}

#[test]
fn degenerate_queries_are_rejected() {
    let mut st = new_adversary(16, 2).unwrap();
    assert!(st.process_query(3, 3).is_err());
    assert!(st.process_query(0, 16).is_err());
    assert_eq!(st.total_no(), 0, "rejected queries change nothing");
}

// ------------------------------------------------------------ the guards --

#[test]
fn fresh_endpoints_are_denied_and_charged() {
    let mut st = new_adversary(16, 2).unwrap();
    // Both endpoints are uncharged (below n/4k = 2 denials), so the third
    // guard denies and charges them.
    assert_eq!(st.process_query(0, 1).unwrap(), QueryAnswer::No);
    assert_eq!(st.total_no(), 1);
    assert!(!st.possible().has_edge(0, 1));

    // Decided edges are re-answered from memory with zero state change.
    assert_eq!(st.process_query(1, 0).unwrap(), QueryAnswer::No);
    assert_eq!(st.total_no(), 1);
    assert_eq!(st.phase(), 1);
}

#[test]
fn a_vertex_pays_n_over_4k_denials_before_its_first_confirmation() {
    // n = 16, k = 2: the charge threshold is n/4k = 2 denials per endpoint.
    let mut st = new_adversary(16, 2).unwrap();
    assert_eq!(st.process_query(0, 1).unwrap(), QueryAnswer::No);
    assert_eq!(st.process_query(0, 2).unwrap(), QueryAnswer::No);
    // Vertex 0 is now fully charged, vertex 5 is fresh: the third guard no
    // longer holds for both endpoints, so the edge is confirmed.
    assert_eq!(st.process_query(0, 5).unwrap(), QueryAnswer::Yes);
    assert!(st.granted().has_edge(0, 5));
    assert!(st.possible().has_edge(0, 5), "confirmed edges stay possible");
    assert_eq!(st.total_no(), 2);
    assert_eq!(st.phase(), 1);
}

#[test]
fn saturated_and_paired_endpoints_are_denied() {
    // n = 64, k = 2: threshold n/4k = 8. Build the confirmed path 0-9-10.
    let mut st = new_adversary(64, 2).unwrap();
    for j in 1..=8 {
        assert_eq!(st.process_query(0, j).unwrap(), QueryAnswer::No);
    }
    assert_eq!(st.process_query(0, 9).unwrap(), QueryAnswer::Yes);
    for j in 11..=18 {
        assert_eq!(st.process_query(10, j).unwrap(), QueryAnswer::No);
    }
    assert_eq!(st.process_query(9, 10).unwrap(), QueryAnswer::Yes);
    assert_eq!(st.phase(), 1, "three touched vertices are within the gate");

    // Vertex 9 now has two confirmed edges: first guard.
    assert_eq!(st.process_query(9, 20).unwrap(), QueryAnswer::No);
    // Vertices 0 and 10 both touch confirmed edges: second guard.
    assert_eq!(st.process_query(0, 10).unwrap(), QueryAnswer::No);

    assert_eq!(st.total_no(), 18);
    assert_eq!(st.granted().edge_count(), 2);
    // Denials plus confirmations account for every decided edge.
    let decided = slot_count(64) - st.possible().edge_count() + st.granted().edge_count();
    assert_eq!(st.total_no() as usize + st.granted().edge_count(), decided);
}

// ------------------------------------------------------------ commitment --

/// Brute-force oracle: the least Hamiltonian cycle of the complete graph on
/// six vertices in the crate's slot order, by enumerating all 60 cycles.
fn least_six_cycle_by_enumeration() -> GraphInstance {
    fn permutations(rest: &mut Vec<usize>, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            prefix.push(v);
            permutations(rest, prefix, out);
            prefix.pop();
            rest.insert(i, v);
        }
    }
    let mut orders = Vec::new();
    permutations(&mut (1..6).collect(), &mut vec![0], &mut orders);

    orders
        .into_iter()
        .filter(|p| p[1] < p[5]) // one representative per traversal direction
        .map(|p| {
            let edges: Vec<(usize, usize)> = (0..6).map(|i| (p[i], p[(i + 1) % 6])).collect();
            GraphInstance::from_edges(6, &edges).expect("cycle is simple")
        })
        .min_by(|g, h| g.bits().cmp(h.bits()))
        .expect("sixty cycles enumerated")
}

#[test]
fn tiny_instances_commit_on_the_first_query() {
    // n = 6, k = 2: the gate 4k(|touched| + 1) ≤ n fails even at zero
    // touched vertices, so the very first fresh query commits.
    let mut st = new_adversary(6, 2).unwrap();
    let expected = least_six_cycle_by_enumeration();
    assert_eq!(
        expected,
        GraphInstance::from_edges(6, &[(0, 1), (0, 2), (1, 3), (2, 4), (3, 5), (4, 5)]).unwrap(),
    );

    let answer = st.process_query(0, 3).unwrap();
    assert_eq!(st.phase(), 2);
    assert_eq!(st.phase1_no_count(), Some(0));
    assert_eq!(st.committed().unwrap(), &expected);
    assert_eq!(answer, QueryAnswer::No, "(0,3) is not on the committed cycle");

    // Boundary guarantees are unreachable this small; they are noted, not
    // raised.
    assert_eq!(st.notes().len(), 2);
    assert!(st.notes().iter().all(|n| n.contains("below")));
}

#[test]
fn forced_commitment_picks_the_least_full_cycle() {
    // On the untouched 16-vertex state the slot-order greedy zig-zags: vertex
    // 0 takes its two lowest edges, every later vertex one more, and the two
    // loose ends meet at (14,15).
    let mut st = new_adversary(16, 2).unwrap();
    st.commit_phase2().unwrap();
    let mut edges = vec![(0, 1), (0, 2)];
    edges.extend((1..=13).map(|i| (i, i + 2)));
    edges.push((14, 15));
    let expected = GraphInstance::from_edges(16, &edges).unwrap();

    assert_eq!(st.phase(), 2);
    assert_eq!(st.committed().unwrap(), &expected);
    assert_eq!(cycle_structure(st.committed().unwrap()), Some(vec![16]));
    assert_eq!(st.phase1_no_count(), Some(0));
    assert!(st.notes().is_empty(), "forced transitions claim no boundary guarantees");

    // Committing again is a no-op.
    let before = st.committed().unwrap().clone();
    st.commit_phase2().unwrap();
    assert_eq!(st.committed().unwrap(), &before);
}

#[test]
fn split_commitment_builds_the_two_least_rings() {
    let mut st = new_adversary(16, 2).unwrap();
    st.prefer_split_commitment(true);
    st.commit_phase2().unwrap();

    let c1 = [(0, 1), (0, 2), (1, 3), (2, 4), (3, 5), (4, 6), (5, 7), (6, 7)];
    let c2 = [(8, 9), (8, 10), (9, 11), (10, 12), (11, 13), (12, 14), (13, 15), (14, 15)];
    let expected =
        GraphInstance::from_edges(16, &c1.iter().chain(&c2).copied().collect::<Vec<_>>()).unwrap();
    assert_eq!(st.committed().unwrap(), &expected);
    assert_eq!(cycle_structure(st.committed().unwrap()), Some(vec![8, 8]));
}

#[test]
fn commitment_respects_earlier_answers() {
    // Charge vertex 0 twice, confirm (0,5), then let a fresh query trigger
    // the natural transition.
    let mut st = new_adversary(16, 2).unwrap();
    st.process_query(0, 1).unwrap();
    st.process_query(0, 2).unwrap();
    st.process_query(0, 5).unwrap();
    let answer = st.process_query(1, 2).unwrap();

    assert_eq!(st.phase(), 2);
    assert_eq!(st.phase1_no_count(), Some(2));
    let committed = st.committed().unwrap().clone();
    assert_eq!(cycle_structure(&committed), Some(vec![16]));
    assert!(committed.has_edge(0, 5), "confirmed edges survive commitment");
    assert!(!committed.has_edge(0, 1) && !committed.has_edge(0, 2));
    assert_eq!(answer == QueryAnswer::Yes, committed.has_edge(1, 2));
    assert!(st.notes().is_empty(), "both guarantees hold on this trace");

    // Phase-2 queries answer from the committed graph and stay consistent.
    for (u, v) in [(3, 7), (0, 4), (5, 6), (14, 15)] {
        let a = st.process_query(u, v).unwrap();
        assert_eq!(a == QueryAnswer::Yes, committed.has_edge(u, v));
    }
    // Re-queries of decided edges stay free in phase 2.
    let denials = st.total_no();
    assert_eq!(st.process_query(0, 1).unwrap(), QueryAnswer::No);
    assert_eq!(st.process_query(0, 5).unwrap(), QueryAnswer::Yes);
    assert_eq!(st.total_no(), denials);
}

// ----------------------------------------------------------- consistency --

#[test]
fn consistency_search_witnesses_both_classes() {
    let st = new_adversary(16, 2).unwrap();
    let report = st.consistency_check().unwrap();
    assert!(report.both_consistent());
    assert_eq!(cycle_structure(&report.hamiltonian_witness.unwrap()), Some(vec![16]));
    assert_eq!(cycle_structure(&report.k_cycle_witness.unwrap()), Some(vec![8, 8]));
}

#[test]
fn witnesses_contain_the_confirmed_path() {
    // Force the confirmed three-vertex path 0-9-10 on 64 vertices, then ask
    // for witnesses: both classes must embed the path.
    let mut st = new_adversary(64, 2).unwrap();
    for j in 1..=8 {
        st.process_query(0, j).unwrap();
    }
    st.process_query(0, 9).unwrap();
    for j in 11..=18 {
        st.process_query(10, j).unwrap();
    }
    st.process_query(9, 10).unwrap();

    let report = st.consistency_check().unwrap();
    for witness in [report.hamiltonian_witness.unwrap(), report.k_cycle_witness.unwrap()] {
        assert!(witness.has_edge(0, 9) && witness.has_edge(9, 10));
        assert!(st.granted().bits().is_subset_of(witness.bits()));
        assert!(witness.bits().is_subset_of(st.possible().bits()));
    }
}

#[test]
fn consistency_check_is_a_phase1_operation() {
    let mut st = new_adversary(16, 2).unwrap();
    st.commit_phase2().unwrap();
    assert!(matches!(st.consistency_check(), Err(Error::InvalidArgument(_))));
}

#[test]
fn exhausted_search_budgets_are_reported_as_such() {
    // A one-node budget cannot even start assembling; the failure is a
    // resource-limit error, never a "no witness" verdict.
    let st = new_adversary(16, 2).unwrap().with_search_budget(1);
    match st.consistency_check() {
        Err(Error::ResourceLimit { budget, .. }) => assert_eq!(budget, 1),
        other => panic!("expected a resource-limit error, got {other:?}"),
    }
}

// ------------------------------------------------------------------ play --

#[test]
fn full_reveal_pays_the_denial_budget() {
    // Query every slot: the classic lower-bound scenario. n = 64, k = 2
    // guarantees at least n²/128k² = 8 denials before commitment.
    let mut st = new_adversary(64, 2).unwrap();
    let mut strategy = SweepStrategy::new(64);
    let report = play(&mut st, &mut strategy).unwrap();

    assert_eq!(report.queries, slot_count(64));
    assert_eq!(report.yes, 64, "exactly the committed cycle is confirmed");
    assert_eq!(report.no, 2016 - 64);
    assert!(report.phase1_no_count.unwrap() >= 8);
    assert_eq!(report.output, Some(true));
    assert!(report.final_answerable, "a full reveal leaves one consistent class");
    assert!(report.notes.is_empty());

    // Every recorded answer agrees with the committed configuration.
    let committed = st.committed().unwrap();
    assert_eq!(cycle_structure(committed), Some(vec![64]));
    for rec in &report.trace {
        assert_eq!(rec.a == QueryAnswer::Yes, committed.has_edge(rec.q[0], rec.q[1]));
    }
    assert_eq!(report.trace.last().unwrap().phase, 2);
    assert_eq!(report.trace.last().unwrap().total_no, report.no);
}

#[test]
fn trace_records_use_the_interchange_shape() {
    let mut st = new_adversary(16, 2).unwrap();
    let mut strategy = Script { asks: vec![(0, 1)], verdict: false };
    let report = play(&mut st, &mut strategy).unwrap();
    assert_eq!(report.trace_jsonl(), r#"{"q":[0,1],"a":"NO","phase":1,"totalNo":1}"#);
}

#[test]
fn seeded_games_replay_identically() {
    let run = |seed: u64| {
        let mut st = new_adversary(64, 2).unwrap();
        let mut strategy = RandomStrategy::new(64, seed);
        play(&mut st, &mut strategy).unwrap().trace_jsonl()
    };
    assert_eq!(run(1), run(1));
    assert_ne!(run(1), run(2));
}

#[test]
fn the_walker_traces_the_committed_cycle() {
    let mut st = new_adversary(64, 2).unwrap();
    let mut strategy = WalkStrategy::new(64);
    let report = play(&mut st, &mut strategy).unwrap();
    assert_eq!(report.output, Some(true));
    assert!(report.final_answerable);
    assert_eq!(cycle_structure(st.committed().unwrap()), Some(vec![64]));
}

#[test]
fn the_walker_detects_a_split_commitment() {
    let mut st = new_adversary(64, 2).unwrap();
    st.prefer_split_commitment(true);
    let mut strategy = WalkStrategy::new(64);
    let report = play(&mut st, &mut strategy).unwrap();
    assert_eq!(cycle_structure(st.committed().unwrap()), Some(vec![32, 32]));
    assert_eq!(report.output, Some(false));
    assert!(report.final_answerable, "a closed short cycle refutes the full-cycle class");
}

#[test]
fn premature_verdicts_are_flagged_refutable() {
    let mut st = new_adversary(64, 2).unwrap();
    let mut strategy = Script { asks: vec![(0, 1)], verdict: false };
    let report = play(&mut st, &mut strategy).unwrap();
    assert_eq!(report.queries, 1);
    assert!(!report.final_answerable, "both classes are still realizable");
}

#[test]
fn strategies_must_eventually_answer() {
    let mut st = new_adversary(8, 2).unwrap();
    match play(&mut st, &mut Stubborn) {
        Err(Error::MalformedStrategy(_)) => {}
        other => panic!("expected a malformed-strategy error, got {other:?}"),
    }
}

#[test]
fn tiny_games_note_unmet_guarantees() {
    // n = 12, k = 4 commits on the first query with zero denials: both
    // boundary guarantees fail, far below the 28k enforcement threshold.
    let mut st = new_adversary(12, 4).unwrap();
    let mut strategy = SweepStrategy::new(12);
    let report = play(&mut st, &mut strategy).unwrap();
    assert_eq!(report.phase1_no_count, Some(0));
    assert_eq!(report.notes.len(), 2);
    assert!(report.notes.iter().all(|n| n.contains("below")));
    assert_eq!(report.output, Some(true));
}

#[test]
fn an_optimal_querier_matches_the_depth_oracle() {
    // Cross-oracle sanity: the minimax depth of the 6-vertex promise is 5,
    // and this environment cannot force an informed querier beyond it. The
    // commitment at n = 6 is deterministic (the least cycle), so asking five
    // of its six edges confirms a spanning path and settles the game.
    let d = det_query_complexity(&enumerate_ockc(6, 2).unwrap()).unwrap();
    assert_eq!(d, 5);

    let mut st = new_adversary(6, 2).unwrap();
    let mut strategy = Script {
        asks: vec![(0, 1), (0, 2), (1, 3), (2, 4), (3, 5)],
        verdict: true,
    };
    let report = play(&mut st, &mut strategy).unwrap();
    assert_eq!(report.queries, d);
    assert_eq!(report.yes, 5, "all five asked edges lie on the committed cycle");
    assert!(report.final_answerable, "a confirmed spanning path kills the split class");
    assert_eq!(report.output, Some(true));
}

// ------------------------------------------------------ edge-count lemma --

#[test]
fn crossing_edges_meet_the_two_m_minus_n_floor() {
    let h = ring(10);
    let all: Vec<usize> = (0..10).collect();
    assert!(edge_count_lemma_check(&h, &all, &all, 10).unwrap());

    // |A| = |B| = 7 overlapping sets: 6 crossing edges against a floor of 4.
    let a: Vec<usize> = (0..7).collect();
    let b: Vec<usize> = (3..10).collect();
    assert!(edge_count_lemma_check(&h, &a, &b, 7).unwrap());

    // Disjoint halves at m = n/2: the floor degenerates to zero.
    let left: Vec<usize> = (0..5).collect();
    let right: Vec<usize> = (5..10).collect();
    assert!(edge_count_lemma_check(&h, &left, &right, 5).unwrap());
}

#[test]
fn lemma_preconditions_are_enforced() {
    let h = ring(10);
    let all: Vec<usize> = (0..10).collect();
    assert!(edge_count_lemma_check(&h, &all, &all, 4).is_err()); // m < n/2
    assert!(edge_count_lemma_check(&h, &all, &all, 11).is_err()); // m > n
    assert!(edge_count_lemma_check(&h, &all[..3], &all, 5).is_err()); // |A| < m
    assert!(edge_count_lemma_check(&h, &[0, 0, 1, 2, 3], &all, 5).is_err()); // duplicate
    assert!(edge_count_lemma_check(&h, &[0, 1, 2, 3, 99], &all, 5).is_err()); // range

    let path = GraphInstance::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
    let verts: Vec<usize> = (0..4).collect();
    assert!(edge_count_lemma_check(&path, &verts, &verts, 2).is_err()); // not a cycle
}

// -------------------------------------------------------------- properties --

proptest! {
    /// Random full-reveal games on small instances: the game always
    /// completes, the trace agrees with the committed configuration, the
    /// accounting identity holds, and the phase marker never goes backwards.
    #[test]
    fn random_games_stay_sound(case in 0usize..6, seed in any::<u64>()) {
        let (n, k) = [(8, 2), (12, 2), (12, 3), (12, 4), (16, 2), (16, 4)][case];
        let mut st = new_adversary(n, k).unwrap();
        let mut strategy = RandomStrategy::new(n, seed);
        let report = play(&mut st, &mut strategy).unwrap();

        prop_assert_eq!(report.queries, slot_count(n));
        prop_assert_eq!(report.yes + report.no, report.queries as u64);
        prop_assert_eq!(report.yes as usize, n);
        prop_assert!(report.final_answerable);
        prop_assert_eq!(report.output, Some(true));

        let committed = st.committed().unwrap();
        prop_assert_eq!(cycle_structure(committed), Some(vec![n]));
        let mut last_phase = 1;
        for rec in &report.trace {
            prop_assert_eq!(rec.a == QueryAnswer::Yes, committed.has_edge(rec.q[0], rec.q[1]));
            prop_assert!(rec.phase >= last_phase);
            last_phase = rec.phase;
        }
        let decided = slot_count(n) - st.possible().edge_count() + st.granted().edge_count();
        prop_assert_eq!(st.total_no() as usize + st.granted().edge_count(), decided);

        // The interchange form parses back with the pinned field names.
        let first: serde_json::Value =
            serde_json::from_str(report.trace_jsonl().lines().next().unwrap()).unwrap();
        for field in ["q", "a", "phase", "totalNo"] {
            prop_assert!(first.get(field).is_some());
        }
    }
}
