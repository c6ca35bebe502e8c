//! Extraction of the answer polynomial of a deterministic multi-round
//! computation, by sweeping every input and rebuilding the run as nested
//! indicator events.
//!
//! The sweep runs the algorithm on all `2^N` inputs (lenient enforcement,
//! full transcripts) and indexes what it saw: for each round and machine
//! the realized query sequences, and for each round and key the realized
//! written multisets. The construction then proceeds round by round:
//!
//! * a *sequence indicator* `p[r,v,z]` marks the inputs on which machine
//!   `v`'s round-`r` query sequence is exactly `z`; it factors as the
//!   product over the queries in `z` of the indicator that the queried
//!   key held exactly the recorded response (round 1 reads the input bits
//!   directly, and an empty response is the complement of every realized
//!   written multiset);
//! * a *write indicator* `q[r,k,W]` marks the inputs on which the multiset
//!   written under key `k` in round `r` is exactly `W`. It is assembled
//!   from an attribution sum: over every realized way to attribute the
//!   values of `W` to machines writing exactly those values (giving the
//!   superset indicator), then subtracting the indicators of strict
//!   supersets, by downward induction on `|W|`.
//!
//! Every intermediate event is 0/1-valued, so each is carried as a cube
//! bitset and every algebraic step is checked: products must reproduce the
//! directly-observed input classes, attribution sums must be disjoint, and
//! subtractions must be containments. The attribution sum is the one step
//! that can genuinely fail: when two machines write identical value
//! multisets under one key on one input, the same sub-multiset has two
//! consistent attributions, the sum hits 2, and the construction does not
//! define a 0/1 event — reported as [`crate::Error::AmbiguousSourcing`]
//! rather than papered over. Algorithms avoid it by stamping writes with a
//! writer-distinguishing word.
//!
//! The answer polynomial is the write indicator of the multiset `{1}`
//! under the answer key after the last round; its degree is audited
//! against the capacity bound `S^(2·rounds)`, with every intermediate
//! audited against `S^(2r−1)` / `S^(2r)` when auditing is on.

use std::collections::BTreeMap;

use super::cube::CubeTable;
use super::multilinear::MultilinearPolynomial;
use super::MAX_DENSE_VARS;
use crate::ampc::{
    run, AmpcAlgorithm, Key, MachineId, Outcome, RunConfig, TranscriptLevel, Value,
    INPUT_NAMESPACE,
};
use crate::boolfn::BitString;
use crate::error::{Error, Result};
use crate::util::FastMap;

/// A multiset of values in canonical (sorted) order.
type Multiset = Vec<Value>;

/// A realized query sequence: each query's key with its response multiset.
type Sequence = Vec<(Key, Multiset)>;

/// Extraction controls. `max_vars` guards the `2^N` sweep (default 12;
/// hard-capped by [`MAX_DENSE_VARS`]). Sequence-indicator degree audits
/// cost a dense transform per realized sequence, so by default they run
/// only up to 12 variables; write indicators and the answer polynomial are
/// always audited.
#[derive(Debug, Clone)]
pub struct ExtractOptions {
    pub max_vars: usize,
    /// `None`: audit sequence indicators iff the input width is ≤ 12.
    pub audit_sequence_indicators: Option<bool>,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            max_vars: 12,
            audit_sequence_indicators: None,
        }
    }
}

/// One audited intermediate: its degree against the bound it must satisfy.
#[derive(Debug, Clone)]
pub struct AuditRow {
    pub round: usize,
    pub subject: String,
    pub degree: usize,
    pub bound: u128,
    pub ok: bool,
}

/// What the input sweep realized: the machine set, how many distinct query
/// sequences each machine exhibited per round, and the multisets each key
/// ever held per round.
#[derive(Debug, Clone)]
pub struct TranscriptIndex {
    pub machines: Vec<MachineId>,
    /// ((round, machine), number of realized query-sequence classes).
    pub sequence_class_counts: Vec<((usize, MachineId), usize)>,
    /// ((round, key), realized written multisets, largest first).
    pub written_multisets: Vec<((usize, Key), Vec<Multiset>)>,
}

/// The extraction result: the answer polynomial with its cube table, the
/// audited degree, and the sweep index.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub n_vars: usize,
    pub capacity: u64,
    pub rounds: usize,
    pub polynomial: MultilinearPolynomial,
    pub table: CubeTable,
    pub degree: usize,
    /// `capacity^(2·rounds)`, saturating.
    pub degree_bound: u128,
    pub audits: Vec<AuditRow>,
    pub index: TranscriptIndex,
}

impl Extraction {
    pub fn audits_ok(&self) -> bool {
        self.audits.iter().all(|row| row.ok)
    }
}

// ---------------------------------------------------------------------
// Input sweep
// ---------------------------------------------------------------------

#[derive(Default)]
struct MachineSweep {
    class_of: FastMap<Sequence, usize>,
    sequences: Vec<Sequence>,
    inputs: Vec<Vec<u32>>,
    /// Per class: the machine's exact (nonempty) writes by key. A class
    /// determines its writes; the sweep verifies this determinism.
    writes: Vec<FastMap<Key, Multiset>>,
}

#[derive(Default)]
struct StoreSweep {
    class_of: FastMap<Multiset, usize>,
    multisets: Vec<Multiset>,
    inputs: Vec<Vec<u32>>,
}

struct Sweep {
    machines: Vec<MachineId>,
    seq: BTreeMap<(usize, MachineId), MachineSweep>,
    stores: BTreeMap<(usize, Key), StoreSweep>,
    answer_one: CubeTable,
}

fn sweep_inputs(algo: &dyn AmpcAlgorithm, capacity: u64, n_vars: usize) -> Result<Sweep> {
    let config = RunConfig::lenient(capacity).with_transcript(TranscriptLevel::Full);
    let mut sweep = Sweep {
        machines: Vec::new(),
        seq: BTreeMap::new(),
        stores: BTreeMap::new(),
        answer_one: CubeTable::zero(n_vars),
    };
    let mut machine_set: std::collections::BTreeSet<MachineId> = Default::default();
    let one = Value::scalar(1);

    for point in 0..1u32 << n_vars {
        let x = BitString::from_mask(n_vars, point as u64);
        let report = run(algo, &x, &config)?;
        if report.outcome == Outcome::Answer(one) {
            sweep.answer_one.set(point, true);
        }

        let mut store_scratch: FastMap<(usize, Key), Multiset> = FastMap::default();
        for rec in &report.transcript.records {
            machine_set.insert(rec.machine);
            let sequence: Sequence = rec
                .queries
                .iter()
                .map(|q| {
                    let mut resp: Multiset = q.sourced.iter().map(|&(v, _)| v).collect();
                    resp.sort();
                    (q.key, resp)
                })
                .collect();
            let mut writes: FastMap<Key, Multiset> = FastMap::default();
            for &(key, value) in &rec.writes {
                writes.entry(key).or_default().push(value);
                store_scratch
                    .entry((rec.round, key))
                    .or_default()
                    .push(value);
            }
            for multiset in writes.values_mut() {
                multiset.sort();
            }

            let ms = sweep.seq.entry((rec.round, rec.machine)).or_default();
            match ms.class_of.get(&sequence) {
                Some(&class) => {
                    if ms.writes[class] != writes {
                        return Err(Error::ConsistencyBreach(format!(
                            "machine {} in round {} repeated a query sequence with \
                             different writes — its behavior is not a function of its \
                             responses",
                            rec.machine, rec.round
                        )));
                    }
                    ms.inputs[class].push(point);
                }
                None => {
                    let class = ms.sequences.len();
                    ms.class_of.insert(sequence.clone(), class);
                    ms.sequences.push(sequence);
                    ms.inputs.push(vec![point]);
                    ms.writes.push(writes);
                }
            }
        }

        for ((round, key), mut multiset) in store_scratch {
            multiset.sort();
            let ss = sweep.stores.entry((round, key)).or_default();
            match ss.class_of.get(&multiset) {
                Some(&class) => ss.inputs[class].push(point),
                None => {
                    let class = ss.multisets.len();
                    ss.class_of.insert(multiset.clone(), class);
                    ss.multisets.push(multiset);
                    ss.inputs.push(vec![point]);
                }
            }
        }
    }

    sweep.machines = machine_set.into_iter().collect();
    Ok(sweep)
}

// ---------------------------------------------------------------------
// Multiset helpers (sorted vectors)
// ---------------------------------------------------------------------

fn multiset_contains(outer: &[Value], inner: &[Value]) -> bool {
    let mut i = 0;
    for v in inner {
        loop {
            if i >= outer.len() || outer[i] > *v {
                return false;
            }
            i += 1;
            if outer[i - 1] == *v {
                break;
            }
        }
    }
    true
}

fn multiset_minus(outer: &[Value], inner: &[Value]) -> Multiset {
    let mut out = Vec::with_capacity(outer.len() - inner.len());
    let mut j = 0;
    for v in outer {
        if j < inner.len() && inner[j] == *v {
            j += 1;
        } else {
            out.push(*v);
        }
    }
    debug_assert_eq!(j, inner.len());
    out
}

fn multiset_string(w: &[Value]) -> String {
    let inner: Vec<String> = w.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

fn table_from(n_vars: usize, inputs: &[u32]) -> CubeTable {
    let mut t = CubeTable::zero(n_vars);
    for &p in inputs {
        t.set(p, true);
    }
    t
}

// ---------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------

/// Write indicators of one round, keyed by store key: each entry is a
/// realized multiset `W` with the table of inputs where the key held
/// exactly `W`.
type RoundIndicators = FastMap<Key, Vec<(Multiset, CubeTable)>>;

struct Builder<'a> {
    n_vars: usize,
    capacity: u64,
    sweep: &'a Sweep,
    audits: Vec<AuditRow>,
    /// Lazily built tables of the events `x_i = 1`.
    input_tables: Vec<Option<CubeTable>>,
}

impl<'a> Builder<'a> {
    fn input_table(&mut self, i: usize) -> &CubeTable {
        if self.input_tables[i].is_none() {
            let table = CubeTable::from_fn(self.n_vars, |p| p >> i & 1 == 1);
            self.input_tables[i] = Some(table);
        }
        self.input_tables[i].as_ref().unwrap()
    }

    fn audit(&mut self, round: usize, subject: String, degree: usize, bound: u128) {
        let ok = (degree as u128) <= bound;
        self.audits.push(AuditRow {
            round,
            subject,
            degree,
            bound,
            ok,
        });
    }

    /// The indicator that the store of round `round − 1` held exactly
    /// `response` under `key` — one factor of a sequence indicator.
    fn response_factor(
        &mut self,
        round: usize,
        key: &Key,
        response: &Multiset,
        prev: &RoundIndicators,
    ) -> Result<CubeTable> {
        if round == 1 {
            // Store 0 is the input: key ("in", i) holds exactly {x_i};
            // every other key is always empty.
            if key.namespace() == INPUT_NAMESPACE && key.coords().len() == 1 {
                let i = key.coords()[0];
                if i >= 0 && (i as usize) < self.n_vars {
                    let bit = match response.as_slice() {
                        [v] => v.as_bit(),
                        _ => None,
                    };
                    return match bit {
                        Some(true) => Ok(self.input_table(i as usize).clone()),
                        Some(false) => Ok(self.input_table(i as usize).complement()),
                        None => Err(Error::ConsistencyBreach(format!(
                            "input key {key} answered {} instead of one bit",
                            multiset_string(response)
                        ))),
                    };
                }
            }
            return if response.is_empty() {
                Ok(CubeTable::ones(self.n_vars))
            } else {
                Err(Error::ConsistencyBreach(format!(
                    "round-1 query for {key} answered {} from the input store",
                    multiset_string(response)
                )))
            };
        }

        let entries = prev.get(key);
        if response.is_empty() {
            // Complement of every realized nonempty multiset: exactly the
            // inputs on which the key was never written.
            let mut written = CubeTable::zero(self.n_vars);
            if let Some(entries) = entries {
                for (_, table) in entries {
                    written = written.or_disjoint(table)?;
                }
            }
            return Ok(written.complement());
        }
        entries
            .and_then(|entries| entries.iter().find(|(w, _)| w == response))
            .map(|(_, table)| table.clone())
            .ok_or_else(|| {
                Error::ConsistencyBreach(format!(
                    "response {} under {key} was never written in round {}",
                    multiset_string(response),
                    round - 1
                ))
            })
    }

    /// Builds and checks every sequence indicator of round `round`.
    fn build_sequence_indicators(
        &mut self,
        round: usize,
        prev: &RoundIndicators,
        audit_degrees: bool,
    ) -> Result<()> {
        let range = (round, MachineId::MIN)..=(round, MachineId::MAX);
        let mut checks: Vec<(MachineId, usize)> = Vec::new();
        for (&(_, machine), ms) in self.sweep.seq.range(range.clone()) {
            for class in 0..ms.sequences.len() {
                checks.push((machine, class));
            }
        }
        let bound = (self.capacity as u128).saturating_pow(2 * round as u32 - 1);
        for (machine, class) in checks {
            let ms = &self.sweep.seq[&(round, machine)];
            let direct = table_from(self.n_vars, &ms.inputs[class]);
            let sequence = ms.sequences[class].clone();
            let mut product = CubeTable::ones(self.n_vars);
            for (key, response) in &sequence {
                let factor = self.response_factor(round, key, response, prev)?;
                product = product.and(&factor);
            }
            if product != direct {
                return Err(Error::ConsistencyBreach(format!(
                    "sequence indicator product for machine {machine} in round {round} \
                     does not match the observed input class"
                )));
            }
            if audit_degrees {
                let degree = direct.degree();
                self.audit(
                    round,
                    format!("sequence machine {machine} class {class}"),
                    degree,
                    bound,
                );
            }
        }
        Ok(())
    }

    /// Builds, checks, and audits every write indicator of round `round`.
    fn build_write_indicators(&mut self, round: usize) -> Result<RoundIndicators> {
        let mut out: RoundIndicators = FastMap::default();
        let keys: Vec<Key> = self
            .sweep
            .stores
            .range((round, Key::new("\0", &[]))..)
            .take_while(|(&(r, _), _)| r == round)
            .map(|(&(_, k), _)| k)
            .collect();

        let bound = (self.capacity as u128).saturating_pow(2 * round as u32);
        for key in keys {
            let ss = &self.sweep.stores[&(round, key)];
            // Per machine, the realized exact write multisets under this
            // key and the inputs exhibiting each — the attribution atoms.
            let mut writers: Vec<(MachineId, Vec<(Multiset, CubeTable)>)> = Vec::new();
            for (&(r, machine), ms) in self
                .sweep
                .seq
                .range((round, MachineId::MIN)..=(round, MachineId::MAX))
            {
                debug_assert_eq!(r, round);
                let mut by_multiset: FastMap<&Multiset, Vec<u32>> = FastMap::default();
                for class in 0..ms.sequences.len() {
                    if let Some(w) = ms.writes[class].get(&key) {
                        by_multiset
                            .entry(w)
                            .or_default()
                            .extend_from_slice(&ms.inputs[class]);
                    }
                }
                if by_multiset.is_empty() {
                    continue;
                }
                let mut atoms: Vec<(Multiset, CubeTable)> = by_multiset
                    .into_iter()
                    .map(|(w, inputs)| (w.clone(), table_from(self.n_vars, &inputs)))
                    .collect();
                atoms.sort_by(|a, b| a.0.cmp(&b.0));
                writers.push((machine, atoms));
            }

            // Downward induction: largest multisets first.
            let mut order: Vec<usize> = (0..ss.multisets.len()).collect();
            order.sort_by(|&a, &b| {
                ss.multisets[b]
                    .len()
                    .cmp(&ss.multisets[a].len())
                    .then_with(|| ss.multisets[a].cmp(&ss.multisets[b]))
            });

            let mut built: Vec<(Multiset, CubeTable)> = Vec::new();
            for class in order {
                let w = &ss.multisets[class];
                let superset_indicator =
                    self.attribution_sum(round, &key, w, &writers)?;

                // The attribution sum must mark exactly the inputs where
                // the key's multiset contains `w`.
                let mut expected = CubeTable::zero(self.n_vars);
                for (other, inputs) in ss.multisets.iter().zip(&ss.inputs) {
                    if multiset_contains(other, w) {
                        expected = expected.or_disjoint(&table_from(self.n_vars, inputs))?;
                    }
                }
                if superset_indicator != expected {
                    return Err(Error::ConsistencyBreach(format!(
                        "attribution sum for {} under {key} in round {round} does not \
                         match the containment classes",
                        multiset_string(w)
                    )));
                }

                let mut exact = superset_indicator;
                for (larger, table) in &built {
                    if larger.len() > w.len() && multiset_contains(larger, w) {
                        exact = exact.subtract_subset(table)?;
                    }
                }
                if exact != table_from(self.n_vars, &ss.inputs[class]) {
                    return Err(Error::ConsistencyBreach(format!(
                        "write indicator for {} under {key} in round {round} does not \
                         match the observed input class",
                        multiset_string(w)
                    )));
                }
                let degree = exact.degree();
                self.audit(
                    round,
                    format!("write {key} {}", multiset_string(w)),
                    degree,
                    bound,
                );
                built.push((w.clone(), exact));
            }
            out.insert(key, built);
        }
        Ok(out)
    }

    /// The sum over realized attributions of the values of `w` to writing
    /// machines: the superset indicator. Two overlapping attributions mean
    /// a genuinely ambiguous multiset — the construction's failure mode.
    fn attribution_sum(
        &self,
        round: usize,
        key: &Key,
        w: &Multiset,
        writers: &[(MachineId, Vec<(Multiset, CubeTable)>)],
    ) -> Result<CubeTable> {
        let mut sum = CubeTable::zero(self.n_vars);
        let mut stack: Vec<(usize, Multiset, CubeTable)> =
            vec![(0, w.clone(), CubeTable::ones(self.n_vars))];
        while let Some((idx, remaining, acc)) = stack.pop() {
            if remaining.is_empty() {
                if !sum.and(&acc).is_zero() {
                    return Err(Error::AmbiguousSourcing {
                        round,
                        key: key.to_string(),
                        multiset: multiset_string(w),
                    });
                }
                sum = sum.or_disjoint(&acc)?;
                continue;
            }
            if idx == writers.len() {
                continue;
            }
            // Leave this machine out of the attribution…
            stack.push((idx + 1, remaining.clone(), acc.clone()));
            // …or attribute one of its realized exact writes.
            for (u, table) in &writers[idx].1 {
                if u.len() <= remaining.len() && multiset_contains(&remaining, u) {
                    let next = acc.and(table);
                    if !next.is_zero() {
                        stack.push((idx + 1, multiset_minus(&remaining, u), next));
                    }
                }
            }
        }
        Ok(sum)
    }
}

/// Runs `algo` on every input and returns the answer polynomial with its
/// audit trail. The run is lenient (machines that overrun on malformed
/// inputs stop silently); per-key capacity violations still abort, as does
/// an ambiguous attribution (see the module docs).
pub fn extract_polynomial(
    algo: &dyn AmpcAlgorithm,
    capacity: u64,
    options: &ExtractOptions,
) -> Result<Extraction> {
    let n_vars = algo.input_len();
    let rounds = algo.rounds();
    let guard = options.max_vars.min(MAX_DENSE_VARS);
    if n_vars == 0 || n_vars > guard {
        return Err(Error::invalid(format!(
            "extraction sweeps 2^N runs; N = {n_vars} is outside 1..={guard}"
        )));
    }
    if rounds == 0 {
        return Err(Error::invalid("extraction needs at least one round"));
    }
    if capacity == 0 {
        return Err(Error::invalid("extraction needs a positive capacity"));
    }

    let sweep = sweep_inputs(algo, capacity, n_vars)?;
    let audit_sequences = options
        .audit_sequence_indicators
        .unwrap_or(n_vars <= 12);

    let mut builder = Builder {
        n_vars,
        capacity,
        sweep: &sweep,
        audits: Vec::new(),
        input_tables: vec![None; n_vars],
    };

    let mut prev: RoundIndicators = FastMap::default();
    for round in 1..=rounds {
        builder.build_sequence_indicators(round, &prev, audit_sequences)?;
        prev = builder.build_write_indicators(round)?;
    }

    let answer_multiset = vec![Value::scalar(1)];
    let table = prev
        .get(&Key::answer())
        .and_then(|entries| entries.iter().find(|(w, _)| *w == answer_multiset))
        .map(|(_, table)| table.clone())
        .unwrap_or_else(|| CubeTable::zero(n_vars));

    if table != sweep.answer_one {
        return Err(Error::ConsistencyBreach(
            "answer polynomial disagrees with the per-input outcomes".into(),
        ));
    }

    let polynomial = table.to_polynomial();
    let values = polynomial.evaluate_all()?;
    for (point, value) in values.iter().enumerate() {
        let expected = u64::from(table.get(point as u32));
        if *value != num::BigRational::from_integer(expected.into()) {
            return Err(Error::ConsistencyBreach(
                "answer polynomial re-evaluation disagrees with its cube table".into(),
            ));
        }
    }

    let degree = polynomial.degree();
    let degree_bound = (capacity as u128).saturating_pow(2 * rounds as u32);
    builder.audit(rounds, "answer".into(), degree, degree_bound);

    let index = TranscriptIndex {
        machines: sweep.machines.clone(),
        sequence_class_counts: sweep
            .seq
            .iter()
            .map(|(&rv, ms)| (rv, ms.sequences.len()))
            .collect(),
        written_multisets: sweep
            .stores
            .iter()
            .map(|(&rk, ss)| {
                let mut multisets = ss.multisets.clone();
                multisets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
                (rk, multisets)
            })
            .collect(),
    };

    let audits = builder.audits;
    if let Some(bad) = audits.iter().find(|row| !row.ok) {
        return Err(Error::ConsistencyBreach(format!(
            "degree bound violated in round {}: {} has degree {} > {}",
            bad.round, bad.subject, bad.degree, bad.bound
        )));
    }

    Ok(Extraction {
        n_vars,
        capacity,
        rounds,
        polynomial,
        table,
        degree,
        degree_bound,
        audits,
        index,
    })
}
