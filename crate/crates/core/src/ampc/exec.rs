//! The round executor: budget accounting, barrier merge, transcripts.

use std::io;

use serde::Serialize;

use super::program::{Action, AmpcAlgorithm, RosterEntry};
use super::store::{DataStore, Key, MachineId, Value, INPUT_WRITER};
use crate::boolfn::BitString;
use crate::error::{CapacityLaw, Error, Result};
use crate::util::FastMap;

/// How much of a run to record. `Off` keeps nothing, `Summary` keeps one
/// budget line per machine-round, `Full` additionally keeps every query
/// with its sourced response and every write — enough to reconstruct the
/// whole computation, which the polynomial extraction requires.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TranscriptLevel {
    Off,
    Summary,
    Full,
}

/// One recorded query: the key, the response multiset tagged with writers
/// (input bits are tagged [`INPUT_WRITER`]), and whether it came back empty.
#[derive(Debug, Clone)]
pub struct QueryRecord {
    pub key: Key,
    pub sourced: Vec<(Value, MachineId)>,
    pub empty: bool,
}

/// One machine's round: budget totals always; queries and writes at `Full`.
/// `stopped` marks a lenient-mode machine that overran a budget and was
/// halted writing nothing — the choice is recorded rather than left silent.
#[derive(Debug, Clone)]
pub struct MachineRound {
    pub round: usize,
    pub machine: MachineId,
    pub budget_used: u64,
    pub write_count: u64,
    pub stopped: bool,
    pub queries: Vec<QueryRecord>,
    pub writes: Vec<(Key, Value)>,
}

#[derive(Debug, Clone)]
pub struct Transcript {
    pub level: TranscriptLevel,
    pub records: Vec<MachineRound>,
}

impl Transcript {
    fn new(level: TranscriptLevel) -> Transcript {
        Transcript {
            level,
            records: Vec::new(),
        }
    }

    /// Writes the transcript as JSON lines: one config line, then one line
    /// per machine-round with `round`, `machine`, `queries` (key, values,
    /// empty flag), `writes`, budget totals, and the stopped flag.
    pub fn write_jsonl(&self, config: &RunConfig, mut w: impl io::Write) -> Result<()> {
        #[derive(Serialize)]
        struct ConfigLine<'a> {
            capacity: u64,
            strict: bool,
            level: &'a str,
            max_rounds: Option<u64>,
        }
        #[derive(Serialize)]
        struct QueryLine<'a> {
            key: String,
            values: Vec<&'a Value>,
            empty: bool,
        }
        #[derive(Serialize)]
        struct WriteLine<'a> {
            key: String,
            value: &'a Value,
        }
        #[derive(Serialize)]
        struct RecordLine<'a> {
            round: usize,
            machine: MachineId,
            budget_used: u64,
            write_count: u64,
            stopped: bool,
            queries: Vec<QueryLine<'a>>,
            writes: Vec<WriteLine<'a>>,
        }

        let config_line = ConfigLine {
            capacity: config.capacity,
            strict: config.strict,
            level: match self.level {
                TranscriptLevel::Off => "off",
                TranscriptLevel::Summary => "summary",
                TranscriptLevel::Full => "full",
            },
            max_rounds: config.max_rounds,
        };
        serde_json::to_writer(&mut w, &config_line)?;
        writeln!(w)?;
        for rec in &self.records {
            let line = RecordLine {
                round: rec.round,
                machine: rec.machine,
                budget_used: rec.budget_used,
                write_count: rec.write_count,
                stopped: rec.stopped,
                queries: rec
                    .queries
                    .iter()
                    .map(|q| QueryLine {
                        key: q.key.to_string(),
                        values: q.sourced.iter().map(|(v, _)| v).collect(),
                        empty: q.empty,
                    })
                    .collect(),
                writes: rec
                    .writes
                    .iter()
                    .map(|(k, v)| WriteLine {
                        key: k.to_string(),
                        value: v,
                    })
                    .collect(),
            };
            serde_json::to_writer(&mut w, &line)?;
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Execution parameters: the capacity `S`, the enforcement mode, how much
/// transcript to keep, and an optional hard cap on round count.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub capacity: u64,
    pub strict: bool,
    pub transcript: TranscriptLevel,
    pub max_rounds: Option<u64>,
}

impl RunConfig {
    /// Strict enforcement: any budget breach aborts the run.
    pub fn strict(capacity: u64) -> RunConfig {
        RunConfig {
            capacity,
            strict: true,
            transcript: TranscriptLevel::Off,
            max_rounds: None,
        }
    }

    /// Lenient enforcement: an over-budget machine stops and writes nothing
    /// (the per-key capacity still aborts).
    pub fn lenient(capacity: u64) -> RunConfig {
        RunConfig {
            strict: false,
            ..RunConfig::strict(capacity)
        }
    }

    pub fn with_transcript(mut self, level: TranscriptLevel) -> RunConfig {
        self.transcript = level;
        self
    }

    pub fn with_max_rounds(mut self, max_rounds: u64) -> RunConfig {
        self.max_rounds = Some(max_rounds);
        self
    }
}

/// What the final store said under the answer key: exactly one value is an
/// answer; an empty or multi-valued multiset is reported as-is, never as a
/// crash.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Answer(Value),
    NoAnswer(Vec<Value>),
}

impl Outcome {
    /// The answer as a bit, when there is one and it is 0 or 1.
    pub fn bit(&self) -> Option<bool> {
        match self {
            Outcome::Answer(v) => v.as_bit(),
            Outcome::NoAnswer(_) => None,
        }
    }
}

#[derive(Debug)]
pub struct RunReport {
    pub outcome: Outcome,
    pub rounds: usize,
    pub transcript: Transcript,
    pub final_store: DataStore,
}

struct MachineExec {
    budget_used: u64,
    stopped: bool,
    writes: Vec<(Key, Value)>,
    queries: Vec<QueryRecord>,
}

fn execute_machine(
    prev: &DataStore,
    round: usize,
    machine: MachineId,
    mut program: Box<dyn super::AdaptiveProgram>,
    config: &RunConfig,
) -> Result<MachineExec> {
    let full = config.transcript == TranscriptLevel::Full;
    let mut queries = Vec::new();
    let mut budget_used: u64 = 0;
    let mut response: Vec<Value> = Vec::new();
    let mut action = program.resume(None);
    loop {
        match action {
            Action::Query(key) => {
                response.clear();
                let count = prev.respond(&key, &mut response);
                // Responses are delivered sorted: a machine sees the
                // multiset, never the merge order, so its behavior is a
                // function of the response values alone.
                response.sort_unstable();
                let empty = count == 0;
                if full {
                    queries.push(QueryRecord {
                        key,
                        sourced: prev.sourced(&key),
                        empty,
                    });
                }
                budget_used += if empty { 1 } else { count as u64 };
                if budget_used > config.capacity {
                    if config.strict {
                        return Err(Error::ModelViolation {
                            round,
                            machine,
                            law: CapacityLaw::QueryBudget,
                            detail: format!(
                                "query {key} pushed the budget to {budget_used} > {}",
                                config.capacity
                            ),
                        });
                    }
                    return Ok(MachineExec {
                        budget_used,
                        stopped: true,
                        writes: Vec::new(),
                        queries,
                    });
                }
                action = program.resume(Some(&response));
            }
            Action::Finish(writes) => {
                if writes.len() as u64 > config.capacity {
                    if config.strict {
                        return Err(Error::ModelViolation {
                            round,
                            machine,
                            law: CapacityLaw::WriteCount,
                            detail: format!(
                                "{} writes exceed the capacity {}",
                                writes.len(),
                                config.capacity
                            ),
                        });
                    }
                    return Ok(MachineExec {
                        budget_used,
                        stopped: true,
                        writes: Vec::new(),
                        queries,
                    });
                }
                return Ok(MachineExec {
                    budget_used,
                    stopped: false,
                    writes,
                    queries,
                });
            }
        }
    }
}

/// Runs one round's roster against the frozen previous store and merges the
/// surviving writes into the next store. Returns the new store plus the
/// machine-round records (empty at transcript level `Off`).
pub fn run_round(
    prev: &DataStore,
    roster: Vec<RosterEntry>,
    config: &RunConfig,
) -> Result<(DataStore, Vec<MachineRound>)> {
    let round = prev.round() + 1;
    let mut last_machine: Option<MachineId> = None;
    let mut map: FastMap<Key, Vec<(Value, MachineId)>> = FastMap::default();
    let mut records = Vec::new();

    for entry in roster {
        let RosterEntry { machine, program } = entry;
        if machine == INPUT_WRITER {
            return Err(Error::MalformedProgram {
                round,
                machine,
                detail: "machine id reserved for the input writer".into(),
            });
        }
        if last_machine.is_some_and(|prev_id| prev_id >= machine) {
            return Err(Error::MalformedProgram {
                round,
                machine,
                detail: "roster machine ids must be strictly increasing".into(),
            });
        }
        last_machine = Some(machine);

        let exec = execute_machine(prev, round, machine, program, config)?;
        for &(key, value) in &exec.writes {
            let entry = map.entry(key).or_default();
            entry.push((value, machine));
            if entry.len() as u64 > config.capacity {
                return Err(Error::ModelViolation {
                    round,
                    machine,
                    law: CapacityLaw::PerKeyCap,
                    detail: format!(
                        "key {key} now holds {} values, over the capacity {}",
                        entry.len(),
                        config.capacity
                    ),
                });
            }
        }
        if config.transcript != TranscriptLevel::Off {
            records.push(MachineRound {
                round,
                machine,
                budget_used: exec.budget_used,
                write_count: exec.writes.len() as u64,
                stopped: exec.stopped,
                queries: exec.queries,
                writes: if config.transcript == TranscriptLevel::Full {
                    exec.writes
                } else {
                    Vec::new()
                },
            });
        }
    }

    Ok((DataStore::from_map(round, map), records))
}

/// Runs a whole algorithm on input `x`: loads store 0, executes every
/// round's roster, and reads the answer key of the final store.
pub fn run(algo: &dyn AmpcAlgorithm, x: &BitString, config: &RunConfig) -> Result<RunReport> {
    if x.len() != algo.input_len() {
        return Err(Error::invalid(format!(
            "input has {} bits, the algorithm expects {}",
            x.len(),
            algo.input_len()
        )));
    }
    let rounds = algo.rounds();
    if let Some(max_rounds) = config.max_rounds {
        if rounds as u64 > max_rounds {
            return Err(Error::ResourceLimit {
                what: "rounds".into(),
                budget: max_rounds,
                lower: Some(rounds as u64),
                upper: None,
            });
        }
    }

    let mut store = DataStore::load_input(x);
    let mut transcript = Transcript::new(config.transcript);
    for round in 1..=rounds {
        let roster = algo.roster(round);
        let (next, records) = run_round(&store, roster, config)?;
        transcript.records.extend(records);
        store = next;
    }

    let answers = store.values(&Key::answer());
    let outcome = if answers.len() == 1 {
        Outcome::Answer(answers[0])
    } else {
        Outcome::NoAnswer(answers)
    };
    Ok(RunReport {
        outcome,
        rounds,
        transcript,
        final_store: store,
    })
}
