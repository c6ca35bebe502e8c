//! Machine programs: the adaptive query interface and the per-round roster.

use super::store::{Key, MachineId, Value};

/// What a machine does next: query one more key, or finish the round by
/// emitting its writes. The type makes a third outcome unrepresentable.
pub enum Action {
    Query(Key),
    Finish(Vec<(Key, Value)>),
}

/// A resumable machine. The executor first calls `resume(None)` as the
/// start signal; after each [`Action::Query`] it calls `resume(Some(resp))`
/// with the response multiset (possibly empty, always sorted ascending).
/// Once the program returns [`Action::Finish`] it is never resumed again.
/// Each query's responses may drive the choice of the next query —
/// machines follow a decision tree, not a fixed query list.
pub trait AdaptiveProgram: Send {
    fn resume(&mut self, response: Option<&[Value]>) -> Action;
}

/// A machine that announces its whole query list up front and computes its
/// writes from the collected responses. This is the non-adaptive special
/// case (a fixed-query machine runs unchanged under the adaptive executor),
/// and it covers most scan/aggregate machines.
pub struct NonAdaptive {
    queries: Vec<Key>,
    responses: Vec<Vec<Value>>,
    issued: usize,
    finish: Option<Box<dyn FnOnce(Vec<Vec<Value>>) -> Vec<(Key, Value)> + Send>>,
}

impl NonAdaptive {
    pub fn new(
        queries: Vec<Key>,
        finish: impl FnOnce(Vec<Vec<Value>>) -> Vec<(Key, Value)> + Send + 'static,
    ) -> NonAdaptive {
        NonAdaptive {
            responses: Vec::with_capacity(queries.len()),
            queries,
            issued: 0,
            finish: Some(Box::new(finish)),
        }
    }
}

impl AdaptiveProgram for NonAdaptive {
    fn resume(&mut self, response: Option<&[Value]>) -> Action {
        if let Some(resp) = response {
            self.responses.push(resp.to_vec());
        }
        if self.issued < self.queries.len() {
            let key = self.queries[self.issued];
            self.issued += 1;
            Action::Query(key)
        } else {
            let finish = self.finish.take().expect("finished machine resumed again");
            Action::Finish(finish(std::mem::take(&mut self.responses)))
        }
    }
}

/// One machine scheduled for a round.
pub struct RosterEntry {
    pub machine: MachineId,
    pub program: Box<dyn AdaptiveProgram>,
}

impl RosterEntry {
    pub fn new(machine: MachineId, program: impl AdaptiveProgram + 'static) -> RosterEntry {
        RosterEntry {
            machine,
            program: Box::new(program),
        }
    }
}

/// A complete multi-round computation: a fixed round count and a roster of
/// machines per round. The roster may depend on the instance size, the
/// capacity, the round number, and the algorithm's own seed — never on the
/// input bits, which machines can reach only through queries. Machine ids
/// must be strictly increasing within a roster (this fixes the merge order)
/// and a roster may be empty.
pub trait AmpcAlgorithm {
    /// Number of input bits the algorithm expects.
    fn input_len(&self) -> usize;

    /// Total rounds; `roster` is consulted for rounds `1..=rounds()`.
    fn rounds(&self) -> usize;

    fn roster(&self, round: usize) -> Vec<RosterEntry>;
}
