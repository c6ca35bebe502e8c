//! An executable model of adaptive massively parallel computation.
//!
//! A computation proceeds in rounds against a chain of immutable key-value
//! stores. Store 0 holds the input bits; in each later round a roster of
//! machines runs, each issuing an adaptive sequence of key queries against
//! the *previous* round's store and finally emitting writes, which are
//! merged at a barrier into the next store. Every machine is held to the
//! same capacity `S` three ways:
//!
//! * query budget — total values received plus empty-response queries ≤ S;
//! * write budget — at most S key-value pairs written;
//! * key capacity — at most S values stored under any single key per round.
//!
//! Two enforcement modes exist. In strict mode any breach aborts the run
//! with an error naming the machine and the law broken. In lenient mode a
//! machine that overruns its own query or write budget is silently stopped
//! and writes nothing (so malformed inputs degrade gracefully rather than
//! crash), but the per-key capacity is still an abort: it is a standing
//! assumption of the model, not a per-input promise.
//!
//! The executor is fully deterministic: machines are logically concurrent
//! within a round, but they run in roster order against the frozen previous
//! store and their writes merge in (machine id, write order), so identical
//! (algorithm, input, seed) always produce identical transcripts.

mod exec;
mod program;
mod random;
mod store;

pub use exec::{
    run, run_round, MachineRound, Outcome, QueryRecord, RunConfig, RunReport, Transcript,
    TranscriptLevel,
};
pub use program::{Action, AdaptiveProgram, AmpcAlgorithm, NonAdaptive, RosterEntry};
pub use random::{estimate_error, ErrorEstimate, ErrorMode, RandomizedAlgorithm};
pub use store::{DataStore, Key, MachineId, Value, ANSWER_NAMESPACE, INPUT_NAMESPACE, INPUT_WRITER};
