//! Keys, values, and the per-round immutable stores.

use std::cmp::Ordering;
use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::boolfn::BitString;
use crate::util::FastMap;

/// Identifies one machine within a round. Machines with the same id in
/// different rounds are considered the same logical machine by the
/// transcript analyses.
pub type MachineId = u64;

/// Writer id attached to the input pairs of store 0, which no machine wrote.
pub const INPUT_WRITER: MachineId = u64::MAX;

/// Namespace of the input keys: `("in", i)` holds input bit `i` in store 0.
pub const INPUT_NAMESPACE: &str = "in";

/// Namespace of the reserved answer key `("ans",)`: after the final round it
/// must hold exactly one value for the run to produce an answer.
pub const ANSWER_NAMESPACE: &str = "ans";

/// A store key: a short static namespace plus up to four integer
/// coordinates. Ordered lexicographically by (namespace, coordinates) so
/// iteration and merging are deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Key {
    ns: &'static str,
    len: u8,
    coords: [i64; 4],
}

impl Key {
    /// At most four coordinates; the namespace should be a short tag.
    pub fn new(ns: &'static str, coords: &[i64]) -> Key {
        assert!(coords.len() <= 4, "a key has at most 4 coordinates");
        assert!(!ns.is_empty(), "a key namespace must be nonempty");
        let mut k = Key {
            ns,
            len: coords.len() as u8,
            coords: [0; 4],
        };
        k.coords[..coords.len()].copy_from_slice(coords);
        k
    }

    pub fn input(i: usize) -> Key {
        Key::new(INPUT_NAMESPACE, &[i as i64])
    }

    pub fn answer() -> Key {
        Key::new(ANSWER_NAMESPACE, &[])
    }

    pub fn namespace(&self) -> &'static str {
        self.ns
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords[..self.len as usize]
    }

    pub fn is_answer(&self) -> bool {
        self.ns == ANSWER_NAMESPACE && self.len == 0
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ns
            .cmp(other.ns)
            .then_with(|| self.coords().cmp(other.coords()))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.ns)?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for Key {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A stored value: a tuple of up to four 64-bit words (messages carry a
/// constant number of words). Ordered lexicographically as a word slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Value {
    len: u8,
    words: [u64; 4],
}

impl Value {
    pub fn new(words: &[u64]) -> Value {
        assert!(words.len() <= 4, "a value has at most 4 words");
        let mut v = Value {
            len: words.len() as u8,
            words: [0; 4],
        };
        v.words[..words.len()].copy_from_slice(words);
        v
    }

    pub fn scalar(w: u64) -> Value {
        Value::new(&[w])
    }

    pub fn pair(a: u64, b: u64) -> Value {
        Value::new(&[a, b])
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.words[..self.len as usize]
    }

    pub fn word(&self, i: usize) -> u64 {
        self.as_slice()[i]
    }

    /// The value as a single bit, when it is a scalar 0 or 1.
    pub fn as_bit(&self) -> Option<bool> {
        match self.as_slice() {
            [0] => Some(false),
            [1] => Some(true),
            _ => None,
        }
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        self.as_slice().cmp(other.as_slice())
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, w) in self.as_slice().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.as_slice().len()))?;
        for w in self.as_slice() {
            seq.serialize_element(w)?;
        }
        seq.end()
    }
}

/// One round's frozen store: a map from key to the multiset of values
/// written under it, each tagged with its writer. Store 0 is backed
/// directly by the input bit string (key `("in", i)` answers bit `i`) so
/// that input scans cost an array lookup, not a map probe.
#[derive(Debug, Clone)]
pub struct DataStore {
    round: usize,
    input: Option<BitString>,
    map: FastMap<Key, Vec<(Value, MachineId)>>,
}

impl DataStore {
    /// Store 0: key `("in", i)` holds the singleton `{x_i}` for each input
    /// bit, and nothing else.
    pub fn load_input(x: &BitString) -> DataStore {
        DataStore {
            round: 0,
            input: Some(x.clone()),
            map: FastMap::default(),
        }
    }

    pub(crate) fn from_map(round: usize, map: FastMap<Key, Vec<(Value, MachineId)>>) -> DataStore {
        DataStore {
            round,
            input: None,
            map,
        }
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn key_count(&self) -> usize {
        match &self.input {
            Some(bits) => bits.len(),
            None => self.map.len(),
        }
    }

    fn input_bit(&self, key: &Key) -> Option<bool> {
        let bits = self.input.as_ref()?;
        if key.ns == INPUT_NAMESPACE && key.len == 1 {
            let i = key.coords[0];
            if i >= 0 && (i as usize) < bits.len() {
                return Some(bits.get(i as usize));
            }
        }
        None
    }

    /// Appends the response multiset for `key` to `buf` and returns how many
    /// values were appended (0 = empty response). The hot path of the
    /// executor: no allocation for input-key lookups.
    pub(crate) fn respond(&self, key: &Key, buf: &mut Vec<Value>) -> usize {
        if self.input.is_some() {
            return match self.input_bit(key) {
                Some(bit) => {
                    buf.push(Value::scalar(bit as u64));
                    1
                }
                None => 0,
            };
        }
        match self.map.get(key) {
            Some(entries) => {
                buf.extend(entries.iter().map(|(v, _)| *v));
                entries.len()
            }
            None => 0,
        }
    }

    /// The multiset under `key` with writer tags, in merge order.
    pub fn sourced(&self, key: &Key) -> Vec<(Value, MachineId)> {
        if self.input.is_some() {
            return match self.input_bit(key) {
                Some(bit) => vec![(Value::scalar(bit as u64), INPUT_WRITER)],
                None => Vec::new(),
            };
        }
        self.map.get(key).cloned().unwrap_or_default()
    }

    /// The values under `key`, sorted (the multiset in canonical order).
    pub fn values(&self, key: &Key) -> Vec<Value> {
        let mut values: Vec<Value> = self.sourced(key).into_iter().map(|(v, _)| v).collect();
        values.sort_unstable();
        values
    }

    pub fn contains(&self, key: &Key) -> bool {
        if self.input.is_some() {
            return self.input_bit(key).is_some();
        }
        self.map.contains_key(key)
    }

    /// All keys written this round, in key order (store 0 reports none; its
    /// keys are implied by the input length).
    pub fn written_keys(&self) -> Vec<Key> {
        let mut keys: Vec<Key> = self.map.keys().copied().collect();
        keys.sort();
        keys
    }
}
