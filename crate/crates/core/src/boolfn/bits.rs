//! Fixed-length bit strings backed by 64-bit words.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A bit string of fixed length. Bits beyond the length are kept zero, so
/// equality and hashing are structural.
///
/// Ordering is lexicographic by slot index starting at slot 0, with a set bit
/// ordering *before* a clear bit. For edge-slot strings this means a graph
/// containing lower-indexed edges sorts first, which gives instance lists and
/// search witnesses a stable, intuitively "greedy" canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    n_bits: usize,
    words: Vec<u64>,
}

impl BitString {
    /// All-zero string of the given length.
    pub fn zero(n_bits: usize) -> Self {
        BitString {
            n_bits,
            words: vec![0; n_bits.div_ceil(64)],
        }
    }

    /// String with exactly the listed slots set.
    pub fn from_slots(n_bits: usize, slots: &[usize]) -> Result<Self> {
        let mut s = Self::zero(n_bits);
        for &i in slots {
            if i >= n_bits {
                return Err(Error::invalid(format!("slot {i} out of range for {n_bits} bits")));
            }
            s.set(i, true);
        }
        Ok(s)
    }

    /// Interprets the low `n_bits` of `mask` as a string (for n_bits ≤ 64).
    pub fn from_mask(n_bits: usize, mask: u64) -> Self {
        debug_assert!(n_bits <= 64);
        let mut s = Self::zero(n_bits);
        if !s.words.is_empty() {
            s.words[0] = if n_bits == 64 { mask } else { mask & ((1u64 << n_bits) - 1) };
        }
        s
    }

    pub fn len(&self) -> usize {
        self.n_bits
    }

    pub fn is_empty(&self) -> bool {
        self.n_bits == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.n_bits);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.n_bits);
        let w = &mut self.words[i / 64];
        if v {
            *w |= 1u64 << (i % 64);
        } else {
            *w &= !(1u64 << (i % 64));
        }
    }

    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.n_bits);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    /// Copy with all slots in `slots` flipped.
    pub fn with_flipped(&self, slots: &[usize]) -> Self {
        let mut s = self.clone();
        for &i in slots {
            s.flip(i);
        }
        s
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Indices of set slots, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    /// Bitwise XOR; lengths must match.
    pub fn xor(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n_bits, other.n_bits);
        BitString {
            n_bits: self.n_bits,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }

    /// True if every set slot of `self` is set in `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        debug_assert_eq!(self.n_bits, other.n_bits);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        debug_assert_eq!(self.n_bits, other.n_bits);
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// Hex encoding: `ceil(n_bits/8)` bytes, bit `i` stored in byte `i/8` at
    /// position `i % 8` (least-significant first), bytes printed in order as
    /// two lowercase hex digits each.
    pub fn to_hex(&self) -> String {
        let n_bytes = self.n_bits.div_ceil(8);
        let mut out = String::with_capacity(2 * n_bytes);
        for j in 0..n_bytes {
            let byte = (self.words[j / 8] >> (8 * (j % 8))) & 0xff;
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }

    /// Inverse of [`to_hex`](Self::to_hex) for a known length.
    pub fn from_hex(n_bits: usize, hex: &str) -> Result<Self> {
        let n_bytes = n_bits.div_ceil(8);
        if hex.len() != 2 * n_bytes {
            return Err(Error::invalid(format!(
                "hex string has {} digits, expected {} for {n_bits} bits",
                hex.len(),
                2 * n_bytes
            )));
        }
        let mut s = Self::zero(n_bits);
        for j in 0..n_bytes {
            let byte = u8::from_str_radix(&hex[2 * j..2 * j + 2], 16)
                .map_err(|e| Error::invalid(format!("bad hex byte at {j}: {e}")))?;
            s.words[j / 8] |= u64::from(byte) << (8 * (j % 8));
        }
        // Reject set bits beyond the declared length.
        let tail = Self::zero(n_bits);
        for (wi, (&w, &mask_w)) in s.words.iter().zip(&mask_words(&tail)).enumerate() {
            if w & !mask_w != 0 {
                return Err(Error::invalid(format!(
                    "hex string sets bits beyond {n_bits} (word {wi})"
                )));
            }
        }
        Ok(s)
    }
}

/// Per-word masks of valid bit positions for a string of this shape.
fn mask_words(proto: &BitString) -> Vec<u64> {
    let mut m = vec![u64::MAX; proto.words.len()];
    let extra = proto.words.len() * 64 - proto.n_bits;
    if extra > 0 && !m.is_empty() {
        let last = m.len() - 1;
        m[last] = u64::MAX >> extra;
    }
    m
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        debug_assert_eq!(self.n_bits, other.n_bits, "comparing strings of different lengths");
        for (a, b) in self.words.iter().zip(&other.words) {
            if a != b {
                let diff = (a ^ b).trailing_zeros();
                // The string holding the set bit at the first differing slot
                // comes first.
                return if (a >> diff) & 1 == 1 {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                };
            }
        }
        std::cmp::Ordering::Equal
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl std::fmt::Display for BitString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_hex())
    }
}
