//! Small shared utilities: a fast non-cryptographic hasher for hot maps and
//! a scoped-thread map helper that honors the worker-count cap.

use std::collections::{HashMap, HashSet};
use std::hash::{BuildHasherDefault, Hasher};

/// FNV-1a, 64-bit. The simulator hashes short structured keys millions of
/// times per run; SipHash's per-call overhead dominates profiles there, and
/// hash-flooding is not a concern for self-generated keys.
#[derive(Default)]
pub struct Fnv1a(u64);

impl Hasher for Fnv1a {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        let mut h = if self.0 == 0 { 0xcbf2_9ce4_8422_2325 } else { self.0 };
        for &b in bytes {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        self.0 = h;
    }

    fn write_u64(&mut self, v: u64) {
        self.write(&v.to_le_bytes());
    }

    fn write_u8(&mut self, v: u8) {
        self.write(&[v]);
    }

    fn write_usize(&mut self, v: usize) {
        self.write_u64(v as u64);
    }
}

pub type FastMap<K, V> = HashMap<K, V, BuildHasherDefault<Fnv1a>>;
pub type FastSet<K> = HashSet<K, BuildHasherDefault<Fnv1a>>;

/// Number of worker threads sweeps may use: the `AMPCLAB_THREADS` environment
/// variable when set to a positive integer, otherwise the machine's available
/// parallelism.
pub fn worker_threads() -> usize {
    if let Ok(v) = std::env::var("AMPCLAB_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n >= 1 {
                return n;
            }
        }
    }
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Maps `f` over `0..count`, possibly in parallel, returning results in index
/// order. The output is independent of thread count; `f` must be pure up to
/// its index argument.
pub fn parallel_map<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let threads = worker_threads().min(count.max(1));
    if threads <= 1 || count <= 1 {
        return (0..count).map(f).collect();
    }
    let mut out: Vec<Option<T>> = Vec::with_capacity(count);
    out.resize_with(count, || None);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots = std::sync::Mutex::new(&mut out);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= count {
                    break;
                }
                let v = f(i);
                // Indices are claimed uniquely, so each slot is written once.
                slots.lock().unwrap()[i] = Some(v);
            });
        }
    });
    out.into_iter().map(|v| v.expect("every index computed")).collect()
}

/// Exact binomial coefficient in u128, saturating at u128::MAX.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        let num = (n - i) as u128;
        let den = (i + 1) as u128;
        match acc.checked_mul(num) {
            Some(v) => acc = v / den,
            None => return u128::MAX,
        }
    }
    acc
}
