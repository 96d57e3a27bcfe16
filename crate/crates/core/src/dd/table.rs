use std::f64::consts::FRAC_1_SQRT_2;
use std::hash::{BuildHasher, Hash};

use num_complex::Complex64;
use rustc_hash::{FxBuildHasher, FxHashMap};

use super::EPS;

/// Interns real numbers so that values closer than [`EPS`] collapse onto a
/// single representative. Edge weights are snapped through this table before
/// they become part of a node key, which makes node lookup tolerance-aware
/// while the hash keys themselves stay exact bit patterns.
#[derive(Debug, Default)]
pub(crate) struct RealTable {
    buckets: FxHashMap<i64, f64>,
}

const SEEDED: [f64; 5] = [1.0, -1.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.5];

impl RealTable {
    pub fn new() -> Self {
        let mut t = RealTable::default();
        t.seed();
        t
    }

    fn seed(&mut self) {
        for v in SEEDED {
            self.lookup(v);
        }
    }

    fn bucket(x: f64) -> i64 {
        // `as` saturates, so huge ratios land in the extreme buckets.
        (x / EPS).round() as i64
    }

    pub fn lookup(&mut self, x: f64) -> f64 {
        if x.abs() < EPS {
            return 0.0;
        }
        let k = Self::bucket(x);
        // Every value within EPS of x lives in bucket k-1, k or k+1; two
        // representatives can never share a bucket.
        if let Some(&v) = self.buckets.get(&k) {
            if (v - x).abs() < EPS {
                return v;
            }
        }
        for kk in [k.wrapping_sub(1), k.wrapping_add(1)] {
            if let Some(&v) = self.buckets.get(&kk) {
                if (v - x).abs() < EPS {
                    return v;
                }
            }
        }
        self.buckets.entry(k).or_insert(x);
        x
    }

    pub fn lookup_complex(&mut self, z: Complex64) -> Complex64 {
        Complex64::new(self.lookup(z.re), self.lookup(z.im))
    }

    pub fn len(&self) -> usize {
        self.buckets.len()
    }

    /// Drops every representative not listed in `keep`.
    pub fn rebuild<I: IntoIterator<Item = f64>>(&mut self, keep: I) {
        self.buckets.clear();
        self.seed();
        for v in keep {
            if v != 0.0 {
                self.buckets.entry(Self::bucket(v)).or_insert(v);
            }
        }
    }
}

/// Fixed-capacity memo table. A new entry overwrites whatever occupied its
/// slot; storage is allocated on first insertion.
#[derive(Debug)]
pub(crate) struct ComputeTable<K, V> {
    slots: Vec<Option<(K, V)>>,
    capacity: usize,
    inserts: usize,
    pub hits: u64,
    pub misses: u64,
}

/// Slot count a table starts with; it doubles up to its capacity as it fills.
const INITIAL_SLOTS: usize = 1 << 12;

impl<K: Hash + Eq + Copy, V: Copy> ComputeTable<K, V> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity.is_power_of_two(), "compute table capacity must be a power of two");
        ComputeTable { slots: Vec::new(), capacity, inserts: 0, hits: 0, misses: 0 }
    }

    fn index(&self, key: &K) -> usize {
        (FxBuildHasher.hash_one(key) as usize) & (self.slots.len() - 1)
    }

    pub fn get(&mut self, key: &K) -> Option<V> {
        if self.slots.is_empty() {
            self.misses += 1;
            return None;
        }
        match &self.slots[self.index(key)] {
            Some((k, v)) if k == key => {
                self.hits += 1;
                Some(*v)
            }
            _ => {
                self.misses += 1;
                None
            }
        }
    }

    pub fn insert(&mut self, key: K, value: V) {
        if self.slots.is_empty() {
            self.slots = vec![None; INITIAL_SLOTS.min(self.capacity)];
        } else if self.inserts >= self.slots.len() && self.slots.len() < self.capacity {
            // Rehash into twice the slots; entries are only cached results,
            // so any that collide on the way are simply dropped.
            let grown = vec![None; self.slots.len() * 2];
            let old = std::mem::replace(&mut self.slots, grown);
            for (k, v) in old.into_iter().flatten() {
                let i = self.index(&k);
                self.slots[i] = Some((k, v));
            }
            self.inserts = 0;
        }
        self.inserts += 1;
        let i = self.index(&key);
        self.slots[i] = Some((key, value));
    }

    pub fn clear(&mut self) {
        self.slots.fill(None);
        self.inserts = 0;
    }
}
