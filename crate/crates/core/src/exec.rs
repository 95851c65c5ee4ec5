//! Execution capabilities injected by the caller: a parallel map and a
//! local-density store. The core never spawns threads or touches disk.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::arith::{format_rational, Rational};
use crate::matrix::IntMatrix;

/// Order-preserving map over independent work items.
pub trait ParMap: Sync {
    fn par_map<T, R, F>(&self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send;
}

/// Runs everything on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl ParMap for Sequential {
    fn par_map<T, R, F>(&self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        items.into_iter().map(f).collect()
    }
}

/// Identifies a density sequence: lattice, prime, target value and the class
/// of the shift vector in generator coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DensityKey {
    pub gram: IntMatrix,
    pub prime: u64,
    pub target: Rational,
    pub gamma: Vec<u64>,
}

impl DensityKey {
    /// Stable textual form, used for hashing and collision checks.
    pub fn canonical(&self) -> String {
        let rows: Vec<String> = self
            .gram
            .iter()
            .map(|r| r.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(","))
            .collect();
        let g: Vec<String> = self.gamma.iter().map(|x| format!("{x}")).collect();
        format!("[{}];{};{};[{}]", rows.join(";"), self.prime, format_rational(&self.target), g.join(","))
    }

    /// 64-bit FNV-1a of [`Self::canonical`].
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.canonical().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h
    }
}

/// Densities `D(0), D(1), …` up to one level past stabilization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalDensityRecord {
    pub prime: u64,
    pub stabilized_at: u32,
    pub value: Rational,
    pub levels: Vec<Rational>,
}

/// Concurrently readable store for density records.
pub trait DensityStore: Sync {
    fn load(&self, key: &DensityKey) -> Option<LocalDensityRecord>;
    fn save(&self, key: &DensityKey, record: &LocalDensityRecord);
}

/// Stores nothing.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoStore;

impl DensityStore for NoStore {
    fn load(&self, _key: &DensityKey) -> Option<LocalDensityRecord> {
        None
    }

    fn save(&self, _key: &DensityKey, _record: &LocalDensityRecord) {}
}
