//! Lightweight call counters.
//!
//! Every public operation records one hit per invocation under a stable
//! name. The integration suite uses the registry to verify that running
//! all sweep presets exercises every operation; the counters are cheap
//! enough to leave on unconditionally.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

static REGISTRY: OnceLock<Mutex<HashMap<&'static str, u64>>> = OnceLock::new();

fn registry() -> &'static Mutex<HashMap<&'static str, u64>> {
    REGISTRY.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Record one invocation of the named operation.
pub fn record(op: &'static str) {
    let mut map = registry().lock().unwrap();
    *map.entry(op).or_insert(0) += 1;
}

/// Snapshot of all counters.
pub fn counts() -> HashMap<&'static str, u64> {
    registry().lock().unwrap().clone()
}

/// Number of recorded invocations for one operation.
pub fn count(op: &str) -> u64 {
    registry().lock().unwrap().get(op).copied().unwrap_or(0)
}

/// Reset all counters (used by tests).
pub fn reset() {
    registry().lock().unwrap().clear();
}
