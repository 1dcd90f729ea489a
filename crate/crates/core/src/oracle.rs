//! Brute-force maximum percolation time on tiny cubes.
//!
//! Seeds are enumerated by size, then lexicographically by sorted vertex
//! codes. Work is split into independent chunks (seed size, first vertex) whose
//! results are merged by maximum; witness lists are sorted canonically so the
//! output does not depend on the execution mode.

use itertools::Itertools;
use serde::Serialize;

use crate::cube::{CubeShape, VertexId};
use crate::engine::Simulator;
use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::set::VertexSet;

/// Largest cube admitted by full enumeration (`2^16` subsets).
pub const EXHAUSTIVE_LIMIT: usize = 16;
/// Default work budget in elementary vertex updates.
pub const DEFAULT_BUDGET: u128 = 100_000_000;
/// Witnesses kept per report; `witnesses_total` counts all of them.
pub const WITNESS_CAP: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMode {
    FullEnumeration,
    SizeCapped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub shape: CubeShape,
    pub mode: OracleMode,
    pub size_cap: Option<usize>,
    /// Set in capped mode: `max_time` only bounds `M_q(n)` from below.
    pub lower_bound: bool,
    pub max_time: Option<u32>,
    pub witnesses: Vec<VertexSet>,
    pub witnesses_total: u64,
    pub seeds_examined: u64,
    pub spanning_seeds: u64,
    pub smallest_spanning_size: Option<usize>,
    /// Containment-minimal spanning seeds, full enumeration only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimal_spanning_seeds: Option<u64>,
}

#[derive(Clone, Debug, Default)]
struct Tally {
    max_time: Option<u32>,
    witnesses: Vec<VertexSet>,
    witnesses_total: u64,
    examined: u64,
    spanning: u64,
    smallest: Option<usize>,
}

impl Tally {
    fn record(&mut self, seed: impl FnOnce() -> VertexSet, size: usize, time: Option<u32>) {
        self.examined += 1;
        let Some(t) = time else { return };
        self.spanning += 1;
        self.smallest = Some(self.smallest.map_or(size, |s| s.min(size)));
        match self.max_time {
            Some(m) if t < m => {}
            Some(m) if t == m => {
                self.witnesses_total += 1;
                if self.witnesses.len() < WITNESS_CAP {
                    self.witnesses.push(seed());
                }
            }
            _ => {
                self.max_time = Some(t);
                self.witnesses = vec![seed()];
                self.witnesses_total = 1;
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.examined += other.examined;
        self.spanning += other.spanning;
        self.smallest = match (self.smallest, other.smallest) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        match (self.max_time, other.max_time) {
            (_, None) => {}
            (Some(a), Some(b)) if b < a => {}
            (Some(a), Some(b)) if a == b => {
                self.witnesses_total += other.witnesses_total;
                self.witnesses.extend(other.witnesses);
            }
            _ => {
                self.max_time = other.max_time;
                self.witnesses = other.witnesses;
                self.witnesses_total = other.witnesses_total;
            }
        }
        self.witnesses.sort_by_cached_key(canonical_key);
        self.witnesses.truncate(WITNESS_CAP);
        self
    }
}

fn canonical_key(s: &VertexSet) -> (usize, Vec<VertexId>) {
    (s.len(), s.to_vec())
}

fn time_of(sim: &mut Simulator, seed: impl IntoIterator<Item = VertexId>) -> Result<Option<u32>> {
    let summary = sim.run(seed)?;
    Ok(summary.percolated.then_some(summary.rounds))
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Number of seeds of size at most `cap`.
pub fn capped_seed_count(shape: CubeShape, cap: usize) -> u128 {
    let n = shape.len() as u128;
    (0..=cap as u128).fold(0u128, |acc, s| acc.saturating_add(binomial(n, s)))
}

/// Estimated elementary updates for `runs_per_seed` engine runs on every
/// seed of size at most `cap`.
pub fn capped_work_estimate(shape: CubeShape, cap: usize, runs_per_seed: u128) -> u128 {
    capped_seed_count(shape, cap)
        .saturating_mul(shape.len() as u128)
        .saturating_mul(shape.degree().max(1) as u128)
        .saturating_mul(runs_per_seed)
}

fn check_budget(what: &'static str, estimate: u128, budget: u128) -> Result<()> {
    if estimate > budget {
        return Err(Error::GuardExceeded {
            what,
            estimate,
            limit: budget,
        });
    }
    Ok(())
}

/// Chunks of the capped enumeration: (seed size, first vertex).
fn capped_chunks(shape: CubeShape, cap: usize) -> Vec<(usize, usize)> {
    let len = shape.len();
    let mut chunks = vec![(0, 0)];
    for size in 1..=cap.min(len) {
        chunks.extend((0..=len - size).map(|first| (size, first)));
    }
    chunks
}

fn for_each_in_chunk(
    shape: CubeShape,
    (size, first): (usize, usize),
    mut f: impl FnMut(&[VertexId]),
) {
    if size == 0 {
        f(&[]);
        return;
    }
    let head = VertexId(first as u32);
    for rest in (first + 1..shape.len()).combinations(size - 1) {
        let seed: Vec<VertexId> = std::iter::once(head)
            .chain(rest.into_iter().map(|i| VertexId(i as u32)))
            .collect();
        f(&seed);
    }
}

/// Exact `M_q(n)` by enumerating every subset of the cube.
///
/// The maximum is computed twice, over all spanning seeds and over the
/// containment-minimal ones only; the two must agree.
pub fn max_time_exhaustive(shape: CubeShape, exec: Exec) -> Result<OracleReport> {
    let len = shape.len();
    if len > EXHAUSTIVE_LIMIT {
        return Err(Error::GuardExceeded {
            what: "full enumeration needs q^n <= 16 (use the size-capped oracle)",
            estimate: len as u128,
            limit: EXHAUSTIVE_LIMIT as u128,
        });
    }
    let total: u64 = 1 << len;
    let chunk = 1u64 << len.saturating_sub(6).min(10);
    let ranges: Vec<(u64, u64)> = (0..total)
        .step_by(chunk as usize)
        .map(|lo| (lo, (lo + chunk).min(total)))
        .collect();

    let times: Vec<Vec<Option<u32>>> = par::map_init(
        exec,
        ranges.clone(),
        || Simulator::new(shape, 2).expect("threshold 2 is valid"),
        |sim, (lo, hi)| {
            (lo..hi)
                .map(|mask| {
                    let seed = VertexSet::from_mask(shape, mask);
                    time_of(sim, seed.iter())
                })
                .collect::<Result<Vec<_>>>()
        },
    )
    .into_iter()
    .collect::<Result<_>>()?;
    let times: Vec<Option<u32>> = times.concat();

    let mut tally = Tally::default();
    let mut minimal_max: Option<u32> = None;
    let mut minimal = 0u64;
    for (mask, t) in times.iter().enumerate() {
        let seed = || VertexSet::from_mask(shape, mask as u64);
        tally.record(seed, (mask as u64).count_ones() as usize, *t);
        if let Some(t) = *t {
            let is_minimal = (0..len)
                .filter(|i| mask >> i & 1 == 1)
                .all(|i| times[mask ^ (1 << i)].is_none());
            if is_minimal {
                minimal += 1;
                minimal_max = minimal_max.max(Some(t));
            }
        }
    }
    if minimal_max != tally.max_time {
        return Err(Error::Inconsistent(format!(
            "maximum over all spanning seeds {:?} differs from maximum over minimal ones {:?}",
            tally.max_time, minimal_max
        )));
    }
    tally.witnesses.sort_by_cached_key(canonical_key);
    Ok(OracleReport {
        shape,
        mode: OracleMode::FullEnumeration,
        size_cap: None,
        lower_bound: false,
        max_time: tally.max_time,
        witnesses: tally.witnesses,
        witnesses_total: tally.witnesses_total,
        seeds_examined: tally.examined,
        spanning_seeds: tally.spanning,
        smallest_spanning_size: tally.smallest,
        minimal_spanning_seeds: Some(minimal),
    })
}

/// Maximum time over spanning seeds with at most `cap` vertices, a lower
/// bound on `M_q(n)`.
pub fn max_time_capped(
    shape: CubeShape,
    cap: usize,
    budget: u128,
    exec: Exec,
) -> Result<OracleReport> {
    check_budget(
        "size-capped enumeration",
        capped_work_estimate(shape, cap, 1),
        budget,
    )?;
    let tallies = par::map_init(
        exec,
        capped_chunks(shape, cap),
        || Simulator::new(shape, 2).expect("threshold 2 is valid"),
        |sim, chunk| -> Result<Tally> {
            let mut tally = Tally::default();
            let mut failure = None;
            for_each_in_chunk(shape, chunk, |seed| {
                if failure.is_some() {
                    return;
                }
                match time_of(sim, seed.iter().copied()) {
                    Ok(t) => tally.record(
                        || {
                            VertexSet::from_vertices(shape, seed.iter().copied())
                                .expect("codes in range")
                        },
                        seed.len(),
                        t,
                    ),
                    Err(e) => failure = Some(e),
                }
            });
            failure.map_or(Ok(tally), Err)
        },
    );
    let mut tally = Tally::default();
    for t in tallies {
        tally = tally.merge(t?);
    }
    Ok(OracleReport {
        shape,
        mode: OracleMode::SizeCapped,
        size_cap: Some(cap),
        lower_bound: true,
        max_time: tally.max_time,
        witnesses: tally.witnesses,
        witnesses_total: tally.witnesses_total,
        seeds_examined: tally.examined,
        spanning_seeds: tally.spanning,
        smallest_spanning_size: tally.smallest,
        minimal_spanning_seeds: None,
    })
}

/// Spanning seeds of size at most `cap` from which no vertex can be removed
/// without losing spanning, in canonical order.
pub fn minimal_spanning_sets(
    shape: CubeShape,
    cap: usize,
    budget: u128,
    exec: Exec,
) -> Result<Vec<VertexSet>> {
    let runs = cap as u128 + 1;
    check_budget(
        "minimal spanning set search",
        capped_work_estimate(shape, cap, runs),
        budget,
    )?;
    let found = par::map_init(
        exec,
        capped_chunks(shape, cap),
        || Simulator::new(shape, 2).expect("threshold 2 is valid"),
        |sim, chunk| -> Result<Vec<VertexSet>> {
            let mut out = Vec::new();
            let mut failure = None;
            for_each_in_chunk(shape, chunk, |seed| {
                if failure.is_some() {
                    return;
                }
                let minimal = (|| -> Result<bool> {
                    if time_of(sim, seed.iter().copied())?.is_none() {
                        return Ok(false);
                    }
                    for skip in 0..seed.len() {
                        let rest = seed
                            .iter()
                            .enumerate()
                            .filter(|&(i, _)| i != skip)
                            .map(|(_, v)| *v);
                        if time_of(sim, rest)?.is_some() {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                })();
                match minimal {
                    Ok(true) => out.push(
                        VertexSet::from_vertices(shape, seed.iter().copied())
                            .expect("codes in range"),
                    ),
                    Ok(false) => {}
                    Err(e) => failure = Some(e),
                }
            });
            failure.map_or(Ok(out), Err)
        },
    );
    let mut all = found.into_iter().collect::<Result<Vec<_>>>()?.concat();
    all.sort_by_cached_key(canonical_key);
    Ok(all)
}
