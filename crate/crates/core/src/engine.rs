//! Synchronous r-neighbour bootstrap percolation.
//!
//! `A_i = A_{i-1} ∪ { v : |N(v) ∩ A_{i-1}| >= r }`, run until `A_i = A_{i-1}`.
//!
//! The simulator keeps a per-vertex counter of infected neighbours. Every
//! vertex infected in round `i` bumps its neighbours' counters; those that
//! reach `r` are collected into the round `i + 1` frontier and only stamped
//! after the whole round has been processed, so the update is strictly
//! synchronous. Total work is `O(q^n · n(q-1))`.

use serde::Serialize;

use crate::cube::{CubeShape, VertexId};
use crate::error::{Error, Result};
use crate::set::VertexSet;

/// Timestamp of a vertex that is never infected.
pub const NEVER: u16 = u16::MAX;

/// Per-vertex infection times from one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfectionRecord {
    shape: CubeShape,
    threshold: u32,
    time_of: Vec<u16>,
    rounds: u32,
    infected: usize,
}

impl InfectionRecord {
    pub fn shape(&self) -> CubeShape {
        self.shape
    }

    pub fn threshold(&self) -> u32 {
        self.threshold
    }

    /// `None` if `v` is never infected.
    pub fn time_of(&self, v: VertexId) -> Option<u32> {
        match self.time_of[v.index()] {
            NEVER => None,
            t => Some(t as u32),
        }
    }

    /// Raw timestamps indexed by vertex code, [`NEVER`] for healthy vertices.
    pub fn times(&self) -> &[u16] {
        &self.time_of
    }

    /// `T(A_0) = min { t : A_t = <A_0> }`.
    pub fn rounds(&self) -> u32 {
        self.rounds
    }

    pub fn percolated(&self) -> bool {
        self.infected == self.shape.len()
    }

    pub fn infected_count(&self) -> usize {
        self.infected
    }

    /// `A_t`.
    pub fn infected_by(&self, t: u32) -> VertexSet {
        let mut s = VertexSet::empty(self.shape);
        for (i, &ti) in self.time_of.iter().enumerate() {
            if ti != NEVER && ti as u32 <= t {
                s.insert(VertexId(i as u32));
            }
        }
        s
    }

    /// `<A_0>`.
    pub fn closure(&self) -> VertexSet {
        self.infected_by(u32::MAX)
    }

    /// Vertices stamped exactly `t`.
    pub fn infected_at(&self, t: u32) -> VertexSet {
        let mut s = VertexSet::empty(self.shape);
        for (i, &ti) in self.time_of.iter().enumerate() {
            if ti != NEVER && ti as u32 == t {
                s.insert(VertexId(i as u32));
            }
        }
        s
    }

    pub fn summary(&self) -> RunSummary {
        RunSummary {
            rounds: self.rounds,
            infected: self.infected,
            percolated: self.percolated(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RunSummary {
    pub rounds: u32,
    pub infected: usize,
    pub percolated: bool,
}

/// Reusable simulation buffers for one shape and threshold.
///
/// Allocate once and call [`Simulator::run`] repeatedly when sweeping many
/// seeds on the same cube.
pub struct Simulator {
    shape: CubeShape,
    threshold: u8,
    time_of: Vec<u16>,
    count: Vec<u8>,
    frontier: Vec<u32>,
    next: Vec<u32>,
    infected: usize,
    rounds: u32,
}

impl Simulator {
    pub fn new(shape: CubeShape, r: u32) -> Result<Self> {
        if r == 0 || r > u8::MAX as u32 {
            return Err(Error::InvalidThreshold(r));
        }
        Ok(Simulator {
            shape,
            threshold: r as u8,
            time_of: vec![NEVER; shape.len()],
            count: vec![0; shape.len()],
            frontier: Vec::new(),
            next: Vec::new(),
            infected: 0,
            rounds: 0,
        })
    }

    pub fn shape(&self) -> CubeShape {
        self.shape
    }

    /// Runs the process from `seed`. Codes must be valid for the shape.
    pub fn run<I: IntoIterator<Item = VertexId>>(&mut self, seed: I) -> Result<RunSummary> {
        self.time_of.fill(NEVER);
        self.count.fill(0);
        self.frontier.clear();
        self.infected = 0;
        self.rounds = 0;
        for v in seed {
            let i = v.index();
            if i >= self.shape.len() {
                return Err(Error::VertexOutOfRange {
                    code: v.0 as u64,
                    len: self.shape.len(),
                });
            }
            if self.time_of[i] == NEVER {
                self.time_of[i] = 0;
                self.frontier.push(v.0);
                self.infected += 1;
            }
        }
        self.propagate()?;
        Ok(self.summary())
    }

    pub fn run_set(&mut self, seed: &VertexSet) -> Result<RunSummary> {
        self.shape.ensure_same(&seed.shape())?;
        self.run(seed.iter())
    }

    fn propagate(&mut self) -> Result<()> {
        let shape = self.shape;
        let r = self.threshold;
        while !self.frontier.is_empty() {
            self.next.clear();
            for &v in &self.frontier {
                let time_of = &self.time_of;
                let count = &mut self.count;
                let next = &mut self.next;
                shape.for_each_neighbor(VertexId(v), |u| {
                    let u = u.index();
                    if time_of[u] == NEVER && count[u] < r {
                        count[u] += 1;
                        if count[u] == r {
                            next.push(u as u32);
                        }
                    }
                });
            }
            if self.next.is_empty() {
                break;
            }
            self.rounds += 1;
            if self.rounds >= NEVER as u32 {
                return Err(Error::TimestampOverflow);
            }
            let stamp = self.rounds as u16;
            for &u in &self.next {
                self.time_of[u as usize] = stamp;
            }
            self.infected += self.next.len();
            std::mem::swap(&mut self.frontier, &mut self.next);
        }
        Ok(())
    }

    pub fn summary(&self) -> RunSummary {
        RunSummary {
            rounds: self.rounds,
            infected: self.infected,
            percolated: self.infected == self.shape.len(),
        }
    }

    pub fn times(&self) -> &[u16] {
        &self.time_of
    }

    /// Snapshot of the last run.
    pub fn record(&self) -> InfectionRecord {
        InfectionRecord {
            shape: self.shape,
            threshold: self.threshold as u32,
            time_of: self.time_of.clone(),
            rounds: self.rounds,
            infected: self.infected,
        }
    }
}

pub fn run(initial: &VertexSet, r: u32) -> Result<InfectionRecord> {
    let mut sim = Simulator::new(initial.shape(), r)?;
    sim.run_set(initial)?;
    Ok(sim.record())
}

/// Like [`run`] for a list of vertices, rejecting out-of-range codes.
pub fn run_vertices(shape: CubeShape, initial: &[VertexId], r: u32) -> Result<InfectionRecord> {
    let mut sim = Simulator::new(shape, r)?;
    sim.run(initial.iter().copied())?;
    Ok(sim.record())
}

/// `<A_0>` under threshold `r`.
pub fn closure(initial: &VertexSet, r: u32) -> Result<VertexSet> {
    Ok(run(initial, r)?.closure())
}

/// 2-neighbour percolation time, `None` when the seed does not span the cube.
pub fn percolation_time(initial: &VertexSet) -> Option<u32> {
    let rec = run(initial, 2).expect("r = 2 is always a valid threshold");
    rec.percolated().then_some(rec.rounds())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::Automorphism;
    use proptest::prelude::*;

    /// Textbook rescan of every vertex each round, digits computed directly.
    fn reference_times(shape: CubeShape, seed: &[VertexId], r: usize) -> Vec<Option<u32>> {
        let n = shape.n();
        let words: Vec<Vec<u32>> = shape.vertices().map(|v| shape.digits(v)).collect();
        let mut infected: Vec<Option<u32>> = vec![None; shape.len()];
        for v in seed {
            infected[v.index()] = Some(0);
        }
        let mut t = 0;
        loop {
            t += 1;
            let mut fresh = Vec::new();
            for (i, w) in words.iter().enumerate() {
                if infected[i].is_some() {
                    continue;
                }
                let hits = words
                    .iter()
                    .enumerate()
                    .filter(|(j, u)| {
                        infected[*j].is_some() && (0..n).filter(|&c| u[c] != w[c]).count() == 1
                    })
                    .count();
                if hits >= r {
                    fresh.push(i);
                }
            }
            if fresh.is_empty() {
                return infected;
            }
            for i in fresh {
                infected[i] = Some(t);
            }
        }
    }

    fn set(shape: CubeShape, words: &[&str]) -> VertexSet {
        VertexSet::parse(shape, words.iter().copied()).unwrap()
    }

    #[test]
    fn line_with_two_ends() {
        let s = CubeShape::new(1, 3).unwrap();
        let rec = run(&set(s, &["0", "2"]), 2).unwrap();
        assert_eq!(rec.time_of(VertexId(1)), Some(1));
        assert!(rec.percolated());
        assert_eq!(rec.rounds(), 1);
    }

    #[test]
    fn empty_seed_is_a_fixpoint() {
        let s = CubeShape::new(3, 3).unwrap();
        let rec = run(&VertexSet::empty(s), 2).unwrap();
        assert_eq!(rec.rounds(), 0);
        assert_eq!(rec.infected_count(), 0);
        assert!(!rec.percolated());
    }

    #[test]
    fn diagonal_pair_takes_three_rounds() {
        let s = CubeShape::new(2, 3).unwrap();
        let rec = run(&set(s, &["00", "11"]), 2).unwrap();
        assert!(rec.percolated());
        assert_eq!(rec.rounds(), 3);
    }

    #[test]
    fn closure_examples() {
        let s = CubeShape::new(2, 3).unwrap();
        let cross = set(s, &["00", "10", "20", "01", "02"]);
        assert!(closure(&cross, 2).unwrap().is_full());
        let single = set(s, &["00"]);
        assert_eq!(closure(&single, 2).unwrap(), single);
        let s3 = CubeShape::new(3, 3).unwrap();
        let far = set(s3, &["000", "111"]);
        assert_eq!(closure(&far, 2).unwrap(), far);
    }

    #[test]
    fn percolation_time_sentinel() {
        let s = CubeShape::new(2, 3).unwrap();
        assert_eq!(percolation_time(&set(s, &["00", "11"])), Some(3));
        assert_eq!(percolation_time(&set(s, &["00", "01"])), None);
    }

    #[test]
    fn rejects_bad_input() {
        let s = CubeShape::new(2, 3).unwrap();
        assert!(matches!(
            run_vertices(s, &[VertexId(9)], 2),
            Err(Error::VertexOutOfRange { .. })
        ));
        assert!(matches!(
            Simulator::new(s, 0),
            Err(Error::InvalidThreshold(0))
        ));
    }

    #[test]
    fn threshold_one_is_bfs() {
        let s = CubeShape::new(3, 4).unwrap();
        let rec = run(&set(s, &["000"]), 1).unwrap();
        assert_eq!(rec.rounds(), 3);
        for v in s.vertices() {
            assert_eq!(rec.time_of(v), Some(s.hamming(v, VertexId(0)) as u32));
        }
    }

    fn shape_and_seed() -> impl Strategy<Value = (CubeShape, Vec<VertexId>, u32)> {
        (1usize..=3, 2u32..=4, 1u32..=3).prop_flat_map(|(n, q, r)| {
            let shape = CubeShape::new(n, q).unwrap();
            let len = shape.len() as u32;
            (
                Just(shape),
                proptest::collection::vec((0..len).prop_map(VertexId), 0..8),
                Just(r),
            )
        })
    }

    proptest! {
        #[test]
        fn matches_reference_simulation((shape, seed, r) in shape_and_seed()) {
            let rec = run_vertices(shape, &seed, r).unwrap();
            let want = reference_times(shape, &seed, r as usize);
            for v in shape.vertices() {
                prop_assert_eq!(rec.time_of(v), want[v.index()]);
            }
        }

        #[test]
        fn timestamps_are_tight((shape, seed, r) in shape_and_seed()) {
            let rec = run_vertices(shape, &seed, r).unwrap();
            let mut max_t = 0;
            for v in shape.vertices() {
                let Some(s) = rec.time_of(v) else { continue };
                max_t = max_t.max(s);
                if s == 0 {
                    prop_assert!(seed.contains(&v));
                    continue;
                }
                let before = |bound: u32| {
                    shape.neighbors(v).into_iter()
                        .filter(|&u| rec.time_of(u).is_some_and(|tu| tu < bound))
                        .count() as u32
                };
                prop_assert!(before(s) >= r);
                prop_assert!(before(s - 1) < r);
            }
            prop_assert_eq!(max_t, rec.rounds());
        }

        #[test]
        fn relabeling_commutes((shape, seed, r) in shape_and_seed(), rot in 0u32..4) {
            let n = shape.n();
            let q = shape.q();
            let perm: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
            let relabel: Vec<Vec<u32>> = (0..n)
                .map(|i| (0..q).map(|s| (s + rot + i as u32) % q).collect())
                .collect();
            let a = Automorphism::new(shape, perm, relabel).unwrap();
            let rec = run_vertices(shape, &seed, r).unwrap();
            let image: Vec<VertexId> = seed.iter().map(|&v| a.apply(v)).collect();
            let rec2 = run_vertices(shape, &image, r).unwrap();
            for v in shape.vertices() {
                prop_assert_eq!(rec.time_of(v), rec2.time_of(a.apply(v)));
            }
        }
    }
}
