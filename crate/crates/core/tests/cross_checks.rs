//! Agreement between the closed form, the construction, the oracle and a
//! from-scratch simulator that shares no code with the library.

use hyperperc::extremal::{build_extremal_seed, lift_seed, max_time_formula};
use hyperperc::oracle::{self, DEFAULT_BUDGET};
use hyperperc::{engine, CubeShape, Exec, VertexSet};

/// Synchronous 2-neighbour process on words in `{0..q}^n`; returns the
/// percolation time or `None`.
fn naive_time(q: u32, n: usize, seed: &[Vec<u32>]) -> Option<u32> {
    let mut words = vec![vec![]];
    for _ in 0..n {
        words = words
            .into_iter()
            .flat_map(|w: Vec<u32>| {
                (0..q).map(move |d| {
                    let mut x = w.clone();
                    x.push(d);
                    x
                })
            })
            .collect();
    }
    let adjacent = |a: &[u32], b: &[u32]| a.iter().zip(b).filter(|(x, y)| x != y).count() == 1;
    let mut infected: Vec<Vec<u32>> = seed.to_vec();
    let mut t = 0;
    loop {
        if infected.len() == words.len() {
            return Some(t);
        }
        let fresh: Vec<Vec<u32>> = words
            .iter()
            .filter(|w| !infected.contains(w))
            .filter(|w| infected.iter().filter(|a| adjacent(w, a)).count() >= 2)
            .cloned()
            .collect();
        if fresh.is_empty() {
            return None;
        }
        infected.extend(fresh);
        t += 1;
    }
}

fn naive_max(q: u32, n: usize) -> u32 {
    let shape = CubeShape::new(n, q).unwrap();
    let len = shape.len();
    (0u64..1 << len)
        .filter_map(|mask| {
            let seed: Vec<Vec<u32>> = shape
                .vertices()
                .filter(|v| mask >> v.index() & 1 == 1)
                .map(|v| shape.digits(v))
                .collect();
            naive_time(q, n, &seed)
        })
        .max()
        .unwrap()
}

#[test]
fn closed_form_table() {
    // M(n) = M(n-3) + 2n - 1 (q = 3) or + 2n (q >= 4), from 0, 1, 3
    let q3 = [0, 1, 3, 5, 8, 12, 16, 21, 27, 33];
    let q4 = [0, 1, 3, 6, 9, 13, 18, 23, 29, 36];
    for n in 0..10 {
        assert_eq!(max_time_formula(3, n as u64).unwrap(), q3[n]);
        assert_eq!(max_time_formula(4, n as u64).unwrap(), q4[n]);
        assert_eq!(max_time_formula(9, n as u64).unwrap(), q4[n]);
    }
}

#[test]
fn exhaustive_oracle_matches_naive_simulator() {
    for (q, n) in [(3, 1), (4, 1), (3, 2), (2, 3)] {
        let shape = CubeShape::new(n, q).unwrap();
        let report = oracle::max_time_exhaustive(shape, Exec::Parallel).unwrap();
        assert_eq!(report.max_time, Some(naive_max(q, n)), "q={q} n={n}");
        for w in &report.witnesses {
            let words: Vec<Vec<u32>> = w.iter().map(|v| shape.digits(v)).collect();
            assert_eq!(naive_time(q, n, &words), report.max_time);
        }
    }
}

#[test]
fn construction_agrees_with_naive_simulator() {
    for (q, n) in [(3, 3), (4, 3), (3, 4), (5, 3)] {
        let seed = build_extremal_seed(q, n).unwrap();
        let words: Vec<Vec<u32>> = seed.vertices.iter().map(|v| seed.shape.digits(v)).collect();
        assert_eq!(
            naive_time(q, n, &words).map(u64::from),
            Some(max_time_formula(q, n as u64).unwrap())
        );
    }
}

#[test]
fn construction_attains_oracle_where_exhaustive() {
    for q in [3, 4] {
        for n in 0..=2 {
            let shape = CubeShape::new(n, q).unwrap();
            let report = oracle::max_time_exhaustive(shape, Exec::Sequential).unwrap();
            let built = engine::percolation_time(&build_extremal_seed(q, n).unwrap().vertices);
            assert_eq!(built, report.max_time);
        }
    }
}

#[test]
fn capped_search_on_q3_n3() {
    let shape = CubeShape::new(3, 3).unwrap();
    let r = oracle::max_time_capped(shape, 4, DEFAULT_BUDGET, Exec::Parallel).unwrap();
    assert!(r.lower_bound);
    assert_eq!(r.max_time, Some(5));
    assert_eq!(r.smallest_spanning_size, Some(3));
    for w in &r.witnesses {
        assert_eq!(engine::percolation_time(w), Some(5));
        assert!(2 * w.len() >= 3 + 2);
    }
}

#[test]
fn lifting_keeps_construction_times() {
    for (q, top) in [(3, 5), (4, 4)] {
        for n in 0..=top {
            let seed = build_extremal_seed(q, n).unwrap();
            let lifted = lift_seed(&seed).unwrap();
            assert_eq!(
                engine::percolation_time(&lifted.vertices),
                engine::percolation_time(&seed.vertices),
                "q={q} n={n}"
            );
        }
    }
}

#[test]
fn minimal_sets_in_small_squares() {
    for q in [3, 4] {
        let shape = CubeShape::new(2, q).unwrap();
        let sets = oracle::minimal_spanning_sets(shape, 3, DEFAULT_BUDGET, Exec::Parallel).unwrap();
        let pairs = (q * q * (q - 1) * (q - 1) / 2) as usize;
        assert_eq!(sets.len(), pairs);
        let triple = VertexSet::parse(shape, ["00", "10", "01"]).unwrap();
        assert!(!sets.contains(&triple));
    }
}
