//! Closed sets, internally spanned subcubes and the two-subcube timing rule.
//!
//! Everything here is for the 2-neighbour process.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::cube::{all_patterns, pattern_count, CubeShape, Pattern};
use crate::engine::Simulator;
use crate::error::{Error, Result};
use crate::set::VertexSet;

/// Cap on `(q+1)^n` for the subcube scans.
pub const SUBCUBE_GUARD: u128 = 100_000;

/// No vertex outside `s` has two or more neighbours in `s`.
pub fn is_closed(s: &VertexSet) -> bool {
    let shape = s.shape();
    shape.vertices().filter(|&v| !s.contains(v)).all(|v| {
        let mut hits = 0;
        shape.for_each_neighbor(v, |u| hits += s.contains(u) as u32);
        hits < 2
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedDecomposition {
    pub components: Vec<Pattern>,
    /// Components are disjoint, cover the set and sit pairwise at distance >= 3.
    pub valid: bool,
}

/// Splits a closed set into maximal subcubes.
///
/// Components are grown greedily from the lowest uncovered vertex: a
/// coordinate is starred when all `q` variants of the current component along
/// it lie in the set.
pub fn decompose_closed(s: &VertexSet) -> Result<ClosedDecomposition> {
    if !is_closed(s) {
        return Err(Error::NotClosed);
    }
    let shape = s.shape();
    let mut covered = VertexSet::empty(shape);
    let mut components = Vec::new();
    while let Some(start) = s.iter().find(|&v| !covered.contains(v)) {
        let mut p = Pattern::point(shape, start);
        loop {
            let mut grew = false;
            for i in 0..shape.n() {
                if p.symbols()[i].is_star() {
                    continue;
                }
                let wider = p.with_symbol(i, crate::cube::Symbol::Star)?;
                if wider.members().all(|v| s.contains(v)) {
                    p = wider;
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        covered.union_with(&VertexSet::from_pattern(&p));
        components.push(p);
    }
    let valid = decomposition_is_valid(s, &components);
    Ok(ClosedDecomposition { components, valid })
}

fn decomposition_is_valid(s: &VertexSet, components: &[Pattern]) -> bool {
    let shape = s.shape();
    let mut union = VertexSet::empty(shape);
    let mut total = 0;
    for c in components {
        let members = VertexSet::from_pattern(c);
        total += members.len();
        union.union_with(&members);
    }
    let separated = components.iter().enumerate().all(|(i, a)| {
        components[i + 1..]
            .iter()
            .all(|b| a.distance(b).is_ok_and(|d| d >= 3))
    });
    union == *s && total == s.len() && separated
}

/// `<seed ∩ Q^x> = Q^x`.
pub fn is_internally_spanned(seed: &VertexSet, x: &Pattern) -> Result<bool> {
    seed.shape().ensure_same(&x.shape())?;
    let mut sim = Simulator::new(seed.shape(), 2)?;
    internally_spanned_with(&mut sim, seed, x)
}

fn internally_spanned_with(sim: &mut Simulator, seed: &VertexSet, x: &Pattern) -> Result<bool> {
    let inside = x.members().filter(|&v| seed.contains(v));
    let summary = sim.run(inside)?;
    // the closure of a subset of Q^x never leaves Q^x
    Ok(summary.infected == x.size())
}

fn check_subcube_guard(shape: CubeShape) -> Result<()> {
    let count = pattern_count(shape);
    if count > SUBCUBE_GUARD {
        return Err(Error::GuardExceeded {
            what: "subcube count (q+1)^n",
            estimate: count,
            limit: SUBCUBE_GUARD,
        });
    }
    Ok(())
}

fn require_spanning(seed: &VertexSet) -> Result<()> {
    let mut sim = Simulator::new(seed.shape(), 2)?;
    if !sim.run_set(seed)?.percolated {
        return Err(Error::NotSpanning);
    }
    Ok(())
}

/// All internally spanned subcubes, ordered by dimension then pattern.
pub fn internally_spanned_subcubes(seed: &VertexSet) -> Result<Vec<Pattern>> {
    let shape = seed.shape();
    check_subcube_guard(shape)?;
    let mut sim = Simulator::new(shape, 2)?;
    let mut out = Vec::new();
    for p in all_patterns(shape) {
        if internally_spanned_with(&mut sim, seed, &p)? {
            out.push(p);
        }
    }
    out.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// Dimensions `l` for which some `l`-dimensional subcube is internally spanned.
pub fn spanned_dim_scan(seed: &VertexSet) -> Result<BTreeSet<usize>> {
    require_spanning(seed)?;
    Ok(internally_spanned_subcubes(seed)?
        .iter()
        .map(Pattern::dim)
        .collect())
}

/// For each `k <= n` some spanned dimension lies in `[k, 2k]`. Returns the
/// first `k` for which that fails.
pub fn spanned_dims_gap(dims: &BTreeSet<usize>, n: usize) -> Option<usize> {
    (0..=n).find(|&k| dims.range(k..=2 * k).next().is_none())
}

/// A nested chain of internally spanned subcubes from a vertex to the full
/// cube, each step joining the previous link with a side cube.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanWitness {
    pub chain: Vec<Pattern>,
    /// `mergers[j]` joins `chain[j]` into `chain[j + 1]`.
    pub mergers: Vec<Pattern>,
}

impl SpanWitness {
    /// Re-checks every structural property against `seed`.
    pub fn verify(&self, seed: &VertexSet) -> std::result::Result<(), String> {
        let shape = seed.shape();
        let first = self.chain.first().ok_or("empty chain")?;
        if first.dim() != 0 {
            return Err(format!("chain starts at {first}, not a vertex"));
        }
        if *self.chain.last().unwrap() != Pattern::full(shape) {
            return Err("chain does not end at the full cube".into());
        }
        if self.mergers.len() + 1 != self.chain.len() {
            return Err("need exactly one merger per step".into());
        }
        let spanned = |p: &Pattern| is_internally_spanned(seed, p).unwrap_or(false);
        for p in self.chain.iter().chain(&self.mergers) {
            if !spanned(p) {
                return Err(format!("{p} is not internally spanned"));
            }
        }
        for (j, pair) in self.chain.windows(2).enumerate() {
            let (lo, hi) = (&pair[0], &pair[1]);
            let m = &self.mergers[j];
            if !lo.is_subcube_of(hi) || lo == hi {
                return Err(format!("{lo} is not strictly inside {hi}"));
            }
            if 2 * lo.dim() + 2 < hi.dim() {
                return Err(format!("dimension jump {} -> {}", lo.dim(), hi.dim()));
            }
            if m.dim() > lo.dim() {
                return Err(format!("merger {m} is larger than {lo}"));
            }
            if lo.join(m).ok().as_ref() != Some(hi) || lo.distance(m).map_or(true, |d| d > 2) {
                return Err(format!("{lo} and {m} do not span {hi}"));
            }
        }
        Ok(())
    }
}

/// Searches for a nested spanning chain, smallest dimensions first.
/// `Ok(None)` means the guarded search was exhausted without a chain.
pub fn find_span_witness(seed: &VertexSet) -> Result<Option<SpanWitness>> {
    let shape = seed.shape();
    check_subcube_guard(shape)?;
    require_spanning(seed)?;
    let spanned = internally_spanned_subcubes(seed)?;
    let index: HashMap<&Pattern, usize> = spanned.iter().enumerate().map(|(i, p)| (p, i)).collect();

    // parent[i] = (link, merger) that first reached spanned[i]
    let mut reached = vec![false; spanned.len()];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; spanned.len()];
    for (i, p) in spanned.iter().enumerate() {
        if p.dim() == 0 {
            reached[i] = true;
        }
    }
    for c in 0..spanned.len() {
        if !reached[c] {
            continue;
        }
        let link = &spanned[c];
        for (m, side) in spanned.iter().enumerate() {
            if side.dim() > link.dim() {
                break;
            }
            if side.is_subcube_of(link) || link.distance(side)? > 2 {
                continue;
            }
            let joined = link.join(side)?;
            let &target = index.get(&joined).ok_or_else(|| {
                Error::Inconsistent(format!(
                    "{link} ∨ {side} = {joined} is not internally spanned"
                ))
            })?;
            if !reached[target] {
                reached[target] = true;
                parent[target] = Some((c, m));
            }
        }
    }

    let Some(&top) = index.get(&Pattern::full(shape)) else {
        return Ok(None);
    };
    if !reached[top] {
        return Ok(None);
    }
    let mut chain = vec![spanned[top].clone()];
    let mut mergers = Vec::new();
    let mut cur = top;
    while let Some((c, m)) = parent[cur] {
        chain.push(spanned[c].clone());
        mergers.push(spanned[m].clone());
        cur = c;
    }
    chain.reverse();
    mergers.reverse();
    Ok(Some(SpanWitness { chain, mergers }))
}

/// Percolation time of `Q^x ∪ Q^y`: `m - p - 1`, `m - p`, `m - p + 1` for
/// distance 0, 1, 2, where `m = dim(x ∨ y)` and `p` counts shared stars.
/// Requires `dim x, dim y < m`.
pub fn two_cube_time(x: &Pattern, y: &Pattern) -> Result<u32> {
    let d = x.distance(y)?;
    if d > 2 {
        return Err(Error::Hypothesis(format!("d({x},{y}) = {d} > 2")));
    }
    let m = x.join(y)?.dim();
    if x.dim() >= m || y.dim() >= m {
        return Err(Error::Hypothesis(format!(
            "need dim({x}), dim({y}) < dim({x} ∨ {y}) = {m}"
        )));
    }
    let p = x.common_stars(y);
    Ok((m - p + d - 1) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine;

    fn shape(n: usize, q: u32) -> CubeShape {
        CubeShape::new(n, q).unwrap()
    }

    fn pat(s: CubeShape, t: &str) -> Pattern {
        Pattern::parse(s, t).unwrap()
    }

    fn set(s: CubeShape, w: &[&str]) -> VertexSet {
        VertexSet::parse(s, w.iter().copied()).unwrap()
    }

    #[test]
    fn closedness_examples() {
        let s = shape(2, 3);
        for p in all_patterns(s) {
            assert!(is_closed(&VertexSet::from_pattern(&p)), "{p}");
        }
        assert!(!is_closed(&set(s, &["00", "01"])));
        assert!(is_closed(&VertexSet::empty(s)));
    }

    #[test]
    fn closedness_matches_closure_on_q23() {
        let s = shape(2, 3);
        for mask in 0u64..512 {
            let a = VertexSet::from_mask(s, mask);
            let closed = engine::closure(&a, 2).unwrap() == a;
            assert_eq!(is_closed(&a), closed);
        }
    }

    #[test]
    fn decomposition_examples() {
        let s = shape(2, 3);
        let d = decompose_closed(&VertexSet::from_pattern(&pat(s, "0*"))).unwrap();
        assert_eq!(d.components, vec![pat(s, "0*")]);
        assert!(d.valid);

        let s3 = shape(3, 3);
        let d = decompose_closed(&set(s3, &["000", "111"])).unwrap();
        assert_eq!(d.components, vec![pat(s3, "000"), pat(s3, "111")]);
        assert!(d.valid);

        let d = decompose_closed(&VertexSet::empty(s)).unwrap();
        assert!(d.components.is_empty() && d.valid);

        assert_eq!(
            decompose_closed(&set(s, &["00", "01"])),
            Err(Error::NotClosed)
        );
    }

    #[test]
    fn internal_spanning_examples() {
        let s = shape(2, 3);
        let x = pat(s, "0*");
        assert!(is_internally_spanned(&VertexSet::full(s), &x).unwrap());
        assert!(!is_internally_spanned(&set(s, &["11"]), &x).unwrap());
        assert!(is_internally_spanned(&set(s, &["00", "11"]), &pat(s, "**")).unwrap());
    }

    #[test]
    fn dim_scan_examples() {
        let s = shape(2, 3);
        let full: Vec<usize> = spanned_dim_scan(&VertexSet::full(s))
            .unwrap()
            .into_iter()
            .collect();
        assert_eq!(full, [0, 1, 2]);
        let diag: Vec<usize> = spanned_dim_scan(&set(s, &["00", "11"]))
            .unwrap()
            .into_iter()
            .collect();
        assert_eq!(diag, [0, 2]);
        assert_eq!(spanned_dim_scan(&set(s, &["00"])), Err(Error::NotSpanning));
        assert_eq!(spanned_dims_gap(&[0, 2].into_iter().collect(), 2), None);
        assert_eq!(spanned_dims_gap(&[0, 3].into_iter().collect(), 3), Some(1));
    }

    #[test]
    fn witness_for_diagonal_pair() {
        let s = shape(2, 3);
        let seed = set(s, &["00", "11"]);
        let w = find_span_witness(&seed).unwrap().unwrap();
        assert_eq!(w.chain, vec![pat(s, "00"), pat(s, "**")]);
        assert_eq!(w.mergers, vec![pat(s, "11")]);
        w.verify(&seed).unwrap();
    }

    #[test]
    fn witness_for_full_cube() {
        let s = shape(3, 3);
        let seed = VertexSet::full(s);
        let w = find_span_witness(&seed).unwrap().unwrap();
        w.verify(&seed).unwrap();
        assert_eq!(w.chain[0], pat(s, "000"));
    }

    #[test]
    fn witness_guard() {
        let s = shape(7, 5);
        assert!(matches!(
            find_span_witness(&VertexSet::full(s)),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn two_cube_time_examples() {
        let s2 = shape(2, 3);
        let s3 = shape(3, 3);
        assert_eq!(two_cube_time(&pat(s2, "*0"), &pat(s2, "0*")).unwrap(), 1);
        assert_eq!(two_cube_time(&pat(s2, "00"), &pat(s2, "11")).unwrap(), 3);
        assert_eq!(two_cube_time(&pat(s3, "*00"), &pat(s3, "0*1")).unwrap(), 3);
        assert!(matches!(
            two_cube_time(&pat(s3, "000"), &pat(s3, "111")),
            Err(Error::Hypothesis(_))
        ));
        assert!(matches!(
            two_cube_time(&pat(s2, "0*"), &pat(s2, "00")),
            Err(Error::Hypothesis(_))
        ));
    }
}
