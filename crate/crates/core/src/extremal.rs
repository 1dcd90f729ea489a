//! Maximum 2-neighbour percolation time `M_q(n)` and seeds attaining it.
//!
//! The construction is recursive in steps of three dimensions. A seed for
//! `Q_{n-3,q}` is relabelled so that its last infected vertex becomes the
//! all-zero word, embedded as `[*]^{n-3}000`, and completed with the two
//! vertices `[0]^{n-3}110` and `[2]^n`. Dimensions 0, 1 and 2 use fixed seeds.

use serde::Serialize;

use crate::cube::{Automorphism, CubeShape, VertexId};
use crate::engine::{self, InfectionRecord};
use crate::error::{Error, Result};
use crate::set::VertexSet;

/// Closed form of `M_q(n)` for `q >= 3`.
pub fn max_time_formula(q: u32, n: u64) -> Result<u64> {
    if q < 3 {
        return Err(Error::FormulaScope(q));
    }
    let (value, remainder) = if q == 3 {
        // n^2/3 + 2n/3, plus 1/3 when n = 2 mod 3
        let num = n * n + 2 * n + u64::from(n % 3 == 2);
        (num / 3, num % 3)
    } else {
        // n^2/3 + n, minus 1/3 unless n = 0 mod 3
        let num = n * n + 3 * n - u64::from(!n.is_multiple_of(3));
        (num / 3, num % 3)
    };
    if remainder != 0 {
        return Err(Error::Inconsistent(format!("M_{q}({n}) is not an integer")));
    }
    Ok(value)
}

/// `M_q(n)` from the base values 0, 1, 3 and the step
/// `M_q(n) = M_q(n-3) + 2n - [q = 3]`.
pub fn max_time_recursive(q: u32, n: u64) -> Result<u64> {
    if q < 3 {
        return Err(Error::FormulaScope(q));
    }
    Ok(match n {
        0 => 0,
        1 => 1,
        2 => 3,
        _ => max_time_recursive(q, n - 3)? + 2 * n - u64::from(q == 3),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "role")]
pub enum PieceRole {
    /// Hard-coded seed for n <= 2.
    Base,
    /// Relabelled seed of dimension `dim` placed on `[*]^{dim}000`.
    SubSeed { dim: usize },
    /// `[0]^{n-3}110`.
    Bridge,
    /// `[2]^n`.
    Apex,
    /// Cylinder over a piece of the seed one dimension down.
    Lifted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Piece {
    #[serde(flatten)]
    pub role: PieceRole,
    pub vertices: VertexSet,
}

/// One level of the recursion, innermost first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelTrace {
    pub n: usize,
    pub rule: &'static str,
    /// Sub-seed vertex sent to the all-zero word before embedding.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeroed: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtremalSeed {
    pub shape: CubeShape,
    pub vertices: VertexSet,
    #[serde(rename = "provenance")]
    pub pieces: Vec<Piece>,
    pub trace: Vec<LevelTrace>,
}

impl ExtremalSeed {
    fn from_pieces(shape: CubeShape, pieces: Vec<Piece>, trace: Vec<LevelTrace>) -> Self {
        let mut vertices = VertexSet::empty(shape);
        for p in &pieces {
            vertices.union_with(&p.vertices);
        }
        ExtremalSeed {
            shape,
            vertices,
            pieces,
            trace,
        }
    }

    /// Seed with piece `i` left out.
    pub fn without_piece(&self, i: usize) -> VertexSet {
        let mut out = VertexSet::empty(self.shape);
        for (j, p) in self.pieces.iter().enumerate() {
            if j != i {
                out.union_with(&p.vertices);
            }
        }
        out
    }
}

fn base_seed(q: u32, n: usize) -> Result<ExtremalSeed> {
    let shape = CubeShape::new(n, q)?;
    let words: &[&str] = match n {
        0 => &[""],
        1 => &["0", "1"],
        2 => &["00", "11"],
        _ => unreachable!(),
    };
    let vertices = VertexSet::parse(shape, words.iter().copied())?;
    Ok(ExtremalSeed::from_pieces(
        shape,
        vec![Piece {
            role: PieceRole::Base,
            vertices,
        }],
        vec![LevelTrace {
            n,
            rule: "base",
            zeroed: None,
        }],
    ))
}

/// A spanning seed of `Q_{n,q}` whose percolation time is `M_q(n)`.
pub fn build_extremal_seed(q: u32, n: usize) -> Result<ExtremalSeed> {
    if q < 3 {
        return Err(Error::FormulaScope(q));
    }
    let shape = CubeShape::new(n, q)?;
    if n <= 2 {
        return base_seed(q, n);
    }
    let inner = build_extremal_seed(q, n - 3)?;
    let record = engine::run(&inner.vertices, 2)?;
    let last = last_infected(&record)?
        .iter()
        .next()
        .expect("a spanning run has a last round");
    let zeroing = Automorphism::zeroing(inner.shape, last);

    // [*]^{n-3}000: a vertex of the sub-cube shifted past three zero digits
    let shift = q.pow(3);
    let mut sub = VertexSet::empty(shape);
    for v in inner.vertices.iter() {
        sub.insert(VertexId(zeroing.apply(v).0 * shift));
    }
    let mut bridge_digits = vec![0; n];
    bridge_digits[n - 3] = 1;
    bridge_digits[n - 2] = 1;
    let bridge = VertexSet::from_vertices(shape, [shape.encode(&bridge_digits)?])?;
    let apex = VertexSet::from_vertices(shape, [shape.encode(&vec![2; n])?])?;

    let mut trace = inner.trace.clone();
    trace.push(LevelTrace {
        n,
        rule: "recursive",
        zeroed: Some(inner.shape.format_vertex(last)),
    });
    Ok(ExtremalSeed::from_pieces(
        shape,
        vec![
            Piece {
                role: PieceRole::SubSeed { dim: n - 3 },
                vertices: sub,
            },
            Piece {
                role: PieceRole::Bridge,
                vertices: bridge,
            },
            Piece {
                role: PieceRole::Apex,
                vertices: apex,
            },
        ],
        trace,
    ))
}

/// Cylinder `{(a, i) : a ∈ set, i ∈ 0..q}` one dimension up.
pub fn lift_set(set: &VertexSet) -> Result<VertexSet> {
    let shape = set.shape();
    let up = shape.lifted()?;
    let q = shape.q();
    let mut out = VertexSet::empty(up);
    for v in set.iter() {
        for i in 0..q {
            out.insert(VertexId(v.0 * q + i));
        }
    }
    Ok(out)
}

pub fn lift_seed(seed: &ExtremalSeed) -> Result<ExtremalSeed> {
    let up = seed.shape.lifted()?;
    let pieces = seed
        .pieces
        .iter()
        .map(|p| {
            Ok(Piece {
                role: PieceRole::Lifted,
                vertices: lift_set(&p.vertices)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut trace = seed.trace.clone();
    trace.push(LevelTrace {
        n: up.n(),
        rule: "lift",
        zeroed: None,
    });
    Ok(ExtremalSeed::from_pieces(up, pieces, trace))
}

/// Vertices stamped with the final round. A zero-round run returns the seed.
pub fn last_infected(record: &InfectionRecord) -> Result<VertexSet> {
    if !record.percolated() {
        return Err(Error::NotPercolated);
    }
    Ok(record.infected_at(record.rounds()))
}
