//! Vertices and subcubes of the q-ary Hamming cube Q_{n,q}.
//!
//! A vertex is stored as a mixed-radix code over `n` base-`q` digits with the
//! first coordinate most significant, so vertex sets can be dense bitmaps
//! indexed by code. A subcube is a [`Pattern`] over `{0..q-1, *}`.
//!
//! Text format: for `q <= 10` words are compact strings over `'0'..'9'` and
//! `'*'`; for larger alphabets they are comma-separated tokens (`"10,*,3"`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on `q^n`.
pub const DEFAULT_VERTEX_LIMIT: u64 = 1 << 27;

/// Codes are `u32`, so no shape can have more than 32 binary coordinates.
pub const MAX_DIM: usize = 32;

/// The ambient cube Q_{n,q}.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "ShapeRepr", try_from = "ShapeRepr")]
pub struct CubeShape {
    n: usize,
    q: u32,
    len: usize,
    strides: [u32; MAX_DIM],
}

#[derive(Serialize, Deserialize)]
struct ShapeRepr {
    n: usize,
    q: u32,
}

impl From<CubeShape> for ShapeRepr {
    fn from(s: CubeShape) -> Self {
        ShapeRepr { n: s.n, q: s.q }
    }
}

impl TryFrom<ShapeRepr> for CubeShape {
    type Error = Error;
    fn try_from(r: ShapeRepr) -> Result<Self> {
        CubeShape::new(r.n, r.q)
    }
}

impl CubeShape {
    pub fn new(n: usize, q: u32) -> Result<Self> {
        Self::with_limit(n, q, DEFAULT_VERTEX_LIMIT)
    }

    /// Like [`CubeShape::new`] with an explicit vertex cap (at most `u32::MAX`).
    pub fn with_limit(n: usize, q: u32, limit: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidAlphabet(q));
        }
        let limit = limit.min(u32::MAX as u64);
        let too_large = Error::ShapeTooLarge { n, q, limit };
        if n > MAX_DIM {
            return Err(too_large);
        }
        let mut len: u64 = 1;
        for _ in 0..n {
            len = len.checked_mul(q as u64).ok_or(too_large.clone())?;
            if len > limit {
                return Err(too_large);
            }
        }
        let mut strides = [0u32; MAX_DIM];
        let mut acc: u32 = 1;
        for i in (0..n).rev() {
            strides[i] = acc;
            acc = acc.wrapping_mul(q);
        }
        Ok(CubeShape {
            n,
            q,
            len: len as usize,
            strides,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Number of vertices, `q^n`.
    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    /// Never true: Q_{0,q} has one vertex.
    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// `n (q - 1)`.
    #[inline]
    pub fn degree(&self) -> usize {
        self.n * (self.q as usize - 1)
    }

    /// Place value of coordinate `i` (0-based, most significant first).
    #[inline]
    pub fn stride(&self, i: usize) -> u32 {
        self.strides[i]
    }

    /// Shape one dimension up with the same alphabet.
    pub fn lifted(&self) -> Result<CubeShape> {
        CubeShape::new(self.n + 1, self.q)
    }

    pub fn vertex(&self, code: u64) -> Result<VertexId> {
        if code >= self.len as u64 {
            return Err(Error::VertexOutOfRange {
                code,
                len: self.len,
            });
        }
        Ok(VertexId(code as u32))
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + Clone {
        (0..self.len as u32).map(VertexId)
    }

    #[inline]
    pub fn digit(&self, v: VertexId, i: usize) -> u32 {
        (v.0 / self.strides[i]) % self.q
    }

    pub fn digits(&self, v: VertexId) -> Vec<u32> {
        (0..self.n).map(|i| self.digit(v, i)).collect()
    }

    pub fn encode(&self, digits: &[u32]) -> Result<VertexId> {
        self.check_arity(digits.len())?;
        let mut code = 0u32;
        for (position, &d) in digits.iter().enumerate() {
            if d >= self.q {
                return Err(Error::InvalidSymbol {
                    symbol: d,
                    position,
                    q: self.q,
                });
            }
            code = code * self.q + d;
        }
        Ok(VertexId(code))
    }

    /// Calls `f` on every neighbour of `v`, coordinate-major then symbol ascending.
    #[inline]
    pub fn for_each_neighbor(&self, v: VertexId, mut f: impl FnMut(VertexId)) {
        let code = v.0;
        for i in 0..self.n {
            let stride = self.strides[i];
            let d = (code / stride) % self.q;
            let base = code - d * stride;
            for s in 0..self.q {
                if s != d {
                    f(VertexId(base + s * stride));
                }
            }
        }
    }

    pub fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let mut out = Vec::with_capacity(self.degree());
        self.for_each_neighbor(v, |u| out.push(u));
        out
    }

    pub fn hamming(&self, a: VertexId, b: VertexId) -> usize {
        (0..self.n)
            .filter(|&i| self.digit(a, i) != self.digit(b, i))
            .count()
    }

    pub fn format_vertex(&self, v: VertexId) -> String {
        let digits = self.digits(v);
        if self.q <= 10 {
            digits
                .iter()
                .map(|&d| char::from_digit(d, 10).unwrap())
                .collect()
        } else {
            let tokens: Vec<String> = digits.iter().map(|d| d.to_string()).collect();
            tokens.join(",")
        }
    }

    pub fn parse_vertex(&self, text: &str) -> Result<VertexId> {
        let symbols = parse_symbols(text, self.q)?;
        let digits = symbols
            .into_iter()
            .map(|s| match s {
                Symbol::Fixed(d) => Ok(d),
                Symbol::Star => Err(Error::Parse(format!("'{text}' is a pattern, not a vertex"))),
            })
            .collect::<Result<Vec<_>>>()?;
        self.encode(&digits)
    }

    fn check_arity(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::Parse(format!(
                "expected {} coordinates, got {len}",
                self.n
            )));
        }
        Ok(())
    }

    pub(crate) fn ensure_same(&self, other: &CubeShape) -> Result<()> {
        if self.n != other.n || self.q != other.q {
            return Err(Error::ShapeMismatch {
                left_n: self.n,
                left_q: self.q,
                right_n: other.n,
                right_q: other.q,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for CubeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q_{{{},{}}}", self.n, self.q)
    }
}

impl fmt::Display for CubeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A vertex code in `[0, q^n)`. Only meaningful together with its [`CubeShape`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One coordinate of a pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Fixed(u32),
    Star,
}

impl Symbol {
    #[inline]
    pub fn is_star(self) -> bool {
        matches!(self, Symbol::Star)
    }
}

/// 1 iff both symbols are fixed and differ.
#[inline]
pub fn coord_distance(a: Symbol, b: Symbol) -> usize {
    match (a, b) {
        (Symbol::Fixed(x), Symbol::Fixed(y)) if x != y => 1,
        _ => 0,
    }
}

fn parse_symbols(text: &str, q: u32) -> Result<Vec<Symbol>> {
    let text = text.trim();
    let tokens: Vec<&str> = if text.contains(',') || q > 10 {
        if text.is_empty() {
            Vec::new()
        } else {
            text.split(',').map(str::trim).collect()
        }
    } else {
        text.char_indices()
            .map(|(i, c)| &text[i..i + c.len_utf8()])
            .collect()
    };
    tokens
        .into_iter()
        .enumerate()
        .map(|(position, tok)| {
            if tok == "*" {
                return Ok(Symbol::Star);
            }
            let d: u32 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad symbol '{tok}' in '{text}'")))?;
            if d >= q {
                return Err(Error::InvalidSymbol {
                    symbol: d,
                    position,
                    q,
                });
            }
            Ok(Symbol::Fixed(d))
        })
        .collect()
}

/// A subcube descriptor `x ∈ {0..q-1, *}^n`, denoting
/// `Q^x = { z : z_i = x_i whenever x_i != * }`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    shape: CubeShape,
    symbols: Vec<Symbol>,
}

impl Pattern {
    pub fn new(shape: CubeShape, symbols: Vec<Symbol>) -> Result<Self> {
        shape.check_arity(symbols.len())?;
        for (position, s) in symbols.iter().enumerate() {
            if let Symbol::Fixed(d) = *s {
                if d >= shape.q {
                    return Err(Error::InvalidSymbol {
                        symbol: d,
                        position,
                        q: shape.q,
                    });
                }
            }
        }
        Ok(Pattern { shape, symbols })
    }

    pub fn parse(shape: CubeShape, text: &str) -> Result<Self> {
        Pattern::new(shape, parse_symbols(text, shape.q)?)
    }

    /// The zero-dimensional subcube `{v}`.
    pub fn point(shape: CubeShape, v: VertexId) -> Self {
        let symbols = shape.digits(v).into_iter().map(Symbol::Fixed).collect();
        Pattern { shape, symbols }
    }

    /// `[*]^n`.
    pub fn full(shape: CubeShape) -> Self {
        Pattern {
            shape,
            symbols: vec![Symbol::Star; shape.n],
        }
    }

    #[inline]
    pub fn shape(&self) -> CubeShape {
        self.shape
    }

    #[inline]
    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// Number of stars.
    pub fn dim(&self) -> usize {
        self.symbols.iter().filter(|s| s.is_star()).count()
    }

    /// `q^dim`.
    pub fn size(&self) -> usize {
        (self.shape.q as usize).pow(self.dim() as u32)
    }

    pub fn distance(&self, other: &Pattern) -> Result<usize> {
        self.shape.ensure_same(&other.shape)?;
        Ok(self
            .symbols
            .iter()
            .zip(&other.symbols)
            .map(|(&a, &b)| coord_distance(a, b))
            .sum())
    }

    /// Keep equal symbols, star the rest.
    pub fn join(&self, other: &Pattern) -> Result<Pattern> {
        self.shape.ensure_same(&other.shape)?;
        let symbols = self
            .symbols
            .iter()
            .zip(&other.symbols)
            .map(|(&a, &b)| if a == b { a } else { Symbol::Star })
            .collect();
        Ok(Pattern {
            shape: self.shape,
            symbols,
        })
    }

    /// Positions where both patterns are starred.
    pub fn common_stars(&self, other: &Pattern) -> usize {
        self.symbols
            .iter()
            .zip(&other.symbols)
            .filter(|(a, b)| a.is_star() && b.is_star())
            .count()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.symbols.iter().enumerate().all(|(i, s)| match *s {
            Symbol::Fixed(d) => self.shape.digit(v, i) == d,
            Symbol::Star => true,
        })
    }

    /// `Q^self ⊆ Q^other`.
    pub fn is_subcube_of(&self, other: &Pattern) -> bool {
        self.symbols
            .iter()
            .zip(&other.symbols)
            .all(|(&a, &b)| b.is_star() || a == b)
    }

    /// Members of `Q^x` in lexicographic order over the star positions.
    pub fn members(&self) -> PatternMembers {
        let mut base = 0u32;
        let mut free = Vec::new();
        for (i, s) in self.symbols.iter().enumerate() {
            match *s {
                Symbol::Fixed(d) => base += d * self.shape.stride(i),
                Symbol::Star => free.push(self.shape.stride(i)),
            }
        }
        PatternMembers {
            q: self.shape.q,
            counters: vec![0; free.len()],
            free,
            current: base,
            done: false,
        }
    }

    /// Lowest-code member, i.e. stars read as 0.
    pub fn anchor(&self) -> VertexId {
        self.members().next().expect("patterns are never empty")
    }

    /// Replace coordinate `i` by `s`.
    pub fn with_symbol(&self, i: usize, s: Symbol) -> Result<Pattern> {
        let mut symbols = self.symbols.clone();
        symbols[i] = s;
        Pattern::new(self.shape, symbols)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let render = |s: &Symbol| match *s {
            Symbol::Fixed(d) => d.to_string(),
            Symbol::Star => "*".to_string(),
        };
        if self.shape.q <= 10 {
            for s in &self.symbols {
                f.write_str(&render(s))?;
            }
            Ok(())
        } else {
            let tokens: Vec<String> = self.symbols.iter().map(render).collect();
            f.write_str(&tokens.join(","))
        }
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern({self})")
    }
}

impl Serialize for Pattern {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Iterator over the vertices of a subcube.
pub struct PatternMembers {
    q: u32,
    free: Vec<u32>,
    counters: Vec<u32>,
    current: u32,
    done: bool,
}

impl Iterator for PatternMembers {
    type Item = VertexId;

    fn next(&mut self) -> Option<VertexId> {
        if self.done {
            return None;
        }
        let out = VertexId(self.current);
        // odometer, last star position fastest
        let mut j = self.free.len();
        loop {
            if j == 0 {
                self.done = true;
                break;
            }
            j -= 1;
            if self.counters[j] + 1 < self.q {
                self.counters[j] += 1;
                self.current += self.free[j];
                break;
            }
            self.current -= self.counters[j] * self.free[j];
            self.counters[j] = 0;
        }
        Some(out)
    }
}

/// All `(q+1)^n` patterns of a shape, lexicographic with `0 < 1 < ... < *`.
pub fn all_patterns(shape: CubeShape) -> impl Iterator<Item = Pattern> {
    let radix = shape.q as u64 + 1;
    let total = radix.pow(shape.n as u32);
    (0..total).map(move |mut idx| {
        let mut symbols = vec![Symbol::Star; shape.n];
        for i in (0..shape.n).rev() {
            let d = (idx % radix) as u32;
            idx /= radix;
            symbols[i] = if d == shape.q {
                Symbol::Star
            } else {
                Symbol::Fixed(d)
            };
        }
        Pattern { shape, symbols }
    })
}

/// Number of patterns of a shape, `(q+1)^n`, saturating.
pub fn pattern_count(shape: CubeShape) -> u128 {
    (shape.q as u128 + 1).saturating_pow(shape.n as u32)
}

/// A cube automorphism: a coordinate permutation followed by a per-coordinate
/// symbol bijection. Image coordinate `i` reads source coordinate
/// `permutation[i]` and relabels it through `relabel[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    shape: CubeShape,
    permutation: Vec<usize>,
    relabel: Vec<Vec<u32>>,
}

impl Automorphism {
    pub fn identity(shape: CubeShape) -> Self {
        Automorphism {
            shape,
            permutation: (0..shape.n).collect(),
            relabel: vec![(0..shape.q).collect(); shape.n],
        }
    }

    pub fn new(shape: CubeShape, permutation: Vec<usize>, relabel: Vec<Vec<u32>>) -> Result<Self> {
        let n = shape.n;
        let q = shape.q as usize;
        let is_perm = |p: &[usize], k: usize| {
            let mut seen = vec![false; k];
            p.len() == k
                && p.iter()
                    .all(|&x| x < k && !std::mem::replace(&mut seen[x], true))
        };
        if !is_perm(&permutation, n) {
            return Err(Error::Parse("coordinate map is not a permutation".into()));
        }
        let as_usize: Vec<Vec<usize>> = relabel
            .iter()
            .map(|r| r.iter().map(|&x| x as usize).collect())
            .collect();
        if relabel.len() != n || !as_usize.iter().all(|r| is_perm(r, q)) {
            return Err(Error::Parse("symbol map is not a bijection".into()));
        }
        Ok(Automorphism {
            shape,
            permutation,
            relabel,
        })
    }

    /// Per-coordinate transpositions `w_i <-> 0`, sending `w` to the all-zero word.
    pub fn zeroing(shape: CubeShape, w: VertexId) -> Self {
        let relabel = shape
            .digits(w)
            .into_iter()
            .map(|wi| {
                (0..shape.q)
                    .map(|s| {
                        if s == wi {
                            0
                        } else if s == 0 {
                            wi
                        } else {
                            s
                        }
                    })
                    .collect()
            })
            .collect();
        Automorphism {
            shape,
            permutation: (0..shape.n).collect(),
            relabel,
        }
    }

    pub fn apply(&self, v: VertexId) -> VertexId {
        let src = self.shape.digits(v);
        let mut code = 0u32;
        for i in 0..self.shape.n {
            code = code * self.shape.q + self.relabel[i][src[self.permutation[i]] as usize];
        }
        VertexId(code)
    }
}

impl FromStr for Symbol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "*" {
            Ok(Symbol::Star)
        } else {
            s.parse()
                .map(Symbol::Fixed)
                .map_err(|_| Error::Parse(format!("bad symbol '{s}'")))
        }
    }
}
