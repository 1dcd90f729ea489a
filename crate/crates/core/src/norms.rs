//! Gated nonzero-counting norms and the infected / uninfected vertex sets they
//! predict for the two-subcube seeds `S ∪ T`.
//!
//! The six configurations share one shape of seed:
//!
//! | id  | n       | S                  | T                  |
//! |-----|---------|--------------------|--------------------|
//! | ST1 | k+l     | `[*]^k [0]^l`      | `[0]^k [*]^l`      |
//! | ST2 | k+l+1   | `[*]^k [0]^{l+1}`  | `[0]^k [*]^l i`    |
//! | ST3 | k+l+2   | `[*]^k [0]^{l+2}`  | `[0]^k [*]^l a b`  |
//!
//! ST4..ST6 reuse the seeds of ST1..ST3. ST1..ST3 give sets guaranteed to be
//! infected by step `t`, ST4..ST6 give sets guaranteed to be healthy at `t`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::cube::{CubeShape, Pattern, Symbol, VertexId};
use crate::error::{Error, Result};
use crate::set::VertexSet;

/// Parameters of `‖x‖_{n1,n2}^{a_1..a_d}`. Absent blocks impose no gate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormSpec {
    shape: CubeShape,
    first: Option<usize>,
    second: Option<usize>,
    suffix: Vec<u32>,
}

impl NormSpec {
    pub fn new(
        shape: CubeShape,
        first: Option<usize>,
        second: Option<usize>,
        suffix: &[u32],
    ) -> Result<Self> {
        if second.is_some() && first.is_none() {
            return Err(Error::InvalidNorm(
                "second block given without a first block".into(),
            ));
        }
        let needed = suffix.len() + first.unwrap_or(0) + second.unwrap_or(0);
        if needed > shape.n() {
            return Err(Error::InvalidNorm(format!(
                "n={} is smaller than d + n1 + n2 = {needed}",
                shape.n()
            )));
        }
        if let Some(&bad) = suffix.iter().find(|&&a| a >= shape.q()) {
            return Err(Error::InvalidNorm(format!(
                "suffix symbol {bad} is not below q={}",
                shape.q()
            )));
        }
        Ok(NormSpec {
            shape,
            first,
            second,
            suffix: suffix.to_vec(),
        })
    }

    /// `‖x‖`, the Hamming weight.
    pub fn weight(shape: CubeShape) -> Self {
        NormSpec {
            shape,
            first: None,
            second: None,
            suffix: Vec::new(),
        }
    }

    pub fn shape(&self) -> CubeShape {
        self.shape
    }

    pub fn norm(&self, v: VertexId) -> u32 {
        self.norm_digits(&self.shape.digits(v))
    }

    /// Count of nonzero digits among the first `n - d`, or 0 if any gate fails.
    pub fn norm_digits(&self, x: &[u32]) -> u32 {
        let n = x.len();
        let d = self.suffix.len();
        if x[n - d..] != self.suffix[..] {
            return 0;
        }
        let n1 = self.first.unwrap_or(0);
        if self.first.is_some() && x[..n1].iter().all(|&c| c == 0) {
            return 0;
        }
        if let Some(n2) = self.second {
            if x[n1..n1 + n2].iter().all(|&c| c == 0) {
                return 0;
            }
        }
        x[..n - d].iter().filter(|&&c| c != 0).count() as u32
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum LemmaId {
    St1,
    St2,
    St3,
    St4,
    St5,
    St6,
}

impl LemmaId {
    pub const ALL: [LemmaId; 6] = [
        LemmaId::St1,
        LemmaId::St2,
        LemmaId::St3,
        LemmaId::St4,
        LemmaId::St5,
        LemmaId::St6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaId::St1 => "st1",
            LemmaId::St2 => "st2",
            LemmaId::St3 => "st3",
            LemmaId::St4 => "st4",
            LemmaId::St5 => "st5",
            LemmaId::St6 => "st6",
        }
    }

    /// Number of trailing fixed symbols in T: 0, 1 (`i`) or 2 (`a b`).
    pub fn marks(self) -> usize {
        match self {
            LemmaId::St1 | LemmaId::St4 => 0,
            LemmaId::St2 | LemmaId::St5 => 1,
            LemmaId::St3 | LemmaId::St6 => 2,
        }
    }

    pub fn is_lower(self) -> bool {
        matches!(self, LemmaId::St1 | LemmaId::St2 | LemmaId::St3)
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LemmaId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        LemmaId::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown lemma '{s}'")))
    }
}

/// Inclusive range of steps, `end = None` meaning unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TimeRange {
    pub start: u32,
    pub end: Option<u32>,
}

impl TimeRange {
    fn contains(&self, t: u32) -> bool {
        t >= self.start && self.end.is_none_or(|e| t <= e)
    }

    /// In-range steps up to `horizon`.
    pub fn up_to(&self, horizon: u32) -> Vec<u32> {
        let end = self.end.map_or(horizon, |e| e.min(horizon));
        (self.start..=end).collect()
    }
}

impl fmt::Display for TimeRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.end {
            Some(e) if e < self.start => f.write_str("empty"),
            Some(e) => write!(f, "{} <= t <= {e}", self.start),
            None => write!(f, "t >= {}", self.start),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaConfig {
    lemma: LemmaId,
    k: usize,
    l: usize,
    marks: Vec<u32>,
    shape: CubeShape,
}

impl LemmaConfig {
    /// `marks` is `[]`, `[i]` or `[a, b]` depending on the lemma; all nonzero.
    pub fn new(lemma: LemmaId, q: u32, k: usize, l: usize, marks: &[u32]) -> Result<Self> {
        if marks.len() != lemma.marks() {
            return Err(Error::InvalidLemma(format!(
                "{lemma} takes {} trailing symbols, got {}",
                lemma.marks(),
                marks.len()
            )));
        }
        if let Some(&bad) = marks.iter().find(|&&m| m == 0 || m >= q) {
            return Err(Error::InvalidLemma(format!(
                "trailing symbol {bad} must lie in 1..q-1"
            )));
        }
        let shape = CubeShape::new(k + l + lemma.marks(), q)?;
        Ok(LemmaConfig {
            lemma,
            k,
            l,
            marks: marks.to_vec(),
            shape,
        })
    }

    /// Every valid choice of trailing symbols for `(lemma, q, k, l)`.
    pub fn all_marks(lemma: LemmaId, q: u32, k: usize, l: usize) -> Result<Vec<LemmaConfig>> {
        let syms: Vec<u32> = (1..q).collect();
        let choices: Vec<Vec<u32>> = match lemma.marks() {
            0 => vec![vec![]],
            1 => syms.iter().map(|&i| vec![i]).collect(),
            _ => syms
                .iter()
                .flat_map(|&a| syms.iter().map(move |&b| vec![a, b]))
                .collect(),
        };
        choices
            .iter()
            .map(|m| LemmaConfig::new(lemma, q, k, l, m))
            .collect()
    }

    pub fn lemma(&self) -> LemmaId {
        self.lemma
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn marks(&self) -> &[u32] {
        &self.marks
    }

    pub fn shape(&self) -> CubeShape {
        self.shape
    }

    /// Short key such as `st3 q=3 k=1 l=0 marks=[1,2]`.
    pub fn key(&self) -> String {
        let marks: String = self
            .marks
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "{} q={} k={} l={} marks=[{}]",
            self.lemma,
            self.shape.q(),
            self.k,
            self.l,
            marks
        )
    }

    /// Steps for which the lemma states a guaranteed-infected set.
    pub fn lower_range(&self) -> Option<TimeRange> {
        match self.lemma {
            LemmaId::St1 => Some(TimeRange {
                start: 0,
                end: None,
            }),
            LemmaId::St2 | LemmaId::St3 => Some(TimeRange {
                start: 1,
                end: None,
            }),
            _ => None,
        }
    }

    /// Steps for which the lemma states a guaranteed-healthy set.
    pub fn excluded_range(&self) -> Option<TimeRange> {
        let kl = (self.k + self.l) as u32;
        match self.lemma {
            LemmaId::St4 => Some(match kl.checked_sub(2) {
                Some(e) => TimeRange {
                    start: 0,
                    end: Some(e),
                },
                None => TimeRange {
                    start: 1,
                    end: Some(0),
                },
            }),
            // branch i: 0..=k+l-1, branch j: 1..=k+l
            LemmaId::St5 => Some(TimeRange {
                start: if kl >= 1 { 0 } else { 1 },
                end: Some(kl),
            }),
            LemmaId::St6 => Some(TimeRange {
                start: 1,
                end: None,
            }),
            _ => None,
        }
    }

    fn pattern(&self, text: &[Symbol]) -> Pattern {
        Pattern::new(self.shape, text.to_vec()).expect("lemma patterns are valid by construction")
    }

    fn norm(&self, first: Option<usize>, second: Option<usize>, suffix: &[u32]) -> NormSpec {
        NormSpec::new(self.shape, first, second, suffix)
            .expect("lemma norms are valid by construction")
    }

    /// Literal guaranteed-infected set at step `t` (no union over earlier steps).
    fn lower_at(&self, t: u32) -> VertexSet {
        let shape = self.shape;
        let q = shape.q();
        let kl = self.k + self.l;
        let t = t as i64;
        match self.lemma {
            LemmaId::St1 => {
                let w = NormSpec::weight(shape);
                collect(shape, |x| (w.norm_digits(x) as i64) <= t + 1)
            }
            LemmaId::St2 => {
                let i = self.marks[0];
                let mut line = vec![Symbol::Fixed(0); kl];
                line.push(Symbol::Star);
                let mut out = VertexSet::from_pattern(&self.pattern(&line));
                for j in 0..q {
                    let hi = if j == 0 || j == i { t } else { t - 1 };
                    let spec = self.norm(None, None, &[j]);
                    out.union_with(&collect(shape, |x| {
                        let v = spec.norm_digits(x) as i64;
                        1 <= v && v <= hi
                    }));
                }
                out
            }
            LemmaId::St3 => {
                let (a, b) = (self.marks[0], self.marks[1]);
                let tail = |c: Symbol, d: Symbol| {
                    let mut p = vec![Symbol::Fixed(0); kl];
                    p.push(c);
                    p.push(d);
                    VertexSet::from_pattern(&self.pattern(&p))
                };
                let (f, star) = (Symbol::Fixed, Symbol::Star);
                let mut out = VertexSet::empty(shape);
                if t >= 1 {
                    for (c, d) in [(0, b), (a, 0), (a, b), (0, 0)] {
                        out.union_with(&tail(f(c), f(d)));
                    }
                }
                if t >= 2 {
                    out.union_with(&tail(f(0), star));
                    out.union_with(&tail(f(a), star));
                    out.union_with(&tail(star, f(0)));
                    out.union_with(&tail(star, f(b)));
                    for c in 0..q {
                        for d in 0..q {
                            let hi = if (c, d) == (0, b) || (c, d) == (a, 0) {
                                t - 1
                            } else if c == 0 || d == 0 || c == a || d == b {
                                t - 2
                            } else {
                                t - 3
                            };
                            let spec = self.norm(None, None, &[c, d]);
                            out.union_with(&collect(shape, |x| {
                                let v = spec.norm_digits(x) as i64;
                                1 <= v && v <= hi
                            }));
                        }
                    }
                }
                // the full square only from step 3; at step 2 its
                // off-line corners are still healthy
                if t >= 3 {
                    out.union_with(&tail(star, star));
                }
                out
            }
            _ => unreachable!("checked by caller"),
        }
    }

    /// Literal guaranteed-healthy set at step `t`.
    fn excluded_at(&self, t: u32) -> VertexSet {
        let shape = self.shape;
        let q = shape.q();
        let kl = (self.k + self.l) as i64;
        let k = self.k;
        let t = t as i64;
        let at_least = |spec: NormSpec, bound: i64| {
            collect(shape, move |x| spec.norm_digits(x) as i64 >= bound)
        };
        let mut out = VertexSet::empty(shape);
        match self.lemma {
            LemmaId::St4 => {
                if t <= kl - 2 {
                    out.union_with(&at_least(self.norm(Some(self.k), Some(self.l), &[]), t + 2));
                }
            }
            LemmaId::St5 => {
                let i = self.marks[0];
                if t < kl {
                    out.union_with(&at_least(self.norm(Some(k), None, &[i]), t + 1));
                }
                if t >= 1 && t <= kl {
                    for j in (1..q).filter(|&j| j != i) {
                        out.union_with(&at_least(self.norm(Some(k), None, &[j]), t));
                    }
                }
            }
            LemmaId::St6 => {
                let (a, b) = (self.marks[0], self.marks[1]);
                for c in 0..q {
                    for d in 0..q {
                        let bound = if (c, d) == (0, b) || (c, d) == (a, 0) {
                            Some(t)
                        } else if (c, d) == (0, 0) {
                            None
                        } else if (c == 0 && d != b) || (d == 0 && c != a) || (c == a) || (d == b) {
                            (t >= 2).then_some(t - 1)
                        } else {
                            (t >= 3).then_some(t - 2)
                        };
                        if let (true, Some(bound)) = (t >= 1, bound) {
                            out.union_with(&at_least(self.norm(Some(k), None, &[c, d]), bound));
                        }
                    }
                }
            }
            _ => unreachable!("checked by caller"),
        }
        out
    }
}

fn collect(shape: CubeShape, pred: impl Fn(&[u32]) -> bool) -> VertexSet {
    let mut out = VertexSet::empty(shape);
    let mut digits = vec![0u32; shape.n()];
    for v in shape.vertices() {
        for (i, d) in digits.iter_mut().enumerate() {
            *d = shape.digit(v, i);
        }
        if pred(&digits) {
            out.insert(v);
        }
    }
    out
}

/// The seed patterns `(S, T)`.
pub fn initial_sets(cfg: &LemmaConfig) -> (Pattern, Pattern) {
    let (k, l) = (cfg.k, cfg.l);
    let zero = Symbol::Fixed(0);
    let mut s = vec![Symbol::Star; k];
    s.extend(std::iter::repeat_n(zero, l + cfg.marks.len()));
    let mut t = vec![zero; k];
    t.extend(std::iter::repeat_n(Symbol::Star, l));
    t.extend(cfg.marks.iter().map(|&m| Symbol::Fixed(m)));
    (cfg.pattern(&s), cfg.pattern(&t))
}

/// `S ∪ T` as a vertex set.
pub fn initial_seed(cfg: &LemmaConfig) -> VertexSet {
    let (s, t) = initial_sets(cfg);
    VertexSet::from_pattern(&s).union(&VertexSet::from_pattern(&t))
}

/// Vertices guaranteed infected by step `t` (ST1..ST3), accumulated over all
/// in-range steps up to `t`.
pub fn predicted_lower(cfg: &LemmaConfig, t: u32) -> Result<VertexSet> {
    let range = cfg.lower_range().ok_or_else(|| {
        Error::InvalidLemma(format!(
            "{} states healthy sets, not infected ones",
            cfg.lemma
        ))
    })?;
    if !range.contains(t) {
        return Err(Error::TimeOutOfRange {
            lemma: cfg.lemma.name(),
            t,
            range: range.to_string(),
        });
    }
    let mut out = VertexSet::empty(cfg.shape);
    for s in range.start..=t {
        out.union_with(&cfg.lower_at(s));
    }
    Ok(out)
}

/// Vertices guaranteed healthy at step `t` (ST4..ST6), accumulated over all
/// in-range steps `t' >= t`.
pub fn predicted_excluded(cfg: &LemmaConfig, t: u32) -> Result<VertexSet> {
    let range = cfg.excluded_range().ok_or_else(|| {
        Error::InvalidLemma(format!(
            "{} states infected sets, not healthy ones",
            cfg.lemma
        ))
    })?;
    if !range.contains(t) {
        return Err(Error::TimeOutOfRange {
            lemma: cfg.lemma.name(),
            t,
            range: range.to_string(),
        });
    }
    // every threshold exceeds the largest possible norm beyond k+l+3
    let last = range.end.unwrap_or((cfg.k + cfg.l) as u32 + 3);
    let mut out = VertexSet::empty(cfg.shape);
    for s in t..=last {
        out.union_with(&cfg.excluded_at(s));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(n: usize, q: u32) -> CubeShape {
        CubeShape::new(n, q).unwrap()
    }

    fn digits(s: &str) -> Vec<u32> {
        s.chars().map(|c| c.to_digit(10).unwrap()).collect()
    }

    #[test]
    fn norm_examples() {
        let suffixed = NormSpec::new(shape(4, 4), None, None, &[3]).unwrap();
        assert_eq!(suffixed.norm_digits(&digits("1203")), 2);
        let blocks = NormSpec::new(shape(4, 3), Some(2), Some(2), &[]).unwrap();
        assert_eq!(blocks.norm_digits(&digits("1010")), 2);
        assert_eq!(blocks.norm_digits(&digits("0010")), 0);
        assert_eq!(suffixed.norm_digits(&digits("1202")), 0);
    }

    #[test]
    fn norm_spec_validation() {
        assert!(NormSpec::new(shape(3, 3), Some(2), Some(1), &[1]).is_err());
        assert!(NormSpec::new(shape(3, 3), None, None, &[3]).is_err());
        assert!(NormSpec::new(shape(3, 3), None, Some(1), &[]).is_err());
        assert!(NormSpec::new(shape(3, 3), Some(0), None, &[0, 1]).is_ok());
    }

    #[test]
    fn gates_zero_the_norm() {
        let s = shape(4, 3);
        let spec = NormSpec::new(s, Some(1), Some(1), &[2]).unwrap();
        for v in s.vertices() {
            let x = s.digits(v);
            let gates = x[0] != 0 && x[1] != 0 && x[3] == 2;
            let got = spec.norm(v);
            if got > 0 {
                assert!(gates);
            }
            if !gates {
                assert_eq!(got, 0);
            }
        }
    }

    #[test]
    fn initial_set_examples() {
        let c = LemmaConfig::new(LemmaId::St1, 3, 1, 1, &[]).unwrap();
        let (s, t) = initial_sets(&c);
        assert_eq!((s.to_string(), t.to_string()), ("*0".into(), "0*".into()));
        let c = LemmaConfig::new(LemmaId::St3, 3, 0, 0, &[1, 1]).unwrap();
        let (s, t) = initial_sets(&c);
        assert_eq!((s.to_string(), t.to_string()), ("00".into(), "11".into()));
        let c = LemmaConfig::new(LemmaId::St2, 3, 1, 0, &[2]).unwrap();
        let (s, t) = initial_sets(&c);
        assert_eq!((s.to_string(), t.to_string()), ("*0".into(), "02".into()));
        let c = LemmaConfig::new(LemmaId::St6, 4, 2, 1, &[3, 1]).unwrap();
        let (s, t) = initial_sets(&c);
        assert_eq!(
            (s.to_string(), t.to_string()),
            ("**000".into(), "00*31".into())
        );
    }

    #[test]
    fn lemma_config_validation() {
        assert!(LemmaConfig::new(LemmaId::St2, 3, 1, 1, &[]).is_err());
        assert!(LemmaConfig::new(LemmaId::St2, 3, 1, 1, &[0]).is_err());
        assert!(LemmaConfig::new(LemmaId::St3, 3, 1, 1, &[1, 3]).is_err());
        assert_eq!(
            LemmaConfig::all_marks(LemmaId::St6, 4, 1, 1).unwrap().len(),
            9
        );
    }

    #[test]
    fn st1_lower_examples() {
        let c = LemmaConfig::new(LemmaId::St1, 3, 1, 1, &[]).unwrap();
        let s = c.shape();
        let want = VertexSet::parse(s, ["00", "10", "20", "01", "02"]).unwrap();
        assert_eq!(predicted_lower(&c, 0).unwrap(), want);
        assert!(predicted_lower(&c, 1).unwrap().is_full());
    }

    #[test]
    fn st3_lower_at_three_is_the_square() {
        let c = LemmaConfig::new(LemmaId::St3, 3, 0, 0, &[1, 1]).unwrap();
        assert!(predicted_lower(&c, 3).unwrap().is_full());
        assert!(!predicted_lower(&c, 2)
            .unwrap()
            .contains(c.shape().parse_vertex("22").unwrap()));
        assert!(matches!(
            predicted_lower(&c, 0),
            Err(Error::TimeOutOfRange { .. })
        ));
    }

    #[test]
    fn st4_excluded_example() {
        let c = LemmaConfig::new(LemmaId::St4, 3, 1, 1, &[]).unwrap();
        let want = VertexSet::parse(c.shape(), ["11", "12", "21", "22"]).unwrap();
        assert_eq!(predicted_excluded(&c, 0).unwrap(), want);
        assert!(predicted_excluded(&c, 1).is_err());
        let tiny = LemmaConfig::new(LemmaId::St4, 3, 1, 0, &[]).unwrap();
        assert!(predicted_excluded(&tiny, 0).is_err());
    }

    #[test]
    fn st6_empty_prefix_excludes_nothing() {
        let c = LemmaConfig::new(LemmaId::St6, 3, 0, 0, &[1, 1]).unwrap();
        assert!(predicted_excluded(&c, 1).unwrap().is_empty());
        assert!(predicted_excluded(&c, 0).is_err());
    }

    #[test]
    fn st5_excluded_example_by_enumeration() {
        let c = LemmaConfig::new(LemmaId::St5, 3, 1, 1, &[1]).unwrap();
        let s = c.shape();
        // independent enumeration of ‖x‖_1^1 >= 2 or ‖x‖_1^2 >= 1 over all 27 words
        let mut want = VertexSet::empty(s);
        for v in s.vertices() {
            let x = s.digits(v);
            let count = x[..2].iter().filter(|&&c| c != 0).count();
            let gated = x[0] != 0;
            if gated && ((x[2] == 1 && count >= 2) || (x[2] == 2 && count >= 1)) {
                want.insert(v);
            }
        }
        let mut expected = vec![
            "111", "121", "211", "221", "102", "112", "122", "202", "212", "222",
        ];
        expected.sort_by_key(|w| s.parse_vertex(w).unwrap());
        assert_eq!(want.words(), expected);
        assert_eq!(predicted_excluded(&c, 1).unwrap(), want);
    }

    #[test]
    fn lemma_names_round_trip() {
        for l in LemmaId::ALL {
            assert_eq!(l.name().parse::<LemmaId>().unwrap(), l);
        }
        assert!("st7".parse::<LemmaId>().is_err());
    }
}
