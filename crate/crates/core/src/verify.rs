//! Verification suites: each suite simulates many small instances and
//! compares the outcome with a predicted value or set.
//!
//! Random inputs come from a seeded ChaCha generator and are drawn before any
//! parallel work starts, so reports are identical across execution modes.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra;
use crate::cube::{all_patterns, Automorphism, CubeShape, Pattern, Symbol};
use crate::engine::{self, Simulator, NEVER};
use crate::error::{Error, Result};
use crate::extremal;
use crate::norms::{self, LemmaConfig, LemmaId};
use crate::oracle;
use crate::par::{self, Exec};
use crate::set::VertexSet;

pub const DEFAULT_RNG_SEED: u64 = 0x5eed_2024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Lemma(LemmaId),
    Lemma3,
    Lemma4,
    Lemma5,
    Lemma6,
    Lemma13,
    Formula,
    Monotonicity,
    Oracle,
    Engine,
    All,
}

impl Suite {
    pub const ALL: [Suite; 16] = [
        Suite::Lemma(LemmaId::St1),
        Suite::Lemma(LemmaId::St2),
        Suite::Lemma(LemmaId::St3),
        Suite::Lemma(LemmaId::St4),
        Suite::Lemma(LemmaId::St5),
        Suite::Lemma(LemmaId::St6),
        Suite::Lemma3,
        Suite::Lemma4,
        Suite::Lemma5,
        Suite::Lemma6,
        Suite::Lemma13,
        Suite::Formula,
        Suite::Monotonicity,
        Suite::Oracle,
        Suite::Engine,
        Suite::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma(l) => l.name(),
            Suite::Lemma3 => "lemma3",
            Suite::Lemma4 => "lemma4",
            Suite::Lemma5 => "lemma5",
            Suite::Lemma6 => "lemma6",
            Suite::Lemma13 => "lemma13",
            Suite::Formula => "formula",
            Suite::Monotonicity => "monotonicity",
            Suite::Oracle => "oracle",
            Suite::Engine => "engine",
            Suite::All => "all",
        }
    }

    fn default_qs(self) -> Vec<u32> {
        match self {
            Suite::Lemma4 | Suite::Lemma5 | Suite::Lemma6 => vec![3],
            _ => vec![3, 4],
        }
    }

    fn default_dims(self) -> (usize, usize) {
        match self {
            Suite::Lemma3 | Suite::Lemma13 => (1, 3),
            Suite::Lemma4 | Suite::Lemma6 => (1, 2),
            Suite::Lemma5 => (3, 4),
            Suite::Formula => (0, 6),
            Suite::Monotonicity => (0, 4),
            Suite::Oracle => (0, 3),
            _ => (0, 0),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown suite '{s}'")))
    }
}

/// Overrides for a suite run; absent fields take per-suite defaults.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteParams {
    pub q: Option<u32>,
    pub n: Option<usize>,
    pub max_n: Option<usize>,
    pub k: Option<usize>,
    pub l: Option<usize>,
    pub samples: Option<usize>,
    pub cap: Option<usize>,
    pub rng_seed: u64,
    pub budget: u128,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            q: None,
            n: None,
            max_n: None,
            k: None,
            l: None,
            samples: None,
            cap: None,
            rng_seed: DEFAULT_RNG_SEED,
            budget: oracle::DEFAULT_BUDGET,
            exec: Exec::default(),
        }
    }
}

impl SuiteParams {
    fn qs(&self, suite: Suite) -> Vec<u32> {
        self.q.map_or_else(|| suite.default_qs(), |q| vec![q])
    }

    fn dims(&self, suite: Suite) -> Vec<usize> {
        if let Some(n) = self.n {
            return vec![n];
        }
        let (lo, hi) = suite.default_dims();
        (lo..=self.max_n.unwrap_or(hi)).collect()
    }

    fn samples(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }

    fn rng(&self, salt: &str) -> ChaCha8Rng {
        let mut seed = self.rng_seed;
        for b in salt.bytes() {
            seed = seed.rotate_left(7) ^ u64::from(b);
        }
        ChaCha8Rng::seed_from_u64(seed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub key: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub skipped: bool,
    pub items: u64,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl CheckResult {
    fn new(
        key: String,
        items: u64,
        counterexample: Option<Value>,
        detail: impl Into<String>,
    ) -> Self {
        CheckResult {
            key,
            passed: counterexample.is_none(),
            skipped: false,
            items,
            detail: detail.into(),
            counterexample,
        }
    }

    fn skipped(key: String, detail: impl Into<String>) -> Self {
        CheckResult {
            key,
            passed: true,
            skipped: true,
            items: 0,
            detail: detail.into(),
            counterexample: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub items: u64,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    fn from_checks(suite: Suite, checks: Vec<CheckResult>) -> Self {
        SuiteReport {
            suite: suite.name().to_string(),
            passed: checks.iter().all(|c| c.passed),
            items: checks.iter().map(|c| c.items).sum(),
            checks,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub fn run_suite(suite: Suite, params: &SuiteParams) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Lemma(id) => lemma_suite(id, params)?,
        Suite::Lemma3 => pair_suite(suite, params, false)?,
        Suite::Lemma13 => pair_suite(suite, params, true)?,
        Suite::Lemma4 => lemma4_suite(params)?,
        Suite::Lemma5 => lemma5_suite(params)?,
        Suite::Lemma6 => lemma6_suite(params)?,
        Suite::Formula => formula_suite(params)?,
        Suite::Monotonicity => monotonicity_suite(params)?,
        Suite::Oracle => oracle_suite(params)?,
        Suite::Engine => engine_suite(params)?,
        Suite::All => {
            let mut all = Vec::new();
            for s in Suite::ALL.into_iter().filter(|&s| s != Suite::All) {
                all.extend(run_suite(s, params)?.checks);
            }
            all
        }
    };
    Ok(SuiteReport::from_checks(suite, checks))
}

fn words(s: &VertexSet) -> Value {
    json!(s.words())
}

/// First counterexample in input order, or `None`.
fn first_failure(results: Vec<Result<Option<Value>>>) -> Result<Option<Value>> {
    for r in results {
        if let Some(v) = r? {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

fn new_sim(shape: CubeShape) -> Simulator {
    Simulator::new(shape, 2).expect("threshold 2 is valid")
}

// ---- lemmas on norm-defined sets ----

/// Simulates one lemma configuration and compares every in-range step with
/// the predicted infected and excluded sets.
pub fn check_lemma_config(cfg: &LemmaConfig) -> Result<CheckResult> {
    let record = engine::run(&norms::initial_seed(cfg), 2)?;
    let horizon = record.rounds().max((cfg.k() + cfg.l() + 3) as u32);
    let mut items = 0;
    let mut failure = None;
    if let Some(range) = cfg.lower_range() {
        for t in range.up_to(horizon) {
            items += 1;
            let missing = norms::predicted_lower(cfg, t)?.difference(&record.infected_by(t));
            if !missing.is_empty() {
                failure = Some(json!({"t": t, "kind": "lower", "missing": words(&missing)}));
                break;
            }
        }
    }
    if let (None, Some(range)) = (&failure, cfg.excluded_range()) {
        for t in range.up_to(horizon) {
            items += 1;
            let hit = norms::predicted_excluded(cfg, t)?.intersection(&record.infected_by(t));
            if !hit.is_empty() {
                failure = Some(json!({"t": t, "kind": "excluded", "infected": words(&hit)}));
                break;
            }
        }
    }
    let detail = format!("{items} steps, process ran {} rounds", record.rounds());
    Ok(CheckResult::new(cfg.key(), items, failure, detail))
}

fn lemma_suite(id: LemmaId, params: &SuiteParams) -> Result<Vec<CheckResult>> {
    let ks: Vec<usize> = params.k.map_or_else(|| (0..=2).collect(), |k| vec![k]);
    let ls: Vec<usize> = params.l.map_or_else(|| (0..=2).collect(), |l| vec![l]);
    let mut configs = Vec::new();
    for q in params.qs(Suite::Lemma(id)) {
        for &k in &ks {
            for &l in &ls {
                configs.extend(LemmaConfig::all_marks(id, q, k, l)?);
            }
        }
    }
    par::map(params.exec, configs, |cfg| check_lemma_config(&cfg))
        .into_iter()
        .collect()
}

// ---- two-subcube closure and timing ----

fn pair_suite(suite: Suite, params: &SuiteParams, timing: bool) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    for q in params.qs(suite) {
        for n in params.dims(suite) {
            let shape = CubeShape::new(n, q)?;
            checks.push(check_pairs(shape, timing, params.exec)?);
        }
    }
    Ok(checks)
}

#[derive(Default)]
struct PairTally {
    checked: u64,
    skipped: u64,
    failure: Option<Value>,
}

/// All unordered pattern pairs at distance at most 2. Closure mode checks
/// `<Q^x ∪ Q^y> = Q^{x∨y}`; timing mode also compares the number of rounds
/// with [`algebra::two_cube_time`] where its hypothesis holds.
fn check_pairs(shape: CubeShape, timing: bool, exec: Exec) -> Result<CheckResult> {
    let patterns: Vec<Pattern> = all_patterns(shape).collect();
    let members: Vec<VertexSet> = patterns.iter().map(VertexSet::from_pattern).collect();
    let tallies = par::map_init(
        exec,
        (0..patterns.len()).collect(),
        || new_sim(shape),
        |sim, i| -> Result<PairTally> {
            let mut tally = PairTally::default();
            for j in i..patterns.len() {
                let (x, y) = (&patterns[i], &patterns[j]);
                if x.distance(y)? > 2 {
                    continue;
                }
                let expected_time = if timing {
                    match algebra::two_cube_time(x, y) {
                        Ok(t) => Some(t),
                        Err(Error::Hypothesis(_)) => {
                            tally.skipped += 1;
                            continue;
                        }
                        Err(e) => return Err(e),
                    }
                } else {
                    None
                };
                tally.checked += 1;
                let join = x.join(y)?;
                let summary = sim.run_set(&members[i].union(&members[j]))?;
                let times = sim.times();
                let spans_join = summary.infected == join.size()
                    && join.members().all(|v| times[v.index()] != NEVER);
                let time_ok = expected_time.is_none_or(|t| t == summary.rounds);
                if !(spans_join && time_ok) {
                    tally.failure = Some(json!({
                        "x": x.to_string(),
                        "y": y.to_string(),
                        "join": join.to_string(),
                        "closure_is_join": spans_join,
                        "rounds": summary.rounds,
                        "predicted_rounds": expected_time,
                    }));
                    break;
                }
            }
            Ok(tally)
        },
    );
    let mut total = PairTally::default();
    for t in tallies {
        let t = t?;
        total.checked += t.checked;
        total.skipped += t.skipped;
        if total.failure.is_none() {
            total.failure = t.failure;
        }
    }
    let name = if timing { "lemma13" } else { "lemma3" };
    let key = format!("{name} q={} n={}", shape.q(), shape.n());
    let detail = if timing {
        format!(
            "{} pattern pairs timed, {} outside the hypothesis",
            total.checked, total.skipped
        )
    } else {
        format!("{} pattern pairs closed to their join", total.checked)
    };
    Ok(CheckResult::new(key, total.checked, total.failure, detail))
}

// ---- closed sets ----

fn random_set(rng: &mut ChaCha8Rng, shape: CubeShape, density: f64) -> VertexSet {
    let mut s = VertexSet::empty(shape);
    for v in shape.vertices() {
        if rng.gen_bool(density) {
            s.insert(v);
        }
    }
    s
}

/// Every subset when the cube has at most 16 vertices, `samples` random
/// subsets otherwise.
fn subsets(shape: CubeShape, samples: usize, rng: &mut ChaCha8Rng) -> (Vec<VertexSet>, bool) {
    if shape.len() <= oracle::EXHAUSTIVE_LIMIT {
        let all = (0..1u64 << shape.len())
            .map(|m| VertexSet::from_mask(shape, m))
            .collect();
        return (all, true);
    }
    let sets = (0..samples)
        .map(|_| {
            let p = rng.gen_range(0.02..0.5);
            random_set(rng, shape, p)
        })
        .collect();
    (sets, false)
}

/// Checks the closed-set structure on one set: closedness matches the
/// closure fixpoint, closed sets split into subcubes pairwise at distance at
/// least 3, and a seed spanning an l-dimensional subcube has `>= l/2 + 1`
/// vertices.
fn check_closed_structure(s: &VertexSet) -> Result<Option<Value>> {
    let closure = engine::closure(s, 2)?;
    let closed = algebra::is_closed(s);
    if closed != (closure == *s) {
        return Ok(Some(
            json!({"set": words(s), "is_closed": closed, "closure": words(&closure)}),
        ));
    }
    if closed {
        let d = algebra::decompose_closed(s)?;
        let mut union = VertexSet::empty(s.shape());
        let mut problem = None;
        for (i, c) in d.components.iter().enumerate() {
            let m = VertexSet::from_pattern(c);
            if !union.is_disjoint(&m) {
                problem = Some("components overlap");
            }
            union.union_with(&m);
            for other in &d.components[i + 1..] {
                if c.distance(other)? < 3 {
                    problem = Some("components closer than 3");
                }
            }
        }
        if union != *s {
            problem = Some("components do not cover the set");
        }
        if problem.is_some() || !d.valid {
            let comps: Vec<String> = d.components.iter().map(Pattern::to_string).collect();
            return Ok(Some(json!({
                "set": words(s),
                "components": comps,
                "problem": problem.unwrap_or("decomposition flagged invalid"),
            })));
        }
    }
    let d = algebra::decompose_closed(&closure)?;
    if let [cube] = d.components.as_slice() {
        if 2 * s.len() < cube.dim() + 2 {
            return Ok(Some(
                json!({"set": words(s), "spans": cube.to_string(), "size": s.len()}),
            ));
        }
    }
    Ok(None)
}

fn lemma4_suite(params: &SuiteParams) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    for q in params.qs(Suite::Lemma4) {
        for n in params.dims(Suite::Lemma4) {
            let shape = CubeShape::new(n, q)?;
            let mut rng = params.rng(&format!("lemma4 {q} {n}"));
            let (sets, exhaustive) = subsets(shape, params.samples(200), &mut rng);
            let items = sets.len() as u64;
            let failure =
                first_failure(par::map(params.exec, sets, |s| check_closed_structure(&s)))?;
            let mode = if exhaustive { "all" } else { "random" };
            checks.push(CheckResult::new(
                format!("lemma4 q={q} n={n}"),
                items,
                failure,
                format!("{items} subsets ({mode}) classified"),
            ));
        }
    }
    Ok(checks)
}

// ---- internally spanned subcubes ----

/// A random spanning seed, pruned to a containment-minimal one half the time.
pub fn random_spanning_seed(rng: &mut ChaCha8Rng, shape: CubeShape) -> Result<VertexSet> {
    let mut sim = new_sim(shape);
    loop {
        let p = rng.gen_range(0.05..0.5);
        let mut s = random_set(rng, shape, p);
        if !sim.run_set(&s)?.percolated {
            continue;
        }
        if rng.gen_bool(0.5) {
            let mut order = s.to_vec();
            order.shuffle(rng);
            for v in order {
                s.remove(v);
                if !sim.run_set(&s)?.percolated {
                    s.insert(v);
                }
            }
        }
        return Ok(s);
    }
}

fn spanning_inputs(
    shape: CubeShape,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<VertexSet>, bool)> {
    if shape.len() <= oracle::EXHAUSTIVE_LIMIT {
        let mut sim = new_sim(shape);
        let mut out = Vec::new();
        for m in 0..1u64 << shape.len() {
            let s = VertexSet::from_mask(shape, m);
            if sim.run_set(&s)?.percolated {
                out.push(s);
            }
        }
        return Ok((out, true));
    }
    let seeds = (0..samples)
        .map(|_| random_spanning_seed(rng, shape))
        .collect::<Result<_>>()?;
    Ok((seeds, false))
}

fn lemma5_suite(params: &SuiteParams) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    for q in params.qs(Suite::Lemma5) {
        for n in params.dims(Suite::Lemma5) {
            let shape = CubeShape::new(n, q)?;
            let mut rng = params.rng(&format!("lemma5 {q} {n}"));
            let (seeds, exhaustive) = spanning_inputs(shape, params.samples(200), &mut rng)?;
            let items = seeds.len() as u64;
            let results = par::map(params.exec, seeds, |s| -> Result<Option<Value>> {
                let dims = algebra::spanned_dim_scan(&s)?;
                Ok(algebra::spanned_dims_gap(&dims, n)
                    .map(|k| json!({"seed": words(&s), "spanned_dims": dims, "k": k})))
            });
            let mode = if exhaustive { "all" } else { "random" };
            checks.push(CheckResult::new(
                format!("lemma5 q={q} n={n}"),
                items,
                first_failure(results)?,
                format!("{items} spanning seeds ({mode}) scanned"),
            ));
        }
    }
    Ok(checks)
}

fn lemma6_suite(params: &SuiteParams) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    for q in params.qs(Suite::Lemma6) {
        for n in params.dims(Suite::Lemma6) {
            let shape = CubeShape::new(n, q)?;
            let mut rng = params.rng(&format!("lemma6 {q} {n}"));
            let (seeds, exhaustive) = spanning_inputs(shape, params.samples(50), &mut rng)?;
            let items = seeds.len() as u64;
            let results = par::map(params.exec, seeds, |s| -> Result<Option<Value>> {
                Ok(match algebra::find_span_witness(&s)? {
                    None => Some(json!({"seed": words(&s), "problem": "no nested chain found"})),
                    Some(w) => w
                        .verify(&s)
                        .err()
                        .map(|e| json!({"seed": words(&s), "witness": w, "problem": e})),
                })
            });
            let mode = if exhaustive { "all" } else { "random" };
            checks.push(CheckResult::new(
                format!("lemma6 q={q} n={n}"),
                items,
                first_failure(results)?,
                format!("{items} spanning seeds ({mode}) given nested chains"),
            ));
        }
    }
    Ok(checks)
}

// ---- maximum time ----

pub const IDENTITY_MAX_N: u64 = 30;

/// Arithmetic checks on the closed form: base values, the step-3 recursion,
/// monotonicity in `n` and agreement with the recursive evaluation.
pub fn check_formula_identities(q: u32, max_n: u64) -> Result<CheckResult> {
    let m = |n| extremal::max_time_formula(q, n);
    let step = if q == 3 { 1 } else { 0 };
    let mut failure = None;
    let mut items = 0;
    for n in 0..=max_n {
        items += 1;
        let v = m(n)?;
        let problem = if n < 3 && v != [0, 1, 3][n as usize] {
            Some("base value")
        } else if n >= 3 && v - m(n - 3)? != 2 * n - step {
            Some("step-3 recursion")
        } else if v > m(n + 1)? {
            Some("monotonicity")
        } else if v != extremal::max_time_recursive(q, n)? {
            Some("recursive evaluation")
        } else {
            None
        };
        if let Some(p) = problem {
            failure = Some(json!({"n": n, "value": v, "problem": p}));
            break;
        }
    }
    Ok(CheckResult::new(
        format!("formula identities q={q}"),
        items,
        failure,
        format!("n <= {max_n}"),
    ))
}

/// Simulates the recursive construction and compares with the closed form;
/// also checks that dropping any construction piece breaks spanning.
pub fn check_construction(q: u32, n: usize) -> Result<CheckResult> {
    let seed = extremal::build_extremal_seed(q, n)?;
    let time = engine::percolation_time(&seed.vertices);
    let expected = extremal::max_time_formula(q, n as u64)?;
    let mut failure = None;
    if time.map(u64::from) != Some(expected) {
        failure =
            Some(json!({"simulated": time, "formula": expected, "seed": words(&seed.vertices)}));
    } else if seed.pieces.len() > 1 {
        for i in 0..seed.pieces.len() {
            if engine::percolation_time(&seed.without_piece(i)).is_some() {
                failure = Some(json!({"redundant_piece": seed.pieces[i]}));
                break;
            }
        }
    }
    Ok(CheckResult::new(
        format!("construction q={q} n={n}"),
        1 + seed.pieces.len() as u64,
        failure,
        format!("{} seed vertices, time {expected}", seed.vertices.len()),
    ))
}

fn formula_suite(params: &SuiteParams) -> Result<Vec<CheckResult>> {
    let qs = params.qs(Suite::Formula);
    let dims = params.dims(Suite::Formula);
    let mut checks = Vec::new();
    for &q in &qs {
        let top = dims.iter().copied().max().unwrap_or(0) as u64;
        checks.push(check_formula_identities(q, top.max(IDENTITY_MAX_N))?);
    }
    let jobs: Vec<(u32, usize)> = qs
        .iter()
        .flat_map(|&q| dims.iter().map(move |&n| (q, n)))
        .collect();
    let constructions = par::map(params.exec, jobs, |(q, n)| check_construction(q, n));
    for c in constructions {
        checks.push(c?);
    }
    Ok(checks)
}

fn check_lift(seed: &VertexSet) -> Result<Option<Value>> {
    let lifted = extremal::lift_set(seed)?;
    let (a, b) = (engine::run(seed, 2)?, engine::run(&lifted, 2)?);
    let same_closure = extremal::lift_set(&a.closure())? == b.closure();
    if a.rounds() != b.rounds() || !same_closure {
        return Ok(Some(json!({
            "seed": words(seed),
            "rounds": a.rounds(),
            "lifted_rounds": b.rounds(),
            "closure_lifts": same_closure,
        })));
    }
    Ok(None)
}

fn monotonicity_suite(params: &SuiteParams) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    for q in params.qs(Suite::Monotonicity) {
        let mut failure = None;
        for n in 0..IDENTITY_MAX_N {
            let (a, b) = (
                extremal::max_time_formula(q, n)?,
                extremal::max_time_formula(q, n + 1)?,
            );
            if a > b {
                failure = Some(json!({"n": n, "value": a, "next": b}));
                break;
            }
        }
        checks.push(CheckResult::new(
            format!("monotonicity formula q={q}"),
            IDENTITY_MAX_N,
            failure,
            format!("M(n) <= M(n+1) for n < {IDENTITY_MAX_N}"),
        ));

        for n in params.dims(Suite::Monotonicity) {
            let seed = extremal::build_extremal_seed(q, n)?;
            let mut rng = params.rng(&format!("lift {q} {n}"));
            let shape = seed.shape;
            let mut inputs = vec![seed.vertices.clone()];
            inputs.extend((0..params.samples(50)).map(|_| {
                let p = rng.gen_range(0.05..0.6);
                random_set(&mut rng, shape, p)
            }));
            let items = inputs.len() as u64;
            let failure = first_failure(par::map(params.exec, inputs, |s| check_lift(&s)))?;
            checks.push(CheckResult::new(
                format!("monotonicity lift q={q} n={n}"),
                items,
                failure,
                "construction and random seeds keep their time and closure when lifted",
            ));
        }
    }
    Ok(checks)
}

fn oracle_suite(params: &SuiteParams) -> Result<Vec<CheckResult>> {
    let cap = params.cap.unwrap_or(4);
    let mut checks = Vec::new();
    for q in params.qs(Suite::Oracle) {
        for n in params.dims(Suite::Oracle) {
            let shape = CubeShape::new(n, q)?;
            let construction = extremal::build_extremal_seed(q, n)?;
            let built = engine::percolation_time(&construction.vertices);
            let formula = extremal::max_time_formula(q, n as u64)?;
            let exhaustive = shape.len() <= oracle::EXHAUSTIVE_LIMIT;
            let report = if exhaustive {
                oracle::max_time_exhaustive(shape, params.exec)?
            } else if oracle::capped_work_estimate(shape, cap, 1) <= params.budget {
                oracle::max_time_capped(shape, cap, params.budget, params.exec)?
            } else {
                checks.push(CheckResult::skipped(
                    format!("oracle q={q} n={n}"),
                    format!("cap {cap} exceeds the work budget"),
                ));
                continue;
            };
            let found = report.max_time;
            let mut problems = Vec::new();
            if exhaustive && found.map(u64::from) != Some(formula) {
                problems.push("full enumeration differs from the closed form");
            }
            if !exhaustive && found.is_some_and(|t| u64::from(t) > formula) {
                problems.push("capped search beats the closed form");
            }
            if built.is_none() || (exhaustive && built > found) {
                problems.push("construction slower than the oracle maximum");
            }
            if !exhaustive && construction.vertices.len() <= cap && found < built {
                problems.push("capped search missed the construction");
            }
            if report
                .witnesses
                .iter()
                .any(|w| engine::percolation_time(w) != found)
            {
                problems.push("witness does not re-verify");
            }
            if report.smallest_spanning_size.is_some_and(|s| 2 * s < n + 2) {
                problems.push("spanning seed smaller than n/2 + 1");
            }
            let failure = (!problems.is_empty()).then(|| {
                json!({
                    "problems": problems,
                    "oracle": found,
                    "construction": built,
                    "formula": formula,
                })
            });
            let mode = if exhaustive { "full" } else { "capped" };
            checks.push(CheckResult::new(
                format!("oracle q={q} n={n}"),
                report.seeds_examined,
                failure,
                format!(
                    "{mode} search over {} seeds: max time {found:?}, construction {built:?}, formula {formula}",
                    report.seeds_examined
                ),
            ));
        }
    }
    Ok(checks)
}

// ---- engine properties ----

/// Shapes with at most `3^5` vertices used for randomized engine trials.
pub fn small_shapes() -> Vec<CubeShape> {
    let mut out = Vec::new();
    for q in 2..=6u32 {
        for n in 1..=7usize {
            if u64::from(q).pow(n as u32) <= 243 {
                out.push(CubeShape::new(n, q).expect("small shape"));
            }
        }
    }
    out
}

fn random_automorphism(rng: &mut ChaCha8Rng, shape: CubeShape) -> Automorphism {
    let mut perm: Vec<usize> = (0..shape.n()).collect();
    perm.shuffle(rng);
    let relabel = (0..shape.n())
        .map(|_| {
            let mut r: Vec<u32> = (0..shape.q()).collect();
            r.shuffle(rng);
            r
        })
        .collect();
    Automorphism::new(shape, perm, relabel).expect("valid automorphism")
}

fn random_pattern(rng: &mut ChaCha8Rng, shape: CubeShape) -> Pattern {
    let symbols = (0..shape.n())
        .map(|_| {
            if rng.gen_bool(0.5) {
                Symbol::Star
            } else {
                Symbol::Fixed(rng.gen_range(0..shape.q()))
            }
        })
        .collect();
    Pattern::new(shape, symbols).expect("symbols in range")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EngineProperty {
    SeedMonotonicity,
    Equivariance,
    ClosureOperator,
    Tightness,
    TwoNeighbours,
    SubcubeAbsorption,
}

impl EngineProperty {
    pub const ALL: [EngineProperty; 6] = [
        EngineProperty::SeedMonotonicity,
        EngineProperty::Equivariance,
        EngineProperty::ClosureOperator,
        EngineProperty::Tightness,
        EngineProperty::TwoNeighbours,
        EngineProperty::SubcubeAbsorption,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EngineProperty::SeedMonotonicity => "seed-monotonicity",
            EngineProperty::Equivariance => "equivariance",
            EngineProperty::ClosureOperator => "closure-operator",
            EngineProperty::Tightness => "tightness",
            EngineProperty::TwoNeighbours => "two-neighbours",
            EngineProperty::SubcubeAbsorption => "subcube-absorption",
        }
    }
}

struct Trial {
    a: VertexSet,
    b: VertexSet,
    auto: Automorphism,
    pattern: Pattern,
    r: u32,
}

fn draw_trial(rng: &mut ChaCha8Rng, shapes: &[CubeShape]) -> Trial {
    let shape = *shapes.choose(rng).expect("nonempty shape list");
    let p = rng.gen_range(0.02..0.4);
    let a = random_set(rng, shape, p);
    let extra_density = rng.gen_range(0.0..0.2);
    let extra = random_set(rng, shape, extra_density);
    let pattern = random_pattern(rng, shape);
    let inside =
        random_set(rng, shape, p.max(0.2)).intersection(&VertexSet::from_pattern(&pattern));
    let (a, b) = (a.clone(), a.union(&extra));
    Trial {
        a,
        b: b.union(&inside),
        auto: random_automorphism(rng, shape),
        pattern,
        r: rng.gen_range(1..=3),
    }
}

fn check_trial(prop: EngineProperty, t: &Trial) -> Result<Option<Value>> {
    let shape = t.a.shape();
    let fail = |what: &str| {
        Ok(Some(
            json!({"seed": words(&t.a), "shape": shape, "problem": what}),
        ))
    };
    match prop {
        EngineProperty::SeedMonotonicity => {
            let (ra, rb) = (engine::run(&t.a, t.r)?, engine::run(&t.b, t.r)?);
            let ok = shape
                .vertices()
                .all(|v| match (ra.time_of(v), rb.time_of(v)) {
                    (Some(x), Some(y)) => y <= x,
                    (Some(_), None) => false,
                    (None, _) => true,
                });
            if !ok {
                return fail("a larger seed infected a vertex later");
            }
        }
        EngineProperty::Equivariance => {
            let ra = engine::run(&t.a, t.r)?;
            let rm = engine::run(&t.a.map(&t.auto), t.r)?;
            if ra.rounds() != rm.rounds()
                || shape
                    .vertices()
                    .any(|v| ra.time_of(v) != rm.time_of(t.auto.apply(v)))
            {
                return fail("timestamps do not follow the automorphism");
            }
        }
        EngineProperty::ClosureOperator => {
            let ca = engine::closure(&t.a, t.r)?;
            let cb = engine::closure(&t.b, t.r)?;
            if engine::closure(&ca, t.r)? != ca {
                return fail("closure not idempotent");
            }
            if !t.a.is_subset(&ca) {
                return fail("closure not extensive");
            }
            if !ca.is_subset(&cb) {
                return fail("closure not monotone");
            }
        }
        EngineProperty::Tightness => {
            let rec = engine::run(&t.a, t.r)?;
            let mut max_time = 0;
            for v in shape.vertices() {
                let Some(s) = rec.time_of(v) else { continue };
                max_time = max_time.max(s);
                if (s == 0) != t.a.contains(v) {
                    return fail("time 0 does not match the seed");
                }
                if s == 0 {
                    continue;
                }
                let (mut before, mut well_before) = (0, 0);
                shape.for_each_neighbor(v, |u| {
                    if let Some(tu) = rec.time_of(u) {
                        before += u32::from(tu < s);
                        well_before += u32::from(tu + 1 < s);
                    }
                });
                if before < t.r || well_before >= t.r {
                    return fail("a vertex was infected too early or too late");
                }
            }
            if max_time != rec.rounds() {
                return fail("rounds differ from the last timestamp");
            }
        }
        EngineProperty::TwoNeighbours => {
            let c = engine::closure(&t.a, 2)?;
            for v in shape.vertices() {
                let mut k = 0;
                shape.for_each_neighbor(v, |u| k += u32::from(t.a.contains(u)));
                if k >= 2 && !c.contains(v) {
                    return fail("a vertex with two seeded neighbours stayed healthy");
                }
            }
        }
        EngineProperty::SubcubeAbsorption => {
            let cube = VertexSet::from_pattern(&t.pattern);
            let inside = t.b.intersection(&cube);
            if !engine::closure(&inside, 2)?.is_subset(&cube) {
                return fail("closure escaped the subcube");
            }
        }
    }
    Ok(None)
}

fn engine_suite(params: &SuiteParams) -> Result<Vec<CheckResult>> {
    let shapes = match (params.q, params.n) {
        (Some(q), Some(n)) => vec![CubeShape::new(n, q)?],
        _ => small_shapes()
            .into_iter()
            .filter(|s| params.q.is_none_or(|q| q == s.q()) && params.n.is_none_or(|n| n == s.n()))
            .collect(),
    };
    if shapes.is_empty() {
        return Err(Error::Parse("no shape matches the given q and n".into()));
    }
    let trials = params.samples(1000);
    let mut checks = Vec::new();
    for prop in EngineProperty::ALL {
        let mut rng = params.rng(prop.name());
        let inputs: Vec<Trial> = (0..trials).map(|_| draw_trial(&mut rng, &shapes)).collect();
        let failure = first_failure(par::map(params.exec, inputs, |t| check_trial(prop, &t)))?;
        checks.push(CheckResult::new(
            format!("engine {}", prop.name()),
            trials as u64,
            failure,
            format!("{trials} random trials over {} shapes", shapes.len()),
        ));
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> SuiteParams {
        SuiteParams {
            samples: Some(20),
            ..SuiteParams::default()
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("lemma99".parse::<Suite>().is_err());
    }

    #[test]
    fn lemma_suites_pass() {
        for id in LemmaId::ALL {
            let r = run_suite(Suite::Lemma(id), &quick()).unwrap();
            assert!(r.passed, "{:?}", r.failures().collect::<Vec<_>>());
            assert!(r.items > 0);
        }
    }

    #[test]
    fn st4_single_config() {
        let p = SuiteParams {
            q: Some(3),
            k: Some(2),
            l: Some(2),
            ..quick()
        };
        let r = run_suite(Suite::Lemma(LemmaId::St4), &p).unwrap();
        assert!(r.passed);
        assert_eq!(r.checks.len(), 1);
    }

    #[test]
    fn pair_suites_pass() {
        let p = SuiteParams {
            max_n: Some(2),
            ..quick()
        };
        for s in [Suite::Lemma3, Suite::Lemma13] {
            let r = run_suite(s, &p).unwrap();
            assert!(r.passed, "{:?}", r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn structural_suites_pass() {
        for s in [Suite::Lemma4, Suite::Lemma5, Suite::Lemma6, Suite::Engine] {
            let r = run_suite(s, &quick()).unwrap();
            assert!(r.passed, "{s}: {:?}", r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn extremal_suites_pass() {
        let p = SuiteParams {
            max_n: Some(4),
            ..quick()
        };
        for s in [Suite::Formula, Suite::Monotonicity, Suite::Oracle] {
            let r = run_suite(s, &p).unwrap();
            assert!(r.passed, "{s}: {:?}", r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn reports_do_not_depend_on_exec() {
        let seq = SuiteParams {
            exec: Exec::Sequential,
            ..quick()
        };
        let par = SuiteParams {
            exec: Exec::Parallel,
            ..quick()
        };
        for s in [Suite::Lemma5, Suite::Engine, Suite::Lemma(LemmaId::St3)] {
            assert_eq!(run_suite(s, &seq).unwrap(), run_suite(s, &par).unwrap());
        }
    }

    #[test]
    fn failing_check_carries_counterexample() {
        let c = CheckResult::new("x".into(), 1, Some(json!({"t": 2})), "");
        assert!(!c.passed);
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["counterexample"]["t"], 2);
        assert!(v.get("skipped").is_none());
    }
}
