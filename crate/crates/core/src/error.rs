use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("alphabet size q={0} is not supported (need q >= 2)")]
    InvalidAlphabet(u32),

    #[error("cube Q_{{{n},{q}}} has more than {limit} vertices")]
    ShapeTooLarge { n: usize, q: u32, limit: u64 },

    #[error("vertex code {code} is out of range for a cube with {len} vertices")]
    VertexOutOfRange { code: u64, len: usize },

    #[error("symbol {symbol} at position {position} is not below q={q}")]
    InvalidSymbol {
        symbol: u32,
        position: usize,
        q: u32,
    },

    #[error("shapes differ: Q_{{{left_n},{left_q}}} vs Q_{{{right_n},{right_q}}}")]
    ShapeMismatch {
        left_n: usize,
        left_q: u32,
        right_n: usize,
        right_q: u32,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("threshold r={0} is not supported (need 1 <= r <= 255)")]
    InvalidThreshold(u32),

    #[error("process ran past the 16-bit timestamp range")]
    TimestampOverflow,

    #[error("invalid norm parameters: {0}")]
    InvalidNorm(String),

    #[error("invalid lemma configuration: {0}")]
    InvalidLemma(String),

    #[error("t={t} is outside the range covered by {lemma} ({range})")]
    TimeOutOfRange {
        lemma: &'static str,
        t: u32,
        range: String,
    },

    #[error("set is not closed under 2-neighbour percolation")]
    NotClosed,

    #[error("seed does not span the cube")]
    NotSpanning,

    #[error("process did not percolate")]
    NotPercolated,

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("closed form is only stated for q >= 3, got q={0}")]
    FormulaScope(u32),

    #[error("{what}: {estimate} exceeds the guard of {limit}")]
    GuardExceeded {
        what: &'static str,
        estimate: u128,
        limit: u128,
    },

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

impl Error {
    /// Resource guards are reported separately from usage errors by the CLI.
    pub fn is_resource_guard(&self) -> bool {
        matches!(
            self,
            Error::ShapeTooLarge { .. } | Error::GuardExceeded { .. }
        )
    }
}
