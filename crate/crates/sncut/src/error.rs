use thiserror::Error;

/// Errors produced by graph construction, spectral routines, rounding, and
/// metric evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(usize),

    #[error("conflicting duplicate edge ({i}, {j}): {first} vs {second}")]
    ConflictingEdge {
        i: usize,
        j: usize,
        first: String,
        second: String,
    },

    #[error("node {0} is isolated (zero signed degree)")]
    IsolatedVertex(usize),

    #[error("cluster {0} is empty")]
    EmptyCluster(usize),

    #[error("cluster {0} has zero volume")]
    ZeroVolume(usize),

    #[error("invalid cluster count {k} for {n} nodes")]
    BadK { k: usize, n: usize },

    #[error("invalid parameter {name}: {reason}")]
    BadParameter { name: &'static str, reason: String },

    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),

    #[error("pair ({0:?}, {1:?}) listed as both synonym and antonym")]
    ConflictingPair(String, String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("iteration did not converge: {0}")]
    Convergence(String),

    #[error("rows are degenerate: could not select {k} independent rows")]
    DegenerateRows { k: usize },

    #[error("rank-deficient cross matrix in rotation fit")]
    RankDeficient,

    #[error("instance too large for exhaustive search: n = {n} exceeds {max}")]
    TooLarge { n: usize, max: usize },

    #[error("entropy is undefined for a single gold class")]
    SingleClass,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable tag for each variant, used by the CLI when
    /// emitting structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NodeOutOfRange { .. } => "node_out_of_range",
            Error::SelfLoop(_) => "self_loop",
            Error::ConflictingEdge { .. } => "conflicting_edge",
            Error::IsolatedVertex(_) => "isolated_vertex",
            Error::EmptyCluster(_) => "empty_cluster",
            Error::ZeroVolume(_) => "zero_volume",
            Error::BadK { .. } => "bad_k",
            Error::BadParameter { .. } => "bad_parameter",
            Error::DuplicateLabel(_) => "duplicate_label",
            Error::ConflictingPair(_, _) => "conflicting_pair",
            Error::Parse { .. } => "parse",
            Error::Convergence(_) => "convergence",
            Error::DegenerateRows { .. } => "degenerate_rows",
            Error::RankDeficient => "rank_deficient",
            Error::TooLarge { .. } => "too_large",
            Error::SingleClass => "single_class",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
