use thiserror::Error;

/// Errors produced by network construction, algebra reduction and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: network has no nodes")]
    EmptyNetwork,
    #[error("input error: input map for arrow `{label}` sends node {node} to {target}, outside 1..={node_count}")]
    IndexOutOfRange {
        label: String,
        node: usize,
        target: usize,
        node_count: usize,
    },
    #[error("input error: duplicate arrow label `{0}`")]
    DuplicateLabel(String),
    #[error("input error: monoid closure exceeded the cap of {cap} elements")]
    ClosureCapExceeded { cap: usize },
    #[error("input error: arrow labels do not match: {0}")]
    LabelMismatch(String),
    #[error("input error: coefficient block dimensions do not match ({0} vs {1})")]
    DimMismatch(usize, usize),
    #[error("input error: matrix size {size} is not a multiple of the expected block count {blocks}")]
    SizeMismatch { size: usize, blocks: usize },
    #[error("input error: partition is not balanced for this network")]
    NotBalanced,
    #[error("input error: network has {0} nodes, above the enumeration gate of {1}")]
    TooLarge(usize, usize),
    #[error("input error: network is not constructible for this monoid: {0}")]
    NotConstructible(String),
    #[error("input error: non-finite number encountered in {0}")]
    NonFinite(&'static str),
    #[error("input error: multiplier index {index} out of range (have {count} blocks)")]
    BlockIndexOutOfRange { index: usize, count: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("internal error: random draw stayed degenerate after {attempts} attempts: {detail}")]
    DegenerateDraw { attempts: usize, detail: String },
    #[error("internal error: simple block of dimension {0} is not a perfect square")]
    NonSquareBlockDim(usize),
    #[error("internal error: trace decomposition is inconsistent: {0}")]
    InconsistentTrace(String),
    #[error("internal error: dense linear algebra failed: {0}")]
    Linalg(String),
}

impl Error {
    /// Exit code contract of the command line interface: 2 for bad input,
    /// 3 for an internal inconsistency. (Verification failure, exit 1, is
    /// not an `Error`; it is a report that fails its checks.)
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DegenerateDraw { .. }
            | Error::NonSquareBlockDim(_)
            | Error::InconsistentTrace(_)
            | Error::Linalg(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
