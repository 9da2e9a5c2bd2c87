use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("rank must be between 1 and 26, got {0}")]
    InvalidRank(usize),

    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("word {word:?} is not freely reduced (cancelling pair at position {position})")]
    Unreduced { word: String, position: usize },

    #[error("enumeration too large: {size} words exceeds cap {cap}")]
    EnumerationTooLarge { size: String, cap: u64 },

    #[error("not an inverse pair: generator {generator} maps to {image} under the composite")]
    NotInverse { generator: String, image: String },

    #[error("growth blow-up: image length {length} exceeds cap {cap} at iteration {iteration}")]
    GrowthBlowUp { length: usize, cap: usize, iteration: usize },

    #[error("unbounded cancellation suspected (no closed transducer up to window {window}); use brute force or sampling")]
    UnboundedCancellation { window: usize },

    #[error("transducer state budget of {budget} exceeded at window {window}; use brute force or sampling")]
    StateBudgetExceeded { budget: usize, window: usize },

    #[error("memory budget of {budget} bytes exceeded; largest completed radius is {completed}")]
    MemoryBudgetExceeded { budget: usize, completed: usize },

    #[error("no engine can handle radius {n}: {reason}")]
    EngineUnavailable { n: usize, reason: String },
}
