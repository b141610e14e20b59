use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AtlasError {
    #[error("illegal isogeny {isogeny} for type {ty}")]
    IllegalIsogeny { ty: String, isogeny: String },
    #[error("illegal Lie type {0}")]
    IllegalType(String),
    #[error("module {module} is not supported for {ty}")]
    UnsupportedModule { ty: String, module: String },
    #[error("{0} is not a prime")]
    NonPrime(u64),
    #[error("subspace count {count} exceeds the brute-force budget {budget}")]
    BudgetExceeded { count: u128, budget: u128 },
    #[error("rank {0} exceeds the supported maximum of 8")]
    RankTooLarge(usize),
    #[error("dimension cross-check failed: roots give {roots}, trace formula gives {trace}")]
    CrossCheckFailure { roots: i64, trace: String },
    #[error("q = {q} is incompatible with p = {p} (need p | q-1, and 4 | q-1 when p = 2)")]
    IncompatibleFrobenius { q: u64, p: u64 },
    #[error("table schema violation at {table}:{line}: {message}")]
    SchemaViolation { table: String, line: usize, message: String },
    #[error("label {label} does not resolve for {group}")]
    UnresolvedLabel { group: String, label: String },
    #[error("inclusion references missing label {label} in {group}")]
    DanglingLabel { group: String, label: String },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, AtlasError>;
