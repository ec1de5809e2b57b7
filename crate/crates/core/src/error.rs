use std::path::PathBuf;

/// Errors raised by graph construction, attribute ingestion and file loading.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("symbol id {0} is not in the table")]
    IdNotFound(u32),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("vertex {name} not found (position {position})")]
    VertexNotFound { name: u64, position: usize },
    #[error("vertex index {0} out of range")]
    VertexIndexOutOfRange(usize),
    #[error("edge ({src}, {dst}) not found (position {position})")]
    EdgeNotFound { src: u64, dst: u64, position: usize },
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("entity {entity} out of range for store of {count} entities")]
    EntityOutOfRange { entity: usize, count: usize },
    #[error("attribute {attr} out of range for capacity {capacity}")]
    AttributeOutOfRange { attr: u32, capacity: usize },
    #[error("graph is already built")]
    AlreadyBuilt,
    #[error("graph has not been built yet")]
    NotBuilt,
    #[error("property column `{key}` holds {expected} values, got {found}")]
    TypeMismatch {
        key: String,
        expected: &'static str,
        found: &'static str,
    },
    #[error("{}: parse error on line {line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{}: {kind} rows need {expected} fields, found {found}", path.display())]
    KindArityMismatch {
        path: PathBuf,
        kind: &'static str,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
