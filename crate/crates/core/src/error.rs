use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{}: {source}", path.display())]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("manifest contains no segments")]
    EmptyManifest,

    #[error("duplicate segment id `{id}` on lines {first} and {second}")]
    DuplicateSegment { id: String, first: usize, second: usize },

    #[error("unknown person `{0}`")]
    UnknownPerson(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("duplicate meaning `{id}` on lines {first} and {second}")]
    DuplicateMeaning { id: String, first: usize, second: usize },

    #[error("meaning `{meaning}` references undefined parent `{parent}`")]
    DanglingParent { meaning: String, parent: String },

    #[error("hypernym chain of `{0}` contains a cycle")]
    Cycle(String),

    #[error("meaning `{0}` is not in the taxonomy")]
    UnknownMeaning(String),

    #[error("segment annotated `{verb}` has no meaning; mode {mode} requires one")]
    MissingMeaning { verb: String, mode: String },

    #[error("annotation `{0}` is not in the class partition")]
    UnknownClass(String),

    #[error("vector mismatch: {0}")]
    VectorMismatch(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn in_file(self, path: impl Into<PathBuf>) -> Self {
        match self {
            e @ (Error::Io { .. } | Error::InFile { .. }) => e,
            e => Error::InFile {
                path: path.into(),
                source: Box::new(e),
            },
        }
    }
}
