use alloc::string::String;
use core::fmt;

use crate::corpus::ChunkClass;

/// Errors reported by corpus parsing, encoding and the classifiers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A corpus, tag-vector or window string could not be parsed.
    Parse { line: usize, message: String },
    /// A chunk tag did not have the shape `O`, `B-XXX` or `I-XXX`.
    UnknownChunkTag { line: usize, tag: String },
    /// The literal reserved for the out-of-sentence padding tag appeared
    /// where a corpus tag was expected.
    ReservedTag(String),
    /// The same tag occurred twice while building an encoder table.
    DuplicateTag(String),
    /// A tag without an encoding was found at the given window position.
    UnknownTag { tag: String, position: usize },
    /// A lexical encoding was requested with more dimensions than the
    /// corpus has usable context words.
    DimensionTooLarge { requested: usize, available: usize },
    /// Two vectors or windows that must have equal length did not.
    LengthMismatch { left: usize, right: usize },
    /// An instance with all-zero class frequencies has no modal class.
    ZeroFrequencies,
    /// A nearest-neighbour search was given no candidates.
    EmptyCandidates,
    /// An operation that needs a non-empty memory base was given an empty one.
    EmptyMemory,
    /// Label-constrained training saw an item whose label no unit can accept.
    LabelStarved(ChunkClass),
    /// A class present in the memory base has no unit carrying its label.
    MissingLabel(ChunkClass),
    /// Gold and predicted sequences do not line up.
    ShapeMismatch { expected: usize, actual: usize },
    /// A parameter was outside its documented range.
    InvalidArgument(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { line, message } => write!(f, "line {line}: {message}"),
            Error::UnknownChunkTag { line, tag } => {
                write!(f, "line {line}: unrecognised chunk tag {tag:?}")
            }
            Error::ReservedTag(tag) => {
                write!(f, "tag {tag:?} is reserved for out-of-sentence padding")
            }
            Error::DuplicateTag(tag) => write!(f, "duplicate tag {tag:?}"),
            Error::UnknownTag { tag, position } => {
                write!(f, "no encoding for tag {tag:?} at window position {position}")
            }
            Error::DimensionTooLarge { requested, available } => write!(
                f,
                "encoding dimension {requested} exceeds the {available} usable context words"
            ),
            Error::LengthMismatch { left, right } => {
                write!(f, "length mismatch: {left} vs {right}")
            }
            Error::ZeroFrequencies => write!(f, "instance has all-zero class frequencies"),
            Error::EmptyCandidates => write!(f, "no candidates to search"),
            Error::EmptyMemory => write!(f, "memory base is empty"),
            Error::LabelStarved(class) => {
                write!(f, "no unit can accept an item labelled {class}")
            }
            Error::MissingLabel(class) => {
                write!(f, "no unit carries the label {class}")
            }
            Error::ShapeMismatch { expected, actual } => {
                write!(f, "sequence shape mismatch: expected {expected}, got {actual}")
            }
            Error::InvalidArgument(message) => write!(f, "{message}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
