//! Memory-based learning for base noun-phrase chunking, with self-organising
//! maps used to edit the instance memory at query time.
//!
//! The exact classifier stores every distinct part-of-speech context window
//! seen in training together with its chunk-class frequencies and answers
//! queries by a full nearest-neighbour scan. The map-based pipelines train a
//! small SOM (plain or label-constrained) over encoded windows, attach each
//! stored instance to its winning unit, and at query time scan only the items
//! held by a few winning units. That cuts the per-query comparison count from
//! the full memory size `I` down to about `2 * C * sqrt(I)` for `C` classes,
//! at a small cost in accuracy.
//!
//! - [`corpus`] parses annotated text, reduces chunk tags to a three-class
//!   scheme and builds instance memories over tag windows,
//! - [`encoding`] maps tags to vectors (orthogonal basis, a lexical
//!   approximation built from neighbouring-word counts, or a user file),
//! - [`mbl`] is the exact full-scan classifier with feature weighting,
//! - [`som`] and [`lsom`] train the maps,
//! - [`classify`] runs the map-edited pipelines and counts comparisons,
//! - [`eval`] scores predicted chunks against gold annotation.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod classify;
pub mod corpus;
pub mod encoding;
pub mod error;
pub mod eval;
pub mod lsom;
mod math;
pub mod mbl;
pub mod som;

pub use classify::{CostModel, QueryTrace};
pub use corpus::{ChunkClass, ChunkedSentence, Instance, Sentence, Tag, Token, WindowSpec};
pub use encoding::Encoder;
pub use error::Error;
pub use eval::ChunkScore;
pub use mbl::{MemoryBase, WeightScheme};
pub use som::{Schedule, SomMap, SomUnit};
