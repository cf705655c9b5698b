use thiserror::Error;

use crate::graph::Part;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("k = {k} is out of range (1..={max})")]
    KOutOfRange { k: u32, max: u32 },
    #[error("string length {0} is out of range (1..=63)")]
    LengthOutOfRange(u32),
    #[error("word {bits:#x} has bits above position {len}")]
    StrayBits { bits: u64, len: u32 },
    #[error("not a binary literal: {0:?}")]
    BadBinaryLiteral(String),
    #[error("expected a string of length {expected}, got {got}")]
    LengthMismatch { expected: u32, got: u32 },
    #[error("{word} has {ones} ones; a middle-levels vertex for k = {k} needs {k} or {}", k + 1)]
    NotMiddleLevel { word: String, ones: u32, k: u32 },
    #[error("{0} is not correctly matched")]
    NotCanonical(String),
    #[error("brun {r} is out of range for k = {k}")]
    BrunOutOfRange { r: u32, k: u32 },
    #[error("rank {rank} is out of range (0..{size})")]
    RankOutOfRange { rank: u64, size: u64 },
    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),
    #[error("the {part} part needs k >= 8 (got k = {k})")]
    DecompositionTooSmall { part: Part, k: u32 },
    #[error("{word} (brun {brun}) lies outside the {part} part")]
    OutsidePart { word: String, brun: u32, part: Part },
    #[error("vertex count {0} does not fit 32-bit ranks")]
    TooManyVertices(u64),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("junction {which} is not an edge: {from} -> {to}")]
    JunctionNotAdjacent {
        which: &'static str,
        from: String,
        to: String,
    },
    #[error("lift failed on copy {copy}: {reason}")]
    LiftFailed { copy: usize, reason: String },
    #[error("k = {k} is too large to lift (max {max})")]
    LiftTooLarge { k: u32, max: u32 },
    #[error("bad file format: {0}")]
    Format(String),
    #[error("checksum mismatch (stored {stored:#018x}, computed {computed:#018x})")]
    Checksum { stored: u64, computed: u64 },
    #[error("checkpoint mismatch: {0}")]
    CheckpointMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
