//! Dense array containers, deterministic RNG, and bit-exact file I/O.
//!
//! All containers are immutable after construction (no `&mut` accessors) and
//! validate their range invariants on construction and on load. Bulk storage
//! is `f32`; loss and gradient arithmetic elsewhere in the crate runs in
//! `f64`.

mod containers;
mod io;
mod rng;

pub use containers::{
    argmax_labels, DepthMap, ImageTensor, SegLabelMap, SegProbMap, DEPTH_MAX, DEPTH_MIN,
};
pub use io::{
    load_array, load_depth, load_edge_field, load_image, load_labels, load_ppm, load_probs,
    save_depth, save_edge_field, save_image, save_labels, save_ppm, save_probs, LoadedArray,
};
pub use rng::{splitmix64, SeededRng};

use thiserror::Error;

/// Errors for container construction and file I/O.
#[derive(Debug, Error)]
pub enum ArrayError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("dtype mismatch: expected {expected}, found code {found}")]
    DtypeMismatch { expected: &'static str, found: u32 },
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}
