//! Provable upper limits on the AC Huffman code length of one 8x8 JPEG
//! Baseline block, and the tooling to check them.

pub mod bound;
pub mod entropy_model;
pub mod error;
pub mod quantization;
pub mod transform;
pub mod verification;

pub use bound::{upper_limit, BoundResult, Refinement};
pub use entropy_model::ComponentKind;
pub use error::{Error, Result};
pub use quantization::{QuantTable, ScaleFactor};
pub use verification::{encode_block, EncodeReport};
