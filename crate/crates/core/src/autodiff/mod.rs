//! Dense tensors with reverse-mode automatic differentiation.
//!
//! The tape is rebuilt on every forward pass, which keeps variable-length
//! sequences trivial. Nodes and tapes are single-threaded; immutable input
//! tensors can be shared across worker threads freely.

mod tape;
mod tensor;

pub use tape::{Tape, Var};
pub use tensor::{matmul_raw, Tensor};
