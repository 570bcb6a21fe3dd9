//! Interpretable knee-onset prediction for lithium-ion cells.
//!
//! Attention-augmented recurrent/convolutional regressors predict the
//! cycle at which nonlinear capacity fade begins from the first tens of
//! charge/discharge cycles. Temporal attention scores expose the
//! timesteps a model relies on, cyclic (self-)attention scores expose the
//! cycles, and the cyclic scores drive a systematic input-size-reduction
//! procedure.

pub mod analyze;
pub mod autodiff;
pub mod data;
pub mod error;
pub mod knee;
mod linalg;
pub mod model;
pub mod train;

pub use error::{Error, Result};
