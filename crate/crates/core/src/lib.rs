//! Model predictive control on the equivalent dynamic linearization model.

pub mod error;
pub mod analysis;
pub mod control;
pub mod edlm;
pub mod numeric;
pub mod par;
pub mod prediction;
pub mod sim;

pub use error::{Error, Result};
