//! Feedback-driven joint active/passive beam training for RIS-assisted ISAC.
//!
//! The optimizers never see channel state. They submit candidate beam pairs
//! to a [`oracle::Feedback`] implementation and read back two scalars: the
//! power received by the user and the echo power at the DFBS.

pub mod afsa;
pub mod baselines;
pub mod channel;
pub mod error;
pub mod harness;
pub mod oracle;
pub mod search;

pub use error::{Error, Result};
