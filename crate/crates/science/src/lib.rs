//! Analysis kernels behind the notebook's computing menus.
//!
//! Everything here is a pure function over validated inputs except
//! [`sequence::blast`], which talks to the remote similarity-search service
//! through a replayable transport.

pub mod data;
mod error;
pub mod fmt;
pub mod primer;
pub mod sequence;
pub mod stats;

pub use error::{Error, Result};
