//! Append-only notebook store with accounts, audit log, signatures and backup.

pub mod accounts;
pub mod attachments;
pub mod audit;
pub mod backup;
pub mod config;
mod db;
mod error;
pub mod integrity;
pub mod model;
pub mod store;
pub mod time;

pub use error::{Error, FieldError, Result};
pub use store::{NewEntry, Store, StoreOptions, TocRow};
