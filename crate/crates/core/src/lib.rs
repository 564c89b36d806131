pub mod db;
pub mod error;
pub mod exec;
pub mod lang;
pub mod opt;
pub mod store;
pub mod views;

pub use db::{Database, DbConfig, Outcome};
pub use error::{Error, Result};
