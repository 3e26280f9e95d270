//! Command line and HTTP front end for `counterbound`.
//!
//! Both front ends go through [`api`], so a request answered over HTTP and
//! the same request given to the binary produce the same JSON.

pub mod api;
pub mod error;
pub mod server;

pub use error::{CliError, Result};
