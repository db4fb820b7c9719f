//! Command line and HTTP front end over the `indic-dbcs` modules.

pub mod cli;
pub mod http;
pub mod ops;
pub mod registry;
pub mod session;
