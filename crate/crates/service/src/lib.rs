//! Graph file format, command-line interface and HTTP service.

pub mod cli;
pub mod document;
pub mod eval;
pub mod fixtures;
pub mod render;
pub mod server;
pub mod store;
