//! Parser, resolver and commands behind the `umbral` executable.

pub mod app;
pub mod ast;
pub mod parse;
pub mod resolve;
pub mod series_expr;

pub use app::{run, Output};
