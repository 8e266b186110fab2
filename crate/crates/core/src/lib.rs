pub mod cliques;
pub mod codes;
pub mod error;
pub mod graph;
pub mod matrix;
pub mod oracle;
pub mod orbits;
pub mod ring;
pub mod selftest;
pub mod smith;

pub use error::{Error, Result};
