//! Asymmetric coverings and covering designs: exact bounds, search and census.

pub mod asymcover;
pub mod bits;
pub mod covdesign;
pub mod designfile;
pub mod error;
pub mod exactlp;
pub mod isocanon;
pub mod lpsolve;
pub mod registry;
pub mod repro;
pub mod search;
pub mod setsys;

pub use error::{Error, Result};
