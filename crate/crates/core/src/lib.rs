pub mod corpus;
pub mod detrep;
pub mod error;
pub mod field;
pub mod invariants;
pub mod linalg;
pub mod module;
pub mod parse;
pub mod pipeline;
pub mod poly;
pub mod quotient;
pub mod search;

pub use error::{Error, Result};
