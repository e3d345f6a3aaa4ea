pub mod error;
pub mod eval;
pub mod gridmap;
pub mod localization;
pub mod matching;
pub mod rng;
pub mod synthdata;

pub use error::{Error, Result};
