pub mod battery;
pub mod beta;
pub mod error;
pub mod mahler;
pub mod numeric;
pub mod parry;
pub mod words;

pub use error::{Error, Result};
