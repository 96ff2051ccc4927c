//! Error-correcting Gray codes: binary codes where adjacent integers differ
//! in one bit and a noisy codeword still decodes close to the value sent.

pub mod bitcore;
pub mod codes;
pub mod dphist;
mod error;
pub mod eval;
pub mod linear;
pub mod registry;

pub use error::{Error, Result};
