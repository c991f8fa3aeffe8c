//! Threshold trapdoor functions and the encryption schemes built on them.

pub mod arith;
pub mod bits;
pub mod codec;
pub mod ddh;
pub mod error;
pub mod group;
pub mod hardcore;
pub mod lwe;
pub mod rpke;
pub mod scheme;
pub mod shamir;
pub mod ttdf;
pub mod tpke;
pub mod ttdr;

pub use error::{Error, Result};
