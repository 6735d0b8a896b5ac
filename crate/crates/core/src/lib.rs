#![cfg_attr(not(test), no_std)]
extern crate alloc;

pub mod applications;
pub mod channels;
pub mod correction;
pub mod error;
pub mod numerics;
pub mod opspace;

pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, Tolerance};
