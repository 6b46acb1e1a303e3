#![no_std]
extern crate alloc;

pub mod error;
pub mod fft;
pub mod grid;
pub mod modnorm;
pub mod operators;
pub mod quadrature;
pub mod signal;
pub mod stft;
pub mod symbol;
pub mod ultradiff;

mod par;
pub mod sum;
pub mod weights;

pub use error::{Error, Result};
pub use num_complex::Complex64;
