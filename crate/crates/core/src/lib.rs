//! Free compression, subordination and the free difference quotient coalgebra.
//!
//! The crate is `no_std` with `alloc`; the default `std` feature adds
//! thread-parallel Monte Carlo and cached partition tables.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod density;
pub mod envelope;
pub mod error;
pub mod eta;
pub mod exact;
pub mod freeness;
pub mod matricial;
pub mod matrix;
pub mod measure;
pub mod nc;
pub mod quadrature;
pub mod rmt;
pub mod series;
pub mod subordination;

pub use error::{Error, Result};
pub use exact::{GaussRat, Rational};
