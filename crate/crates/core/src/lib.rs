//! Phase-space quantum mechanics with an ordering parameter `s` on finite
//! periodic grids.
//!
//! The s-Wigner function of a pure state is
//! `A(q,p;s) = (1/2πħ) ∫ Ψ*(q − (1−s)τ/2) e^{−iτp/ħ} Ψ(q + (1+s)τ/2) dτ`.
//! `s = 0` is the Wigner function; every other module follows this sign.

pub mod checks;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod io;
pub mod moments;
pub mod star;
pub mod states;
pub mod symbol;
pub mod transform;

pub use error::{Error, Result};
pub use grid::{Grid, Representation, WavefunctionGrid};
pub use num_complex::Complex64;
