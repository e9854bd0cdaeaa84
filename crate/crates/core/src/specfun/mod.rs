//! Special functions: complex Airy functions, harmonic-oscillator
//! eigenfunctions and Franck–Condon overlaps.

pub mod airy;
pub mod oscillator;
pub mod quad;

pub use airy::{airy_ai, airy_ai_deriv, airy_ai_pair, airy_bi, airy_bi_deriv, airy_bi_pair};
pub use oscillator::{fc_overlap, fc_overlap_table, hermite_functions, OscillatorBasis, EIGENFUNCTION_CAP};
