#![allow(dead_code)]

use crosspec_core::potential::{CouplingSpec, PotentialSpec, TwoChannelSpec};

pub const MASS: f64 = 35.4;
pub const X_C: f64 = 0.02477;
pub const K0: f64 = 27.90285;

pub fn allowed() -> PotentialSpec {
    PotentialSpec::Harmonic { mass: MASS, frequency: 400.0, center: 0.1, min_energy: 10700.0 }
}

pub fn repulsive(slope: f64) -> PotentialSpec {
    PotentialSpec::Linear { mass: MASS, slope, anchor: X_C, anchor_energy: 10804.1 }
}

pub fn fig23(k0: f64) -> TwoChannelSpec {
    TwoChannelSpec { channel1: allowed(), channel2: repulsive(-25000.0), coupling: CouplingSpec { strength: k0, position: X_C } }
}

pub fn rel(a: num_complex::Complex64, b: num_complex::Complex64) -> f64 {
    (a - b).norm() / b.norm()
}
