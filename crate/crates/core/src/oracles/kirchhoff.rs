//! Kirchhoff aperture pattern of a slit of width `d` in a plane screen.
//!
//! The aperture field is the incident plane wave, `e^{ik x sin α}` with `α`
//! measured from the screen normal; observation angles are measured from the
//! normal on the transmission side. The pattern carries the 2D radiation
//! constant, so it reads
//! `F(θ) = √(k/2π) e^{−iπ/4} d sinc(kd/2 · (sin θ − sin α))`.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::method::FarFieldPattern;

pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Pattern for `kd` with unit wavenumber scaling (the aperture width is `kd/k`
/// and `k = 1`). Use [`kirchhoff_pattern_k`] to fix the wavenumber instead.
pub fn kirchhoff_pattern(kd: f64, incidence_angle: f64, angles: &[f64]) -> Result<FarFieldPattern> {
    kirchhoff_pattern_k(1.0, kd, incidence_angle, angles)
}

pub fn kirchhoff_pattern_k(k: f64, kd: f64, incidence_angle: f64, angles: &[f64]) -> Result<FarFieldPattern> {
    if !(kd > 0.0) || !(k > 0.0) {
        return Err(Error::Domain { what: "kirchhoff kd", value: kd });
    }
    let d = kd / k;
    let c = Complex64::from_polar((k / (2.0 * PI)).sqrt() * d, -FRAC_PI_4);
    let s0 = incidence_angle.sin();
    let amplitude = angles.iter().map(|t| c * sinc(0.5 * kd * (t.sin() - s0))).collect();
    FarFieldPattern::new(angles.to_vec(), amplitude)
}
