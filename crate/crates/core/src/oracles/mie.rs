//! Partial-wave series for the sphere (axial incidence along +z) and the
//! circular cylinder (2D, arbitrary incidence angle).

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::method::{BoundaryCondition, FarFieldPattern};
use crate::specfun::{
    cyl_bessel_jn_all, cyl_bessel_yn_all, legendre_p_all, sph_bessel_j_with_derivative,
    sph_hankel1_all,
};

/// Largest `ka` for which the sphere series is offered.
pub const MAX_KA: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MieCoefficients {
    pub bc: BoundaryCondition,
    pub ka: f64,
    pub a_n: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MieSolution {
    pub coefficients: MieCoefficients,
    pub k: f64,
    pub radius: f64,
    pub pattern: FarFieldPattern,
    /// `(4π/k²) Σ (2n+1)|a_n|²`.
    pub cross_section: f64,
    /// `(4π/k) Im f(0)`.
    pub extinction: f64,
}

impl MieSolution {
    /// Coefficients of the scattered field on the basis `h_n(kr) P_n(cos θ)`:
    /// `(2n+1) iⁿ a_n`.
    pub fn mode_coefficients(&self) -> Vec<Complex64> {
        self.coefficients
            .a_n
            .iter()
            .enumerate()
            .map(|(n, a)| a * Complex64::new(0.0, 1.0).powu(n as u32) * (2 * n + 1) as f64)
            .collect()
    }
}

pub fn mie_coefficients(bc: BoundaryCondition, ka: f64) -> Result<MieCoefficients> {
    if !(ka > 0.0) || ka > MAX_KA {
        return Err(Error::Domain { what: "mie ka", value: ka });
    }
    let nmax = ka.ceil() as usize + 12;
    let (j, dj) = sph_bessel_j_with_derivative(nmax, ka);
    let (h, dh) = sph_hankel1_all(nmax, ka)?;
    let a_n = (0..=nmax)
        .map(|n| {
            let (num, den) = match bc {
                BoundaryCondition::Soft => (j[n], h[n]),
                BoundaryCondition::Hard => (dj[n], dh[n]),
            };
            // An overflowed Neumann function means the mode is not excited.
            if !den.re.is_finite() || !den.im.is_finite() {
                Complex64::new(0.0, 0.0)
            } else {
                -num / den
            }
        })
        .collect();
    Ok(MieCoefficients { bc, ka, a_n })
}

/// Sphere of radius `radius` under `e^{ikz}`; far field
/// `f(θ) = (1/(ik)) Σ (2n+1) a_n P_n(cos θ)`.
pub fn mie_series(bc: BoundaryCondition, k: f64, radius: f64, angles: &[f64]) -> Result<MieSolution> {
    if !(k > 0.0) || !(radius > 0.0) {
        return Err(Error::Domain { what: "mie k·a", value: k * radius });
    }
    let coefficients = mie_coefficients(bc, k * radius)?;
    let nmax = coefficients.a_n.len() - 1;
    let amp = |mu: f64| -> Complex64 {
        let (p, _) = legendre_p_all(nmax, mu);
        let s: Complex64 =
            coefficients.a_n.iter().enumerate().map(|(n, a)| a * ((2 * n + 1) as f64 * p[n])).sum();
        s / Complex64::new(0.0, k)
    };
    let pattern = FarFieldPattern::new(angles.to_vec(), angles.iter().map(|t| amp(t.cos())).collect())?;
    let cross_section = 4.0 * PI / (k * k)
        * coefficients.a_n.iter().enumerate().map(|(n, a)| (2 * n + 1) as f64 * a.norm_sqr()).sum::<f64>();
    let extinction = 4.0 * PI / k * amp(1.0).im;
    Ok(MieSolution { coefficients, k, radius, pattern, cross_section, extinction })
}

/// 2D circular cylinder under `e^{ik(x cos α + y sin α)}`. Pattern in the
/// `e^{ikr}/√r` convention, `F(θ) = √(2/(πk)) e^{−iπ/4} Σ_n a_n e^{in(θ−α)}`.
pub fn cylinder_series(
    bc: BoundaryCondition,
    k: f64,
    radius: f64,
    incidence: f64,
    angles: &[f64],
) -> Result<FarFieldPattern> {
    let ka = k * radius;
    if !(ka > 0.0) || !ka.is_finite() {
        return Err(Error::Domain { what: "cylinder ka", value: ka });
    }
    let nmax = ka.ceil() as usize + 20;
    let j = cyl_bessel_jn_all(nmax + 1, ka);
    let y = cyl_bessel_yn_all(nmax + 1, ka)?;
    let a: Vec<Complex64> = (0..=nmax)
        .map(|n| {
            let h = |m: usize| Complex64::new(j[m], y[m]);
            let (num, den) = match bc {
                BoundaryCondition::Soft => (Complex64::new(j[n], 0.0), h(n)),
                BoundaryCondition::Hard => {
                    // Z_n' = −Z_1 for n = 0, Z_{n−1} − (n/x) Z_n otherwise
                    let dj = if n == 0 { -j[1] } else { j[n - 1] - n as f64 / ka * j[n] };
                    let dh = if n == 0 { -h(1) } else { h(n - 1) - h(n) * (n as f64 / ka) };
                    (Complex64::new(dj, 0.0), dh)
                }
            };
            if !den.re.is_finite() || !den.im.is_finite() {
                Complex64::new(0.0, 0.0)
            } else {
                -num / den
            }
        })
        .collect();
    let c = Complex64::from_polar((2.0 / (PI * k)).sqrt(), -FRAC_PI_4);
    let amplitude = angles
        .iter()
        .map(|&t| {
            let phi = t - incidence;
            let s: Complex64 = a[0]
                + (1..=nmax).map(|n| a[n] * (2.0 * (n as f64 * phi).cos())).sum::<Complex64>();
            c * s
        })
        .collect();
    FarFieldPattern::new(angles.to_vec(), amplitude)
}
