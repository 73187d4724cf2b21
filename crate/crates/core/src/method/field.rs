use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::{BasisFamily, BasisKind};
use super::gram::DensitySpectrum;
use super::IncidentField;
use crate::error::{Error, Result};
use crate::geometry::{dot, Point};
use crate::specfun::legendre_p_all;

/// Far-field amplitudes on an angle grid. 3D patterns follow
/// `u_s ~ f(θ) e^{ikr}/r` with θ the polar angle in the x–z plane; 2D patterns
/// follow `u_s ~ F(θ) e^{ikr}/√r` with θ measured from +x.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarFieldPattern {
    pub angles: Vec<f64>,
    pub amplitude: Vec<Complex64>,
}

impl FarFieldPattern {
    pub fn new(angles: Vec<f64>, amplitude: Vec<Complex64>) -> Result<Self> {
        if angles.len() != amplitude.len() {
            return Err(Error::Shape(format!(
                "{} angles but {} amplitudes",
                angles.len(),
                amplitude.len()
            )));
        }
        check_increasing(&angles)?;
        Ok(Self { angles, amplitude })
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.amplitude.iter().map(|a| a.norm()).collect()
    }
}

fn check_increasing(angles: &[f64]) -> Result<()> {
    if angles.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Shape("far-field angles must be strictly increasing".into()));
    }
    Ok(())
}

pub(crate) fn observation_direction(dim: usize, theta: f64) -> Point {
    let (s, c) = theta.sin_cos();
    if dim == 2 {
        [c, s, 0.0]
    } else {
        [s, 0.0, c]
    }
}

fn check_len(basis: &BasisFamily, v: &DensitySpectrum) -> Result<()> {
    if v.v.len() != basis.len() {
        return Err(Error::Shape(format!(
            "{} coefficients for {} basis functions",
            v.v.len(),
            basis.len()
        )));
    }
    Ok(())
}

/// Total field `u₀ + Σ v_i D_i` at each point.
pub fn eval_scattered(
    basis: &BasisFamily,
    v: &DensitySpectrum,
    u0: &IncidentField,
    points: &[Point],
) -> Result<Vec<Complex64>> {
    check_len(basis, v)?;
    points
        .iter()
        .map(|p| {
            let d = basis.eval_all(p)?;
            let s: Complex64 = d.iter().zip(&v.v).map(|((val, _), c)| val * c).sum();
            Ok(u0.value(p) + s)
        })
        .collect()
}

/// Far-field pattern of `Σ v_i D_i`.
///
/// A plane-wave family is read as a quadrature of a continuous angular
/// spectrum `V(d) = v_i/ω_i`; stationary phase maps it to the pattern, which
/// is therefore only available at the basis directions themselves.
pub fn far_field(basis: &BasisFamily, v: &DensitySpectrum, angles: &[f64]) -> Result<FarFieldPattern> {
    check_len(basis, v)?;
    check_increasing(angles)?;
    let k = basis.k;
    let dim = basis.dim;
    let amplitude: Vec<Complex64> = match &basis.kind {
        BasisKind::PointSources { locations } => {
            let c = if dim == 3 {
                Complex64::new(1.0 / (4.0 * PI), 0.0)
            } else {
                Complex64::from_polar(1.0 / (8.0 * PI * k).sqrt(), FRAC_PI_4)
            };
            angles
                .iter()
                .map(|&t| {
                    let rhat = observation_direction(dim, t);
                    c * locations
                        .iter()
                        .zip(&v.v)
                        .map(|(s, vi)| vi * Complex64::from_polar(1.0, -k * dot(&rhat, s)))
                        .sum::<Complex64>()
                })
                .collect()
        }
        BasisKind::SphericalModes { order } => {
            // h_n(kr) → (−i)^{n+1} e^{ikr}/(kr)
            let phases: Vec<Complex64> =
                (0..=*order).map(|n| Complex64::new(0.0, -1.0).powu(n as u32 + 1) / k).collect();
            angles
                .iter()
                .map(|&t| {
                    let (p, _) = legendre_p_all(*order, t.cos());
                    (0..=*order).map(|n| v.v[n] * phases[n] * p[n]).sum()
                })
                .collect()
        }
        BasisKind::PlaneWaves { directions, weights } => {
            let c = if dim == 3 {
                Complex64::new(0.0, -2.0 * PI / k)
            } else {
                Complex64::from_polar((2.0 * PI / k).sqrt(), -FRAC_PI_4)
            };
            angles
                .iter()
                .map(|&t| {
                    let rhat = observation_direction(dim, t);
                    let i = directions
                        .iter()
                        .position(|d| (0..3).all(|a| (d[a] - rhat[a]).abs() < 1e-9))
                        .ok_or_else(|| {
                            Error::Shape(format!("angle {t} is not a direction of the plane-wave basis"))
                        })?;
                    Ok(c * v.v[i] / weights[i])
                })
                .collect::<Result<_>>()?
        }
    };
    FarFieldPattern::new(angles.to_vec(), amplitude)
}

/// Angles of a 2D plane-wave family, in the order of the basis.
pub fn plane_wave_angles(basis: &BasisFamily) -> Option<Vec<f64>> {
    match &basis.kind {
        BasisKind::PlaneWaves { directions, .. } if basis.dim == 2 => {
            Some(directions.iter().map(|d| d[1].atan2(d[0])).collect())
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::method::Solver;

    fn spectrum(v: Vec<Complex64>) -> DensitySpectrum {
        DensitySpectrum { v, solver: Solver::Diagonal }
    }

    #[test]
    fn zero_coefficients() {
        let basis = BasisFamily::point_sources(2.0, 3, vec![[0.0, 0.0, 0.1], [0.0, 0.0, -0.2]]).unwrap();
        let u0 = IncidentField::new([0.0, 0.0, 1.0], Complex64::new(1.0, 0.0), 2.0).unwrap();
        let zero = spectrum(vec![Complex64::new(0.0, 0.0); 2]);
        let pts = [[1.0, 0.5, 0.3], [-2.0, 0.0, 1.0]];
        let u = eval_scattered(&basis, &zero, &u0, &pts).unwrap();
        for (p, val) in pts.iter().zip(&u) {
            assert_eq!(*val, u0.value(p));
        }
        let ff = far_field(&basis, &zero, &[0.0, 1.0, 2.0]).unwrap();
        assert!(ff.amplitude.iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn scattered_part_is_linear() {
        let basis = BasisFamily::spherical_modes(1.7, 4).unwrap();
        let u0 = IncidentField::new([0.0, 0.0, 1.0], Complex64::new(0.3, -0.2), 1.7).unwrap();
        let v = spectrum((0..5).map(|n| Complex64::new(n as f64, 1.0 - n as f64)).collect());
        let alpha = Complex64::new(-0.7, 2.1);
        let va = spectrum(v.v.iter().map(|x| x * alpha).collect());
        let pts = [[1.0, 2.0, 0.5], [0.0, -3.0, 1.0]];
        let a = eval_scattered(&basis, &v, &u0, &pts).unwrap();
        let b = eval_scattered(&basis, &va, &u0, &pts).unwrap();
        for ((x, y), p) in a.iter().zip(&b).zip(&pts) {
            let lhs = y - u0.value(p);
            let rhs = (x - u0.value(p)) * alpha;
            assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn single_mode_far_field_shape() {
        let k = 2.0;
        for n in [0usize, 3, 7] {
            let basis = BasisFamily::spherical_modes(k, 7).unwrap();
            let mut v = vec![Complex64::new(0.0, 0.0); 8];
            v[n] = Complex64::new(1.0, 0.0);
            let angles: Vec<f64> = (0..91).map(|i| i as f64 * PI / 90.0).collect();
            let ff = far_field(&basis, &spectrum(v), &angles).unwrap();
            let pn: Vec<f64> = angles.iter().map(|t| legendre_p_all(n, t.cos()).0[n]).collect();
            let dotp: Complex64 = ff.amplitude.iter().zip(&pn).map(|(a, p)| a * p).sum();
            let na: f64 = ff.amplitude.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            let np: f64 = pn.iter().map(|p| p * p).sum::<f64>().sqrt();
            assert!((dotp.norm() / (na * np) - 1.0).abs() < 1e-10);
            let expect = Complex64::new(0.0, -1.0).powu(n as u32 + 1) / k;
            assert!((ff.amplitude[0] - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn radiation_decay() {
        let k = 1.0;
        let basis = BasisFamily::point_sources(k, 3, vec![[0.0, 0.0, 0.3], [0.1, 0.0, -0.2]]).unwrap();
        let v = spectrum(vec![Complex64::new(1.0, 0.5), Complex64::new(-0.3, 2.0)]);
        let u0 = IncidentField::new([0.0, 0.0, 1.0], Complex64::new(0.0, 0.0), k).unwrap();
        let dir = [0.6, 0.0, 0.8];
        let at = |r: f64| {
            let p = [dir[0] * r, dir[1] * r, dir[2] * r];
            k * r * eval_scattered(&basis, &v, &u0, &[p]).unwrap()[0].norm()
        };
        let (a, b) = (at(1e3), at(2e3));
        assert!((a - b).abs() < 0.005 * b);
        let ff = far_field(&basis, &v, &[0.6f64.atan2(0.8)]).unwrap();
        assert!((ff.amplitude[0].norm() * k - b).abs() < 0.005 * b);
    }

    #[test]
    fn plane_wave_far_field_needs_basis_angles() {
        let basis = BasisFamily::strip_plane_waves(1.0, 5).unwrap();
        let v = spectrum(vec![Complex64::new(1.0, 0.0); 5]);
        let angles = plane_wave_angles(&basis).unwrap();
        let ff = far_field(&basis, &v, &angles).unwrap();
        assert_eq!(ff.len(), 5);
        assert!(far_field(&basis, &v, &[0.123]).is_err());
        assert!(FarFieldPattern::new(vec![1.0, 0.5], vec![Complex64::new(0.0, 0.0); 2]).is_err());
    }
}
