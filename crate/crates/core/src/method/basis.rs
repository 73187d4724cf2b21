use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::BoundaryCondition;
use crate::error::{Error, Result};
use crate::geometry::{dot, greens_function, norm, Point, Surface};
use crate::specfun::{gauss_legendre, legendre_p_all, sph_hankel1_all};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BasisKind {
    /// Plane waves `e^{ik d·r}`. `weights` are the angular quadrature weights
    /// of the direction grid; they only enter the far-field transform.
    PlaneWaves { directions: Vec<Point>, weights: Vec<f64> },
    PointSources { locations: Vec<Point> },
    /// Axisymmetric outgoing modes `h_n(kr) P_n(cos θ)`, n = 0..=order.
    SphericalModes { order: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisFamily {
    pub kind: BasisKind,
    pub k: f64,
    pub dim: usize,
}

fn check_k(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { what: "wavenumber", value: k })
    }
}

impl BasisFamily {
    pub fn plane_waves(k: f64, dim: usize, directions: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        check_k(k)?;
        if directions.len() != weights.len() {
            return Err(Error::Shape(format!(
                "{} directions but {} weights",
                directions.len(),
                weights.len()
            )));
        }
        for d in &directions {
            if (norm(d) - 1.0).abs() > 1e-12 || (dim == 2 && d[2] != 0.0) {
                return Err(Error::InvalidBasis(format!("direction {d:?} is not a unit vector")));
            }
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidBasis("plane-wave weights must be positive".into()));
        }
        Ok(Self { kind: BasisKind::PlaneWaves { directions, weights }, k, dim })
    }

    /// 2D plane waves leaving the strip plane into y > 0, uniform in the
    /// tangential wavenumber `cos φ`. Angles come out ascending.
    pub fn strip_plane_waves(k: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidBasis("empty direction grid".into()));
        }
        let du = 2.0 / count as f64;
        let mut directions = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        for i in 0..count {
            let u = 1.0 - (i as f64 + 0.5) * du;
            let s = (1.0 - u * u).sqrt();
            directions.push([u, s, 0.0]);
            weights.push(du / s);
        }
        Self::plane_waves(k, 2, directions, weights)
    }

    /// 3D plane waves on a Gauss–Legendre (polar) × uniform (azimuth) grid.
    pub fn sphere_plane_waves(k: f64, n_polar: usize, n_azimuth: usize) -> Result<Self> {
        let (mu, w) = gauss_legendre(n_polar);
        let mut directions = Vec::with_capacity(n_polar * n_azimuth);
        let mut weights = Vec::with_capacity(n_polar * n_azimuth);
        for (&m, &wm) in mu.iter().zip(&w) {
            let s = (1.0 - m * m).sqrt();
            for q in 0..n_azimuth {
                let (sp, cp) = (2.0 * PI * q as f64 / n_azimuth as f64).sin_cos();
                directions.push([s * cp, s * sp, m]);
                weights.push(wm * 2.0 * PI / n_azimuth as f64);
            }
        }
        Self::plane_waves(k, 3, directions, weights)
    }

    pub fn point_sources(k: f64, dim: usize, locations: Vec<Point>) -> Result<Self> {
        check_k(k)?;
        if dim != 2 && dim != 3 {
            return Err(Error::Shape(format!("dimension {dim} is not 2 or 3")));
        }
        Ok(Self { kind: BasisKind::PointSources { locations }, k, dim })
    }

    pub fn spherical_modes(k: f64, order: usize) -> Result<Self> {
        check_k(k)?;
        if order > crate::specfun::MAX_ORDER {
            return Err(Error::UnsupportedOrder { order, max: crate::specfun::MAX_ORDER });
        }
        Ok(Self { kind: BasisKind::SphericalModes { order }, k, dim: 3 })
    }

    pub fn len(&self) -> usize {
        match &self.kind {
            BasisKind::PlaneWaves { directions, .. } => directions.len(),
            BasisKind::PointSources { locations } => locations.len(),
            BasisKind::SphericalModes { order } => order + 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Values and gradients of every basis function at `p`.
    pub fn eval_all(&self, p: &Point) -> Result<Vec<(Complex64, [Complex64; 3])>> {
        let k = self.k;
        match &self.kind {
            BasisKind::PlaneWaves { directions, .. } => Ok(directions
                .iter()
                .map(|d| {
                    let v = Complex64::from_polar(1.0, k * dot(d, p));
                    let ikv = Complex64::new(0.0, k) * v;
                    (v, [ikv * d[0], ikv * d[1], ikv * d[2]])
                })
                .collect()),
            BasisKind::PointSources { locations } => locations
                .iter()
                .map(|s| greens_function(self.dim, k, s, p).map(|g| (g.value, g.gradient)))
                .collect(),
            BasisKind::SphericalModes { order } => {
                let r = norm(p);
                if r == 0.0 {
                    return Err(Error::Singularity("spherical modes at the origin".into()));
                }
                let mu = (p[2] / r).clamp(-1.0, 1.0);
                let (h, dh) = sph_hankel1_all(*order, k * r)?;
                let (pl, dpl) = legendre_p_all(*order, mu);
                let rhat = [p[0] / r, p[1] / r, p[2] / r];
                // ∇μ = (ẑ − μ r̂)/r
                let gmu = [-mu * rhat[0] / r, -mu * rhat[1] / r, (1.0 - mu * rhat[2]) / r];
                Ok((0..=*order)
                    .map(|n| {
                        let radial = dh[n] * (k * pl[n]);
                        let angular = h[n] * dpl[n];
                        let grad = [
                            radial * rhat[0] + angular * gmu[0],
                            radial * rhat[1] + angular * gmu[1],
                            radial * rhat[2] + angular * gmu[2],
                        ];
                        (h[n] * pl[n], grad)
                    })
                    .collect())
            }
        }
    }

    fn validate_against(&self, s: &Surface) -> Result<()> {
        if self.dim != s.dim {
            return Err(Error::Shape(format!(
                "{}D basis on a {}D surface",
                self.dim, s.dim
            )));
        }
        match &self.kind {
            BasisKind::PlaneWaves { directions, .. } => {
                if s.axisymmetric && directions.iter().any(|d| d[0] != 0.0 || d[1] != 0.0) {
                    return Err(Error::InvalidBasis(
                        "non-axial plane waves on a ring surface; revolve the surface first".into(),
                    ));
                }
            }
            BasisKind::PointSources { locations } => {
                if !s.closed {
                    return Err(Error::InvalidBasis("point sources need a closed surface".into()));
                }
                for p in locations {
                    if !s.shape.contains(p) {
                        return Err(Error::InvalidBasis(format!(
                            "point source {p:?} is not strictly inside the body"
                        )));
                    }
                    if s.axisymmetric && (p[0] != 0.0 || p[1] != 0.0) {
                        return Err(Error::InvalidBasis(format!(
                            "point source {p:?} is off the symmetry axis of a ring surface"
                        )));
                    }
                }
            }
            BasisKind::SphericalModes { .. } => {}
        }
        Ok(())
    }
}

/// Boundary traces `A D_i(r_j)` (rows: nodes, columns: basis index) together
/// with the plain values `D_i(r_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Traces {
    pub bc: BoundaryCondition,
    pub trace: DMatrix<Complex64>,
    pub values: DMatrix<Complex64>,
}

impl Traces {
    pub fn nodes(&self) -> usize {
        self.trace.nrows()
    }

    pub fn basis_len(&self) -> usize {
        self.trace.ncols()
    }

    /// Traces of the basis multiplied by a common constant.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self { bc: self.bc, trace: &self.trace * c, values: &self.values * c }
    }
}

pub fn eval_basis_trace(basis: &BasisFamily, bc: BoundaryCondition, s: &Surface) -> Result<Traces> {
    basis.validate_against(s)?;
    let rows: Vec<Vec<(Complex64, Complex64)>> = s
        .nodes
        .par_iter()
        .map(|node| {
            basis.eval_all(&node.position).map(|all| {
                all.into_iter()
                    .map(|(v, g)| {
                        let t = match bc {
                            BoundaryCondition::Soft => v,
                            BoundaryCondition::Hard => {
                                g[0] * node.normal[0] + g[1] * node.normal[1] + g[2] * node.normal[2]
                            }
                        };
                        (t, v)
                    })
                    .collect()
            })
        })
        .collect::<Result<_>>()?;
    let (m, n) = (s.len(), basis.len());
    let trace = DMatrix::from_fn(m, n, |j, i| rows[j][i].0);
    let values = DMatrix::from_fn(m, n, |j, i| rows[j][i].1);
    Ok(Traces { bc, trace, values })
}
