//! Volume potentials on uniform grids and the Lippmann–Schwinger oracle
//! `u = u₀ − ∫ G(r, r′) Ξ(r′) u(r′) dr′`.
//!
//! Off-diagonal cells use the midpoint rule; a cell's own contribution uses
//! the exact integral of G over the disk (2D) or ball (3D) of equal measure.
//! The grid is translation invariant, so the kernel is tabulated once per
//! offset and applied matrix-free.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{greens_function, Point};
use crate::method::IncidentField;
use crate::specfun::bessel01;

/// Largest grid solved by dense LU when the fixed point does not contract.
pub const MAX_DENSE_UNKNOWNS: usize = 6000;

#[derive(Debug, Clone, PartialEq)]
pub struct VolumePotential {
    pub dim: usize,
    pub h: f64,
    /// Points per axis.
    pub n: usize,
    pub half_extent: f64,
    /// Samples of Ξ in lexicographic order (x slowest).
    pub values: Vec<Complex64>,
}

impl VolumePotential {
    /// Samples `f` on `[−L, L]^dim` with spacing `h`; the outermost layer of
    /// the grid is forced to zero.
    pub fn from_fn(dim: usize, half_extent: f64, h: f64, f: impl Fn(&Point) -> Complex64) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::Shape(format!("dimension {dim} is not 2 or 3")));
        }
        if !(h > 0.0) || !(half_extent > h) {
            return Err(Error::Domain { what: "grid spacing", value: h });
        }
        let n = (2.0 * half_extent / h).round() as usize + 1;
        let mut pot = Self { dim, h, n, half_extent, values: Vec::new() };
        pot.values = (0..pot.len())
            .map(|i| if pot.on_boundary(i) { Complex64::new(0.0, 0.0) } else { f(&pot.point(i)) })
            .collect();
        if pot.values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain { what: "potential sample", value: f64::NAN });
        }
        Ok(pot)
    }

    /// `amplitude · exp(−|r|²/(2 width²))`.
    pub fn gaussian(dim: usize, amplitude: Complex64, width: f64, half_extent: f64, h: f64) -> Result<Self> {
        Self::from_fn(dim, half_extent, h, |p| {
            let r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
            amplitude * (-r2 / (2.0 * width * width)).exp()
        })
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    fn index(&self, i: usize) -> [usize; 3] {
        let n = self.n;
        if self.dim == 2 {
            [i / n, i % n, 0]
        } else {
            [i / (n * n), (i / n) % n, i % n]
        }
    }

    fn on_boundary(&self, i: usize) -> bool {
        let idx = self.index(i);
        idx[..self.dim].iter().any(|&c| c == 0 || c == self.n - 1)
    }

    pub fn point(&self, i: usize) -> Point {
        let idx = self.index(i);
        let c = |m: usize| -self.half_extent + m as f64 * self.h;
        if self.dim == 2 {
            [c(idx[0]), c(idx[1]), 0.0]
        } else {
            [c(idx[0]), c(idx[1]), c(idx[2])]
        }
    }

    pub fn points(&self) -> Vec<Point> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Same grid, values multiplied by `alpha`.
    pub fn scaled(&self, alpha: Complex64) -> Self {
        Self { values: self.values.iter().map(|v| v * alpha).collect(), ..self.clone() }
    }

    /// Whether `p` lies in the closed bounding box of the grid.
    pub fn covers(&self, p: &Point) -> bool {
        let l = self.half_extent + 1e-12;
        p[..self.dim].iter().all(|c| c.abs() <= l) && (self.dim == 3 || p[2] == 0.0)
    }

    /// Radius of the disk (2D) or ball (3D) with the cell's measure.
    pub(crate) fn cell_radius(&self) -> f64 {
        if self.dim == 2 {
            self.h / PI.sqrt()
        } else {
            self.h * (3.0 / (4.0 * PI)).cbrt()
        }
    }

    /// Flat offset index of the separation between grid points `i` and `j`.
    pub(crate) fn offset(&self, i: usize, j: usize) -> usize {
        let (a, b) = (self.index(i), self.index(j));
        let d = |m: usize| a[m].abs_diff(b[m]);
        if self.dim == 2 {
            d(0) * self.n + d(1)
        } else {
            (d(0) * self.n + d(1)) * self.n + d(2)
        }
    }

    pub(crate) fn offset_distance(&self, off: usize) -> f64 {
        let n = self.n;
        let h = self.h;
        if self.dim == 2 {
            h * ((off / n) as f64).hypot((off % n) as f64)
        } else {
            let (a, b, c) = ((off / (n * n)) as f64, ((off / n) % n) as f64, (off % n) as f64);
            h * (a * a + b * b + c * c).sqrt()
        }
    }

    /// `∫_cell G` tabulated by offset: midpoint rule away from the origin,
    /// exact equal-measure disk/ball integral at the origin.
    pub(crate) fn kernel_table(&self, k: f64) -> Vec<Complex64> {
        let vol = self.cell_volume();
        let count = self.len();
        let mut t: Vec<Complex64> = (0..count)
            .into_par_iter()
            .map(|off| {
                if off == 0 {
                    return Complex64::new(0.0, 0.0);
                }
                let r = self.offset_distance(off);
                greens_value(self.dim, k, r) * vol
            })
            .collect();
        t[0] = self_cell_integral(self.dim, k, self.cell_radius());
        t
    }
}

pub(crate) fn greens_value(dim: usize, k: f64, r: f64) -> Complex64 {
    if dim == 3 {
        Complex64::from_polar(1.0 / (4.0 * PI * r), k * r)
    } else {
        Complex64::new(0.0, 0.25) * bessel01(k * r).h0()
    }
}

/// `∫ G` over a disk/ball of radius `rho` centred on the singularity.
pub(crate) fn self_cell_integral(dim: usize, k: f64, rho: f64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    if dim == 3 {
        // ∫₀^ρ r e^{ikr} dr
        Complex64::from_polar(1.0, k * rho) * (rho / (i * k) + 1.0 / (k * k)) - 1.0 / (k * k)
    } else {
        // (i/4) 2π ∫₀^ρ H₀(kr) r dr
        let h1 = bessel01(k * rho).h1();
        i * 0.25 * 2.0 * PI * (h1 * rho / k + 2.0 * i / (PI * k * k))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsSolution {
    /// Total field at the grid points.
    pub u: Vec<Complex64>,
    /// `‖u − u₀ + ∫GΞu‖ / ‖u₀‖` on the grid.
    pub residual: f64,
    /// Power-iteration estimate of the spectral radius of the integral operator.
    pub contraction: f64,
    pub dense: bool,
    k: f64,
    pot: VolumePotential,
    u0: IncidentField,
}

struct Operator<'a> {
    pot: &'a VolumePotential,
    table: Vec<Complex64>,
}

impl Operator<'_> {
    /// `(K u)_i = Σ_j T(i − j) Ξ_j u_j`, summed in ascending j.
    fn apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        let xu: Vec<(usize, Complex64)> = self
            .pot
            .values
            .iter()
            .zip(u)
            .enumerate()
            .filter(|(_, (x, _))| x.norm_sqr() > 0.0)
            .map(|(j, (x, v))| (j, x * v))
            .collect();
        (0..u.len())
            .into_par_iter()
            .map(|i| xu.iter().map(|&(j, w)| self.table[self.pot.offset(i, j)] * w).sum())
            .collect()
    }
}

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn lippmann_schwinger(pot: &VolumePotential, u0: &IncidentField, k: f64) -> Result<LsSolution> {
    if !(k > 0.0) {
        return Err(Error::Domain { what: "wavenumber", value: k });
    }
    let op = Operator { pot, table: pot.kernel_table(k) };
    let points = pot.points();
    let inc: Vec<Complex64> = points.iter().map(|p| u0.value(p)).collect();
    let inc_norm = l2(&inc);
    let finish = |u: Vec<Complex64>, contraction: f64, dense: bool| {
        let ku = op.apply(&u);
        let r: Vec<Complex64> = (0..u.len()).map(|i| u[i] - inc[i] + ku[i]).collect();
        let residual = if inc_norm > 0.0 { l2(&r) / inc_norm } else { l2(&r) };
        LsSolution { u, residual, contraction, dense, k, pot: pot.clone(), u0: *u0 }
    };
    if pot.values.iter().all(|v| v.norm_sqr() == 0.0) || inc_norm == 0.0 {
        return Ok(finish(inc.clone(), 0.0, false));
    }

    // spectral-radius estimate by power iteration from a deterministic start
    let mut x: Vec<Complex64> = (0..inc.len()).map(|i| Complex64::new(1.0, (i % 7) as f64 * 0.1)).collect();
    let mut contraction = 0.0;
    for _ in 0..30 {
        let y = op.apply(&x);
        let (ny, nx) = (l2(&y), l2(&x));
        if ny == 0.0 {
            contraction = 0.0;
            break;
        }
        contraction = ny / nx;
        x = y.iter().map(|v| v / ny).collect();
    }

    if contraction < 0.8 {
        let mut u = inc.clone();
        for _ in 0..5000 {
            let ku = op.apply(&u);
            let next: Vec<Complex64> = (0..u.len()).map(|i| inc[i] - ku[i]).collect();
            let delta: f64 = next.iter().zip(&u).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            u = next;
            if delta <= 1e-14 * l2(&u) {
                return Ok(finish(u, contraction, false));
            }
        }
    }
    let n = inc.len();
    if n > MAX_DENSE_UNKNOWNS {
        return Err(Error::Oracle(format!(
            "fixed-point iteration does not contract (estimate {contraction:.3}) and {n} unknowns exceed the dense limit"
        )));
    }
    let a = DMatrix::from_fn(n, n, |i, j| {
        let d = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        d + op.table[pot.offset(i, j)] * pot.values[j]
    });
    let u = a
        .lu()
        .solve(&DVector::from_vec(inc.clone()))
        .ok_or_else(|| Error::Oracle("Lippmann–Schwinger system is singular".into()))?;
    Ok(finish(u.iter().copied().collect(), contraction, true))
}

impl LsSolution {
    /// Total field at points off the grid.
    pub fn field_at(&self, points: &[Point]) -> Result<Vec<Complex64>> {
        let vol = self.pot.cell_volume();
        let grid = self.pot.points();
        points
            .iter()
            .map(|p| {
                let mut s = Complex64::new(0.0, 0.0);
                for (j, q) in grid.iter().enumerate() {
                    let x = self.pot.values[j];
                    if x.norm_sqr() == 0.0 {
                        continue;
                    }
                    s += greens_function(self.pot.dim, self.k, q, p)?.value * x * self.u[j] * vol;
                }
                Ok(self.u0.value(p) - s)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(h: f64, amp: f64) -> (VolumePotential, IncidentField, f64) {
        let k = 2.0 * PI;
        let pot = VolumePotential::gaussian(2, Complex64::new(amp, 0.0), 0.3, 1.5, h).unwrap();
        let u0 = IncidentField::new([0.0, -1.0, 0.0], Complex64::new(1.0, 0.0), k).unwrap();
        (pot, u0, k)
    }

    #[test]
    fn self_cell_integral_matches_quadrature() {
        let k = 2.0 * PI;
        let rho = 0.1 / PI.sqrt();
        // substitute r = ρ t² to tame the logarithm
        let (x, w) = crate::specfun::gauss_legendre(200);
        let q: Complex64 = x
            .iter()
            .zip(&w)
            .map(|(&xi, &wi)| {
                let t = 0.5 * (xi + 1.0);
                let r = rho * t * t;
                greens_value(2, k, r) * 2.0 * PI * r * (2.0 * rho * t) * 0.5 * wi
            })
            .sum();
        assert!((q - self_cell_integral(2, k, rho)).norm() < 1e-10 * q.norm());
        let q3: Complex64 = x
            .iter()
            .zip(&w)
            .map(|(&xi, &wi)| {
                let r = 0.5 * rho * (xi + 1.0);
                greens_value(3, k, r) * 4.0 * PI * r * r * 0.5 * rho * wi
            })
            .sum();
        assert!((q3 - self_cell_integral(3, k, rho)).norm() < 1e-12 * q3.norm());
    }

    #[test]
    fn zero_potential_returns_incident_field() {
        let (pot, u0, k) = setup(0.1, 0.0);
        let sol = lippmann_schwinger(&pot, &u0, k).unwrap();
        for (i, p) in pot.points().iter().enumerate() {
            assert_eq!(sol.u[i], u0.value(p));
        }
    }

    #[test]
    fn boundary_layer_is_zero() {
        let (pot, _, _) = setup(0.25, 1.0);
        for i in 0..pot.len() {
            if pot.on_boundary(i) {
                assert_eq!(pot.values[i], Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn residual_is_small() {
        let (pot, u0, k) = setup(0.1, 1.0);
        let sol = lippmann_schwinger(&pot, &u0, k).unwrap();
        assert!(sol.residual <= 1e-8, "{}", sol.residual);
        let strong = pot.scaled(Complex64::new(400.0, 0.0));
        let sol = lippmann_schwinger(&strong, &u0, k).unwrap();
        assert!(sol.dense && sol.residual <= 1e-8, "{} {}", sol.contraction, sol.residual);
    }

    #[test]
    fn weak_limit_is_first_born() {
        let (pot, u0, k) = setup(0.15, 1.0);
        let table = pot.kernel_table(k);
        let inc: Vec<Complex64> = pot.points().iter().map(|p| u0.value(p)).collect();
        let op = Operator { pot: &pot, table };
        let born1 = op.apply(&inc);
        let mut ratios = Vec::new();
        for alpha in [1e-2, 1e-3] {
            let sol = lippmann_schwinger(&pot.scaled(Complex64::new(alpha, 0.0)), &u0, k).unwrap();
            let err: Vec<Complex64> =
                (0..inc.len()).map(|i| sol.u[i] - inc[i] + born1[i] * alpha).collect();
            ratios.push(l2(&err) / (alpha * l2(&born1)));
        }
        // relative deviation from the linear term is O(α)
        assert!(ratios[0] < 0.05 && ratios[1] < 0.1 * ratios[0] * 1.5, "{ratios:?}");
    }

    #[test]
    fn refinement_changes_solution_little() {
        let (coarse, u0, k) = setup(0.1, 1.0);
        let (fine, _, _) = setup(0.05, 1.0);
        let a = lippmann_schwinger(&coarse, &u0, k).unwrap();
        let b = lippmann_schwinger(&fine, &u0, k).unwrap();
        // compare at coincident grid points
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..coarse.len() {
            let p = coarse.point(i);
            let ix = ((p[0] + 1.5) / 0.05).round() as usize;
            let iy = ((p[1] + 1.5) / 0.05).round() as usize;
            let j = ix * fine.n + iy;
            num += (a.u[i] - b.u[j]).norm_sqr();
            den += b.u[j].norm_sqr();
        }
        assert!((num / den).sqrt() < 0.01, "{}", (num / den).sqrt());
    }

    #[test]
    fn three_dimensional_grid() {
        let k = 3.0;
        let pot = VolumePotential::gaussian(3, Complex64::new(0.5, 0.0), 0.3, 0.8, 0.2).unwrap();
        let u0 = IncidentField::new([0.0, 0.0, 1.0], Complex64::new(1.0, 0.0), k).unwrap();
        let sol = lippmann_schwinger(&pot, &u0, k).unwrap();
        assert!(sol.residual < 1e-8);
        let far = sol.field_at(&[[0.0, 0.0, 5.0]]).unwrap();
        assert!(far[0].re.is_finite());
    }
}
