//! Dense 2D boundary-integral oracles.
//!
//! Closed curves (circle, ellipse) use Nyström discretisation with the
//! logarithmic kernel split and trigonometric product quadrature:
//! a combined-field equation for the soft problem (coupling η = k) and an
//! indirect single-layer equation for the hard one. The zero-thickness strip
//! uses a spectral Galerkin method with Chebyshev weights that build in the
//! edge behaviour: a first-kind single-layer equation (soft) and the
//! Maue-regularised hypersingular equation (hard).

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Shape, Surface};
use crate::method::{BoundaryCondition, FarFieldPattern, IncidentField};
use crate::specfun::bessel01;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Systems with a larger 2-norm condition number are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Boundary density plus what is needed to radiate it:
/// `F(x̂) = C Σ_j e^{−ik x̂·y_j} (s_j + x̂·w_j)`, `C = e^{iπ/4}/√(8πk)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BemSolution {
    pub bc: BoundaryCondition,
    pub k: f64,
    /// Density samples at the solver's own nodes.
    pub density: Vec<Complex64>,
    pub nodes: Vec<[f64; 2]>,
    pub condition: f64,
    scalar: Vec<Complex64>,
    vector: Vec<[Complex64; 2]>,
}

impl BemSolution {
    /// Pattern at observation angles measured from +x.
    pub fn far_field(&self, angles: &[f64]) -> Result<FarFieldPattern> {
        let c = Complex64::from_polar(1.0 / (8.0 * PI * self.k).sqrt(), FRAC_PI_4);
        let amplitude = angles
            .iter()
            .map(|&t| {
                let (sy, cx) = t.sin_cos();
                let sum: Complex64 = (0..self.nodes.len())
                    .map(|j| {
                        let y = self.nodes[j];
                        let w = self.vector[j];
                        let e = Complex64::from_polar(1.0, -self.k * (cx * y[0] + sy * y[1]));
                        e * (self.scalar[j] + w[0] * cx + w[1] * sy)
                    })
                    .sum();
                c * sum
            })
            .collect();
        FarFieldPattern::new(angles.to_vec(), amplitude)
    }
}

/// Solve the exterior problem for a 2D surface: Nyström on closed curves
/// (node count = surface resolution, must be even), spectral Galerkin on strips.
pub fn bem_dense_solve(
    s: &Surface,
    bc: BoundaryCondition,
    k: f64,
    u0: &IncidentField,
) -> Result<BemSolution> {
    if s.dim != 2 {
        return Err(Error::Shape("the boundary-integral oracle is two-dimensional".into()));
    }
    if (u0.k - k).abs() > 1e-12 * k {
        return Err(Error::Shape("incident wavenumber differs from the solver's".into()));
    }
    match s.shape {
        Shape::Strip { width } => solve_strip(k, width, bc, u0, None),
        Shape::Circle { radius } => solve_closed(&Curve::Ellipse { a: radius, b: radius }, s.resolution, bc, k, u0),
        Shape::Ellipse { semi_x, semi_y } => {
            solve_closed(&Curve::Ellipse { a: semi_x, b: semi_y }, s.resolution, bc, k, u0)
        }
        _ => Err(Error::Shape(format!("no boundary-integral oracle for {:?}", s.shape))),
    }
}

enum Curve {
    Ellipse { a: f64, b: f64 },
}

impl Curve {
    /// z(t), z'(t), z''(t)
    fn eval(&self, t: f64) -> ([f64; 2], [f64; 2], [f64; 2]) {
        let (s, c) = t.sin_cos();
        match *self {
            Curve::Ellipse { a, b } => ([a * c, b * s], [-a * s, b * c], [-a * c, -b * s]),
        }
    }
}

fn condition_number(a: &DMatrix<Complex64>) -> f64 {
    let sv = a.clone().singular_values();
    let max = sv.iter().fold(0.0f64, |m, v| m.max(*v));
    let min = sv.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

fn dense_solve(a: DMatrix<Complex64>, rhs: Vec<Complex64>) -> Result<(Vec<Complex64>, f64)> {
    let condition = condition_number(&a);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::Oracle(format!(
            "boundary-integral system is near-singular (condition number {condition:.3e})"
        )));
    }
    let b = nalgebra::DVector::from_vec(rhs);
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Oracle("boundary-integral LU solve failed".into()))?;
    Ok((x.iter().copied().collect(), condition))
}

fn solve_closed(
    curve: &Curve,
    nodes: usize,
    bc: BoundaryCondition,
    k: f64,
    u0: &IncidentField,
) -> Result<BemSolution> {
    if !nodes.is_multiple_of(2) || nodes < 8 {
        return Err(Error::Shape(format!("closed-curve oracle needs an even node count ≥ 8, got {nodes}")));
    }
    let n = nodes / 2;
    let h = PI / n as f64;
    let t: Vec<f64> = (0..nodes).map(|j| j as f64 * h).collect();
    let geo: Vec<_> = t.iter().map(|&tj| curve.eval(tj)).collect();
    // product-quadrature weights for ln(4 sin²((t−τ)/2)), indexed by i − j mod 2n
    let r: Vec<f64> = (0..nodes)
        .map(|d| {
            let tau = d as f64 * h;
            let s: f64 = (1..n).map(|m| (m as f64 * tau).cos() / m as f64).sum();
            -2.0 * PI / n as f64 * s - PI / (n * n) as f64 * (n as f64 * tau).cos()
        })
        .collect();
    let eta = k;
    let i_unit = Complex64::new(0.0, 1.0);
    let mut a = DMatrix::<Complex64>::zeros(nodes, nodes);
    for i in 0..nodes {
        let (zi, dzi, ddzi) = geo[i];
        let speed_i = dzi[0].hypot(dzi[1]);
        let ni = [dzi[1], -dzi[0]];
        for j in 0..nodes {
            let (zj, dzj, _) = geo[j];
            let speed_j = dzj[0].hypot(dzj[1]);
            let nj = [dzj[1], -dzj[0]];
            let (k1, k2) = if i == j {
                let curv = (ni[0] * ddzi[0] + ni[1] * ddzi[1]) / (speed_i * speed_i);
                match bc {
                    BoundaryCondition::Soft => {
                        let l = curv / (2.0 * PI);
                        let m2 = (Complex64::new(-EULER_GAMMA / PI - (0.5 * k * speed_i).ln() / PI, 0.5))
                            * speed_i;
                        let m1 = -speed_i / (2.0 * PI);
                        (-i_unit * eta * m1, l - i_unit * eta * m2)
                    }
                    BoundaryCondition::Hard => (Complex64::new(0.0, 0.0), Complex64::new(curv / (2.0 * PI), 0.0)),
                }
            } else {
                let d = [zi[0] - zj[0], zi[1] - zj[1]];
                let dist = d[0].hypot(d[1]);
                let b = bessel01(k * dist);
                let logf = (4.0 * (0.5 * (t[i] - t[j])).sin().powi(2)).ln();
                match bc {
                    BoundaryCondition::Soft => {
                        let proj = nj[0] * d[0] + nj[1] * d[1];
                        let l = i_unit * (0.5 * k) * proj * b.h1() / dist;
                        let l1 = -(k / (2.0 * PI)) * proj * b.j1 / dist;
                        let m = i_unit * 0.5 * b.h0() * speed_j;
                        let m1 = -(1.0 / (2.0 * PI)) * b.j0 * speed_j;
                        let k1 = Complex64::new(l1, 0.0) - i_unit * eta * m1;
                        let full = l - i_unit * eta * m;
                        (k1, full - k1 * logf)
                    }
                    BoundaryCondition::Hard => {
                        let proj = ni[0] * d[0] + ni[1] * d[1];
                        let scale = speed_j / speed_i;
                        let kp = -i_unit * (0.5 * k) * proj * b.h1() / dist * scale;
                        let k1 = Complex64::new((k / (2.0 * PI)) * proj * b.j1 / dist * scale, 0.0);
                        (k1, kp - k1 * logf)
                    }
                }
            };
            let diag = match bc {
                BoundaryCondition::Soft => 1.0,
                BoundaryCondition::Hard => -1.0,
            };
            let delta = if i == j { diag } else { 0.0 };
            a[(i, j)] = Complex64::new(delta, 0.0) + k1 * r[(i + nodes - j) % nodes] + k2 * h;
        }
    }
    let rhs: Vec<Complex64> = geo
        .iter()
        .map(|(z, dz, _)| {
            let p = [z[0], z[1], 0.0];
            match bc {
                BoundaryCondition::Soft => -2.0 * u0.value(&p),
                BoundaryCondition::Hard => {
                    let speed = dz[0].hypot(dz[1]);
                    let g = u0.gradient(&p);
                    -2.0 * (g[0] * dz[1] - g[1] * dz[0]) / speed
                }
            }
        })
        .collect();
    let (psi, condition) = dense_solve(a, rhs)?;
    let mut scalar = Vec::with_capacity(nodes);
    let mut vector = Vec::with_capacity(nodes);
    for (j, (_, dz, _)) in geo.iter().enumerate() {
        let speed = dz[0].hypot(dz[1]);
        let q = psi[j] * h;
        match bc {
            BoundaryCondition::Soft => {
                scalar.push(-i_unit * eta * speed * q);
                let c = -i_unit * k * q;
                vector.push([c * dz[1], -c * dz[0]]);
            }
            BoundaryCondition::Hard => {
                scalar.push(speed * q);
                vector.push([Complex64::new(0.0, 0.0); 2]);
            }
        }
    }
    Ok(BemSolution {
        bc,
        k,
        density: psi,
        nodes: geo.iter().map(|g| g.0).collect(),
        condition,
        scalar,
        vector,
    })
}

fn cheb_t(n: usize, x: f64) -> f64 {
    (n as f64 * x.clamp(-1.0, 1.0).acos()).cos()
}

/// Strip `[−d/2, d/2] × {0}` with `modes` Chebyshev unknowns (default
/// `⌊k d/2⌋ + 24`) and `2·modes + 16` quadrature nodes.
pub fn solve_strip(
    k: f64,
    width: f64,
    bc: BoundaryCondition,
    u0: &IncidentField,
    modes: Option<usize>,
) -> Result<BemSolution> {
    if !(k > 0.0) || !(width > 0.0) {
        return Err(Error::Domain { what: "strip k·d", value: k * width });
    }
    let a = 0.5 * width;
    let nm = modes.unwrap_or((k * a) as usize + 24);
    let m = 2 * nm + 16;
    let p = nm + 2;
    let w0 = PI / m as f64;
    let s: Vec<f64> = (0..m).map(|j| ((2 * j + 1) as f64 * PI / (2 * m) as f64).cos()).collect();
    let tn = DMatrix::from_fn(m, m, |n, j| cheb_t(n, s[j]));
    // ∫ ln|t_i − s| F(s)/√(1−s²) ds ≈ Σ_j wlog[i,j] F(s_j)
    let wlog = DMatrix::from_fn(m, m, |i, j| {
        let sum: f64 = (1..m).map(|n| -tn[(n, i)] * tn[(n, j)] / n as f64).sum();
        w0 * (-(2f64).ln() + 2.0 * sum)
    });
    let diag_k2 = Complex64::new(-(1.0 / (2.0 * PI)) * ((0.5 * k * a).ln() + EULER_GAMMA), 0.25);
    let kmat = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            return wlog[(i, j)] * (-1.0 / (2.0 * PI)) + diag_k2 * w0;
        }
        let d = (s[i] - s[j]).abs();
        let b = bessel01(k * a * d);
        let l = -(1.0 / (2.0 * PI)) * b.j0;
        let g = Complex64::new(0.0, 0.25) * b.h0();
        let k2 = g - l * d.ln();
        wlog[(i, j)] * l + k2 * w0
    });
    let tp = DMatrix::from_fn(p, m, |n, j| Complex64::new(tn[(n, j)], 0.0));
    let sbar = (&tp * &kmat * tp.transpose()) * Complex64::new(w0, 0.0);

    let py = u0.direction[1];
    let inc: Vec<Complex64> = s.iter().map(|&sj| u0.value(&[a * sj, 0.0, 0.0])).collect();
    let c = Complex64::new(0.0, 1.0);
    match bc {
        BoundaryCondition::Soft => {
            let sys = sbar.view((0, 0), (nm, nm)).into_owned();
            let rhs = (0..nm)
                .map(|q| -w0 * (0..m).map(|j| inc[j] * tn[(q, j)]).sum::<Complex64>())
                .collect();
            let (coef, condition) = dense_solve(sys, rhs)?;
            let g: Vec<Complex64> =
                (0..m).map(|j| (0..nm).map(|q| coef[q] * tn[(q, j)]).sum()).collect();
            Ok(BemSolution {
                bc,
                k,
                scalar: g.iter().map(|gj| gj * w0).collect(),
                vector: vec![[Complex64::new(0.0, 0.0); 2]; m],
                nodes: s.iter().map(|&sj| [a * sj, 0.0]).collect(),
                density: g,
                condition,
            })
        }
        BoundaryCondition::Hard => {
            let f: Vec<Complex64> = inc.iter().map(|u| -c * k * py * u).collect();
            let mut sys = DMatrix::<Complex64>::zeros(nm, nm);
            let q2 = 0.25 * a * a * k * k;
            for i in 0..nm {
                for j in 0..nm {
                    let hyper = sbar[(i + 1, j + 1)] * -(((i + 1) * (j + 1)) as f64);
                    let mass = sbar[(i, j)] - sbar[(i, j + 2)] - sbar[(i + 2, j)] + sbar[(i + 2, j + 2)];
                    sys[(i, j)] = hyper + mass * q2;
                }
            }
            let rhs = (0..nm)
                .map(|q| {
                    a * w0 * 0.5 * (0..m).map(|j| (tn[(q, j)] - tn[(q + 2, j)]) * f[j]).sum::<Complex64>()
                })
                .collect();
            let (coef, condition) = dense_solve(sys, rhs)?;
            // μ(as)·√(1−s²) at the nodes
            let musq: Vec<Complex64> = (0..m)
                .map(|j| 0.5 * (0..nm).map(|q| coef[q] * (tn[(q, j)] - tn[(q + 2, j)])).sum::<Complex64>())
                .collect();
            Ok(BemSolution {
                bc,
                k,
                scalar: vec![Complex64::new(0.0, 0.0); m],
                vector: musq.iter().map(|mu| [Complex64::new(0.0, 0.0), -c * k * a * w0 * mu]).collect(),
                nodes: s.iter().map(|&sj| [a * sj, 0.0]).collect(),
                density: musq,
                condition,
            })
        }
    }
}
