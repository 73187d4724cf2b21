//! Discretised boundaries and free-space Green's functions.
//!
//! Points are stored as `[f64; 3]` in every dimension; 2D geometry lives in the
//! `z = 0` plane. Axisymmetric bodies (sphere, spheroid) are discretised as
//! rings: one node per ring at azimuth 0 carrying the full ring weight.
//! [`Surface::revolve`] expands a ring surface into an ordinary 3D one.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{bessel01, gauss_legendre};

pub type Point = [f64; 3];

pub(crate) fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    Sphere { radius: f64 },
    /// Zero-thickness segment along x in the plane y = 0, normal +y.
    Strip { width: f64 },
    /// Prolate spheroid with the polar semi-axis along z.
    Spheroid { equatorial: f64, polar: f64 },
    Circle { radius: f64 },
    Ellipse { semi_x: f64, semi_y: f64 },
}

impl Shape {
    pub fn dim(&self) -> usize {
        match self {
            Shape::Sphere { .. } | Shape::Spheroid { .. } => 3,
            _ => 2,
        }
    }

    /// Whether `p` lies strictly inside the body. Open shapes have no interior.
    pub fn contains(&self, p: &Point) -> bool {
        match *self {
            Shape::Sphere { radius } => norm(p) < radius,
            Shape::Spheroid { equatorial, polar } => {
                let rho2 = p[0] * p[0] + p[1] * p[1];
                rho2 / (equatorial * equatorial) + p[2] * p[2] / (polar * polar) < 1.0
            }
            Shape::Circle { radius } => p[0].hypot(p[1]) < radius && p[2] == 0.0,
            Shape::Ellipse { semi_x, semi_y } => {
                (p[0] / semi_x).powi(2) + (p[1] / semi_y).powi(2) < 1.0 && p[2] == 0.0
            }
            Shape::Strip { .. } => false,
        }
    }

    /// Exact measure (area or length) where a closed form exists.
    pub fn measure(&self) -> Option<f64> {
        match *self {
            Shape::Sphere { radius } => Some(4.0 * PI * radius * radius),
            Shape::Strip { width } => Some(width),
            Shape::Spheroid { equatorial: a, polar: c } => {
                let e = (1.0 - a * a / (c * c)).sqrt();
                Some(2.0 * PI * a * a * (1.0 + c / (a * e) * e.asin()))
            }
            Shape::Circle { radius } => Some(2.0 * PI * radius),
            Shape::Ellipse { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceNode {
    pub position: Point,
    pub normal: Point,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Surface {
    pub shape: Shape,
    pub nodes: Vec<SurfaceNode>,
    pub closed: bool,
    pub dim: usize,
    /// Largest chord of the body.
    pub char_size: f64,
    /// Ring discretisation: each node stands for a full circle about the z axis.
    pub axisymmetric: bool,
    pub resolution: usize,
}

/// Build a quadrature surface for `shape` with `resolution` nodes
/// (rings for the axisymmetric bodies).
pub fn make_surface(shape: Shape, resolution: usize) -> Result<Surface> {
    if resolution < 4 {
        return Err(Error::TooCoarse(resolution));
    }
    let positive = |what: &'static str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain { what, value: v })
        }
    };
    let n = resolution;
    let (nodes, closed, char_size, axisymmetric) = match shape {
        Shape::Sphere { radius: a } => {
            positive("sphere radius", a)?;
            let (mu, w) = gauss_legendre(n);
            let nodes = mu
                .iter()
                .zip(&w)
                .map(|(&m, &wi)| {
                    let s = (1.0 - m * m).sqrt();
                    SurfaceNode {
                        position: [a * s, 0.0, a * m],
                        normal: [s, 0.0, m],
                        weight: 2.0 * PI * a * a * wi,
                    }
                })
                .collect();
            (nodes, true, 2.0 * a, true)
        }
        Shape::Spheroid { equatorial: a, polar: c } => {
            positive("spheroid equatorial semi-axis", a)?;
            positive("spheroid polar semi-axis", c)?;
            if c <= a {
                return Err(Error::NotProlate { equatorial: a, polar: c });
            }
            let (mu, w) = gauss_legendre(n);
            let nodes = mu
                .iter()
                .zip(&w)
                .map(|(&m, &wi)| {
                    let s = (1.0 - m * m).sqrt();
                    let (rho, z) = (a * s, c * m);
                    let (nr, nz) = (rho / (a * a), z / (c * c));
                    let nn = nr.hypot(nz);
                    SurfaceNode {
                        position: [rho, 0.0, z],
                        normal: [nr / nn, 0.0, nz / nn],
                        weight: 2.0 * PI * a * (a * a * m * m + c * c * (1.0 - m * m)).sqrt() * wi,
                    }
                })
                .collect();
            (nodes, true, 2.0 * c, true)
        }
        Shape::Strip { width: d } => {
            positive("strip width", d)?;
            let (x, w) = gauss_legendre(n);
            let nodes = x
                .iter()
                .zip(&w)
                .map(|(&xi, &wi)| SurfaceNode {
                    position: [0.5 * d * xi, 0.0, 0.0],
                    normal: [0.0, 1.0, 0.0],
                    weight: 0.5 * d * wi,
                })
                .collect();
            (nodes, false, d, false)
        }
        Shape::Circle { radius: r } => {
            positive("circle radius", r)?;
            let nodes = (0..n)
                .map(|j| {
                    let t = 2.0 * PI * j as f64 / n as f64;
                    let (s, c) = t.sin_cos();
                    SurfaceNode {
                        position: [r * c, r * s, 0.0],
                        normal: [c, s, 0.0],
                        weight: 2.0 * PI * r / n as f64,
                    }
                })
                .collect();
            (nodes, true, 2.0 * r, false)
        }
        Shape::Ellipse { semi_x: a, semi_y: b } => {
            positive("ellipse semi-axis", a)?;
            positive("ellipse semi-axis", b)?;
            let nodes = (0..n)
                .map(|j| {
                    let t = 2.0 * PI * j as f64 / n as f64;
                    let (s, c) = t.sin_cos();
                    let speed = (a * s).hypot(b * c);
                    SurfaceNode {
                        position: [a * c, b * s, 0.0],
                        normal: [b * c / speed, a * s / speed, 0.0],
                        weight: 2.0 * PI * speed / n as f64,
                    }
                })
                .collect();
            (nodes, true, 2.0 * a.max(b), false)
        }
    };
    Ok(Surface { shape, nodes, closed, dim: shape.dim(), char_size, axisymmetric, resolution })
}

impl Surface {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    /// Expand a ring surface into `m` azimuthal copies (trapezoid rule in
    /// azimuth). Surfaces that are not ring surfaces are returned unchanged.
    pub fn revolve(&self, m: usize) -> Result<Surface> {
        if !self.axisymmetric {
            return Ok(self.clone());
        }
        if m < 4 {
            return Err(Error::TooCoarse(m));
        }
        let mut nodes = Vec::with_capacity(self.nodes.len() * m);
        for ring in &self.nodes {
            let rho = ring.position[0];
            let nr = ring.normal[0];
            for q in 0..m {
                let (s, c) = (2.0 * PI * q as f64 / m as f64).sin_cos();
                nodes.push(SurfaceNode {
                    position: [rho * c, rho * s, ring.position[2]],
                    normal: [nr * c, nr * s, ring.normal[2]],
                    weight: ring.weight / m as f64,
                });
            }
        }
        Ok(Surface { nodes, axisymmetric: false, ..self.clone() })
    }
}

/// Free-space Green's function and its gradient with respect to the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensEval {
    pub value: Complex64,
    pub gradient: [Complex64; 3],
}

pub fn greens_function(dim: usize, k: f64, source: &Point, target: &Point) -> Result<GreensEval> {
    let d = sub(target, source);
    let r = norm(&d);
    if r == 0.0 {
        return Err(Error::Singularity("source and target coincide".into()));
    }
    let (value, radial) = match dim {
        3 => {
            let g = Complex64::from_polar(1.0 / (4.0 * PI * r), k * r);
            (g, g * Complex64::new(-1.0 / r, k))
        }
        2 => {
            let b = bessel01(k * r);
            let i4 = Complex64::new(0.0, 0.25);
            (i4 * b.h0(), -i4 * k * b.h1())
        }
        _ => return Err(Error::Shape(format!("dimension {dim} is not 2 or 3"))),
    };
    let gradient = [radial * (d[0] / r), radial * (d[1] / r), radial * (d[2] / r)];
    Ok(GreensEval { value, gradient })
}

/// Quadrature of conj(f) g over the surface.
pub fn surface_inner_product(s: &Surface, f: &[Complex64], g: &[Complex64]) -> Result<Complex64> {
    if f.len() != s.len() || g.len() != s.len() {
        return Err(Error::Shape(format!(
            "expected {} node samples, got {} and {}",
            s.len(),
            f.len(),
            g.len()
        )));
    }
    Ok(s.nodes.iter().zip(f.iter().zip(g)).map(|(n, (a, b))| (a.conj() * b) * n.weight).sum())
}
