//! First- and second-order Born approximations, including the modified
//! second-order term that depends only on `|Ξ|²` and carries a normalising
//! weight β.
//!
//! ```text
//! First           u₀ − Σ' β(r′) G(r′,r) Ξ(r′) u₀(r′)
//! SecondStandard  u₀ − Σ' G(r′,r) Ξ(r′) u₀(r′) + Σ' Σ'' G(r′,r) Ξ(r′) G(r″,r′) Ξ(r″) u₀(r″)
//! SecondModified  First − Σ' β(r′) G(r′,r) u₀(r′) Σ'' G(r″,r′) |Ξ(r″)|²
//! ```
//!
//! Sums run over grid cells with weight `h^d`; a cell's own contribution uses
//! the equal-measure disk/ball integral. With `alt_reading`, the modified
//! term takes `u₀` at r″ instead of r′.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{greens_function, Point};
use crate::method::IncidentField;
use crate::oracles::lippmann::{greens_value, VolumePotential};
use crate::specfun::gauss_legendre;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BornOrder {
    First,
    SecondStandard,
    SecondModified,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BornOptions {
    /// Use β ≡ 1 everywhere.
    pub unit_beta: bool,
    /// Evaluate u₀ at r″ in the modified second term.
    pub alt_reading: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BornResult {
    pub order: BornOrder,
    /// Total field at the evaluation points.
    pub field: Vec<Complex64>,
    /// First-order scattered term, `−Σ' β G Ξ u₀`.
    pub first_term: Vec<Complex64>,
    /// Second-order scattered term (zero for `First`).
    pub second_term: Vec<Complex64>,
    pub beta_used: Vec<f64>,
}

/// `∫ |G|²` over the equal-measure disk/ball around the singularity.
fn self_cell_g2(dim: usize, k: f64, rho: f64) -> f64 {
    if dim == 3 {
        return rho / (4.0 * PI);
    }
    // (1/16) 2π ∫₀^ρ |H₀(kr)|² r dr with r = ρ t²
    let (x, w) = gauss_legendre(64);
    x.iter()
        .zip(&w)
        .map(|(&xi, &wi)| {
            let t = 0.5 * (xi + 1.0);
            let r = rho * t * t;
            greens_value(2, k, r).norm_sqr() * 2.0 * PI * r * 2.0 * rho * t * 0.5 * wi
        })
        .sum()
}

/// `β(r′) = 1 / (1 + ∫ |Ξ(r″)|² |G(r″, r′)|² dr″)` on the grid.
pub fn beta_weight(pot: &VolumePotential, k: f64) -> Result<Vec<f64>> {
    if !(k > 0.0) {
        return Err(Error::Domain { what: "wavenumber", value: k });
    }
    let vol = pot.cell_volume();
    let n = pot.len();
    let mut table: Vec<f64> =
        (0..n).map(|off| if off == 0 { 0.0 } else { greens_value(pot.dim, k, pot.offset_distance(off)).norm_sqr() * vol }).collect();
    table[0] = self_cell_g2(pot.dim, k, pot.cell_radius());
    let xi2: Vec<(usize, f64)> = pot
        .values
        .iter()
        .enumerate()
        .map(|(j, v)| (j, v.norm_sqr()))
        .filter(|(_, a)| *a > 0.0)
        .collect();
    Ok((0..n)
        .into_par_iter()
        .map(|i| 1.0 / (1.0 + xi2.iter().map(|&(j, a)| a * table[pot.offset(i, j)]).sum::<f64>()))
        .collect())
}

pub fn born_approximation(
    pot: &VolumePotential,
    u0: &IncidentField,
    k: f64,
    order: BornOrder,
    points: &[Point],
    options: BornOptions,
) -> Result<BornResult> {
    for p in points {
        if pot.covers(p) {
            return Err(Error::UnsupportedRegion(format!("{p:?}")));
        }
    }
    let n = pot.len();
    let vol = pot.cell_volume();
    let grid = pot.points();
    let beta = if options.unit_beta { vec![1.0; n] } else { beta_weight(pot, k)? };
    let inc: Vec<Complex64> = grid.iter().map(|p| u0.value(p)).collect();
    let support: Vec<usize> = (0..n).filter(|&j| pot.values[j].norm_sqr() > 0.0).collect();
    let table = pot.kernel_table(k);

    // Per-cell source strengths s(r′) whose radiation gives the second term.
    let second_source: Option<Vec<Complex64>> = match order {
        BornOrder::First => None,
        BornOrder::SecondStandard => Some(
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let inner: Complex64 = support
                        .iter()
                        .map(|&j| table[pot.offset(i, j)] * pot.values[j] * inc[j])
                        .sum();
                    pot.values[i] * inner
                })
                .collect(),
        ),
        BornOrder::SecondModified => Some(
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let q: Complex64 = support
                        .iter()
                        .map(|&j| {
                            let w = table[pot.offset(i, j)] * pot.values[j].norm_sqr();
                            if options.alt_reading {
                                w * inc[j]
                            } else {
                                w
                            }
                        })
                        .sum();
                    let u = if options.alt_reading { Complex64::new(1.0, 0.0) } else { inc[i] };
                    -(q * u * beta[i])
                })
                .collect(),
        ),
    };

    let mut field = Vec::with_capacity(points.len());
    let mut first_term = Vec::with_capacity(points.len());
    let mut second_term = Vec::with_capacity(points.len());
    for p in points {
        let g: Vec<Complex64> = grid
            .iter()
            .map(|q| greens_function(pot.dim, k, q, p).map(|e| e.value * vol))
            .collect::<Result<_>>()?;
        let first: Complex64 = -(0..n).map(|j| g[j] * pot.values[j] * inc[j] * beta[j]).sum::<Complex64>();
        let second: Complex64 = match &second_source {
            None => Complex64::new(0.0, 0.0),
            Some(s) => (0..n).map(|j| g[j] * s[j]).sum(),
        };
        // the standard series uses β ≡ 1 throughout
        let first_used = if order == BornOrder::SecondStandard && !options.unit_beta {
            -(0..n).map(|j| g[j] * pot.values[j] * inc[j]).sum::<Complex64>()
        } else {
            first
        };
        field.push(u0.value(p) + first_used + second);
        first_term.push(first_used);
        second_term.push(second);
    }
    let beta_used = if order == BornOrder::SecondStandard { vec![1.0; n] } else { beta };
    Ok(BornResult { order, field, first_term, second_term, beta_used })
}
