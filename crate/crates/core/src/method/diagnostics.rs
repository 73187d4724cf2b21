use std::cmp::Ordering;

use num_complex::Complex64;

use super::basis::Traces;
use super::gram::{DensitySpectrum, GramSystem};
use super::IncidentField;
use crate::error::{Error, Result};
use crate::geometry::{norm, sub, surface_inner_product, Surface};

/// Normalised L² norm of `A u₀ + Σ v_i A D_i` over the surface.
pub fn boundary_residual(
    s: &Surface,
    traces: &Traces,
    u0: &IncidentField,
    v: &DensitySpectrum,
) -> Result<f64> {
    if v.v.len() != traces.basis_len() || traces.nodes() != s.len() {
        return Err(Error::Shape("coefficients, traces and surface disagree in size".into()));
    }
    let au0 = u0.trace(traces.bc, s)?;
    let reference = surface_inner_product(s, &au0, &au0)?.re;
    if !(reference > 0.0) {
        return Err(Error::UndefinedNormalization);
    }
    let r: Vec<Complex64> = (0..s.len())
        .map(|j| au0[j] + (0..v.v.len()).map(|i| traces.trace[(j, i)] * v.v[i]).sum::<Complex64>())
        .collect();
    Ok((surface_inner_product(s, &r, &r)?.re / reference).sqrt())
}

/// `Φ(r_row, r_col) = Σ_i β_i [A D_i(r_col)]* A D_i(r_row)`.
pub fn kernel(traces: &Traces, beta: &[f64], row: usize, col: usize) -> Complex64 {
    (0..traces.basis_len())
        .map(|i| traces.trace[(col, i)].conj() * traces.trace[(row, i)] * beta[i])
        .sum()
}

/// `(|r_j − r_anchor|, |Φ(r_j, r_anchor)|)` for every node, sorted by distance.
pub fn kernel_profile(s: &Surface, traces: &Traces, beta: &[f64], anchor: usize) -> Result<Vec<(f64, f64)>> {
    if anchor >= s.len() {
        return Err(Error::Shape(format!("anchor node {anchor} out of range (surface has {} nodes)", s.len())));
    }
    if beta.len() != traces.basis_len() || traces.nodes() != s.len() {
        return Err(Error::Shape("β, traces and surface disagree in size".into()));
    }
    let a = &s.nodes[anchor].position;
    let mut out: Vec<(f64, f64)> = s
        .nodes
        .iter()
        .enumerate()
        .map(|(j, n)| (norm(&sub(&n.position, a)), kernel(traces, beta, j, anchor).norm()))
        .collect();
    out.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal));
    Ok(out)
}

/// `max_{χ≠ξ} (|G_χξ|/G_ξξ)·|v_χ − v_ξ| / max_i |v_i|`.
pub fn epsilon_diagnostic(sys: &GramSystem, v: &DensitySpectrum) -> Result<f64> {
    let n = sys.len();
    if v.v.len() != n {
        return Err(Error::Shape(format!("{} coefficients for a {n}-term system", v.v.len())));
    }
    let vmax = v.v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if n < 2 || vmax == 0.0 {
        return Ok(0.0);
    }
    let mut eps = 0.0f64;
    for xi in 0..n {
        let gxx = sys.g[(xi, xi)].re;
        for chi in 0..n {
            if chi != xi {
                let e = sys.g[(chi, xi)].norm() / gxx * (v.v[chi] - v.v[xi]).norm();
                eps = eps.max(e);
            }
        }
    }
    Ok(eps / vmax)
}
