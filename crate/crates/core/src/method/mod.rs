//! Approximate-orthogonality solver.
//!
//! The scattered field is written as `Σ v_i D_i` over a family of radiating
//! solutions. Imposing the boundary condition in the L² sense over the surface
//! gives the Gram system `G v = −b`; the approximate solve keeps only its
//! normalised diagonal, `v_i = −β_i b_i` with `β_i = 1/G_ii`.

mod basis;
mod diagnostics;
mod field;
mod gram;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dot, norm, Point, Surface};

pub use basis::{eval_basis_trace, BasisFamily, BasisKind, Traces};
pub use diagnostics::{boundary_residual, epsilon_diagnostic, kernel, kernel_profile};
pub use field::{eval_scattered, far_field, plane_wave_angles, FarFieldPattern};
pub use gram::{
    assemble_gram, project_incident, refine_iterate, solve_diagonal, solve_galerkin,
    DensitySpectrum, GramSystem, Refinement, Solver,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    /// Dirichlet: `A u = u`.
    Soft,
    /// Neumann: `A u = ∂u/∂n`.
    Hard,
}

impl BoundaryCondition {
    /// The complementary condition in Babinet's principle.
    pub fn dual(self) -> Self {
        match self {
            Self::Soft => Self::Hard,
            Self::Hard => Self::Soft,
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Soft => "soft",
            Self::Hard => "hard",
        })
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "soft" => Ok(Self::Soft),
            "hard" => Ok(Self::Hard),
            other => Err(Error::Usage(format!("boundary condition must be soft or hard, got '{other}'"))),
        }
    }
}

/// Plane incident wave `amplitude · e^{ik d·r}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncidentField {
    pub direction: Point,
    pub amplitude: Complex64,
    pub k: f64,
}

impl IncidentField {
    pub fn new(direction: Point, amplitude: Complex64, k: f64) -> Result<Self> {
        if (norm(&direction) - 1.0).abs() > 1e-12 {
            return Err(Error::Domain { what: "incident direction norm", value: norm(&direction) });
        }
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::Domain { what: "wavenumber", value: k });
        }
        Ok(Self { direction, amplitude, k })
    }

    pub fn value(&self, p: &Point) -> Complex64 {
        self.amplitude * Complex64::from_polar(1.0, self.k * dot(&self.direction, p))
    }

    pub fn gradient(&self, p: &Point) -> [Complex64; 3] {
        let ikv = Complex64::new(0.0, self.k) * self.value(p);
        [ikv * self.direction[0], ikv * self.direction[1], ikv * self.direction[2]]
    }

    /// `A u₀` sampled at the surface nodes.
    pub fn trace(&self, bc: BoundaryCondition, s: &Surface) -> Result<Vec<Complex64>> {
        if s.axisymmetric && (self.direction[0] != 0.0 || self.direction[1] != 0.0) {
            return Err(Error::Shape("ring surfaces need axial incidence".into()));
        }
        Ok(s.nodes
            .iter()
            .map(|n| match bc {
                BoundaryCondition::Soft => self.value(&n.position),
                BoundaryCondition::Hard => {
                    let g = self.gradient(&n.position);
                    g[0] * n.normal[0] + g[1] * n.normal[1] + g[2] * n.normal[2]
                }
            })
            .collect())
    }
}
