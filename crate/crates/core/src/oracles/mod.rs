//! Independent reference solutions.

pub mod bem;
pub mod kirchhoff;
pub mod lippmann;
pub mod mie;

pub use bem::{bem_dense_solve, solve_strip, BemSolution};
pub use kirchhoff::{kirchhoff_pattern, kirchhoff_pattern_k};
pub use lippmann::{lippmann_schwinger, LsSolution, VolumePotential};
pub use mie::{cylinder_series, mie_coefficients, mie_series, MieCoefficients, MieSolution};
