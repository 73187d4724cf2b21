use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::Traces;
use super::{BoundaryCondition, IncidentField};
use crate::error::{Error, Result};
use crate::geometry::{surface_inner_product, Surface};

/// Smallest eigenvalue ratio accepted by the dense solve.
const MIN_RECIPROCAL_CONDITION: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct GramSystem {
    pub g: DMatrix<Complex64>,
    pub beta: Vec<f64>,
    pub b: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Solver {
    Diagonal,
    Galerkin { lambda: f64 },
    Iterated { steps: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySpectrum {
    pub v: Vec<Complex64>,
    pub solver: Solver,
}

impl GramSystem {
    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    pub fn with_rhs(mut self, b: Vec<Complex64>) -> Result<Self> {
        if b.len() != self.len() {
            return Err(Error::Shape(format!("rhs of length {} for {} unknowns", b.len(), self.len())));
        }
        self.b = b;
        Ok(self)
    }

    /// Spectral radius of `I − diag(β) G`.
    pub fn iteration_spectral_radius(&self) -> f64 {
        let eig = self.scaled_gram().symmetric_eigenvalues();
        eig.iter().map(|l| (1.0 - l).abs()).fold(0.0, f64::max)
    }

    /// `diag(β)^{1/2} G diag(β)^{1/2}`: Hermitian, unit diagonal, and similar
    /// to `diag(β) G`.
    fn scaled_gram(&self) -> DMatrix<Complex64> {
        let s: Vec<f64> = self.beta.iter().map(|b| b.sqrt()).collect();
        let n = self.len();
        let mut h = DMatrix::from_fn(n, n, |i, j| self.g[(i, j)] * (s[i] * s[j]));
        hermitize(&mut h);
        h
    }
}

fn hermitize(m: &mut DMatrix<Complex64>) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)].im = 0.0;
        for j in 0..i {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// Gram matrix of the traces under the surface quadrature. Rows are computed
/// in parallel; each entry is summed in ascending node order, so the result
/// does not depend on the thread count.
pub fn assemble_gram(traces: &Traces, s: &Surface) -> Result<GramSystem> {
    if traces.nodes() != s.len() {
        return Err(Error::Shape(format!(
            "traces sampled at {} nodes, surface has {}",
            traces.nodes(),
            s.len()
        )));
    }
    let n = traces.basis_len();
    let cols: Vec<Vec<Complex64>> =
        (0..n).map(|i| traces.trace.column(i).iter().copied().collect()).collect();
    let upper: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| surface_inner_product(s, &cols[i], &cols[j]).expect("shape checked"))
                .collect()
        })
        .collect();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for (off, val) in upper[i].iter().enumerate() {
            let j = i + off;
            g[(i, j)] = *val;
            g[(j, i)] = val.conj();
        }
        g[(i, i)].im = 0.0;
    }
    let max_diag = (0..n).map(|i| g[(i, i)].re).fold(0.0, f64::max);
    let mut beta = Vec::with_capacity(n);
    for i in 0..n {
        let d = g[(i, i)].re;
        if !(d > 0.0) || d <= 1e-300 * max_diag {
            return Err(Error::DegenerateBasis { index: i, value: d });
        }
        beta.push(1.0 / d);
    }
    Ok(GramSystem { g, beta, b: vec![Complex64::new(0.0, 0.0); n] })
}

/// `b_i = ⟨A D_i, A u₀⟩_S`.
pub fn project_incident(
    traces: &Traces,
    s: &Surface,
    u0: &IncidentField,
    bc: BoundaryCondition,
) -> Result<Vec<Complex64>> {
    if bc != traces.bc {
        return Err(Error::Shape("boundary condition differs from the traces'".into()));
    }
    let au0 = u0.trace(bc, s)?;
    (0..traces.basis_len())
        .map(|i| {
            let col: Vec<Complex64> = traces.trace.column(i).iter().copied().collect();
            surface_inner_product(s, &col, &au0)
        })
        .collect()
}

/// `v_i = −β_i b_i`.
pub fn solve_diagonal(sys: &GramSystem) -> DensitySpectrum {
    let v = sys.beta.iter().zip(&sys.b).map(|(beta, b)| -b * *beta).collect();
    DensitySpectrum { v, solver: Solver::Diagonal }
}

/// Solve `(G + λI) v = −b`.
pub fn solve_galerkin(sys: &GramSystem, lambda: f64) -> Result<DensitySpectrum> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Domain { what: "regularisation lambda", value: lambda });
    }
    let n = sys.len();
    let mut a = sys.g.clone();
    for i in 0..n {
        a[(i, i)] += lambda;
    }
    hermitize(&mut a);
    if n == 0 {
        return Ok(DensitySpectrum { v: vec![], solver: Solver::Galerkin { lambda } });
    }
    // Judge conditioning on the β-scaled matrix so units do not matter.
    let s: Vec<f64> = (0..n).map(|i| 1.0 / a[(i, i)].re.sqrt()).collect();
    let scaled = DMatrix::from_fn(n, n, |i, j| a[(i, j)] * (s[i] * s[j]));
    let eig = scaled.symmetric_eigenvalues();
    let lmax = eig.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let lmin = eig.iter().fold(f64::INFINITY, |m, l| m.min(*l));
    if !(lmin > MIN_RECIPROCAL_CONDITION * lmax) {
        let condition = if lmin > 0.0 { lmax / lmin } else { f64::INFINITY };
        return Err(Error::SingularSystem { condition });
    }
    let rhs = DVector::from_iterator(n, sys.b.iter().map(|b| -b));
    let v = match a.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => a
            .lu()
            .solve(&rhs)
            .ok_or(Error::SingularSystem { condition: f64::INFINITY })?,
    };
    Ok(DensitySpectrum { v: v.iter().copied().collect(), solver: Solver::Galerkin { lambda } })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub spectrum: DensitySpectrum,
    /// `sqrt(Σ β_i |(G v⁽ᵐ⁾ + b)_i|²)` after each step m = 1..=n.
    pub residual_history: Vec<f64>,
    pub spectral_radius: f64,
    /// Relaxation used from step 2 on (1 when the plain iteration contracts).
    pub damping: f64,
}

/// β-preconditioned Richardson iteration starting from zero. The first step
/// is undamped and reproduces the diagonal solve; later steps are relaxed by
/// `1/λ_max(β^{1/2} G β^{1/2})` only when the plain iteration would not contract.
pub fn refine_iterate(sys: &GramSystem, n_steps: usize) -> Result<Refinement> {
    if n_steps == 0 {
        return Err(Error::Domain { what: "refinement steps", value: 0.0 });
    }
    let n = sys.len();
    let eig = if n > 0 { sys.scaled_gram().symmetric_eigenvalues() } else { DVector::zeros(0) };
    let spectral_radius = eig.iter().map(|l| (1.0 - l).abs()).fold(0.0, f64::max);
    let lmax = eig.iter().fold(0.0f64, |m, l| m.max(*l));
    let damping = if spectral_radius < 1.0 || lmax <= 0.0 { 1.0 } else { 1.0 / lmax };

    let b = DVector::from_column_slice(&sys.b);
    let mut v = DVector::<Complex64>::zeros(n);
    let mut history = Vec::with_capacity(n_steps);
    let weighted = |r: &DVector<Complex64>| {
        r.iter().zip(&sys.beta).map(|(x, beta)| beta * x.norm_sqr()).sum::<f64>().sqrt()
    };
    let mut r = b.clone();
    for step in 0..n_steps {
        let omega = if step == 0 { 1.0 } else { damping };
        for i in 0..n {
            v[i] -= r[i] * (omega * sys.beta[i]);
        }
        r = &sys.g * &v + &b;
        history.push(weighted(&r));
    }
    Ok(Refinement {
        spectrum: DensitySpectrum { v: v.iter().copied().collect(), solver: Solver::Iterated { steps: n_steps } },
        residual_history: history,
        spectral_radius,
        damping,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system(g: &[[f64; 3]; 3], b: [Complex64; 3]) -> GramSystem {
        let g = DMatrix::from_fn(3, 3, |i, j| Complex64::new(g[i][j], 0.0));
        let beta = (0..3).map(|i| 1.0 / g[(i, i)].re).collect();
        GramSystem { g, beta, b: b.to_vec() }
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_gram_makes_solvers_agree() {
        let sys = system(&[[2.0, 0.0, 0.0], [0.0, 5.0, 0.0], [0.0, 0.0, 0.5]], [c(1.0, 2.0), c(-3.0, 0.0), c(0.0, 0.25)]);
        let d = solve_diagonal(&sys);
        let g = solve_galerkin(&sys, 0.0).unwrap();
        for (a, b) in d.v.iter().zip(&g.v) {
            assert!((a - b).norm() < 1e-15);
        }
        let zero = GramSystem { b: vec![c(0.0, 0.0); 3], ..sys };
        assert!(solve_diagonal(&zero).v.iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn galerkin_residual_and_singularity() {
        let mut sys = system(&[[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]], [c(1.0, 0.0), c(0.0, 1.0), c(2.0, -1.0)]);
        sys.g[(0, 1)] = c(1.0, 0.3);
        sys.g[(1, 0)] = c(1.0, -0.3);
        let v = solve_galerkin(&sys, 0.0).unwrap();
        let r = &sys.g * DVector::from_column_slice(&v.v) + DVector::from_column_slice(&sys.b);
        let bn = DVector::from_column_slice(&sys.b).norm();
        assert!(r.norm() / bn <= 1e-10);

        let singular = system(&[[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]], [c(1.0, 0.0); 3]);
        let err = solve_galerkin(&singular, 0.0).unwrap_err();
        assert!(matches!(err, Error::SingularSystem { .. }));
        assert!(err.to_string().contains("lambda > 0"));
        assert!(solve_galerkin(&singular, 1e-3).is_ok());
        assert!(solve_galerkin(&singular, -1.0).is_err());
    }

    #[test]
    fn first_refinement_step_is_the_diagonal_solve() {
        let sys = system(&[[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]], [c(1.0, 0.5), c(0.0, 1.0), c(2.0, -1.0)]);
        let it = refine_iterate(&sys, 1).unwrap();
        assert_eq!(it.spectrum.v, solve_diagonal(&sys).v);
        assert!(refine_iterate(&sys, 0).is_err());
    }

    #[test]
    fn contracting_iteration_reaches_galerkin() {
        let sys = system(&[[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]], [c(1.0, 0.5), c(0.0, 1.0), c(2.0, -1.0)]);
        let it = refine_iterate(&sys, 200).unwrap();
        assert!(it.spectral_radius < 1.0);
        assert_eq!(it.damping, 1.0);
        // oracle: dense solve
        let exact = solve_galerkin(&sys, 0.0).unwrap();
        for (a, b) in it.spectrum.v.iter().zip(&exact.v) {
            assert!((a - b).norm() < 1e-10);
        }
        assert!(*it.residual_history.last().unwrap() <= 1e-8);
        assert!(it.residual_history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn non_contracting_iteration_is_damped_and_monotone() {
        // strongly coupled: I − βG has spectral radius ≥ 1
        let sys = system(&[[1.0, 0.9, 0.9], [0.9, 1.0, 0.9], [0.9, 0.9, 1.0]], [c(1.0, 0.0), c(0.5, 0.5), c(-1.0, 0.2)]);
        let it = refine_iterate(&sys, 60).unwrap();
        assert!(it.spectral_radius >= 1.0);
        assert!(it.damping < 1.0);
        assert!(it.residual_history[1..].windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-14)));
    }

    #[test]
    fn degenerate_basis_is_reported() {
        use crate::geometry::{make_surface, Shape};
        let s = make_surface(Shape::Circle { radius: 1.0 }, 8).unwrap();
        let mut trace = DMatrix::from_element(8, 2, c(1.0, 0.0));
        trace.column_mut(1).fill(c(0.0, 0.0));
        let t = Traces { bc: BoundaryCondition::Soft, values: trace.clone(), trace };
        assert!(matches!(assemble_gram(&t, &s), Err(Error::DegenerateBasis { index: 1, .. })));
    }
}
