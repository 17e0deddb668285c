//! Independent verification oracle for constructed systems.
//!
//! The kinetic operator `−d/dx (1/M) d/dx + V_eff` is discretized in flux
//! form on a uniform grid with Dirichlet ends, which keeps the matrix
//! symmetric tridiagonal; its lowest eigenpairs are found by Sturm-sequence
//! bisection plus inverse iteration and compared against the analytic
//! spectrum and states of the construction. The ambiguity-parameter map
//! from a bare `V` to `V_eff` is exposed as a separate utility and is never
//! applied implicitly.

use crate::field::{MassProfile, SmoothMap1D};
use crate::pct::{grid_inner, ConstructedSystem, Grid1D};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VonRoosError {
    #[error("ambiguity parameters must satisfy alpha + beta + gamma = -1 exactly, got sum {sum}")]
    ParameterSum { sum: f64 },
    #[error("mass profile not strictly positive at x = {x} (M = {value})")]
    NonPositiveMass { x: f64, value: f64 },
    #[error("non-finite entry while assembling {what}")]
    NonFinite { what: String },
    #[error("mismatched lengths: {what}")]
    LengthMismatch { what: String },
    #[error("requested {k} eigenpairs but only {max} are resolvable here")]
    KTooLarge { k: usize, max: usize },
    #[error("requested {k} levels but the system was constructed with n_max = {n_max}")]
    KExceedsConstructed { k: usize, n_max: usize },
    #[error("inverse iteration failed to converge for level {level} (residual {residual:e})")]
    InverseIterationFailure { level: usize, residual: f64 },
    #[error("computed spectrum is not strictly ascending at level {level}")]
    SpectrumOrdering { level: usize },
    #[error(
        "state {level} leaks through the grid boundary (edge amplitude {edge_ratio:e} \
         of peak, tolerance {tol:e}); enlarge the window"
    )]
    BoundaryLeak {
        level: usize,
        edge_ratio: f64,
        tol: f64,
    },
}

/// Kinetic-ordering ambiguity parameters with `α + β + γ = −1`, validated
/// exactly on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VonRoosParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl VonRoosParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self, VonRoosError> {
        let sum = alpha + beta + gamma;
        if sum != -1.0 {
            return Err(VonRoosError::ParameterSum { sum });
        }
        Ok(VonRoosParams { alpha, beta, gamma })
    }

    /// The (0, −1, 0) ordering, for which both mass-correction coefficients
    /// vanish identically.
    pub fn ben_daniel_duke() -> Self {
        VonRoosParams {
            alpha: 0.0,
            beta: -1.0,
            gamma: 0.0,
        }
    }
}

/// Effective potential of the ordering-parameterized Hamiltonian:
/// `V_eff = V + ½(β+1)·M''/M² − [α(α+β+1) + β+1]·M'²/M³`.
pub fn veff_from_von_roos(v: &SmoothMap1D, mass: &MassProfile, p: &VonRoosParams, x: f64) -> f64 {
    let m = mass.jet(x);
    let c1 = 0.5 * (p.beta + 1.0);
    let c2 = p.alpha * (p.alpha + p.beta + 1.0) + p.beta + 1.0;
    v.eval(x) + c1 * (m.d2 / (m.v * m.v)) - c2 * (m.d1 * m.d1 / (m.v * m.v * m.v))
}

/// Symmetric tridiagonal operator acting on the interior points of a
/// uniform Dirichlet grid. Symmetry is structural: one off-diagonal array.
#[derive(Debug, Clone)]
pub struct TridiagonalOperator {
    diag: Vec<f64>,
    off: Vec<f64>,
    dx: f64,
}

impl TridiagonalOperator {
    pub fn from_parts(diag: Vec<f64>, off: Vec<f64>, dx: f64) -> Result<Self, VonRoosError> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(VonRoosError::LengthMismatch {
                what: format!("diag has {} entries, off has {}", diag.len(), off.len()),
            });
        }
        if diag.iter().chain(off.iter()).any(|v| !v.is_finite()) || dx <= 0.0 || dx.is_nan() {
            return Err(VonRoosError::NonFinite {
                what: "tridiagonal operator".into(),
            });
        }
        Ok(TridiagonalOperator { diag, off, dx })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn norm_inf(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            let mut row = self.diag[i].abs();
            if i > 0 {
                row += self.off[i - 1].abs();
            }
            if i + 1 < n {
                row += self.off[i].abs();
            }
            worst = worst.max(row);
        }
        worst
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(v.len(), n);
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diag[i] * v[i];
            if i > 0 {
                acc += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * v[i + 1];
            }
            out[i] = acc;
        }
        out
    }
}

/// Flux-form second-order discretization of `−d/dx (1/M) d/dx + V_eff`
/// with Dirichlet conditions at both grid ends.
///
/// With bond coefficients `a_{i±1/2} = 1/M(x_i ± Δx/2)`, the interior rows
/// are `diag_i = (a_{i−1/2} + a_{i+1/2})/Δx² + V_eff(x_i)` and
/// `off_i = −a_{i+1/2}/Δx²`, which is symmetric and therefore self-adjoint
/// in plain L².
pub fn discretize(
    mass: &MassProfile,
    veff: &[f64],
    grid: Grid1D,
) -> Result<TridiagonalOperator, VonRoosError> {
    let n = grid.len();
    if veff.len() != n {
        return Err(VonRoosError::LengthMismatch {
            what: format!(
                "potential has {} samples for a {}-point grid",
                veff.len(),
                n
            ),
        });
    }
    let dx = grid.dx();
    // Bond coefficients at midpoints x_i + Δx/2, i = 0..n−2.
    let mut bond = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let xm = grid.point(i) + 0.5 * dx;
        let m = mass.eval(xm);
        if m <= 0.0 || !m.is_finite() {
            return Err(VonRoosError::NonPositiveMass { x: xm, value: m });
        }
        bond.push(1.0 / m);
    }
    let inv_dx2 = 1.0 / (dx * dx);
    let mut diag = Vec::with_capacity(n - 2);
    let mut off = Vec::with_capacity(n.saturating_sub(3));
    for j in 1..n - 1 {
        diag.push((bond[j - 1] + bond[j]) * inv_dx2 + veff[j]);
        if j < n - 2 {
            off.push(-bond[j] * inv_dx2);
        }
    }
    TridiagonalOperator::from_parts(diag, off, dx)
}

/// Number of eigenvalues strictly below `lambda`, by counting negative
/// pivots of the LDLᵀ factorization (Sturm sequence).
pub fn sturm_count(diag: &[f64], off: &[f64], lambda: f64) -> usize {
    let n = diag.len();
    if n == 0 {
        return 0;
    }
    let pivot_guard = f64::MIN_POSITIVE / f64::EPSILON;
    let mut count = 0usize;
    let mut q = diag[0] - lambda;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let q_safe = if q.abs() < pivot_guard {
            if q >= 0.0 {
                pivot_guard
            } else {
                -pivot_guard
            }
        } else {
            q
        };
        q = (diag[i] - lambda) - off[i - 1] * off[i - 1] / q_safe;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Bisection width target, relative to `max(1, |λ|)`.
    pub solver_tol: f64,
    /// Inverse-iteration sweep cap per level.
    pub inverse_iteration_cap: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            solver_tol: 1e-10,
            inverse_iteration_cap: 50,
        }
    }
}

/// Lowest eigenpairs of a symmetric tridiagonal operator.
///
/// `values` are strictly ascending; `vectors` live on the interior points
/// and are scaled so that the zero-padded full-grid trapezoid norm is one;
/// `residuals` are `‖Tv − λv‖₂` for unit plain-norm `v`.
#[derive(Debug, Clone)]
pub struct EigenSolution {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
}

impl EigenSolution {
    /// Zero-pads an interior eigenvector to the full grid.
    pub fn padded(&self, level: usize) -> Vec<f64> {
        let mut full = Vec::with_capacity(self.vectors[level].len() + 2);
        full.push(0.0);
        full.extend_from_slice(&self.vectors[level]);
        full.push(0.0);
        full
    }
}

struct Xorshift64(u64);

impl Xorshift64 {
    fn next_unit(&mut self) -> f64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    }
}

// Tridiagonal LU with partial pivoting (two superdiagonals after pivoting).
struct PivotedLu {
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    dl: Vec<f64>,
    swapped: Vec<bool>,
}

fn factor_shifted(t: &TridiagonalOperator, sigma: f64) -> PivotedLu {
    let n = t.dim();
    let mut d: Vec<f64> = t.diag.iter().map(|v| v - sigma).collect();
    let mut du: Vec<f64> = t.off.clone();
    let mut dl: Vec<f64> = t.off.clone();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut swapped = vec![false; n.saturating_sub(1)];
    let tiny = f64::MIN_POSITIVE / f64::EPSILON;
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] != 0.0 {
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                dl[i] = 0.0;
            }
            if i + 2 < n {
                du2[i] = 0.0;
            }
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            du[i] = temp;
            swapped[i] = true;
        }
    }
    // Guard exactly singular pivots so inverse iteration can proceed.
    for pivot in &mut d {
        if pivot.abs() < tiny {
            *pivot = if *pivot < 0.0 { -tiny } else { tiny };
        }
    }
    PivotedLu {
        d,
        du,
        du2,
        dl,
        swapped,
    }
}

impl PivotedLu {
    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let temp = b[i] - self.dl[i] * b[i + 1];
                b[i] = b[i + 1];
                b[i + 1] = temp;
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

fn plain_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// The `k` lowest eigenpairs by Sturm bisection inside Gershgorin bounds,
/// with eigenvectors from shifted inverse iteration.
pub fn eigs_lowest(
    t: &TridiagonalOperator,
    k: usize,
    opts: &SolverOptions,
) -> Result<EigenSolution, VonRoosError> {
    let n = t.dim();
    if k == 0 || k > n {
        return Err(VonRoosError::KTooLarge { k, max: n });
    }

    // Gershgorin enclosure of the whole spectrum.
    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    for i in 0..n {
        let mut radius = 0.0;
        if i > 0 {
            radius += t.off[i - 1].abs();
        }
        if i + 1 < n {
            radius += t.off[i].abs();
        }
        lo = lo.min(t.diag[i] - radius);
        hi = hi.max(t.diag[i] + radius);
    }
    lo -= 1.0;
    hi += 1.0;

    let mut values = Vec::with_capacity(k);
    for j in 0..k {
        let mut a = lo;
        let mut b = hi;
        for _ in 0..256 {
            let mid = 0.5 * (a + b);
            if (b - a) <= opts.solver_tol * mid.abs().max(1.0) {
                break;
            }
            if sturm_count(&t.diag, &t.off, mid) > j {
                b = mid;
            } else {
                a = mid;
            }
        }
        let lambda = 0.5 * (a + b);
        debug_assert!(sturm_count(&t.diag, &t.off, a) <= j);
        debug_assert!(sturm_count(&t.diag, &t.off, b) > j);
        if j > 0 && lambda <= values[j - 1] {
            return Err(VonRoosError::SpectrumOrdering { level: j });
        }
        values.push(lambda);
    }

    let norm_inf = t.norm_inf();
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for (j, &lambda) in values.iter().enumerate() {
        let lu = factor_shifted(t, lambda);
        let mut rng = Xorshift64(0x9E37_79B9_7F4A_7C15 ^ ((j as u64 + 1) << 32));
        let mut v: Vec<f64> = (0..n).map(|_| rng.next_unit()).collect();
        let nv = plain_norm(&v);
        for x in &mut v {
            *x /= nv;
        }
        let mut residual = f64::INFINITY;
        let mut converged = false;
        for _ in 0..opts.inverse_iteration_cap {
            lu.solve(&mut v);
            // Keep near-degenerate levels mutually orthogonal.
            for prev in &vectors {
                let proj: f64 = v.iter().zip(prev.iter()).map(|(a, b)| a * b).sum();
                for (x, p) in v.iter_mut().zip(prev.iter()) {
                    *x -= proj * p;
                }
            }
            let nv = plain_norm(&v);
            if nv <= 0.0 || !nv.is_finite() {
                break;
            }
            for x in &mut v {
                *x /= nv;
            }
            let tv = t.apply(&v);
            residual = tv
                .iter()
                .zip(&v)
                .map(|(tv, v)| (tv - lambda * v) * (tv - lambda * v))
                .sum::<f64>()
                .sqrt();
            if residual <= opts.solver_tol * norm_inf.max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(VonRoosError::InverseIterationFailure { level: j, residual });
        }
        residuals.push(residual);
        vectors.push(v);
    }

    // Scale so the zero-padded full-grid trapezoid norm is one.
    let scale = 1.0 / t.dx.sqrt();
    for v in &mut vectors {
        // Sign convention matching the analytic states: first significant
        // component positive.
        let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-12 * peak) {
            if *first < 0.0 {
                for x in v.iter_mut() {
                    *x = -*x;
                }
            }
        }
        for x in v.iter_mut() {
            *x *= scale;
        }
    }

    Ok(EigenSolution {
        values,
        vectors,
        residuals,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub solver: SolverOptions,
    /// Largest admissible boundary amplitude of an analytic state, relative
    /// to its peak.
    pub boundary_tol: f64,
    /// Relative tolerance on analytic vs numeric energies.
    pub energy_rtol: f64,
    /// Minimum |overlap| between analytic states and numeric eigenvectors.
    pub overlap_min: f64,
    /// Tolerance on `‖Tψ − Eψ‖` for the analytic states, relative to
    /// `max(1, |E|)`.
    pub residual_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            solver: SolverOptions::default(),
            boundary_tol: 1e-10,
            energy_rtol: 1e-3,
            overlap_min: 0.9999,
            residual_tol: 5e-2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LevelReport {
    pub n: usize,
    pub analytic_energy: f64,
    pub numeric_energy: f64,
    pub rel_gap: f64,
    pub overlap: f64,
    /// Trapezoid norm of `(T − E_n)ψ_n` over interior points for the
    /// analytic state.
    pub analytic_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub levels: Vec<LevelReport>,
    pub solver_residuals: Vec<f64>,
    pub operator_inf_norm: f64,
    pub all_pass: bool,
}

/// Closes the loop on a constructed system: discretizes its own `(M, V)`,
/// solves for the lowest `k` eigenpairs, and compares energies, overlaps,
/// and operator residuals against the analytic construction.
pub fn verify_system(
    sys: &ConstructedSystem,
    k: usize,
    opts: &VerifyOptions,
) -> Result<VerificationReport, VonRoosError> {
    let grid = sys.grid();
    let interior = grid.len() - 2;
    if k == 0 || k > interior / 4 {
        return Err(VonRoosError::KTooLarge {
            k,
            max: interior / 4,
        });
    }
    if k > sys.n_max() + 1 {
        return Err(VonRoosError::KExceedsConstructed {
            k,
            n_max: sys.n_max(),
        });
    }

    for n in 0..k {
        let psi = sys.psi(n);
        let peak = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let edge = psi[0].abs().max(psi[psi.len() - 1].abs());
        let edge_ratio = edge / peak;
        if edge_ratio > opts.boundary_tol {
            return Err(VonRoosError::BoundaryLeak {
                level: n,
                edge_ratio,
                tol: opts.boundary_tol,
            });
        }
    }

    let t = discretize(sys.inputs().mass(), sys.potential(), grid)?;
    let eig = eigs_lowest(&t, k, &opts.solver)?;
    let dx = grid.dx();

    let mut levels = Vec::with_capacity(k);
    let mut all_pass = true;
    for n in 0..k {
        let analytic_energy = sys.energies()[n];
        let numeric_energy = eig.values[n];
        let rel_gap = (numeric_energy - analytic_energy).abs() / analytic_energy.abs().max(1e-12);

        let padded = eig.padded(n);
        let overlap = grid_inner(sys.psi(n), &padded, dx).abs();

        // The outermost interior rows embed the Dirichlet clipping (they
        // reference the boundary samples as exact zeros), so the residual
        // is accumulated over the rows that see true neighbours only.
        let interior_psi = &sys.psi(n)[1..grid.len() - 1];
        let t_psi = t.apply(interior_psi);
        let dim = interior_psi.len();
        let analytic_residual = (t_psi
            .iter()
            .zip(interior_psi)
            .enumerate()
            .filter(|(i, _)| *i > 0 && *i + 1 < dim)
            .map(|(_, (tp, p))| {
                let r = tp - analytic_energy * p;
                r * r
            })
            .sum::<f64>()
            * dx)
            .sqrt();

        let pass = rel_gap <= opts.energy_rtol
            && overlap >= opts.overlap_min
            && analytic_residual <= opts.residual_tol * analytic_energy.abs().max(1.0);
        all_pass &= pass;
        levels.push(LevelReport {
            n,
            analytic_energy,
            numeric_energy,
            rel_gap,
            overlap,
            analytic_residual,
            pass,
        });
    }

    Ok(VerificationReport {
        levels,
        solver_residuals: eig.residuals,
        operator_inf_norm: t.norm_inf(),
        all_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_exp_map, Interval, SmoothMap1D};
    use crate::pct::construct_laguerre_exponential;

    #[test]
    fn params_validated_exactly() {
        assert!(VonRoosParams::new(0.0, -1.0, 0.0).is_ok());
        assert!(VonRoosParams::new(-1.0, 0.0, 0.0).is_ok());
        assert!(VonRoosParams::new(0.25, -1.0, -0.25).is_ok());
        assert!(matches!(
            VonRoosParams::new(0.0, 0.0, 0.0),
            Err(VonRoosError::ParameterSum { .. })
        ));
    }

    #[test]
    fn veff_reduces_for_constant_mass_and_bdd() {
        let window = Interval::new(-3.0, 3.0).unwrap();
        let v = SmoothMap1D::poly(&[0.0, 0.0, 1.0]);
        let m_const = MassProfile::new(SmoothMap1D::constant(2.0), window).unwrap();
        let m_exp = MassProfile::new(make_exp_map(-1.0, 0.0), window).unwrap();
        let arbitrary = VonRoosParams::new(-0.5, -0.75, 0.25).unwrap();
        for &x in &[-2.0, 0.0, 1.3] {
            // Constant mass: corrections vanish for all valid orderings.
            assert_eq!(veff_from_von_roos(&v, &m_const, &arbitrary, x), v.eval(x));
            // BenDaniel–Duke: corrections vanish for any mass.
            let bdd = VonRoosParams::ben_daniel_duke();
            assert_eq!(veff_from_von_roos(&v, &m_exp, &bdd, x), v.eval(x));
        }
    }

    #[test]
    fn veff_exponential_mass_reference_value() {
        let window = Interval::new(-1.0, 1.0).unwrap();
        let zero = SmoothMap1D::constant(0.0);
        let mass = MassProfile::new(make_exp_map(-1.0, 0.0), window).unwrap();
        let p = VonRoosParams::new(-1.0, 0.0, 0.0).unwrap();
        let veff = veff_from_von_roos(&zero, &mass, &p, 0.0);
        assert!((veff + 0.5).abs() < 1e-14);
    }

    #[test]
    fn discretize_constant_mass_matches_three_point_stencil() {
        let grid = Grid1D::new(0.0, 16.0, 17).unwrap(); // Δx = 1
        let window = grid.interval();
        let mass = MassProfile::new(SmoothMap1D::constant(1.0), window).unwrap();
        let veff = vec![0.0; grid.len()];
        let t = discretize(&mass, &veff, grid).unwrap();
        let dx = grid.dx();
        for (i, &d) in t.diag().iter().enumerate() {
            assert_eq!(d, 2.0 / (dx * dx) + veff[i + 1]);
        }
        for &o in t.off() {
            assert_eq!(o, -1.0 / (dx * dx));
        }

        let mass2 = MassProfile::new(SmoothMap1D::constant(2.0), window).unwrap();
        let t2 = discretize(&mass2, &veff, grid).unwrap();
        assert_eq!(t2.diag()[0], 1.0);
        assert_eq!(t2.off()[0], -0.5);
    }

    #[test]
    fn discretize_uses_midpoint_mass() {
        let grid = Grid1D::new(0.0, 16.0, 17).unwrap();
        let window = grid.interval();
        let mass = MassProfile::new(make_exp_map(-1.0, 0.0), window).unwrap();
        let veff = vec![0.0; grid.len()];
        let t = discretize(&mass, &veff, grid).unwrap();
        // Row for x_i = 1: bonds at e^{0.5} and e^{1.5}.
        let expected = (0.5f64).exp() + (1.5f64).exp();
        assert!((t.diag()[0] - expected).abs() < 1e-12 * expected);
        assert!((t.off()[0] + (1.5f64).exp()).abs() < 1e-12 * (1.5f64).exp());
    }

    #[test]
    fn hand_diagonalizable_two_by_two() {
        let t = TridiagonalOperator::from_parts(vec![2.0, 2.0], vec![-1.0], 1.0).unwrap();
        let eig = eigs_lowest(&t, 2, &SolverOptions::default()).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-9);
        assert!((eig.values[1] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn particle_in_a_box_spectrum_is_exact() {
        let grid = Grid1D::new(0.0, 1.0, 65).unwrap();
        let window = grid.interval();
        let mass = MassProfile::new(SmoothMap1D::constant(1.0), window).unwrap();
        let veff = vec![0.0; grid.len()];
        let t = discretize(&mass, &veff, grid).unwrap();
        let k = 6;
        let eig = eigs_lowest(&t, k, &SolverOptions::default()).unwrap();
        let dx = grid.dx();
        for j in 1..=k {
            let exact = 2.0 / (dx * dx) * (1.0 - (j as f64 * std::f64::consts::PI * dx).cos());
            let got = eig.values[j - 1];
            assert!(
                (got - exact).abs() <= 1e-9 * exact,
                "level {j}: {got} vs {exact}"
            );
        }
        // Numeric eigenvectors stay orthonormal in the padded trapezoid
        // inner product.
        for a in 0..k {
            for b in a..k {
                let ip = grid_inner(&eig.padded(a), &eig.padded(b), dx);
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((ip.abs() - expected).abs() < 1e-8, "gram[{a}][{b}] = {ip}");
            }
        }
    }

    #[test]
    fn sturm_count_matches_exact_spectrum() {
        let grid = Grid1D::new(0.0, 1.0, 33).unwrap();
        let window = grid.interval();
        let mass = MassProfile::new(SmoothMap1D::constant(1.0), window).unwrap();
        let veff = vec![0.0; grid.len()];
        let t = discretize(&mass, &veff, grid).unwrap();
        let dx = grid.dx();
        let exact: Vec<f64> = (1..t.dim() + 1)
            .map(|j| 2.0 / (dx * dx) * (1.0 - (j as f64 * std::f64::consts::PI * dx).cos()))
            .collect();
        for &pivot in &[exact[0] - 1.0, 0.5 * (exact[0] + exact[1]), exact[4] + 1e-6] {
            let expected = exact.iter().filter(|&&e| e < pivot).count();
            assert_eq!(sturm_count(t.diag(), t.off(), pivot), expected);
        }
    }

    #[test]
    fn harmonic_oscillator_spectrum() {
        let grid = Grid1D::new(-8.0, 8.0, 2000).unwrap();
        let window = grid.interval();
        let mass = MassProfile::new(SmoothMap1D::constant(1.0), window).unwrap();
        let veff: Vec<f64> = grid.points().map(|x| x * x).collect();
        let t = discretize(&mass, &veff, grid).unwrap();
        let eig = eigs_lowest(&t, 4, &SolverOptions::default()).unwrap();
        for (n, &lambda) in eig.values.iter().enumerate() {
            let exact = 2.0 * n as f64 + 1.0;
            assert!(
                (lambda - exact).abs() <= 1e-3 * exact,
                "level {n}: {lambda} vs {exact}"
            );
        }
    }

    #[test]
    fn verify_closes_the_loop_on_the_exponential_system() {
        let grid = Grid1D::new(-10.0, 25.0, 4000).unwrap();
        let sys = construct_laguerre_exponential(1.0, 2.0, 3, grid).unwrap();
        let report = verify_system(&sys, 4, &VerifyOptions::default()).unwrap();
        assert!(report.all_pass, "report: {:#?}", report.levels);
        for level in &report.levels {
            assert!(level.rel_gap <= 1e-3);
            assert!(level.overlap >= 0.9999);
        }
    }

    #[test]
    fn verify_reports_boundary_leak_on_small_windows() {
        let grid = Grid1D::new(-2.0, 2.0, 64).unwrap();
        let sys = construct_laguerre_exponential(1.0, 2.0, 0, grid).unwrap();
        assert!(matches!(
            verify_system(&sys, 1, &VerifyOptions::default()),
            Err(VonRoosError::BoundaryLeak { .. })
        ));
    }

    #[test]
    fn eigs_rejects_oversized_requests() {
        let t = TridiagonalOperator::from_parts(vec![1.0, 2.0, 3.0], vec![0.1, 0.1], 1.0).unwrap();
        assert!(matches!(
            eigs_lowest(&t, 4, &SolverOptions::default()),
            Err(VonRoosError::KTooLarge { .. })
        ));
    }
}
