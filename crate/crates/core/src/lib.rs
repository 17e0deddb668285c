//! Construction, perturbation, and independent verification of exactly
//! solvable one-dimensional Schrödinger systems with a position-dependent
//! mass.
//!
//! The crate is organised around the point-canonical-transformation pipeline:
//!
//! * [`field`] — smooth function models with analytic derivative chains,
//!   adaptive quadrature, and finite-difference consistency checks;
//! * [`specfam`] — the special-function families `F(g)` together with the
//!   coefficients `Q(g)`, `R_n(g)` of the second-order equation they satisfy;
//! * [`pct`] — the transformation engine: the multiplicative factor `f(x)`,
//!   the solvable-branch right-hand side `E_n − V(x)`, the energy/potential
//!   split, wavefunction assembly, and the ΔQ perturbation machinery;
//! * [`vonroos`] — an independent oracle: the ambiguity-parameter effective
//!   potential, a Hermitian flux-form discretization of the kinetic operator
//!   `−d/dx (1/M) d/dx`, and a Sturm-bisection tridiagonal eigensolver.

pub mod field;
pub mod pct;
pub mod specfam;
pub mod vonroos;

pub use field::{CoordinateMap, Interval, MassProfile, SmoothMap1D};
pub use pct::{ConstructedSystem, DeltaQ, Grid1D, PctInputs, PerturbationResult};
pub use specfam::SpectralFamily;
pub use vonroos::{EigenSolution, TridiagonalOperator, VerificationReport, VonRoosParams};
