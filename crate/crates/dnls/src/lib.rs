//! Ground states and breathers of the one-dimensional discrete nonlinear
//! Schrödinger lattice with nonlinear hopping,
//!
//! ```text
//! i psi'_l + (Delta psi)_l + alpha psi_l (|psi_{l+1}|^2 + |psi_{l-1}|^2)
//!          + beta |psi_l|^{2 sigma} psi_l = 0,
//! ```
//!
//! computed by constrained minimization over the Nehari manifold. The crate
//! provides:
//!
//! * [`lattice`] — periodic stencils, the functionals `J_k`, `I_k`, their
//!   gradients and the Euler-Lagrange residual;
//! * [`nehari`] — the fibering-map projection, the ground-state solver, the
//!   Newton polish and the power lower bound;
//! * [`green`] — resolvent kernels of `-Delta - omega` on the ring and the
//!   infinite lattice, and the fixed-point residual;
//! * [`dynamics`] — time integration of the flow with conserved-quantity
//!   traces;
//! * [`convergence`] — alignment, the defocusing staggering reduction, and
//!   the k-sweep tracking the periodic-to-localized limit.
//!
//! A walk-through with runnable examples lives in the `book/` directory of
//! the repository; its code blocks are compiled as doc-tests of this crate.
//!
//! ```
//! use dnls::{ModelParams, SolverOptions, ground_state};
//!
//! let params = ModelParams::focusing(1.0, -1.0).unwrap();
//! let gs = ground_state(&params, 16, &SolverOptions::default()).unwrap();
//! assert!(gs.el_resid <= 1e-8);
//! assert!(gs.field.values().iter().all(|&v| v > 0.0));
//! ```

pub mod cli;
pub mod convergence;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod green;
pub mod lattice;
pub mod nehari;
pub mod params;

pub mod book;

pub use convergence::{align, defocusing_reduce, embed_window, k_sweep, stagger, ConvergenceReport, KRecord};
pub use dynamics::{evolve, flow_rhs, hamiltonian, power, EvolutionTrace};
pub use error::{Error, Result};
pub use field::{RingField, WaveField};
pub use green::{fixed_point_residual, green_infinite, green_periodic, GreenOperator};
pub use lattice::{el_residual, functional_i, functional_j, gradient_j, laplacian};
pub use nehari::{
    ground_state, j_along_ray, nehari_project, newton_polish, power_lower_bound, GroundState,
    NehariScaling, SolverOptions,
};
pub use params::{ModelParams, Regime};
