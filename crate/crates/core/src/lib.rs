//! Numerical laboratory for the energy identity of cadlag semimartingales
//! whose drift lives in the dual of an intersection of finitely many
//! discrete Banach spaces.
//!
//! Everything here is built on a finite grid so that every integral against
//! an increasing driver `A` is a finite sum and the central identity
//!
//! ```text
//! |v(t)|^2 = |h(0)|^2 + 2 Σ_i ∫_(0,t] <v_i*(s), v(s)> dA(s)
//!          + 2 ∫_(0,t] (v(s-), dh(s))
//!          - ∫_(0,t] |v*(s)|^2 ΔA(s) dA(s) + [h]_t
//! ```
//!
//! can be checked to floating-point accuracy instead of "up to
//! discretisation error". The crate is organised in four layers:
//!
//! * [`spaces`] — weighted finite-dimensional function spaces (`L_p` and
//!   first-difference `W1_p` norms on a grid), the pivot Hilbert space, dual
//!   norms, and the intersection-space dual norm computed by decomposition
//!   search.
//! * [`processes`] — pure-jump increasing drivers with optional
//!   piecewise-constant density, the associated time change, Stieltjes
//!   integration of step integrands, pure-jump martingale paths, dual-valued
//!   step drifts, dyadic partition hierarchies and step approximations.
//! * [`energy`] — the energy ledger (one number per identity term plus the
//!   residual), the telescoping discrete identity behind it, correction-sum
//!   convergence studies, and scaling-homogeneity checks.
//! * [`spde`] — a small 1-D p-Laplacian / power-drift SPDE discretisation
//!   whose explicit Euler path is packaged as an exact scenario, used to
//!   exercise the ledger on a realistic state path and to demonstrate the
//!   integrability gap between hypothesis integrals and the cross term.
//!
//! Sweeps over many scenarios run in parallel with rayon when the
//! `parallel` feature (on by default) is enabled; work items are seeded
//! independently so results do not depend on scheduling.

pub mod energy;
pub mod error;
pub mod par;
pub mod processes;
pub mod spaces;
pub mod spde;
pub mod tol;

pub use error::{Error, Result};
