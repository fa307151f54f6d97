//! A lattice reaction–diffusion equation as a scenario factory.
//!
//! Everything else in this crate checks identities on abstractly given
//! paths; this module *produces* such paths from an actual solver. The
//! equation is the one-dimensional `p`-Laplacian equation with a power
//! reaction term and two multiplicative noise sources,
//!
//! ```text
//! du = [ div(|Du|^{p1-2} Du) + |u|^{p2-2} u ] dt
//!       + σ u dW
//!       + γ u / (1 + z) d(compensated Poisson marks)
//! ```
//!
//! on an interval with zero Dirichlet boundary, discretised by forward
//! differences in space and an explicit Euler step in time. Each run is
//! packaged as a pure-jump scenario — driver atoms of size `dt` at the
//! step times, drift densities sampling the two operators, noise
//! accumulated into the jump-martingale path — so the energy ledger closes
//! at every step with zero discretisation slack and all the partition,
//! homogeneity and ensemble machinery applies to real solver output.
//!
//! [`integrability_report`] extracts what the energy hypotheses look like
//! on a run: the two hypothesis integrals, the cross integral pairing the
//! gradient norm against the reaction, and the per-step ratio between
//! them. With matching exponents the ratio is pinned by Young's
//! inequality; with `p1 < p2` it grows with the amplitude — the
//! quantitative reason mixed-exponent equations need the two-space
//! formulation in the first place.

mod config;
mod euler;
mod integrability;
mod operator;

pub use config::SpdeConfig;
pub use euler::{amplitude_ramp_run, euler_run, SpdeRun};
pub use integrability::{integrability_report, IntegrabilityReport};
pub use operator::{flux_dual_size, p_laplacian, power_drift};
