//! Centralised numeric tolerances.
//!
//! Every tolerance used by a check in this crate lives here with a short
//! rationale, so the acceptance suite, unit tests and the CLI all gate on
//! the same numbers. Scales below refer to the *relative* convention
//! `|x - y| <= tol * (1 + |y|)` unless stated otherwise.

/// Energy-ledger residual: `|residual| <= RESIDUAL * (1 + lhs)`.
///
/// Each ledger term is an exact finite sum; with at most a few thousand
/// summands the accumulated roundoff stays far below 1e-9 on unit-scale
/// scenarios. Anything larger indicates a wrong formula, not noise.
pub const RESIDUAL: f64 = 1e-9;

/// Discrete telescoping identity defect at partition times (relative).
/// Pure algebra (identical quantities summed in two orders), so the bound
/// is tighter than the ledger residual.
pub const TELESCOPING: f64 = 1e-10;

/// Time-change substitution identity, both window variants (relative).
/// Left and right sides are each exact finite sums over the same atoms.
pub const SUBSTITUTION: f64 = 1e-12;

/// Weak jump relation `Δ(v - h)(t) = ΔA(t) Σ_i v_i*(t)`, per coordinate,
/// gated as `|lhs_j - rhs_j| <= WEAK_JUMP * (1 + |rhs_j|)`.
pub const WEAK_JUMP: f64 = 1e-12;

/// Hilbert-space quadratic identity `|h(t)|^2 = |h(0)|^2 + 2∫(h-,dh) + [h]_t`
/// (relative).
pub const HILBERT_ITO: f64 = 1e-12;

/// Quadratic scaling homogeneity: every ledger term of the 1/n-scaled
/// scenario must equal the base term divided by n^2 (relative).
pub const HOMOGENEITY: f64 = 1e-10;

/// "Exact" comparisons between two orderings of the same finite sum
/// (correction sum vs. correction integral once jumps are separated).
pub const EXACT_SUM: f64 = 1e-12;

/// Value resolution of the two-space dual-norm decomposition search.
pub const DUAL_SEARCH_RESOLUTION: f64 = 1e-6;

/// Initial per-axis grid stride (relative to the search box) for
/// decomposition searches with three or more spaces.
pub const DUAL_GRID_STRIDE: f64 = 1.0 / 32.0;

/// Evaluation budget for decomposition searches; exceeding it is a refusal.
pub const DUAL_SEARCH_BUDGET: u128 = 20_000_000;

/// Agreement with the closed-form 1-D intersection dual norm.
pub const DUAL_ANALYTIC_1D: f64 = 1e-4;

/// Agreement between the refinement search and an independent exhaustive
/// decomposition search on small instances (absolute, unit-scale inputs).
pub const DUAL_VS_EXHAUSTIVE: f64 = 2e-2;

/// Squared-increment sums for a unit-density driver must fall below this
/// at dyadic level 12 (the exact value is 2^-12 ≈ 2.44e-4).
pub const INCREMENT_SUM_LEVEL12: f64 = 1e-3;

/// Mixed-driver correction gap must at least halve every two levels.
pub const CORRECTION_HALVING: f64 = 0.5;

/// Noise-free Euler runs: halving Δt must shrink the total correction term
/// by at least this factor (the limit factor is exactly 2).
pub const SPDE_CORRECTION_FACTOR: f64 = 1.8;

/// Required growth of the cross/hypothesis integrand ratio over the
/// amplitude-ramp demonstration.
pub const RATIO_GROWTH_MIN: f64 = 10.0;

/// Ensemble martingale gate: `|mean| <= ENSEMBLE_SIGMA * std / sqrt(N)`.
pub const ENSEMBLE_SIGMA: f64 = 3.0;

/// Hölder pairing slack (absolute, unit-scale probes):
/// `|⟨w*, φ⟩| <= ‖w*‖_{V_i*} ‖φ‖_{V_i} + HOLDER_PAIRING`.
pub const HOLDER_PAIRING: f64 = 1e-9;

/// Projection composition `Π_j Π_k = Π_{min(j,k)}`, coordinatewise.
pub const PROJECTION_COMPOSE: f64 = 1e-10;

/// Construction-time slack when validating dual-norm dominators
/// (`η_i >= ‖v_i*‖_{V_i*} - ETA_SLACK * (1 + η_i)`).
pub const ETA_SLACK: f64 = 1e-9;

/// Relative comparison helper used by checks in this crate:
/// `|x - y| <= tol * (1 + |y|)`.
#[inline]
pub fn close_rel(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * (1.0 + y.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn close_rel_scales_with_reference() {
        assert!(close_rel(1.0 + 5e-10, 1.0, RESIDUAL));
        assert!(!close_rel(1.0 + 5e-8, 1.0, RESIDUAL));
        // Large references loosen the absolute gap proportionally.
        assert!(close_rel(1e6 + 5e-4, 1e6, RESIDUAL));
    }
}
