//! Spatial operators of the lattice equation.
//!
//! Both drifts are evaluated pointwise on the interior nodes and returned
//! as pivot-space vectors; the solver pairs them against test functions
//! through the pivot inner product, so the `p`-Laplacian below is exactly
//! the discrete divergence-form operator whose weak form is minus the
//! flux/gradient pairing on the edges (summation by parts, zero boundary).

use crate::spaces::HVector;
use crate::{Error, Result};

/// The odd power `|x|^{p-2} x`, extended by continuity to `0` at `x = 0`
/// (valid for every `p > 1`).
fn odd_power(x: f64, p: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.abs().powf(p - 2.0) * x
    }
}

/// Forward-difference edge slopes of `u` with zero Dirichlet padding:
/// `d + 1` values `(u_{j} - u_{j-1}) / dx` where `u_{-1} = u_d = 0`.
pub(crate) fn edge_slopes(u: &HVector, dx: f64) -> Vec<f64> {
    let s = u.as_slice();
    let d = s.len();
    (0..=d)
        .map(|k| {
            let right = if k < d { s[k] } else { 0.0 };
            let left = if k > 0 { s[k - 1] } else { 0.0 };
            (right - left) / dx
        })
        .collect()
}

/// Discrete `p`-Laplacian `div(|Du|^{p1-2} Du)` on the interior nodes with
/// zero Dirichlet boundary: edge flux `|g_k|^{p1-2} g_k` of the forward
/// slopes, then the adjoint difference back to the nodes. At `p1 = 2` this
/// is the standard second-difference Laplacian `(u_{j-1} - 2 u_j +
/// u_{j+1}) / dx^2`.
pub fn p_laplacian(u: &HVector, p1: f64, dx: f64) -> Result<HVector> {
    if !(p1.is_finite() && p1 > 1.0) {
        return Err(Error::invalid("p-laplacian", format!("exponent must exceed 1, got {p1}")));
    }
    if !(dx.is_finite() && dx > 0.0) {
        return Err(Error::invalid("p-laplacian", "grid spacing must be positive"));
    }
    let flux: Vec<f64> = edge_slopes(u, dx).iter().map(|g| odd_power(*g, p1)).collect();
    HVector::new((0..u.dim()).map(|j| (flux[j + 1] - flux[j]) / dx).collect())
}

/// Pointwise power drift `|u|^{p2-2} u`; the identity at `p2 = 2`.
pub fn power_drift(u: &HVector, p2: f64) -> Result<HVector> {
    if !(p2.is_finite() && p2 > 1.0) {
        return Err(Error::invalid("power drift", format!("exponent must exceed 1, got {p2}")));
    }
    HVector::new(u.iter().map(|x| odd_power(*x, p2)).collect())
}

/// Sharp size bound for the `p`-Laplacian of `u` as a functional on the
/// gradient-norm space: summation by parts turns the node pairing into an
/// edge pairing `-Σ_k dx · |g_k|^{p1-2} g_k · (Dφ)_k`, and Hölder on the
/// edges bounds it by `(Σ_k dx |g_k|^{p1})^{1/q1}` times the edge part of
/// `‖φ‖_{W^{1,p1}}`. The returned value therefore dominates the true dual
/// norm without the crude pivot-embedding factor `1/dx`.
pub fn flux_dual_size(u: &HVector, p1: f64, dx: f64) -> Result<f64> {
    if !(p1.is_finite() && p1 > 1.0) {
        return Err(Error::invalid("flux size", format!("exponent must exceed 1, got {p1}")));
    }
    if !(dx.is_finite() && dx > 0.0) {
        return Err(Error::invalid("flux size", "grid spacing must be positive"));
    }
    let q1 = p1 / (p1 - 1.0);
    // Σ dx |g|^{(p1-1) q1} = Σ dx |g|^{p1}
    let total: f64 = edge_slopes(u, dx).iter().map(|g| dx * g.abs().powf(p1)).sum();
    Ok(total.powf(1.0 / q1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{DifferenceStencil, SpaceDescriptor, SpaceFamily};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quadratic_case_is_the_second_difference_stencil() {
        let hat = HVector::new(vec![0.0, 1.0, 0.0]).unwrap();
        let lap = p_laplacian(&hat, 2.0, 1.0).unwrap();
        assert_eq!(lap.as_slice(), &[1.0, -2.0, 1.0]);
    }

    #[test]
    fn linear_profile_has_no_interior_curvature() {
        // Nodes on a line through the origin: slopes agree on all interior
        // edges, so the divergence vanishes away from the clamped boundary.
        let u = HVector::new((1..=7).map(|j| 0.3 * j as f64).collect()).unwrap();
        let lap = p_laplacian(&u, 1.7, 0.25).unwrap();
        for v in &lap.as_slice()[..6] {
            assert!(v.abs() < 1e-12, "interior curvature {v}");
        }
        assert!(lap.as_slice()[6] < 0.0, "the zero boundary bends the profile down");
    }

    #[test]
    fn subquadratic_exponents_handle_flat_regions() {
        let flat = HVector::new(vec![2.0, 2.0, 2.0]).unwrap();
        let lap = p_laplacian(&flat, 1.5, 1.0).unwrap();
        assert!(lap.as_slice().iter().all(|v| v.is_finite()));
        assert_eq!(lap.as_slice()[1], 0.0);
    }

    #[test]
    fn exponents_at_or_below_one_are_rejected() {
        let u = HVector::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(p_laplacian(&u, 1.0, 1.0).is_err());
        assert!(power_drift(&u, 0.8).is_err());
        assert!(flux_dual_size(&u, 1.0, 1.0).is_err());
    }

    #[test]
    fn power_drift_matches_hand_values() {
        let u = HVector::new(vec![2.0, -2.0, 0.0]).unwrap();
        let cubic = power_drift(&u, 3.0).unwrap();
        assert_eq!(cubic.as_slice(), &[4.0, -4.0, 0.0]);
        let identity = power_drift(&u, 2.0).unwrap();
        assert_eq!(identity.as_slice(), u.as_slice());
    }

    #[test]
    fn flux_size_dominates_the_pairing_against_random_test_functions() {
        let d = 9;
        let dx = 0.125;
        let p1 = 1.6;
        let weights = vec![dx; d];
        let fam = SpaceFamily::new(
            weights.clone(),
            vec![SpaceDescriptor::w1p(p1, weights, DifferenceStencil::forward(d, dx))],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let draw = |r: &mut ChaCha8Rng| {
            HVector::new((0..d).map(|_| r.random_range(-2.0..2.0)).collect()).unwrap()
        };
        for _ in 0..50 {
            let u = draw(&mut rng);
            let phi = draw(&mut rng);
            let lap = p_laplacian(&u, p1, dx).unwrap();
            let eta = flux_dual_size(&u, p1, dx).unwrap();
            let pairing = fam.duality_pair(&lap, &phi).unwrap().abs();
            let bound = eta * fam.v_norm(&phi, 0).unwrap();
            assert!(
                pairing <= bound + 1e-9 * (1.0 + bound),
                "pairing {pairing} exceeds flux bound {bound}"
            );
        }
    }
}
