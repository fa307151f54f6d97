//! Finite-dimensional function spaces on a grid.
//!
//! The pivot space `H` is R^d with a weighted inner product
//! `(x, y) = Σ_j w_j x_j y_j`. On top of the same coordinates a family of
//! norms is declared, each either a weighted `L_p` norm or a discrete
//! `W1_p` norm (`L_p` norm of the vector plus `L_p` norm of a difference
//! stencil applied to it). The intersection space `V` carries the sum of
//! the member norms, and duality is always expressed through the `H`
//! pairing, so a "functional" is just another grid vector.
//!
//! [`SpaceFamily`] precomputes an orthonormal basis of `H` (Gram-Schmidt on
//! the coordinate indicators), the running constants
//! `c_k = max_i Σ_{j<=k} ‖e_j‖_{V_i}^2` used by regularity bookkeeping, and
//! an embedding constant `C` with `|φ|_H <= C ‖φ‖_V`.

mod dual;
mod family;
mod vector;

pub use dual::{
    dual_norm_exhaustive, dual_norm_intersection, dual_norm_lp, dual_norm_probe,
    dual_norm_variational, lp_extremal,
};
pub use family::{DifferenceStencil, SpaceDescriptor, SpaceFamily, SpaceKind};
pub use vector::HVector;
