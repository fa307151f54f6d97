//! Space descriptors and the precomputed family structure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::HVector;

/// Which norm a member space carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    /// Weighted `L_p` norm: `(Σ_j μ_j |φ_j|^p)^(1/p)`.
    Lp,
    /// Discrete `W1_p` norm: `L_p` norm of the vector plus `L_p` norm of a
    /// difference stencil applied to it (zero padding outside the grid).
    W1p,
}

/// A difference operator applied to grid vectors, with its own quadrature
/// weights for the resulting values.
///
/// The stencil slides over the padded vector: output index
/// `k ∈ 0 .. d + s - 1` (where `s = coeffs.len()`) is
/// `Σ_j coeffs[j] · φ[k + j - (s - 1)]`, with `φ` read as zero outside
/// `0..d`. A forward difference `coeffs = [-1/dx, 1/dx]` therefore produces
/// the `d + 1` edge slopes of a grid function with zero boundary values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceStencil {
    pub coeffs: Vec<f64>,
    /// Quadrature weights on the output; length `d + coeffs.len() - 1`.
    pub weights: Vec<f64>,
}

impl DifferenceStencil {
    /// Forward difference on a grid of `d` interior nodes with spacing
    /// `dx`, zero Dirichlet boundary, edge weight `dx`.
    pub fn forward(d: usize, dx: f64) -> Self {
        DifferenceStencil { coeffs: vec![-1.0 / dx, 1.0 / dx], weights: vec![dx; d + 1] }
    }

    pub fn output_len(&self, d: usize) -> usize {
        d + self.coeffs.len() - 1
    }

    /// Apply the stencil to `phi` with zero padding.
    pub fn apply(&self, phi: &[f64]) -> Vec<f64> {
        let s = self.coeffs.len();
        let d = phi.len();
        let mut out = vec![0.0; self.output_len(d)];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, c) in self.coeffs.iter().enumerate() {
                // padded index k + j - (s - 1)
                let idx = k + j;
                if idx >= s - 1 && idx - (s - 1) < d {
                    acc += c * phi[idx - (s - 1)];
                }
            }
            *slot = acc;
        }
        out
    }

    fn validate(&self, d: usize) -> Result<()> {
        if self.coeffs.is_empty() {
            return Err(Error::invalid("stencil", "needs at least one coefficient"));
        }
        if self.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { context: "stencil coefficient" });
        }
        if self.weights.len() != self.output_len(d) {
            return Err(Error::DimensionMismatch {
                expected: self.output_len(d),
                got: self.weights.len(),
            });
        }
        if self.weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::invalid("stencil", "weights must be strictly positive"));
        }
        Ok(())
    }
}

/// One member space: a norm on the common grid coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    pub kind: SpaceKind,
    /// Growth exponent `p >= 1`.
    pub p: f64,
    /// Node quadrature weights `μ_j > 0`, one per grid coordinate.
    pub weights: Vec<f64>,
    /// Difference stencil; required for `W1p`, absent for `Lp`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stencil: Option<DifferenceStencil>,
}

impl SpaceDescriptor {
    pub fn lp(p: f64, weights: Vec<f64>) -> Self {
        SpaceDescriptor { kind: SpaceKind::Lp, p, weights, stencil: None }
    }

    pub fn w1p(p: f64, weights: Vec<f64>, stencil: DifferenceStencil) -> Self {
        SpaceDescriptor { kind: SpaceKind::W1p, p, weights, stencil: Some(stencil) }
    }

    /// Conjugate exponent `q = p / (p - 1)`, with `q = ∞` for `p = 1`.
    pub fn q(&self) -> f64 {
        if self.p == 1.0 {
            f64::INFINITY
        } else {
            self.p / (self.p - 1.0)
        }
    }

    fn validate(&self, d: usize) -> Result<()> {
        if !self.p.is_finite() || self.p < 1.0 {
            return Err(Error::invalid("space descriptor", format!("p must be >= 1, got {}", self.p)));
        }
        if self.weights.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: self.weights.len() });
        }
        if self.weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::invalid("space descriptor", "node weights must be strictly positive"));
        }
        match (self.kind, &self.stencil) {
            (SpaceKind::Lp, Some(_)) => {
                Err(Error::invalid("space descriptor", "Lp spaces take no stencil"))
            }
            (SpaceKind::W1p, None) => {
                Err(Error::invalid("space descriptor", "W1p spaces require a stencil"))
            }
            (SpaceKind::W1p, Some(st)) => st.validate(d),
            (SpaceKind::Lp, None) => Ok(()),
        }
    }
}

/// Serialised form of a family: the defining data only. Basis, constants
/// and the embedding constant are rebuilt on deserialisation.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct FamilySpec {
    h_weights: Vec<f64>,
    spaces: Vec<SpaceDescriptor>,
}

/// The pivot space `H` plus the member norms on shared coordinates.
///
/// Precomputed at construction:
/// * an orthonormal basis `e_1 .. e_d` of `H` (Gram-Schmidt over the
///   coordinate indicators, in index order);
/// * `c_k = max_i Σ_{j<=k} ‖e_j‖_{V_i}^2`, nondecreasing in `k`;
/// * an embedding constant `C` with `|φ|_H <= C ‖φ‖_(V_i)` for the member
///   space minimising the bound, hence `|φ|_H <= C ‖φ‖_V`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilySpec", into = "FamilySpec")]
pub struct SpaceFamily {
    dim: usize,
    h_weights: Vec<f64>,
    spaces: Vec<SpaceDescriptor>,
    basis: Vec<HVector>,
    basis_constants: Vec<f64>,
    embedding: f64,
}

impl TryFrom<FamilySpec> for SpaceFamily {
    type Error = Error;
    fn try_from(spec: FamilySpec) -> Result<Self> {
        SpaceFamily::new(spec.h_weights, spec.spaces)
    }
}

impl From<SpaceFamily> for FamilySpec {
    fn from(f: SpaceFamily) -> FamilySpec {
        FamilySpec { h_weights: f.h_weights, spaces: f.spaces }
    }
}

impl SpaceFamily {
    pub fn new(h_weights: Vec<f64>, spaces: Vec<SpaceDescriptor>) -> Result<Self> {
        let dim = h_weights.len();
        if dim == 0 {
            return Err(Error::invalid("space family", "dimension must be at least 1"));
        }
        if h_weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::invalid("space family", "H weights must be strictly positive"));
        }
        if spaces.is_empty() {
            return Err(Error::invalid("space family", "needs at least one member space"));
        }
        for s in &spaces {
            s.validate(dim)?;
        }

        let mut family = SpaceFamily {
            dim,
            h_weights,
            spaces,
            basis: Vec::new(),
            basis_constants: Vec::new(),
            embedding: f64::NAN,
        };
        family.basis = family.gram_schmidt()?;
        family.basis_constants = family.running_constants()?;
        family.embedding = family.embedding_constant_from_weights();
        Ok(family)
    }

    /// Unit-weight pivot space with the given member spaces; the common
    /// case in tests and generated scenarios.
    pub fn with_unit_h(dim: usize, spaces: Vec<SpaceDescriptor>) -> Result<Self> {
        SpaceFamily::new(vec![1.0; dim], spaces)
    }

    fn gram_schmidt(&self) -> Result<Vec<HVector>> {
        let mut basis: Vec<HVector> = Vec::with_capacity(self.dim);
        for j in 0..self.dim {
            let mut x = HVector::indicator(self.dim, j);
            for e in &basis {
                let c = self.h_inner(&x, e)?;
                x = x.axpy(-c, e);
            }
            let n = self.h_norm(&x)?;
            if n <= f64::EPSILON {
                return Err(Error::invalid("space family", "degenerate inner product"));
            }
            basis.push(x.scale(1.0 / n));
        }
        Ok(basis)
    }

    fn running_constants(&self) -> Result<Vec<f64>> {
        let m = self.spaces.len();
        let mut running = vec![0.0; m];
        let mut constants = Vec::with_capacity(self.dim);
        for e in &self.basis {
            for (i, r) in running.iter_mut().enumerate() {
                let n = self.v_norm(e, i)?;
                *r += n * n;
            }
            constants.push(running.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
        }
        Ok(constants)
    }

    /// `C_i = sqrt(Σ_j w_j μ_{ij}^(-2/p_i))` bounds `|φ|_H` by
    /// `C_i ‖φ‖_{L_{p_i}(μ_i)}`, which is itself at most the member norm;
    /// the family constant is the best (smallest) of these.
    fn embedding_constant_from_weights(&self) -> f64 {
        self.spaces
            .iter()
            .map(|s| {
                self.h_weights
                    .iter()
                    .zip(&s.weights)
                    .map(|(w, mu)| w * mu.powf(-2.0 / s.p))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of member spaces `m`.
    pub fn num_spaces(&self) -> usize {
        self.spaces.len()
    }

    pub fn h_weights(&self) -> &[f64] {
        &self.h_weights
    }

    pub fn spaces(&self) -> &[SpaceDescriptor] {
        &self.spaces
    }

    pub fn space(&self, i: usize) -> Result<&SpaceDescriptor> {
        self.spaces
            .get(i)
            .ok_or(Error::OutOfRange { what: "space index", got: i, max: self.spaces.len() - 1 })
    }

    /// Orthonormal basis of `H` in construction order.
    pub fn basis(&self) -> &[HVector] {
        &self.basis
    }

    /// `c_k` for `k = 1..=d` (index `k - 1`).
    pub fn basis_constants(&self) -> &[f64] {
        &self.basis_constants
    }

    /// Embedding constant `C` with `|φ|_H <= C ‖φ‖_V`.
    pub fn embedding_constant(&self) -> f64 {
        self.embedding
    }

    /// Per-space constant `C_i` with `|φ|_H <= C_i ‖φ‖_{V_i}`, derived from
    /// the node part of the member norm (valid for both kinds because the
    /// `W1p` norm dominates its node part).
    pub fn node_embedding_constant(&self, i: usize) -> Result<f64> {
        let s = self.space(i)?;
        Ok(self
            .h_weights
            .iter()
            .zip(&s.weights)
            .map(|(w, mu)| w * mu.powf(-2.0 / s.p))
            .sum::<f64>()
            .sqrt())
    }

    pub fn check_dim(&self, x: &HVector) -> Result<()> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.dim() });
        }
        Ok(())
    }

    /// Pivot inner product `(x, y) = Σ_j w_j x_j y_j`.
    pub fn h_inner(&self, x: &HVector, y: &HVector) -> Result<f64> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        Ok(self
            .h_weights
            .iter()
            .zip(x.iter())
            .zip(y.iter())
            .map(|((w, a), b)| w * a * b)
            .sum())
    }

    /// Duality pairing `<w*, φ>` between a functional and a test vector.
    ///
    /// With `H` as pivot the pairing *is* the inner product; the separate
    /// name marks call sites where the first argument lives in `V*`.
    pub fn duality_pair(&self, w_star: &HVector, phi: &HVector) -> Result<f64> {
        self.h_inner(w_star, phi)
    }

    pub fn h_norm_sq(&self, x: &HVector) -> Result<f64> {
        self.h_inner(x, x)
    }

    pub fn h_norm(&self, x: &HVector) -> Result<f64> {
        Ok(self.h_norm_sq(x)?.sqrt())
    }

    /// Member norm `‖φ‖_{V_i}`.
    pub fn v_norm(&self, phi: &HVector, i: usize) -> Result<f64> {
        self.check_dim(phi)?;
        let s = self.space(i)?;
        let node = lp_norm(phi.as_slice(), &s.weights, s.p);
        match (&s.kind, &s.stencil) {
            (SpaceKind::Lp, _) => Ok(node),
            (SpaceKind::W1p, Some(st)) => {
                let diffs = st.apply(phi.as_slice());
                Ok(node + lp_norm(&diffs, &st.weights, s.p))
            }
            (SpaceKind::W1p, None) => unreachable!("validated at construction"),
        }
    }

    /// Intersection norm `‖φ‖_V = Σ_i ‖φ‖_{V_i}`.
    pub fn v_norm_sum(&self, phi: &HVector) -> Result<f64> {
        let mut total = 0.0;
        for i in 0..self.spaces.len() {
            total += self.v_norm(phi, i)?;
        }
        Ok(total)
    }

    /// Orthogonal projection onto the span of the first `k` basis vectors;
    /// `k = 0` gives the zero map, `k = d` the identity.
    pub fn project(&self, phi: &HVector, k: usize) -> Result<HVector> {
        self.check_dim(phi)?;
        if k > self.dim {
            return Err(Error::OutOfRange { what: "projection rank", got: k, max: self.dim });
        }
        let mut out = HVector::zeros(self.dim);
        for e in &self.basis[..k] {
            let c = self.h_inner(phi, e)?;
            out = out.axpy(c, e);
        }
        Ok(out)
    }
}

/// Weighted `L_p` norm of raw values.
fn lp_norm(vals: &[f64], weights: &[f64], p: f64) -> f64 {
    debug_assert_eq!(vals.len(), weights.len());
    if p == 1.0 {
        vals.iter().zip(weights).map(|(x, mu)| mu * x.abs()).sum()
    } else {
        vals.iter()
            .zip(weights)
            .map(|(x, mu)| mu * x.abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }
}
