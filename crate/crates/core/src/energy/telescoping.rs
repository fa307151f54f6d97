//! The discrete telescoping identity behind the energy ledger.
//!
//! For any partition `0 = τ_0 < τ_1 ≤ … ≤ τ_{N+1} = ∞` and the composed
//! path `v = z + h` with `z(0) = 0`, expanding `|v(τ_j)|² − |v(0)|²` as a
//! telescoping sum of interval increments gives, with no limits taken,
//!
//! ```text
//! |v(τ_j)|² = |h(0)|²
//!   + 2 Σ_i ∫_(0,τ_j] <v_i*(s), v→(s)> dA(s)     v→ = right-sampled v
//!   + 2 ∫_(0,τ_j] (v←(s), dh(s))                 v← = left-sampled v, 0 on [0,τ_1]
//!   + 2 (h(0), h(τ_1) − h(0))
//!   + Σ_{k<j} |h(τ_{k+1}) − h(τ_k)|²
//!   − |v(τ_1) − h(τ_1)|²
//!   − Σ_{1≤k<j} |v(τ_{k+1}) − v(τ_k) − (h(τ_{k+1}) − h(τ_k))|²
//! ```
//!
//! where the right-sampled path takes the value `v(τ_{k+1})` on
//! `(τ_k, τ_{k+1}]` and the left-sampled one `v(τ_k)`. Every quantity is
//! evaluated through the exact Stieltjes engine, so the defect at each
//! `τ_j` measures floating-point rounding only. As the partitions refine,
//! the first three data-dependent terms converge to their ledger
//! counterparts and the two subtracted squares become the jump correction.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::processes::driver::Window;
use crate::processes::partition::PartitionHierarchy;
use crate::processes::scenario::Scenario;
use crate::spaces::HVector;

/// The seven right-hand terms at the final partition index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TelescopingTerms {
    /// `|h(0)|²`.
    pub sq_initial: f64,
    /// `2 Σ_i ∫ <v_i*, v→> dA` against the right-sampled path.
    pub drift_pairing: f64,
    /// `2 ∫ (v←, dh)` against the left-sampled path, zero on `[0, τ_1]`.
    pub jump_pairing: f64,
    /// `2 (h(0), h(τ_1) − h(0))` — the first window's path pairing, split
    /// out because the left-sampled path is zeroed there.
    pub initial_jump_pairing: f64,
    /// `Σ |h(τ_{k+1}) − h(τ_k)|²`.
    pub sq_path_increments: f64,
    /// `|v(τ_1) − h(τ_1)|²`, subtracted.
    pub sq_first_drift_increment: f64,
    /// `Σ_{k≥1} |Δv − Δh|²`, subtracted.
    pub sq_later_drift_increments: f64,
}

impl TelescopingTerms {
    /// Signed sum of the seven terms.
    pub fn rhs(&self) -> f64 {
        self.sq_initial + self.drift_pairing + self.jump_pairing + self.initial_jump_pairing
            + self.sq_path_increments
            - self.sq_first_drift_increment
            - self.sq_later_drift_increments
    }

    /// The two subtracted squares together: the correction sum `K_n` at the
    /// final partition index.
    pub fn correction_sum(&self) -> f64 {
        self.sq_first_drift_increment + self.sq_later_drift_increments
    }
}

/// Defect survey of the identity over one partition level.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TelescopingReport {
    pub level: u32,
    /// Number of partition indices checked.
    pub checked: usize,
    /// `max_j |lhs_j − rhs_j| / (1 + |lhs_j|)`.
    pub max_defect: f64,
    /// Partition time realising the worst defect.
    pub worst_time: f64,
    /// The seven terms at the last partition index.
    pub final_terms: TelescopingTerms,
}

/// Verify the identity at every partition index of `parts.level(level)`.
pub fn telescoping_check(
    s: &Scenario,
    parts: &PartitionHierarchy,
    level: u32,
) -> Result<TelescopingReport> {
    let fam = s.family();
    let times = parts.level(level)?;
    let n = times.len();

    // Path samples at the partition times (+∞ reads the terminal values).
    let v: Vec<HVector> = times.iter().map(|t| s.v(*t)).collect();
    let h: Vec<HVector> = times.iter().map(|t| s.martingale().eval(*t)).collect();

    // Cumulative drift integrals I_i(τ_k) = ∫_(0,τ_k] v_i* dA through the
    // Stieltjes engine; the right-sampled pairing over (τ_k, τ_{k+1}] is
    // then <I_i(τ_{k+1}) − I_i(τ_k), v(τ_{k+1})>.
    let cumulative: Vec<Vec<HVector>> = s
        .drifts()
        .iter()
        .map(|d| {
            times
                .iter()
                .map(|t| s.driver().integrate_step_path(d.values(), *t, Window::ClosedRight))
                .collect()
        })
        .collect();

    let mut terms = TelescopingTerms {
        sq_initial: fam.h_norm_sq(s.martingale().initial())?,
        drift_pairing: 0.0,
        jump_pairing: 0.0,
        initial_jump_pairing: 2.0 * fam.h_inner(&h[0], &h[1].axpy(-1.0, &h[0]))?,
        sq_path_increments: 0.0,
        sq_first_drift_increment: fam.h_norm_sq(&v[1].axpy(-1.0, &h[1]))?,
        sq_later_drift_increments: 0.0,
    };

    // Path jumps enter the left-sampled pairing once the running τ_j
    // passes them; each contributes with its own window index.
    let h_times = s.martingale().times();
    let h_jumps = s.martingale().jumps();
    let mut next_jump = 0usize;

    let mut max_defect = 0.0f64;
    let mut worst_time = times[0];
    for j in 1..n {
        for row in &cumulative {
            let inc = row[j].axpy(-1.0, &row[j - 1]);
            terms.drift_pairing += 2.0 * fam.duality_pair(&inc, &v[j])?;
        }
        while next_jump < h_times.len() && h_times[next_jump] <= times[j] {
            let u = h_times[next_jump];
            // Window index: the k with τ_k < u ≤ τ_{k+1}.
            let k = times.partition_point(|tau| *tau < u) - 1;
            if k > 0 {
                terms.jump_pairing += 2.0 * fam.h_inner(&v[k], &h_jumps[next_jump])?;
            }
            next_jump += 1;
        }
        let dh = h[j].axpy(-1.0, &h[j - 1]);
        terms.sq_path_increments += fam.h_norm_sq(&dh)?;
        if j > 1 {
            let dz = v[j].axpy(-1.0, &v[j - 1]).axpy(-1.0, &dh);
            terms.sq_later_drift_increments += fam.h_norm_sq(&dz)?;
        }

        let lhs = fam.h_norm_sq(&v[j])?;
        let defect = (lhs - terms.rhs()).abs() / (1.0 + lhs.abs());
        if defect > max_defect {
            max_defect = defect;
            worst_time = times[j];
        }
    }

    Ok(TelescopingReport { level, checked: n - 1, max_defect, worst_time, final_terms: terms })
}
