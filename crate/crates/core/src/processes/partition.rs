//! Time-changed dyadic partition hierarchies `τ^n_j = β(j·2^-n)` and step
//! approximations of cadlag paths along them.
//!
//! Level `n` lists `2^n` time-changed grid points followed by a `+∞`
//! sentinel, so the final piece always absorbs the tail. Levels are nested
//! because dyadic grids are. Duplicated entries (several levels inside one
//! driver jump) are kept: empty pieces contribute nothing anywhere.

use crate::error::{Error, Result};
use crate::processes::driver::{IncreasingDriver, Window};
use crate::processes::path::HPath;
use crate::processes::quad::integrate_resolved;
use crate::spaces::SpaceFamily;

#[derive(Debug, Clone)]
pub struct PartitionHierarchy {
    levels: Vec<Vec<f64>>,
}

/// Build levels `0..=max_level` for a driver of total mass at most one.
/// Larger masses are refused: the dyadic grid on `[0, 1)` would no longer
/// cover the driver's range.
pub fn build_partitions(a: &IncreasingDriver, max_level: u32) -> Result<PartitionHierarchy> {
    let mass = a.total_mass();
    if mass > 1.0 {
        return Err(Error::MassExceedsUnit { mass });
    }
    let levels = (0..=max_level)
        .map(|n| {
            let count = 1usize << n;
            let mut times: Vec<f64> = (0..=count)
                .map(|j| a.beta(j as f64 * f64::exp2(-f64::from(n))))
                .collect();
            times.push(f64::INFINITY);
            times
        })
        .collect();
    Ok(PartitionHierarchy { levels })
}

impl PartitionHierarchy {
    pub fn max_level(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    /// Partition times at level `n` (ascending, `+∞` sentinel last).
    pub fn level(&self, n: u32) -> Result<&[f64]> {
        self.levels.get(n as usize).map(Vec::as_slice).ok_or(Error::OutOfRange {
            what: "partition level",
            got: n as usize,
            max: self.max_level() as usize,
        })
    }

    /// Whether every driver jump time appears at level `n` (guaranteed once
    /// `2^-n` is below the smallest jump size).
    pub fn captures_all_jumps(&self, a: &IncreasingDriver, n: u32) -> Result<bool> {
        let times = self.level(n)?;
        Ok(a.jump_times()
            .iter()
            .all(|t| times.binary_search_by(|x| x.partial_cmp(t).unwrap()).is_ok()))
    }
}

/// Which endpoint of each partition piece the approximation samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Cadlag approximation: `p(τ_k)` on `[τ_k, τ_{k+1})`.
    Left,
    /// Right-sampled approximation: `p(τ_{k+1})` on `(τ_k, τ_{k+1}]`; the
    /// piece past the last finite time takes the terminal value.
    Right,
}

/// Value of the step approximation of `path` along `times` at `s`.
pub fn sampled_value<P: HPath>(path: &P, times: &[f64], side: Side, s: f64) -> crate::spaces::HVector {
    let k = match side {
        Side::Left => times.partition_point(|x| *x <= s).saturating_sub(1),
        Side::Right => times.partition_point(|x| *x < s),
    };
    path.eval(times[k.min(times.len() - 1)])
}

/// Per-space approximation errors `(∫ ‖p(s) - p_n(s)‖_{V_i}^{p_i} dA)^{1/p_i}`
/// over the whole time axis, for the step approximation of `path` sampled
/// along `times` on the given side.
pub fn step_approximation<P: HPath>(
    family: &SpaceFamily,
    a: &IncreasingDriver,
    path: &P,
    times: &[f64],
    side: Side,
) -> Result<Vec<f64>> {
    family.check_dim(&path.eval(0.0))?;
    let mut kinks = path.kinks();
    kinks.extend(times.iter().copied().filter(|t| t.is_finite()));
    kinks.sort_by(|p, q| p.partial_cmp(q).unwrap());
    kinks.dedup();
    let mut errors = Vec::with_capacity(family.num_spaces());
    for i in 0..family.num_spaces() {
        let p = family.space(i)?.p;
        let raw = integrate_resolved(
            a,
            &kinks,
            |s| {
                let diff = &path.eval(s) - &sampled_value(path, times, side, s);
                family.v_norm(&diff, i).expect("dimension checked above").powf(p)
            },
            f64::INFINITY,
            Window::ClosedRight,
        );
        errors.push(raw.powf(1.0 / p));
    }
    Ok(errors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processes::martingale::MartingalePath;
    use crate::spaces::{HVector, SpaceDescriptor};

    fn two_jump_driver() -> IncreasingDriver {
        IncreasingDriver::pure_jump(vec![(1.0, 0.3), (2.0, 0.45)]).unwrap()
    }

    #[test]
    fn heavy_drivers_are_refused() {
        let a = IncreasingDriver::pure_jump(vec![(1.0, 1.5)]).unwrap();
        assert!(matches!(build_partitions(&a, 3), Err(Error::MassExceedsUnit { .. })));
    }

    #[test]
    fn levels_match_hand_values_and_nest() {
        let a = two_jump_driver();
        let parts = build_partitions(&a, 4).unwrap();
        assert_eq!(parts.level(0).unwrap(), &[0.0, f64::INFINITY, f64::INFINITY]);
        assert_eq!(parts.level(1).unwrap(), &[0.0, 2.0, f64::INFINITY, f64::INFINITY]);
        assert_eq!(
            parts.level(2).unwrap(),
            &[0.0, 1.0, 2.0, 2.0, f64::INFINITY, f64::INFINITY]
        );
        assert!(!parts.captures_all_jumps(&a, 1).unwrap());
        assert!(parts.captures_all_jumps(&a, 2).unwrap());
        for n in 0..4 {
            let coarse = parts.level(n).unwrap();
            let fine = parts.level(n + 1).unwrap();
            for t in coarse {
                assert!(fine.contains(t), "level {n} point {t} missing at {}", n + 1);
            }
        }
    }

    #[test]
    fn approximation_error_vanishes_once_jumps_are_captured() {
        let fam =
            SpaceFamily::new(vec![1.0], vec![SpaceDescriptor::lp(2.0, vec![1.0])]).unwrap();
        let a = two_jump_driver();
        let h = MartingalePath::new(
            HVector::zeros(1),
            vec![1.0],
            vec![HVector::new(vec![1.0]).unwrap()],
        )
        .unwrap();
        let parts = build_partitions(&a, 2).unwrap();

        // Level 1 = [0, 2, ∞, ∞] misses the path jump at t = 1. The cadlag
        // approximation is 0 there while the path is already 1, and the
        // atom at t = 1 weighs 0.3.
        let coarse = parts.level(1).unwrap();
        let left = step_approximation(&fam, &a, &h, coarse, Side::Left).unwrap();
        assert!((left[0] - 0.3f64.sqrt()).abs() < 1e-15);
        // The right-sampled approximation already carries the post-jump
        // value on (0, 2], so it is exact at both atoms.
        let right = step_approximation(&fam, &a, &h, coarse, Side::Right).unwrap();
        assert_eq!(right[0], 0.0);

        // Level 2 captures every jump: both sides are exact.
        let fine = parts.level(2).unwrap();
        for side in [Side::Left, Side::Right] {
            let errs = step_approximation(&fam, &a, &h, fine, side).unwrap();
            assert_eq!(errs[0], 0.0);
        }
    }
}
