//! `dA`-integration of integrands that are not step functions: atoms are
//! summed exactly, and density stretches are split at the integrand's kink
//! times and handled with a fixed 16-point Gauss–Legendre rule per piece
//! (exact through polynomial degree 31, so exact for the affine and
//! quadratic integrands produced by piecewise-affine paths, and accurate to
//! near machine precision for fractional-power norms of such paths).

use crate::processes::driver::{IncreasingDriver, Window};

/// Positive abscissae of the 16-point Gauss–Legendre rule on `[-1, 1]`,
/// transcribed at published precision so the table can be checked against
/// the reference digit for digit (the compiler rounds to nearest `f64`).
#[allow(clippy::excessive_precision)]
const GL16_X: [f64; 8] = [
    0.095_012_509_837_637_440_185,
    0.281_603_550_779_258_913_230,
    0.458_016_777_657_227_386_342,
    0.617_876_244_402_643_748_447,
    0.755_404_408_355_003_033_895,
    0.865_631_202_387_831_743_880,
    0.944_575_023_073_232_576_078,
    0.989_400_934_991_649_932_596,
];

/// Weights paired with [`GL16_X`], transcribed at published precision.
#[allow(clippy::excessive_precision)]
const GL16_W: [f64; 8] = [
    0.189_450_610_455_068_496_285,
    0.182_603_415_044_923_588_867,
    0.169_156_519_395_002_538_189,
    0.149_595_988_816_576_732_081,
    0.124_628_971_255_533_872_052,
    0.095_158_511_682_492_784_810,
    0.062_253_523_938_647_892_863,
    0.027_152_459_411_754_094_852,
];

/// 16-point Gauss–Legendre approximation of `∫_lo^hi f`.
pub fn gauss16(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut acc = 0.0;
    for (x, w) in GL16_X.iter().zip(&GL16_W) {
        acc += w * (f(mid - half * x) + f(mid + half * x));
    }
    acc * half
}

/// `∫ f dA` over the window at `t` for an integrand that is smooth between
/// consecutive `kinks` (sorted ascending) on density stretches and
/// arbitrary at atoms.
pub fn integrate_resolved(
    a: &IncreasingDriver,
    kinks: &[f64],
    f: impl Fn(f64) -> f64,
    t: f64,
    window: Window,
) -> f64 {
    debug_assert!(kinks.windows(2).all(|w| w[0] <= w[1]), "kinks must be sorted");
    let keep = |tk: f64| match window {
        Window::ClosedRight => tk <= t,
        Window::OpenRight => tk < t,
    };
    let mut acc = 0.0;
    for (tk, da) in a.jump_times().iter().zip(a.jump_sizes()) {
        if keep(*tk) {
            acc += f(*tk) * da;
        } else if *tk > t {
            break;
        }
    }
    for seg in a.density() {
        if seg.rate == 0.0 {
            continue;
        }
        let hi = seg.end.min(t);
        if hi <= seg.start {
            continue;
        }
        let mut lo = seg.start;
        let from = kinks.partition_point(|c| *c <= lo);
        for c in &kinks[from..] {
            if *c >= hi {
                break;
            }
            acc += seg.rate * gauss16(&f, lo, *c);
            lo = *c;
        }
        acc += seg.rate * gauss16(&f, lo, hi);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processes::driver::DensitySegment;
    use crate::processes::step::{Convention, StepFunction};

    #[test]
    fn gauss16_is_exact_on_polynomials() {
        let int = gauss16(|x| x.powi(5), 0.0, 1.0);
        assert!((int - 1.0 / 6.0).abs() < 1e-15);
        let int = gauss16(|x| 3.0 * x * x - x + 2.0, -1.0, 2.0);
        assert!((int - (9.0 - 1.5 + 6.0)).abs() < 1e-13);
    }

    #[test]
    fn resolved_integral_agrees_with_the_step_engine() {
        let a = IncreasingDriver::new(
            vec![0.6],
            vec![0.5],
            vec![DensitySegment { start: 0.0, end: 1.0, rate: 2.0 }],
        )
        .unwrap();
        let x = StepFunction::new(vec![0.25], vec![1.0, 3.0], Convention::LeftContinuous).unwrap();
        for t in [0.3, 0.6, 1.0, 2.0] {
            for w in [Window::ClosedRight, Window::OpenRight] {
                let exact = a.integrate_step(&x, t, w);
                let resolved = integrate_resolved(&a, x.cuts(), |s| x.eval(s), t, w);
                assert!((exact - resolved).abs() < 1e-14, "t={t}");
            }
        }
    }

    #[test]
    fn quadratic_integrand_over_unit_density_is_exact() {
        let a = IncreasingDriver::unit_density();
        let int = integrate_resolved(&a, &[], |s| s * s, 1.0, Window::ClosedRight);
        assert!((int - 1.0 / 3.0).abs() < 1e-15);
    }
}
