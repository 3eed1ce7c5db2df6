//! Evaluation of truncated inner analytic functions on the open disk and
//! extrapolation of their `rho -> 1` boundary values.
//!
//! The boundary limit of a truncated series fights two error sources pulling
//! in opposite directions: the radial expansion error, which shrinks with the
//! gap `h = 1 - rho`, and the truncation tail, which behaves like
//! `e^{-K h}` and explodes as `h -> 0`. The ladder therefore keeps its levels
//! inside the truncation-safe window `h >= TRUNC_MARGIN / K` and closes the
//! remaining gap by sequence extrapolation.

use thiserror::Error;

use crate::coeffs::{FourierCoefficients, TaylorCoefficients};
use crate::{normalize_angle, Real, C};

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("rho = {0} is outside the open disk (need 0 <= rho < 1)")]
    OutsideDisk(f64),
    #[error("ladder needs at least 2 levels")]
    LadderTooShort,
}

/// A point of the open unit disk in polar coordinates; `theta` is kept on
/// the principal branch `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint<T: Real> {
    rho: T,
    theta: T,
}

impl<T: Real> DiskPoint<T> {
    pub fn new(rho: T, theta: T) -> Result<Self, EvalError> {
        if !(rho >= T::zero() && rho < T::one()) {
            return Err(EvalError::OutsideDisk(rho.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self {
            rho,
            theta: normalize_angle(theta),
        })
    }

    pub fn rho(&self) -> T {
        self.rho
    }

    pub fn theta(&self) -> T {
        self.theta
    }
}

/// How the ladder values are extrapolated to `h = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extrapolation {
    /// Neville polynomial extrapolation using up to `order + 1` columns.
    Polynomial { order: usize },
    /// Bulirsch-Stoer rational extrapolation. Boundary restrictions of
    /// pole-type inner functions are rational in `h`, which this captures
    /// with far fewer levels than any polynomial scheme.
    Rational,
}

/// Radial evaluation ladder `rho_j = 1 - h_j` with geometrically shrinking
/// gaps, plus the extrapolation rule applied to the ladder values.
#[derive(Debug, Clone)]
pub struct RhoLadder<T: Real> {
    /// Gaps `h_j = 1 - rho_j`, strictly decreasing.
    levels: Vec<T>,
    pub extrapolation: Extrapolation,
}

/// Coarsest gap allowed on any ladder.
const LADDER_CAP: f64 = 0.5;
/// Contraction ratio between consecutive adapted-ladder levels.
const LADDER_RATIO: f64 = 1.3;
/// Finest gap is `TRUNC_MARGIN / K`, keeping the truncation tail `e^{-Kh}`
/// below ~6e-6 at every level.
const TRUNC_MARGIN: f64 = 12.0;
const LADDER_MAX_LEVELS: usize = 12;
/// Fallback floor when the truncation constraint does not bind (tiny `K`).
const LADDER_FLOOR: f64 = 2.44140625e-4; // 2^-12

impl<T: Real> RhoLadder<T> {
    /// Dyadic ladder `h_j = eta0 * 2^-j`, `j = 0..levels`, with polynomial
    /// extrapolation of the given order.
    pub fn dyadic(eta0: T, levels: usize, order: usize) -> Result<Self, EvalError> {
        if levels < 2 {
            return Err(EvalError::LadderTooShort);
        }
        let half = T::of(0.5);
        let mut h = Vec::with_capacity(levels);
        let mut cur = eta0;
        for _ in 0..levels {
            h.push(cur);
            cur = cur * half;
        }
        Ok(Self {
            levels: h,
            extrapolation: Extrapolation::Polynomial { order },
        })
    }

    /// Ladder tuned to a truncation order `K`: geometric levels (ratio 1.3)
    /// from the truncation-safe floor `12/K` up to `1/2`, at most 12 levels
    /// (finest kept), rational extrapolation.
    pub fn adapted_to_order(order: usize) -> Self {
        let mut h_min = TRUNC_MARGIN / order.max(1) as f64;
        if h_min >= LADDER_CAP {
            // so few terms that the series is effectively an exact polynomial
            h_min = LADDER_FLOOR;
        }
        h_min = h_min.max(LADDER_FLOOR);
        let mut h = vec![h_min];
        while h.last().unwrap() * LADDER_RATIO <= LADDER_CAP && h.len() < LADDER_MAX_LEVELS {
            let next = h.last().unwrap() * LADDER_RATIO;
            h.push(next);
        }
        h.reverse();
        Self {
            levels: h.into_iter().map(T::of).collect(),
            extrapolation: Extrapolation::Rational,
        }
    }

    /// Gaps `h_j`, coarse to fine.
    pub fn gaps(&self) -> &[T] {
        &self.levels
    }
}

/// `w(z) = sum c_k z^k` by nested multiplication in fixed descending-k
/// order; bitwise deterministic for identical inputs.
pub fn eval_inner<T: Real>(tc: &TaylorCoefficients<T>, pt: DiskPoint<T>) -> C<T> {
    let z = C::new(pt.rho * pt.theta.cos(), pt.rho * pt.theta.sin());
    let mut w = C::new(T::zero(), T::zero());
    for k in (0..=tc.order()).rev() {
        w = w * z + tc.coeff(k);
    }
    w
}

/// Abel-regulated Fourier sum
/// `alpha_0/2 + sum_k rho^k (alpha_k cos k theta + beta_k sin k theta)`,
/// accumulated in fixed ascending-k order.
pub fn regulated_sum<T: Real>(fc: &FourierCoefficients<T>, pt: DiskPoint<T>) -> T {
    let two = T::one() + T::one();
    let mut s = fc.alpha0 / two;
    let mut rho_pow = T::one();
    for k in 1..=fc.order() {
        rho_pow *= pt.rho;
        let kt = T::of_usize(k) * pt.theta;
        s += rho_pow * (fc.alpha[k - 1] * kt.cos() + fc.beta[k - 1] * kt.sin());
    }
    s
}

/// Outcome of a boundary-limit extrapolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryLimit<T: Real> {
    Value {
        value: T,
        /// Difference of the last two extrapolants; an extrapolation-based
        /// estimate only, truncation is not modeled.
        error_estimate: T,
    },
    /// The ladder values grow without settling: no finite boundary limit is
    /// visible at this angle (a hard singularity, at this resolution).
    Divergent,
}

impl<T: Real> BoundaryLimit<T> {
    pub fn value(&self) -> Option<(T, T)> {
        match *self {
            BoundaryLimit::Value { value, error_estimate } => Some((value, error_estimate)),
            BoundaryLimit::Divergent => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, BoundaryLimit::Divergent)
    }
}

/// Fixed dyadic ladder used only to diagnose divergence; independent of the
/// extrapolation levels so that saturation of a truncated pole still shows
/// its early geometric growth.
const DIAG_LEVELS: usize = 6;
const DIAG_ETA0: f64 = 0.0625;
/// Flag divergence when the diagnostic values grow monotonically by this
/// overall factor.
const DIVERGENCE_RATIO: f64 = 10.0;

/// Boundary value `lim_{rho->1} Re w(rho e^{i theta})` by ladder evaluation
/// and extrapolation in `h = 1 - rho`. Divergence is reported as an explicit
/// outcome, not an error.
pub fn limit_to_circle<T: Real>(
    tc: &TaylorCoefficients<T>,
    theta: T,
    ladder: &RhoLadder<T>,
) -> BoundaryLimit<T> {
    // divergence pre-test on the diagnostic ladder
    let mut diag = Vec::with_capacity(DIAG_LEVELS);
    let mut h = T::of(DIAG_ETA0);
    for _ in 0..DIAG_LEVELS {
        let pt = DiskPoint::new(T::one() - h, theta).expect("diagnostic rho inside disk");
        diag.push(eval_inner(tc, pt).re);
        h = h * T::of(0.5);
    }
    let monotone = diag.windows(2).all(|w| w[1].abs() >= w[0].abs());
    let grew = diag.last().unwrap().abs()
        >= T::of(DIVERGENCE_RATIO) * diag[0].abs().max(T::of(1e-12))
        && diag.last().unwrap().abs() > T::of(1e-6);
    if diag.iter().any(|v| !v.is_finite()) || (monotone && grew) {
        return BoundaryLimit::Divergent;
    }

    let gaps = ladder.gaps();
    let u: Vec<T> = gaps
        .iter()
        .map(|&hj| {
            let pt = DiskPoint::new(T::one() - hj, theta).expect("ladder rho inside disk");
            eval_inner(tc, pt).re
        })
        .collect();
    let (value, error_estimate) = match ladder.extrapolation {
        Extrapolation::Rational => rational_extrapolate(gaps, &u),
        Extrapolation::Polynomial { order } => neville_extrapolate(gaps, &u, order),
    };
    if !value.is_finite() {
        return BoundaryLimit::Divergent;
    }
    BoundaryLimit::Value { value, error_estimate }
}

/// Neville polynomial extrapolation of `(h_j, u_j)` to `h = 0`, using at
/// most `order` elimination columns.
fn neville_extrapolate<T: Real>(h: &[T], u: &[T], order: usize) -> (T, T) {
    let n = h.len();
    let cols = order.min(n - 1);
    let mut t = u.to_vec();
    let mut prev_diag = t[n - 1];
    let mut diag = t[n - 1];
    for m in 1..=cols {
        for j in 0..n - m {
            t[j] = (h[j] * t[j + 1] - h[j + m] * t[j]) / (h[j] - h[j + m]);
        }
        prev_diag = diag;
        diag = t[n - m - 1];
    }
    (diag, (diag - prev_diag).abs())
}

/// Diagonal rational extrapolation of `(h_j, u_j)` to `h = 0`
/// (Stoer-Bulirsch recurrence with small-denominator guards).
fn rational_extrapolate<T: Real>(h: &[T], u: &[T], ) -> (T, T) {
    let n = h.len();
    let tiny = T::of(1e-290);
    let mut c = u.to_vec();
    let mut d: Vec<T> = u.iter().map(|&v| v + tiny).collect();
    // h is coarse-to-fine, so the node nearest 0 is the last
    let mut ns = n - 1;
    let mut y = u[ns];
    ns = ns.wrapping_sub(1);
    let mut prev = y;
    for m in 1..n {
        for i in 0..n - m {
            let w = c[i + 1] - d[i];
            let t = h[i] * d[i] / h[i + m];
            let mut dd = t - c[i + 1];
            if dd == T::zero() {
                dd = tiny;
            }
            dd = w / dd;
            d[i] = c[i + 1] * dd;
            c[i] = t * dd;
        }
        let dy = if 2 * (ns.wrapping_add(1)) < n - m {
            c[ns.wrapping_add(1)]
        } else {
            let v = d[ns];
            ns = ns.wrapping_sub(1);
            v
        };
        prev = y;
        y = y + dy;
    }
    (y, (y - prev).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::TaylorCoefficients;
    use crate::C;

    type Tc = TaylorCoefficients<f64>;

    fn geometric_tc(k: usize, v: C<f64>) -> Tc {
        let mut c = vec![C::new(0.0, 0.0); k + 1];
        for ck in c.iter_mut().skip(1) {
            *ck = v;
        }
        Tc::new(c).unwrap()
    }

    #[test]
    fn disk_point_normalizes_and_validates() {
        let p = DiskPoint::new(0.5, 3.0 * std::f64::consts::PI).unwrap();
        assert!((p.theta() - std::f64::consts::PI).abs() < 1e-12);
        assert!(DiskPoint::new(1.0, 0.0).is_err());
        assert!(DiskPoint::new(-0.1, 0.0).is_err());
    }

    #[test]
    fn eval_constant_and_center() {
        let tc = Tc::new(vec![C::new(1.0, 0.0), C::new(0.0, 0.0)]).unwrap();
        let w = eval_inner(&tc, DiskPoint::new(0.7, 1.3).unwrap());
        assert_eq!(w, C::new(1.0, 0.0));

        let tc = Tc::new(vec![C::new(0.25, -0.5), C::new(3.0, 1.0)]).unwrap();
        let w = eval_inner(&tc, DiskPoint::new(0.0, 2.0).unwrap());
        assert_eq!(w, C::new(0.25, -0.5));
    }

    #[test]
    fn eval_geometric_closed_form() {
        // c_k = -i for k >= 1: w(z) = -i z / (1 - z); at z = 0.5: -i
        let tc = geometric_tc(512, C::new(0.0, -1.0));
        let w = eval_inner(&tc, DiskPoint::new(0.5, 0.0).unwrap());
        assert!((w - C::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn regulated_sum_closed_forms() {
        // beta_k = 1: rho sin(theta) / (1 - 2 rho cos theta + rho^2)
        let k = 512;
        let fc = crate::coeffs::FourierCoefficients::new(0.0, vec![0.0; k], vec![1.0; k]).unwrap();
        let pt = DiskPoint::new(0.5, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((regulated_sum(&fc, pt) - 0.4).abs() < 1e-12);

        // alpha0 = 2 only -> 1 everywhere
        let fc = crate::coeffs::FourierCoefficients::new(2.0, vec![0.0; 4], vec![0.0; 4]).unwrap();
        assert!((regulated_sum(&fc, DiskPoint::new(0.9_f64, 2.0).unwrap()) - 1.0).abs() < 1e-15);

        // alpha_k = 1 at (0.9, pi): (rho cos - rho^2)/(1 - 2 rho cos + rho^2)
        let k = 4096;
        let fc = crate::coeffs::FourierCoefficients::new(0.0, vec![1.0; k], vec![0.0; k]).unwrap();
        let pt = DiskPoint::new(0.9, std::f64::consts::PI).unwrap();
        let expect = (-0.9 - 0.81) / (1.0 + 1.8 + 0.81);
        assert!((regulated_sum(&fc, pt) - expect).abs() < 1e-12);
    }

    #[test]
    fn regulated_sum_matches_real_part_of_eval() {
        let k = 64;
        let alpha: Vec<f64> = (1..=k).map(|i| (i as f64 * 0.9).sin() / i as f64).collect();
        let beta: Vec<f64> = (1..=k).map(|i| (i as f64 * 0.4).cos()).collect();
        let fc = crate::coeffs::FourierCoefficients::new(0.7, alpha, beta).unwrap();
        let tc = fc.to_taylor();
        for &(rho, theta) in &[(0.3, 0.7), (0.9, -2.0), (0.99, 3.0), (0.0, 1.0)] {
            let pt = DiskPoint::new(rho, theta).unwrap();
            let a = regulated_sum(&fc, pt);
            let b = eval_inner(&tc, pt).re;
            assert!((a - b).abs() < 1e-12, "rho={rho} theta={theta}: {a} vs {b}");
        }
    }

    #[test]
    fn limit_abel_sum_of_sines() {
        // sum sin(k theta) Abel-sums to cot(theta/2)/2; at pi/2 that is 1/2
        let tc = geometric_tc(2048, C::new(0.0, -1.0));
        let ladder = RhoLadder::adapted_to_order(2048);
        let lim = limit_to_circle(&tc, std::f64::consts::FRAC_PI_2, &ladder);
        let (v, _) = lim.value().expect("convergent");
        assert!((v - 0.5).abs() < 1e-6, "got {v}");
    }

    #[test]
    fn limit_entire_polynomial_is_exact() {
        let tc = Tc::new(vec![C::new(1.0, 0.0); 4]).unwrap();
        let ladder = RhoLadder::adapted_to_order(3);
        let (v, _) = limit_to_circle(&tc, 0.0, &ladder).value().unwrap();
        assert!((v - 4.0).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn limit_poisson_kernel_at_pi() {
        // alpha_k = 1 (c_k = 1): limit at pi is (cos pi - 1)/(2 - 2 cos pi) = -1/2
        let tc = geometric_tc(8192, C::new(1.0, 0.0));
        let ladder = RhoLadder::adapted_to_order(8192);
        let (v, _) = limit_to_circle(&tc, std::f64::consts::PI, &ladder).value().unwrap();
        assert!((v + 0.5).abs() < 1e-6, "got {v}");
    }

    #[test]
    fn limit_flags_divergence_at_pole() {
        // periodic delta at theta = 0: c_0 = 1/2pi, c_k = 1/pi
        let mut c = vec![C::new(1.0 / std::f64::consts::PI, 0.0); 1025];
        c[0] = C::new(0.5 / std::f64::consts::PI, 0.0);
        let tc = Tc::new(c).unwrap();
        let ladder = RhoLadder::adapted_to_order(1024);
        assert!(limit_to_circle(&tc, 0.0, &ladder).is_divergent());
        // and converges to ~0 away from the pole
        let (v, _) = limit_to_circle(&tc, 2.0, &ladder).value().unwrap();
        assert!(v.abs() < 1e-6, "got {v}");
    }

    #[test]
    fn dyadic_ladder_polynomial_mode() {
        let ladder = RhoLadder::<f64>::dyadic(0.0625, 6, 3).unwrap();
        assert_eq!(ladder.gaps().len(), 6);
        assert!((ladder.gaps()[5] - 0.0625 / 32.0).abs() < 1e-15);
        // smooth series: polynomial extrapolation converges fine
        let tc = geometric_tc(4096, C::new(0.0, -1.0));
        let (v, _) = limit_to_circle(&tc, 2.5, &ladder).value().unwrap();
        assert!((v - 0.5 / (1.25f64).tan()).abs() < 1e-6);
    }

    #[test]
    fn determinism_bitwise() {
        let tc = geometric_tc(512, C::new(0.3, -0.4));
        let pt = DiskPoint::new(0.95, 1.234).unwrap();
        let a = eval_inner(&tc, pt);
        let b = eval_inner(&tc, pt);
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
        let ladder = RhoLadder::adapted_to_order(512);
        let l1 = limit_to_circle(&tc, 1.234, &ladder);
        let l2 = limit_to_circle(&tc, 1.234, &ladder);
        assert_eq!(l1, l2);
    }
}
