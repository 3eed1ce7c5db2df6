//! Coefficient-level algebra on truncated Taylor and Fourier sequences.
//!
//! A truncated inner analytic function `w(z) = sum_{k=0}^{K} c_k z^k` is in
//! bijection with the real Fourier data `(alpha_0, alpha_k, beta_k)` through
//! `c_0 = alpha_0 / 2`, `c_k = alpha_k - i beta_k`. The angular derivative and
//! primitive act as the exact coefficient transforms `c_k -> (ik)^n c_k` and
//! `c_k -> c_k / (ik)^n` with the constant term projected out.

use thiserror::Error;

use crate::{Real, C};

#[derive(Debug, Error, PartialEq)]
pub enum CoeffsError {
    #[error("coefficient sequence must have K >= 1 nonconstant terms (got K = {0})")]
    TooShort(usize),
    #[error("non-finite coefficient at index {0}")]
    NonFinite(usize),
    #[error("imaginary part of c0 is {0:e}, beyond tolerance; no real-function correspondence")]
    ImaginaryConstant(f64),
    #[error("mixed truncation orders: {0} vs {1}")]
    MixedOrder(usize, usize),
    #[error("growth fit needs K >= 32 (got K = {0})")]
    FitTooShort(usize),
}

/// Truncated complex Taylor coefficients `c_0 .. c_K` of an inner analytic
/// function. `K >= 1` and every entry is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorCoefficients<T: Real> {
    c: Vec<C<T>>,
}

/// Truncated real Fourier data: `alpha_0` plus `alpha_k`, `beta_k` for
/// `k = 1..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients<T: Real> {
    pub alpha0: T,
    pub alpha: Vec<T>,
    pub beta: Vec<T>,
}

/// Verdict of the exponential-boundedness test. The underlying definition is
/// a limit over all positive rates, which no finite sequence can decide; the
/// verdict reports evidence from a geometric-factor fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpBounded {
    Yes,
    No,
    Inconclusive,
}

/// Tail-growth diagnostics of a coefficient sequence.
#[derive(Debug, Clone)]
pub struct GrowthReport<T: Real> {
    /// Estimated power-law exponent of `|c_k|` (log-log least squares over
    /// the upper half of the nonzero indices).
    pub n_hat: T,
    pub exp_bounded: ExpBounded,
    /// RMS residual of the power-law fit, in log space.
    pub fit_residual: T,
    /// Geometric growth factor from the semilog fit (evidence for `No`).
    pub geom_factor: T,
    /// Set when every `c_k`, `k >= 1`, is zero; `n_hat` is then meaningless.
    pub zero_tail: bool,
}

/// `k^n` as a scalar. Shared by the angular transforms and the extended
/// Fourier relations so the two routes perform identical float operations.
pub(crate) fn k_pow<T: Real>(k: usize, n: u32) -> T {
    T::of_usize(k).powi(n as i32)
}

/// Components of `i^n * (re + i*im)` by quadrant; exact (no rounding).
pub(crate) fn mul_i_pow<T: Real>(n: u32, re: T, im: T) -> (T, T) {
    match n % 4 {
        0 => (re, im),
        1 => (-im, re),
        2 => (-re, -im),
        _ => (im, -re),
    }
}

impl<T: Real> TaylorCoefficients<T> {
    /// Build from `c_0 .. c_K`; requires `K >= 1` and finite entries.
    pub fn new(c: Vec<C<T>>) -> Result<Self, CoeffsError> {
        if c.len() < 2 {
            return Err(CoeffsError::TooShort(c.len().saturating_sub(1)));
        }
        for (k, v) in c.iter().enumerate() {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(CoeffsError::NonFinite(k));
            }
        }
        Ok(Self { c })
    }

    /// All-zero sequence of truncation order `K`.
    pub fn zeros(order: usize) -> Result<Self, CoeffsError> {
        if order < 1 {
            return Err(CoeffsError::TooShort(order));
        }
        Ok(Self {
            c: vec![C::new(T::zero(), T::zero()); order + 1],
        })
    }

    /// Truncation order `K` (count of nonconstant terms).
    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeff(&self, k: usize) -> C<T> {
        self.c[k]
    }

    pub fn coeffs(&self) -> &[C<T>] {
        &self.c
    }

    pub fn set_coeff(&mut self, k: usize, v: C<T>) {
        self.c[k] = v;
    }

    /// A sequence is proper when `c_0 = 0` exactly.
    pub fn is_proper(&self) -> bool {
        self.c[0].re == T::zero() && self.c[0].im == T::zero()
    }

    /// Fourier data `(alpha_0, alpha_k, beta_k)` of the sequence. Errors when
    /// `Im c_0` exceeds the real-correspondence tolerance `sqrt(eps)`.
    pub fn to_fourier(&self) -> Result<FourierCoefficients<T>, CoeffsError> {
        let tol = T::epsilon().sqrt();
        if self.c[0].im.abs() > tol {
            return Err(CoeffsError::ImaginaryConstant(
                self.c[0].im.abs().to_f64().unwrap_or(f64::NAN),
            ));
        }
        let two = T::one() + T::one();
        Ok(FourierCoefficients {
            alpha0: two * self.c[0].re,
            alpha: self.c[1..].iter().map(|v| v.re).collect(),
            beta: self.c[1..].iter().map(|v| -v.im).collect(),
        })
    }

    /// Coefficients of the n-th angular derivative: `c_k -> (ik)^n c_k`,
    /// `c_0 -> 0` for `n >= 1`. `n = 0` is the identity.
    pub fn angular_derivative(&self, n: u32) -> Self {
        if n == 0 {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.c.len());
        out.push(C::new(T::zero(), T::zero()));
        for (k, v) in self.c.iter().enumerate().skip(1) {
            let kn = k_pow::<T>(k, n);
            let (re, im) = mul_i_pow(n, v.re, v.im);
            out.push(C::new(re * kn, im * kn));
        }
        Self { c: out }
    }

    /// Coefficients of the n-th angular primitive: `c_k -> c_k / (ik)^n`,
    /// `c_0 -> 0`. Division by `(ik)^n` never touches `k = 0`.
    pub fn angular_primitive(&self, n: u32) -> Self {
        if n == 0 {
            let mut out = self.clone();
            out.c[0] = C::new(T::zero(), T::zero());
            return out;
        }
        let mut out = Vec::with_capacity(self.c.len());
        out.push(C::new(T::zero(), T::zero()));
        for (k, v) in self.c.iter().enumerate().skip(1) {
            let kn = k_pow::<T>(k, n);
            // i^{-n} = i^{(4 - n mod 4) mod 4}
            let (re, im) = mul_i_pow((4 - n % 4) % 4, v.re, v.im);
            out.push(C::new(re / kn, im / kn));
        }
        Self { c: out }
    }

    /// Entry-wise difference; the orders must match (no silent padding).
    pub fn checked_sub(&self, rhs: &Self) -> Result<Self, CoeffsError> {
        if self.order() != rhs.order() {
            return Err(CoeffsError::MixedOrder(self.order(), rhs.order()));
        }
        Ok(Self {
            c: self
                .c
                .iter()
                .zip(&rhs.c)
                .map(|(a, b)| C::new(a.re - b.re, a.im - b.im))
                .collect(),
        })
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, CoeffsError> {
        if self.order() != rhs.order() {
            return Err(CoeffsError::MixedOrder(self.order(), rhs.order()));
        }
        Ok(Self {
            c: self
                .c
                .iter()
                .zip(&rhs.c)
                .map(|(a, b)| C::new(a.re + b.re, a.im + b.im))
                .collect(),
        })
    }

    /// Tail-growth diagnostics. The power-law exponent comes from a log-log
    /// fit over the upper half of the nonzero indices; low-k transients are
    /// excluded because they pollute the asymptotic regime the verdict is
    /// about. Requires `K >= 32`.
    pub fn growth_order(&self) -> Result<GrowthReport<T>, CoeffsError> {
        let order = self.order();
        if order < 32 {
            return Err(CoeffsError::FitTooShort(order));
        }
        let nonzero: Vec<usize> = (1..=order)
            .filter(|&k| self.c[k].norm_sqr() > T::zero())
            .collect();
        if nonzero.is_empty() {
            return Ok(GrowthReport {
                n_hat: T::zero(),
                exp_bounded: ExpBounded::Yes,
                fit_residual: T::zero(),
                geom_factor: T::one(),
                zero_tail: true,
            });
        }
        let upper = &nonzero[nonzero.len() / 2..];
        if upper.len() < 8 {
            return Ok(GrowthReport {
                n_hat: T::zero(),
                exp_bounded: ExpBounded::Inconclusive,
                fit_residual: T::zero(),
                geom_factor: T::one(),
                zero_tail: false,
            });
        }
        let ys: Vec<T> = upper.iter().map(|&k| self.c[k].norm().ln()).collect();
        let (n_hat, residual) = fit_slope(&upper.iter().map(|&k| T::of_usize(k).ln()).collect::<Vec<_>>(), &ys);
        let (semilog_slope, _) = fit_slope(&upper.iter().map(|&k| T::of_usize(k)).collect::<Vec<_>>(), &ys);
        let geom_factor = semilog_slope.exp();
        let verdict = if geom_factor > T::one() + T::of(1e-3) {
            ExpBounded::No
        } else {
            ExpBounded::Yes
        };
        Ok(GrowthReport {
            n_hat,
            exp_bounded: verdict,
            fit_residual: residual,
            geom_factor,
            zero_tail: false,
        })
    }
}

/// Least-squares slope of `y` against `x`, plus the RMS residual.
fn fit_slope<T: Real>(x: &[T], y: &[T]) -> (T, T) {
    let n = T::of_usize(x.len());
    let mx = x.iter().fold(T::zero(), |a, &b| a + b) / n;
    let my = y.iter().fold(T::zero(), |a, &b| a + b) / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    let slope = if sxx > T::zero() { sxy / sxx } else { T::zero() };
    let intercept = my - slope * mx;
    let mut ss = T::zero();
    for (&xi, &yi) in x.iter().zip(y) {
        let r = yi - (slope * xi + intercept);
        ss += r * r;
    }
    (slope, (ss / n).sqrt())
}

impl<T: Real> FourierCoefficients<T> {
    /// Build from `alpha_0` and the `k >= 1` coefficient lists; the lists
    /// must agree in length (`K >= 1`) and all entries must be finite.
    pub fn new(alpha0: T, alpha: Vec<T>, beta: Vec<T>) -> Result<Self, CoeffsError> {
        if alpha.len() != beta.len() {
            return Err(CoeffsError::MixedOrder(alpha.len(), beta.len()));
        }
        if alpha.is_empty() {
            return Err(CoeffsError::TooShort(0));
        }
        if !alpha0.is_finite() {
            return Err(CoeffsError::NonFinite(0));
        }
        for k in 0..alpha.len() {
            if !alpha[k].is_finite() || !beta[k].is_finite() {
                return Err(CoeffsError::NonFinite(k + 1));
            }
        }
        Ok(Self { alpha0, alpha, beta })
    }

    pub fn zeros(order: usize) -> Result<Self, CoeffsError> {
        Self::new(T::zero(), vec![T::zero(); order], vec![T::zero(); order])
    }

    pub fn order(&self) -> usize {
        self.alpha.len()
    }

    /// Taylor coefficients `c_0 = alpha_0/2`, `c_k = alpha_k - i beta_k`.
    pub fn to_taylor(&self) -> TaylorCoefficients<T> {
        let two = T::one() + T::one();
        let mut c = Vec::with_capacity(self.order() + 1);
        c.push(C::new(self.alpha0 / two, T::zero()));
        for k in 0..self.order() {
            c.push(C::new(self.alpha[k], -self.beta[k]));
        }
        TaylorCoefficients { c }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Tc = TaylorCoefficients<f64>;
    type Fc = FourierCoefficients<f64>;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn fourier_to_taylor_constant() {
        // alpha0 = 2, rest zero -> c0 = 1
        let fc = Fc::new(2.0, vec![0.0; 4], vec![0.0; 4]).unwrap();
        let tc = fc.to_taylor();
        assert_eq!(tc.coeff(0), C::new(1.0, 0.0));
        for k in 1..=4 {
            assert_eq!(tc.coeff(k), C::new(0.0, 0.0));
        }
    }

    #[test]
    fn fourier_to_taylor_sine_mode() {
        // beta_1 = 1 -> c_1 = -i
        let fc = Fc::new(0.0, vec![0.0, 0.0], vec![1.0, 0.0]).unwrap();
        let tc = fc.to_taylor();
        assert_eq!(tc.coeff(1), C::new(0.0, -1.0));
    }

    #[test]
    fn fourier_to_taylor_zero() {
        let fc = Fc::zeros(3).unwrap();
        let tc = fc.to_taylor();
        assert!(tc.coeffs().iter().all(|c| c.re == 0.0 && c.im == 0.0));
    }

    #[test]
    fn taylor_to_fourier_inverse_examples() {
        let tc = Tc::new(vec![C::new(0.0, 0.0), C::new(0.0, -1.0)]).unwrap();
        let fc = tc.to_fourier().unwrap();
        assert_eq!(fc.beta[0], 1.0);
        assert_eq!(fc.alpha[0], 0.0);

        let tc = Tc::new(vec![C::new(1.0, 0.0), C::new(0.0, 0.0)]).unwrap();
        assert_eq!(tc.to_fourier().unwrap().alpha0, 2.0);
    }

    #[test]
    fn taylor_to_fourier_rejects_imaginary_constant() {
        let tc = Tc::new(vec![C::new(0.0, 0.5), C::new(1.0, 0.0)]).unwrap();
        assert!(matches!(tc.to_fourier(), Err(CoeffsError::ImaginaryConstant(_))));
    }

    #[test]
    fn rejects_nonfinite_and_short() {
        assert!(matches!(Tc::new(vec![C::new(1.0, 0.0)]), Err(CoeffsError::TooShort(0))));
        assert!(matches!(
            Tc::new(vec![C::new(1.0, 0.0), C::new(f64::NAN, 0.0)]),
            Err(CoeffsError::NonFinite(1))
        ));
        assert!(matches!(
            Fc::new(f64::INFINITY, vec![0.0], vec![0.0]),
            Err(CoeffsError::NonFinite(0))
        ));
    }

    #[test]
    fn derivative_identity_and_first_order() {
        let tc = Tc::new(vec![C::new(0.3, -0.1), C::new(1.0, 0.0), C::new(0.0, 2.0)]).unwrap();
        assert_eq!(tc.angular_derivative(0), tc);

        // n=1, c_1 = 1 -> c_1 = i
        let tc = Tc::new(vec![C::new(0.0, 0.0), C::new(1.0, 0.0)]).unwrap();
        let d = tc.angular_derivative(1);
        assert_eq!(d.coeff(1), C::new(0.0, 1.0));
        assert!(d.is_proper());
    }

    #[test]
    fn second_derivative_gives_minus_k_squared() {
        let k_max = 6;
        let mut c = vec![C::new(1.0, 0.0); k_max + 1];
        c[0] = C::new(0.0, 0.0);
        let tc = Tc::new(c).unwrap();
        let d = tc.angular_derivative(2);
        for k in 1..=k_max {
            assert_eq!(d.coeff(k), C::new(-((k * k) as f64), 0.0));
        }
    }

    #[test]
    fn primitive_of_constant_is_zero() {
        let tc = Tc::new(vec![C::new(5.0, 0.0), C::new(0.0, 0.0)]).unwrap();
        let p = tc.angular_primitive(1);
        assert!(p.coeffs().iter().all(|c| c.re == 0.0 && c.im == 0.0));
    }

    #[test]
    fn primitive_inverts_derivative_example() {
        let tc = Tc::new(vec![C::new(0.0, 0.0), C::new(0.0, 1.0)]).unwrap();
        let p = tc.angular_primitive(1);
        assert_eq!(p.coeff(1), C::new(1.0, 0.0));
    }

    #[test]
    fn derivative_primitive_roundtrip_n3() {
        // randomish proper sequence, roundtrip within 1e-12 per entry
        let c: Vec<C<f64>> = (0..=32)
            .map(|k| {
                if k == 0 {
                    C::new(0.0, 0.0)
                } else {
                    C::new((k as f64 * 0.7).sin(), (k as f64 * 1.3).cos())
                }
            })
            .collect();
        let tc = Tc::new(c).unwrap();
        let rt = tc.angular_primitive(3).angular_derivative(3);
        for k in 0..=32 {
            assert!(close(rt.coeff(k).re, tc.coeff(k).re, 1e-12));
            assert!(close(rt.coeff(k).im, tc.coeff(k).im, 1e-12));
        }
    }

    #[test]
    fn mixed_order_subtraction_fails() {
        let a = Tc::zeros(4).unwrap();
        let b = Tc::zeros(5).unwrap();
        assert!(matches!(a.checked_sub(&b), Err(CoeffsError::MixedOrder(4, 5))));
    }

    #[test]
    fn growth_power_law() {
        let c: Vec<C<f64>> = (0..=256)
            .map(|k| C::new(if k == 0 { 0.0 } else { (k * k) as f64 }, 0.0))
            .collect();
        let r = Tc::new(c).unwrap().growth_order().unwrap();
        assert!((r.n_hat - 2.0).abs() < 0.1, "n_hat = {}", r.n_hat);
        assert_eq!(r.exp_bounded, ExpBounded::Yes);
        assert!(!r.zero_tail);
    }

    #[test]
    fn growth_geometric_is_unbounded() {
        let c: Vec<C<f64>> = (0..=256)
            .map(|k| C::new(1.05_f64.powi(k as i32), 0.0))
            .collect();
        let r = Tc::new(c).unwrap().growth_order().unwrap();
        assert_eq!(r.exp_bounded, ExpBounded::No);
        assert!((r.geom_factor - 1.05).abs() < 5e-3);
    }

    #[test]
    fn growth_zero_tail() {
        let mut c = vec![C::new(0.0, 0.0); 65];
        c[0] = C::new(3.0, 0.0);
        let r = Tc::new(c).unwrap().growth_order().unwrap();
        assert_eq!(r.exp_bounded, ExpBounded::Yes);
        assert!(r.zero_tail);
        assert_eq!(r.n_hat, 0.0);
    }

    #[test]
    fn growth_requires_min_order() {
        assert!(matches!(
            Tc::zeros(16).unwrap().growth_order(),
            Err(CoeffsError::FitTooShort(16))
        ));
    }
}
