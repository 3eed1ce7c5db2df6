//! Piecewise polynomial real functions on the circle, with the jump
//! bookkeeping that feeds delta detection: a jump of size `J` at a singular
//! point materializes a delta of amplitude `J` under circle-wide
//! differentiation.

use std::sync::Arc;

use crate::{normalize_angle, CircleFunction, Real, C};

use super::{validate_points, SectionedFunction, SectionsError};
use crate::coeffs::FourierCoefficients;

/// Jump of a function across a singular point: lateral limit from the right
/// minus lateral limit from the left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpRecord<T: Real> {
    pub location: T,
    pub jump: T,
}

/// A real function that is polynomial on each open arc between singular
/// points. Section `i` runs from `points[i]` to the next point; its
/// polynomial is given by ascending-power coefficients in the unwrapped
/// angle `u in (points[i], points[i] + len_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolynomial<T: Real> {
    points: Vec<T>,
    coeffs: Vec<Vec<T>>,
}

impl<T: Real> PiecewisePolynomial<T> {
    pub fn new(points: Vec<T>, coeffs: Vec<Vec<T>>) -> Result<Self, SectionsError> {
        let points = validate_points(points)?;
        if coeffs.len() != points.len() {
            return Err(SectionsError::SectionCountMismatch {
                points: points.len(),
                sections: coeffs.len(),
            });
        }
        Ok(Self { points, coeffs })
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn section_coeffs(&self, i: usize) -> &[T] {
        &self.coeffs[i]
    }

    /// Largest polynomial order among the sections.
    pub fn order(&self) -> usize {
        self.coeffs
            .iter()
            .map(|c| c.len().saturating_sub(1))
            .max()
            .unwrap_or(0)
    }

    /// True when at least one section carries a nonzero coefficient.
    pub fn is_nonzero(&self) -> bool {
        self.coeffs
            .iter()
            .any(|c| c.iter().any(|&v| v != T::zero()))
    }

    fn section_len(&self, i: usize) -> T {
        let two_pi = T::PI() + T::PI();
        if i + 1 < self.points.len() {
            self.points[i + 1] - self.points[i]
        } else {
            self.points[0] + two_pi - self.points[i]
        }
    }

    fn eval_section(&self, i: usize, u: T) -> T {
        let mut acc = T::zero();
        for &c in self.coeffs[i].iter().rev() {
            acc = acc * u + c;
        }
        acc
    }

    /// Evaluate at a circle angle (undefined exactly at the singular points;
    /// such angles fall into the section on their right).
    pub fn eval(&self, theta: T) -> T {
        let (i, u) = self.locate(theta);
        self.eval_section(i, u)
    }

    fn locate(&self, theta: T) -> (usize, T) {
        let two_pi = T::PI() + T::PI();
        let phi = normalize_angle(theta);
        let mut i = self.points.partition_point(|&p| p <= phi);
        let u = if i == 0 {
            i = self.points.len();
            phi + two_pi
        } else {
            phi
        };
        (i - 1, u)
    }

    /// Term-by-term polynomial derivative per section, plus the exact jump of
    /// `self` at each singular point (lateral polynomial evaluation).
    pub fn differentiate(&self) -> (Self, Vec<JumpRecord<T>>) {
        let n = self.points.len();
        let mut jumps = Vec::with_capacity(n);
        for i in 0..n {
            let right = self.eval_section(i, self.points[i]);
            let prev = (i + n - 1) % n;
            let left_u = self.points[prev] + self.section_len(prev);
            let left = self.eval_section(prev, left_u);
            jumps.push(JumpRecord {
                location: self.points[i],
                jump: right - left,
            });
        }
        let dcoeffs = self
            .coeffs
            .iter()
            .map(|c| {
                if c.len() <= 1 {
                    vec![T::zero()]
                } else {
                    c.iter()
                        .enumerate()
                        .skip(1)
                        .map(|(p, &v)| v * T::of_usize(p))
                        .collect()
                }
            })
            .collect();
        (
            Self {
                points: self.points.clone(),
                coeffs: dcoeffs,
            },
            jumps,
        )
    }

    /// View as a sectioned function (polynomial evaluators per arc).
    pub fn to_sectioned(&self) -> SectionedFunction<T> {
        let sections = self
            .coeffs
            .iter()
            .map(|c| {
                let c = c.clone();
                Arc::new(move |u: T| {
                    let mut acc = T::zero();
                    for &v in c.iter().rev() {
                        acc = acc * u + v;
                    }
                    acc
                }) as Arc<dyn Fn(T) -> T + Send + Sync>
            })
            .collect();
        SectionedFunction::from_parts(self.points.clone(), sections)
    }

    /// Fourier coefficients by per-section integration by parts:
    /// `int P(u) e^{iku} du = e^{iku} sum_m (-1)^m P^(m)(u) / (ik)^{m+1}`,
    /// evaluated exactly from the polynomial coefficients.
    pub fn fourier_exact(&self, order: usize) -> FourierCoefficients<T> {
        let pi = T::PI();
        let mut alpha0 = T::zero();
        let mut alpha = vec![T::zero(); order];
        let mut beta = vec![T::zero(); order];
        for i in 0..self.points.len() {
            let a = self.points[i];
            let b = a + self.section_len(i);
            // antiderivative of P for the k = 0 term
            let anti: Vec<T> = std::iter::once(T::zero())
                .chain(
                    self.coeffs[i]
                        .iter()
                        .enumerate()
                        .map(|(p, &v)| v / T::of_usize(p + 1)),
                )
                .collect();
            let horner = |c: &[T], u: T| {
                let mut acc = T::zero();
                for &v in c.iter().rev() {
                    acc = acc * u + v;
                }
                acc
            };
            alpha0 += (horner(&anti, b) - horner(&anti, a)) / pi;

            // stack of derivatives of P
            let mut derivs: Vec<Vec<T>> = vec![self.coeffs[i].clone()];
            while derivs.last().unwrap().len() > 1 {
                let d = derivs
                    .last()
                    .unwrap()
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(p, &v)| v * T::of_usize(p))
                    .collect();
                derivs.push(d);
            }
            for k in 1..=order {
                let kk = T::of_usize(k);
                let at = |u: T| -> C<T> {
                    // sum_m (-1)^m P^(m)(u) / (ik)^{m+1}; consecutive terms
                    // differ by the factor -1/(ik) = i/k
                    let mut s = C::new(T::zero(), T::zero());
                    let mut factor = C::new(T::zero(), -T::one() / kk); // 1/(ik)
                    for d in &derivs {
                        s = s + factor * horner(d, u);
                        factor = factor * C::new(T::zero(), T::one() / kk);
                    }
                    let e = C::new((kk * u).cos(), (kk * u).sin());
                    e * s
                };
                let integral = at(b) - at(a);
                alpha[k - 1] += integral.re / pi;
                beta[k - 1] += integral.im / pi;
            }
        }
        FourierCoefficients::new(alpha0, alpha, beta).expect("finite by construction")
    }
}

impl<T: Real> CircleFunction<T> for PiecewisePolynomial<T> {
    fn eval(&self, theta: T) -> T {
        PiecewisePolynomial::eval(self, theta)
    }

    fn singular_points(&self) -> &[T] {
        &self.points
    }
}

/// The square wave: -1 on `(-pi, 0)`, +1 on `(0, pi)`.
pub fn square_wave<T: Real>() -> PiecewisePolynomial<T> {
    PiecewisePolynomial::new(
        vec![T::zero(), T::PI()],
        vec![vec![T::one()], vec![-T::one()]],
    )
    .expect("valid by construction")
}

/// The sawtooth `f(theta) = theta` on `(-pi, pi)`, singular point at `pi`.
/// In the unwrapped coordinate of its single section this is `u - 2 pi`.
pub fn sawtooth<T: Real>() -> PiecewisePolynomial<T> {
    let two_pi = T::PI() + T::PI();
    PiecewisePolynomial::new(vec![T::PI()], vec![vec![-two_pi, T::one()]]).expect("valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_wave_jumps() {
        let (d, jumps) = square_wave::<f64>().differentiate();
        assert!(d.coeffs.iter().all(|c| c.iter().all(|&v| v == 0.0)));
        assert_eq!(jumps.len(), 2);
        assert_eq!(jumps[0].location, 0.0);
        assert_eq!(jumps[0].jump, 2.0);
        assert_eq!(jumps[1].location, std::f64::consts::PI);
        assert_eq!(jumps[1].jump, -2.0);
    }

    #[test]
    fn sawtooth_jump_at_pi() {
        let pp = sawtooth::<f64>();
        assert!((pp.eval(1.0) - 1.0).abs() < 1e-15);
        assert!((pp.eval(-2.5) + 2.5).abs() < 1e-14);
        let (d, jumps) = pp.differentiate();
        assert_eq!(d.coeffs[0], vec![1.0]);
        assert_eq!(jumps.len(), 1);
        assert!((jumps[0].jump + 2.0 * std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn constant_has_no_jumps() {
        let pp = PiecewisePolynomial::new(vec![0.0_f64], vec![vec![4.0]]).unwrap();
        let (d, jumps) = pp.differentiate();
        assert_eq!(d.coeffs[0], vec![0.0]);
        assert_eq!(jumps[0].jump, 0.0);
    }

    #[test]
    fn repeated_differentiation_kills_order_n() {
        // order 2, three sections
        let pp = PiecewisePolynomial::new(
            vec![-2.0_f64, 0.5, 2.5],
            vec![
                vec![1.0, 0.5, -0.25],
                vec![-1.0, 1.0],
                vec![2.0],
            ],
        )
        .unwrap();
        let n = pp.order();
        assert_eq!(n, 2);
        let mut cur = pp;
        let mut any_jump = false;
        for _ in 0..=n {
            let (next, jumps) = cur.differentiate();
            any_jump |= jumps.iter().any(|j| j.jump.abs() > 1e-12);
            cur = next;
        }
        assert!(cur.coeffs.iter().all(|c| c.iter().all(|&v| v == 0.0)));
        assert!(any_jump);
    }

    #[test]
    fn fourier_exact_square_wave() {
        let fc = square_wave::<f64>().fourier_exact(16);
        for k in 1..=16usize {
            let expect_b = if k % 2 == 1 { 4.0 / (std::f64::consts::PI * k as f64) } else { 0.0 };
            assert!((fc.beta[k - 1] - expect_b).abs() < 1e-13, "k={k}");
            assert!(fc.alpha[k - 1].abs() < 1e-13, "k={k}");
        }
        assert!(fc.alpha0.abs() < 1e-14);
    }

    #[test]
    fn fourier_exact_sawtooth() {
        let fc = sawtooth::<f64>().fourier_exact(12);
        for k in 1..=12usize {
            let expect_b = 2.0 * (-1.0f64).powi(k as i32 + 1) / k as f64;
            assert!((fc.beta[k - 1] - expect_b).abs() < 1e-13, "k={k}");
            assert!(fc.alpha[k - 1].abs() < 1e-13, "k={k}");
        }
    }
}
