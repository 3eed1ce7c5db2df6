//! Named corpus of circle functions with oracle data, spanning every
//! classification branch and both parities of the hardness count.

use crate::classify::SingularityKind;
use crate::coeffs::FourierCoefficients;
use crate::sections::{PiecewisePolynomial, SectionedFunction};
use crate::Real;

/// Where an oracle's numbers come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Closed-form coefficient expressions.
    ClosedForm,
    /// Exact per-section polynomial algebra.
    PiecewiseExact,
}

/// Known-good data for a catalog entry.
pub struct Oracle<T: Real> {
    pub provenance: Provenance,
    pub alpha0: Option<T>,
    coeff: fn(usize) -> (T, T),
}

impl<T: Real> Oracle<T> {
    /// `(alpha_k, beta_k)` for `k >= 1`.
    pub fn coeff(&self, k: usize) -> (T, T) {
        (self.coeff)(k)
    }

    pub fn fourier(&self, order: usize) -> FourierCoefficients<T> {
        let mut alpha = Vec::with_capacity(order);
        let mut beta = Vec::with_capacity(order);
        for k in 1..=order {
            let (a, b) = self.coeff(k);
            alpha.push(a);
            beta.push(b);
        }
        FourierCoefficients::new(self.alpha0.unwrap_or(T::zero()), alpha, beta)
            .expect("oracle data finite")
    }
}

pub struct CatalogEntry<T: Real> {
    pub name: &'static str,
    pub description: &'static str,
    /// Expected classification per singular point: (angle, kind, degree).
    pub expected: Vec<(T, SingularityKind, usize)>,
    pub oracle: Option<Oracle<T>>,
    build: fn() -> SectionedFunction<T>,
    piecewise: Option<fn() -> PiecewisePolynomial<T>>,
}

impl<T: Real> CatalogEntry<T> {
    pub fn build(&self) -> SectionedFunction<T> {
        (self.build)()
    }

    /// The underlying piecewise polynomial, for entries defined by one.
    pub fn piecewise(&self) -> Option<PiecewisePolynomial<T>> {
        self.piecewise.map(|f| f())
    }
}

fn pp_demo_poly<T: Real>() -> PiecewisePolynomial<T> {
    // order 2, three sections, jumps at every boundary
    PiecewisePolynomial::new(
        vec![T::of(-2.0), T::of(0.5), T::of(2.5)],
        vec![
            vec![T::of(1.0), T::of(0.5), T::of(-0.25)],
            vec![T::of(-1.0), T::of(1.0)],
            vec![T::of(2.0)],
        ],
    )
    .expect("valid demo polynomial")
}

/// All catalog entries.
pub fn entries<T: Real>() -> Vec<CatalogEntry<T>> {
    let pi = T::PI();
    let half_pi = T::FRAC_PI_2();
    vec![
        CatalogEntry {
            name: "const5",
            description: "constant 5 with one marker point at 0",
            expected: vec![(T::zero(), SingularityKind::Regular, 0)],
            oracle: Some(Oracle {
                provenance: Provenance::ClosedForm,
                alpha0: Some(T::of(10.0)),
                coeff: |_| (T::zero(), T::zero()),
            }),
            build: || SectionedFunction::from_global(vec![T::zero()], |_| T::of(5.0)).unwrap(),
            piecewise: None,
        },
        CatalogEntry {
            name: "abs_theta",
            description: "|theta|: kinks at 0 and pi",
            expected: vec![
                (T::zero(), SingularityKind::Soft, 1),
                (pi, SingularityKind::Soft, 1),
            ],
            oracle: Some(Oracle {
                provenance: Provenance::ClosedForm,
                alpha0: Some(T::PI()),
                coeff: |k| {
                    // alpha_k = 2((-1)^k - 1)/(pi k^2)
                    let sign = if k % 2 == 0 { T::zero() } else { T::of(-2.0) };
                    (sign * (T::one() + T::one()) / (T::PI() * T::of_usize(k * k)), T::zero())
                },
            }),
            build: || {
                SectionedFunction::from_global(vec![T::zero(), T::PI()], |t: T| t.abs()).unwrap()
            },
            piecewise: None,
        },
        CatalogEntry {
            name: "log_2sin",
            description: "ln|2 sin(theta/2)|: borderline hard at 0",
            expected: vec![(T::zero(), SingularityKind::BorderlineHard, 0)],
            oracle: Some(Oracle {
                provenance: Provenance::ClosedForm,
                alpha0: Some(T::zero()),
                coeff: |k| (-T::one() / T::of_usize(k), T::zero()),
            }),
            build: || {
                SectionedFunction::from_global(vec![T::zero()], |t: T| {
                    ((T::one() + T::one()) * (t / (T::one() + T::one())).sin().abs()).ln()
                })
                .unwrap()
            },
            piecewise: None,
        },
        CatalogEntry {
            name: "cot_half",
            description: "cot(theta/2)/2: hard of degree 1 at 0",
            expected: vec![(T::zero(), SingularityKind::Hard, 1)],
            oracle: Some(Oracle {
                provenance: Provenance::ClosedForm,
                alpha0: Some(T::zero()),
                coeff: |_| (T::zero(), T::one()),
            }),
            build: || {
                SectionedFunction::from_global(vec![T::zero()], |t: T| {
                    T::of(0.5) / (t / (T::one() + T::one())).tan()
                })
                .unwrap()
            },
            piecewise: None,
        },
        CatalogEntry {
            name: "csc2_quarter",
            description: "csc^2(theta/2)/4: hard of degree 2 at 0",
            expected: vec![(T::zero(), SingularityKind::Hard, 2)],
            oracle: Some(Oracle {
                provenance: Provenance::ClosedForm,
                alpha0: Some(T::zero()),
                coeff: |k| (-T::of_usize(k), T::zero()),
            }),
            build: || {
                SectionedFunction::from_global(vec![T::zero()], |t: T| {
                    T::of(0.25) / (t / (T::one() + T::one())).sin().powi(2)
                })
                .unwrap()
            },
            piecewise: None,
        },
        CatalogEntry {
            name: "square_wave",
            description: "-1 on (-pi,0), +1 on (0,pi): jumps at 0 and pi",
            expected: vec![
                (T::zero(), SingularityKind::BorderlineHard, 0),
                (pi, SingularityKind::BorderlineHard, 0),
            ],
            oracle: Some(Oracle {
                provenance: Provenance::PiecewiseExact,
                alpha0: Some(T::zero()),
                coeff: |k| {
                    let b = if k % 2 == 1 {
                        T::of(4.0) / (T::PI() * T::of_usize(k))
                    } else {
                        T::zero()
                    };
                    (T::zero(), b)
                },
            }),
            build: || crate::sections::square_wave::<T>().to_sectioned(),
            piecewise: Some(|| crate::sections::square_wave::<T>()),
        },
        CatalogEntry {
            name: "sawtooth",
            description: "theta on (-pi,pi): jump at pi",
            expected: vec![(pi, SingularityKind::BorderlineHard, 0)],
            oracle: Some(Oracle {
                provenance: Provenance::PiecewiseExact,
                alpha0: Some(T::zero()),
                coeff: |k| {
                    let sign = if k % 2 == 1 { T::one() } else { -T::one() };
                    (T::zero(), (T::one() + T::one()) * sign / T::of_usize(k))
                },
            }),
            build: || crate::sections::sawtooth::<T>().to_sectioned(),
            piecewise: Some(|| crate::sections::sawtooth::<T>()),
        },
        CatalogEntry {
            name: "pp_demo",
            description: "order-2 piecewise polynomial, 3 sections, jumps at every boundary",
            expected: vec![
                (T::of(-2.0), SingularityKind::BorderlineHard, 0),
                (T::of(0.5), SingularityKind::BorderlineHard, 0),
                (T::of(2.5), SingularityKind::BorderlineHard, 0),
            ],
            oracle: None, // exact Fourier data comes from the polynomial itself
            build: || pp_demo_poly::<T>().to_sectioned(),
            piecewise: Some(pp_demo_poly::<T>),
        },
        CatalogEntry {
            name: "shifted_cot",
            description: "cot((theta-1)/2)/2: hard of degree 1 at 1.0",
            expected: vec![(T::one(), SingularityKind::Hard, 1)],
            oracle: Some(Oracle {
                provenance: Provenance::ClosedForm,
                alpha0: Some(T::zero()),
                coeff: |k| {
                    // sum sin k(theta-1): alpha_k = -sin k, beta_k = cos k
                    let kk = T::of_usize(k);
                    (-kk.sin(), kk.cos())
                },
            }),
            build: || {
                SectionedFunction::from_global(vec![T::one()], |t: T| {
                    T::of(0.5) / ((t - T::one()) / (T::one() + T::one())).tan()
                })
                .unwrap()
            },
            piecewise: None,
        },
        CatalogEntry {
            name: "mix_hard",
            description: "cot(theta/2)/2 at 0 plus csc^2((theta-pi/2)/2)/4 at pi/2",
            expected: vec![
                (T::zero(), SingularityKind::Hard, 1),
                (half_pi, SingularityKind::Hard, 2),
            ],
            oracle: Some(Oracle {
                provenance: Provenance::ClosedForm,
                alpha0: Some(T::zero()),
                coeff: |k| {
                    // beta_k = 1 - k sin(k pi/2), alpha_k = -k cos(k pi/2)
                    let kk = T::of_usize(k);
                    let arg = kk * T::FRAC_PI_2();
                    (-kk * arg.cos(), T::one() - kk * arg.sin())
                },
            }),
            build: || {
                SectionedFunction::from_global(vec![T::zero(), T::FRAC_PI_2()], |t: T| {
                    let two = T::one() + T::one();
                    T::of(0.5) / (t / two).tan()
                        + T::of(0.25) / ((t - T::FRAC_PI_2()) / two).sin().powi(2)
                })
                .unwrap()
            },
            piecewise: None,
        },
    ]
}

/// Find an entry by name.
pub fn find<T: Real>(name: &str) -> Option<CatalogEntry<T>> {
    entries::<T>().into_iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_complete() {
        let es = entries::<f64>();
        let mut names: Vec<_> = es.iter().map(|e| e.name).collect();
        names.sort_unstable();
        let mut dedup = names.clone();
        dedup.dedup();
        assert_eq!(names, dedup);
        for required in [
            "const5",
            "abs_theta",
            "log_2sin",
            "cot_half",
            "csc2_quarter",
            "square_wave",
            "sawtooth",
            "pp_demo",
            "shifted_cot",
            "mix_hard",
        ] {
            assert!(names.contains(&required), "missing {required}");
        }
    }

    #[test]
    fn builders_evaluate() {
        for e in entries::<f64>() {
            let sf = e.build();
            let probe = crate::reconstruct::uniform_probes(&sf, 5, 0.3);
            for p in probe {
                assert!(sf.eval(p).is_finite(), "{} at {p}", e.name);
            }
        }
    }

    #[test]
    fn square_wave_oracle_matches_exact_polynomial_route() {
        let e = find::<f64>("square_wave").unwrap();
        let oracle = e.oracle.as_ref().unwrap().fourier(12);
        let exact = e.piecewise().unwrap().fourier_exact(12);
        for k in 0..12 {
            assert!((oracle.alpha[k] - exact.alpha[k]).abs() < 1e-12);
            assert!((oracle.beta[k] - exact.beta[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn pp_demo_has_jumps_at_every_boundary() {
        let pp = pp_demo_poly::<f64>();
        let (_, jumps) = pp.differentiate();
        assert_eq!(jumps.len(), 3);
        for j in &jumps {
            assert!(j.jump.abs() > 0.1, "expected a genuine jump, got {j:?}");
        }
    }
}
