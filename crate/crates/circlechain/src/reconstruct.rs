//! Reconstruction of a (possibly non-integrable) sectioned real function as
//! a truncated inner analytic function, with optional reduction by
//! delta-component subtraction, plus the extended Fourier coefficient
//! relations between a function and its n-th sectional primitive.
//!
//! Pipeline: classify the singular points and take `n` = the maximum degree
//! of hardness; sectionally integrate `n` times; extract Fourier
//! coefficients of the now-integrable primitive; map to Taylor coefficients;
//! walk back up the chain with `n` (plus any requested lift) angular
//! differentiations, detecting at every step the finite jumps whose
//! differentiation would materialize delta components; determine the lost
//! constant `alpha_0` by comparing the recovered boundary values with the
//! function at a regular point.

use thiserror::Error;

use crate::classify::{classify_all, lateral, ClassifyError, Lateral, SingularityRecord};
use crate::coeffs::{k_pow, mul_i_pow, CoeffsError, FourierCoefficients, TaylorCoefficients};
use crate::evalcore::{limit_to_circle, BoundaryLimit, RhoLadder};
use crate::sections::{
    fourier_numeric, sectional_integrate, PiecewisePolynomial, QuadratureConfig,
    SectionedFunction, SectionsError,
};
use crate::{circle_distance, normalize_angle, CircleFunction, Real, C};

#[derive(Debug, Error)]
pub enum ReconstructError {
    #[error("classification stage: {0}")]
    Classify(#[from] ClassifyError),
    #[error("sectional-integration stage: {0}")]
    Integrate(SectionsError),
    #[error("fourier stage: {0}")]
    Fourier(SectionsError),
    #[error("boundary-limit stage: no regular point with a finite limit found")]
    NoRegularPoint,
    #[error("injected polynomial requires at least one integration level")]
    InjectionWithoutIntegration,
    #[error("coefficient stage: {0}")]
    Coeffs(#[from] CoeffsError),
}

/// One singular distribution component: the delta (`order = 0`) or the
/// `order`-th derivative of the delta, with the given amplitude, at a
/// singular point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaComponent<T: Real> {
    pub location: T,
    pub order: usize,
    pub amplitude: T,
}

/// Taylor coefficients of a delta component, truncated at `order` terms:
/// for the plain delta `c_0 = A/(2 pi)`, `c_k = (A/pi) e^{-ik theta_1}`;
/// the m-th delta derivative multiplies the tail by `(ik)^m` and has
/// `c_0 = 0`.
pub fn delta_taylor<T: Real>(d: &DeltaComponent<T>, order: usize) -> TaylorCoefficients<T> {
    let pi = T::PI();
    let two = T::one() + T::one();
    let amp = d.amplitude / pi;
    let mut c = Vec::with_capacity(order + 1);
    c.push(if d.order == 0 {
        C::new(d.amplitude / (two * pi), T::zero())
    } else {
        C::new(T::zero(), T::zero())
    });
    for k in 1..=order {
        let kt = T::of_usize(k) * d.location;
        let (re, im) = (amp * kt.cos(), -amp * kt.sin());
        let v = if d.order == 0 {
            C::new(re, im)
        } else {
            let km = k_pow::<T>(k, d.order as u32);
            let (re, im) = mul_i_pow(d.order as u32, re, im);
            C::new(re * km, im * km)
        };
        c.push(v);
    }
    TaylorCoefficients::new(c).expect("finite by construction")
}

/// Jumps below `1e-4 * (1 + lateral scale)` are attributed to quadrature
/// noise, not deltas.
const JUMP_THRESHOLD_BASE: f64 = 1e-4;

/// Detect the delta components the next circle-wide differentiation of `f`
/// would create: finite lateral limits on both sides of a singular point
/// with a jump above threshold yield a plain delta of that amplitude.
/// Points with divergent laterals emit nothing.
pub fn detect_deltas<T: Real, F: CircleFunction<T> + ?Sized>(f: &F) -> Vec<DeltaComponent<T>> {
    let mut out = Vec::new();
    for &p in f.singular_points() {
        let l = lateral(f, p, -T::one());
        let r = lateral(f, p, T::one());
        if let (Lateral::Finite { limit: lv }, Lateral::Finite { limit: rv }) = (l, r) {
            let jump = rv - lv;
            let threshold = T::of(JUMP_THRESHOLD_BASE) * (T::one() + lv.abs().max(rv.abs()));
            if jump.abs() > threshold {
                out.push(DeltaComponent {
                    location: p,
                    order: 0,
                    amplitude: jump,
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct ReconstructOptions<T: Real> {
    /// Subtract detected delta components while walking up the chain.
    pub reduce: bool,
    /// Extra differentiation steps beyond the hardness count: reconstructs
    /// the `lift`-th angular derivative of the input function (the chain
    /// member just above it). The delta machinery of jump discontinuities
    /// lives here: lifting a piecewise polynomial by one step turns its
    /// jumps into deltas.
    pub lift: usize,
    /// Classification search bound.
    pub nmax: usize,
    /// Ladder for the `alpha_0` boundary comparison; defaults to the
    /// truncation-adapted ladder for the requested order.
    pub ladder: Option<RhoLadder<T>>,
    /// Per-section polynomial added to the top-level primitive before
    /// Fourier extraction (the arbitrary `P_(n-1)`).
    pub inject: Option<PiecewisePolynomial<T>>,
}

impl<T: Real> Default for ReconstructOptions<T> {
    fn default() -> Self {
        Self {
            reduce: false,
            lift: 0,
            nmax: 4,
            ladder: None,
            inject: None,
        }
    }
}

/// Per-stage diagnostics of a reconstruction run.
#[derive(Debug, Clone)]
pub struct Diagnostics<T: Real> {
    /// Regular comparison point used for the `alpha_0` determination.
    pub theta0: T,
    /// Extrapolation error estimate of the boundary value at `theta0`.
    pub boundary_error: T,
    /// Fourier-level `alpha_0` of the integrable primitive (informational;
    /// angular differentiation discards it).
    pub primitive_alpha0: T,
    pub records: Vec<SingularityRecord<T>>,
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult<T: Real> {
    /// Hardness applied: number of sectional integrations.
    pub n_used: usize,
    /// Extra differentiation steps applied beyond `n_used`.
    pub lift: usize,
    /// Coefficients of `w(z)`, delta components included.
    pub tc_full: TaylorCoefficients<T>,
    /// `alpha_0` of the full function (`= 2 c_0` of `tc_full`).
    pub alpha0: T,
    /// Coefficients of the reduced function `w_r(z)` (deltas subtracted).
    /// Equal to `tc_full` when nothing was removed.
    pub tc_reduced: TaylorCoefficients<T>,
    /// `alpha_0` of the reduced function.
    pub alpha0_reduced: T,
    /// Removed components, reported in their final form (order = number of
    /// differentiation steps they were carried through).
    pub deltas_removed: Vec<DeltaComponent<T>>,
    pub diagnostics: Diagnostics<T>,
}

/// Target values for a lifted reconstruction: the `lift`-th derivative of
/// the input, by central differences (exact for the piecewise polynomials
/// the lift path is used with).
pub(crate) fn lifted_target<T: Real>(sf: &SectionedFunction<T>, theta: T, lift: usize) -> T {
    if lift == 0 {
        return sf.eval(theta);
    }
    let h = T::of(1e-3);
    let mut acc = T::zero();
    let mut binom = T::one();
    for r in 0..=lift {
        let offset = (T::of_usize(lift) / (T::one() + T::one())) - T::of_usize(r);
        acc += binom * sf.eval(theta + offset * h);
        binom = binom * -T::one() * T::of_usize(lift - r) / T::of_usize(r + 1);
    }
    acc / h.powi(lift as i32)
}

/// Candidate regular points, best first: the midpoint of the longest arc
/// between singular points, then a 16-angle scan ranked by distance to the
/// singular set.
fn regular_candidates<T: Real>(points: &[T]) -> Vec<T> {
    let two_pi = T::PI() + T::PI();
    let mut cands = Vec::with_capacity(17);
    let mut best = (T::zero(), T::zero());
    for (i, &p) in points.iter().enumerate() {
        let next = if i + 1 < points.len() { points[i + 1] } else { points[0] + two_pi };
        let len = next - p;
        if len > best.0 {
            best = (len, normalize_angle(p + len / (T::one() + T::one())));
        }
    }
    cands.push(best.1);
    let sixteen = 16usize;
    let mut scan: Vec<(T, T)> = (0..sixteen)
        .map(|m| {
            let th = -T::PI() + two_pi * (T::of_usize(m) + T::of(0.5)) / T::of_usize(sixteen);
            let dist = points
                .iter()
                .map(|&p| circle_distance(p, th))
                .fold(two_pi, |a, b| a.min(b));
            (dist, th)
        })
        .collect();
    scan.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite distances"));
    cands.extend(scan.into_iter().map(|(_, th)| th));
    cands
}

/// Run the reconstruction pipeline on `sf` at truncation order `order`.
pub fn reconstruct<T: Real>(
    sf: &SectionedFunction<T>,
    order: usize,
    qc: &QuadratureConfig<T>,
    opts: &ReconstructOptions<T>,
) -> Result<ReconstructionResult<T>, ReconstructError> {
    let records = classify_all(sf, opts.nmax)?;
    let n = records
        .iter()
        .map(|r| if r.kind == crate::classify::SingularityKind::Hard { r.degree } else { 0 })
        .max()
        .unwrap_or(0);
    let total_steps = n + opts.lift;

    // integrable primitive (plus optional injected polynomial)
    let prim = if n >= 1 {
        let mut prim = sectional_integrate(sf, n, qc).map_err(ReconstructError::Integrate)?;
        if let Some(pp) = &opts.inject {
            prim.inject_polynomial(pp.clone()).map_err(ReconstructError::Integrate)?;
        }
        Some(prim)
    } else if opts.inject.is_some() {
        return Err(ReconstructError::InjectionWithoutIntegration);
    } else {
        None
    };

    let fc = match &prim {
        Some(p) => fourier_numeric(p, order, qc),
        None => fourier_numeric(sf, order, qc),
    }
    .map_err(ReconstructError::Fourier)?;
    let primitive_alpha0 = fc.alpha0;
    let mut state = fc.to_taylor();

    // walk up the chain, harvesting delta components
    let mut deltas: Vec<DeltaComponent<T>> = Vec::new();
    let mut injected_state = prim.as_ref().and_then(|p| p.injected().cloned());
    for s in 1..=total_steps {
        let remaining = total_steps - s;
        if opts.reduce {
            if let Some(level) = (n + 1).checked_sub(s) {
                let view: &SectionedFunction<T> = if level == 0 {
                    sf
                } else {
                    prim.as_ref().expect("level >= 1 implies n >= 1").level_view(level)
                };
                for d in detect_deltas(view) {
                    deltas.push(DeltaComponent { order: remaining, ..d });
                }
            }
            if let Some(pp) = &injected_state {
                let (dp, jumps) = pp.differentiate();
                for j in jumps {
                    if j.jump.abs() > T::of(JUMP_THRESHOLD_BASE) {
                        deltas.push(DeltaComponent {
                            location: j.location,
                            order: remaining,
                            amplitude: j.jump,
                        });
                    }
                }
                injected_state = Some(dp);
            }
        }
        state = state.angular_derivative(1);
    }

    // proper parts of the full and reduced chains
    let mut tc_p_full = state;
    tc_p_full.set_coeff(0, C::new(T::zero(), T::zero()));
    let mut delta_sum = TaylorCoefficients::zeros(order)?;
    for d in &deltas {
        delta_sum = delta_sum.checked_add(&delta_taylor(d, order))?;
    }
    let mut tc_p_red = tc_p_full.checked_sub(&delta_sum)?;
    tc_p_red.set_coeff(0, C::new(T::zero(), T::zero()));

    // alpha_0 of the reduced function from a regular-point comparison
    let ladder = opts
        .ladder
        .clone()
        .unwrap_or_else(|| RhoLadder::adapted_to_order(order));
    let mut chosen: Option<(T, T, T)> = None;
    for theta0 in regular_candidates(sf.points()) {
        if let BoundaryLimit::Value { value, error_estimate } =
            limit_to_circle(&tc_p_red, theta0, &ladder)
        {
            chosen = Some((theta0, value, error_estimate));
            break;
        }
    }
    let (theta0, u_red, boundary_error) = chosen.ok_or(ReconstructError::NoRegularPoint)?;
    let two = T::one() + T::one();
    let f_target = lifted_target(sf, theta0, opts.lift);
    let alpha0_reduced = two * (f_target - u_red);

    let mut tc_reduced = tc_p_red;
    tc_reduced.set_coeff(0, C::new(alpha0_reduced / two, T::zero()));
    let tc_full = tc_reduced.checked_add(&delta_sum)?;
    let alpha0 = two * tc_full.coeff(0).re;

    Ok(ReconstructionResult {
        n_used: n,
        lift: opts.lift,
        tc_full,
        alpha0,
        tc_reduced,
        alpha0_reduced,
        deltas_removed: deltas,
        diagnostics: Diagnostics {
            theta0,
            boundary_error,
            primitive_alpha0,
            records,
        },
    })
}

/// Extended Fourier coefficients with the `alpha_0` indeterminacy flag:
/// angular operations lose the constant term, so `alpha_0` of the output is
/// set to zero and flagged rather than silently fabricated.
#[derive(Debug, Clone)]
pub struct ExtendedFourier<T: Real> {
    pub fc: FourierCoefficients<T>,
    pub alpha0_indeterminate: bool,
}

/// Fourier coefficients of the function `n` chain steps above the one with
/// coefficients `fc_minus_n`:
/// even `n = 2j`:  `alpha_k = (-1)^j k^n alpha_k^(-n)`, `beta_k = (-1)^j k^n beta_k^(-n)`;
/// odd `n = 2j+1`: `alpha_k = (-1)^j k^n beta_k^(-n)`, `beta_k = (-1)^{j+1} k^n alpha_k^(-n)`.
pub fn extended_fourier<T: Real>(fc_minus_n: &FourierCoefficients<T>, n: u32) -> ExtendedFourier<T> {
    if n == 0 {
        return ExtendedFourier {
            fc: fc_minus_n.clone(),
            alpha0_indeterminate: false,
        };
    }
    let order = fc_minus_n.order();
    let mut alpha = Vec::with_capacity(order);
    let mut beta = Vec::with_capacity(order);
    for k in 1..=order {
        let kn = k_pow::<T>(k, n);
        let a = fc_minus_n.alpha[k - 1];
        let b = fc_minus_n.beta[k - 1];
        let (ak, bk) = match n % 4 {
            0 => (a * kn, b * kn),
            1 => (b * kn, -(a * kn)),
            2 => (-(a * kn), -(b * kn)),
            _ => (-(b * kn), a * kn),
        };
        alpha.push(ak);
        beta.push(bk);
    }
    ExtendedFourier {
        fc: FourierCoefficients::new(T::zero(), alpha, beta).expect("finite by construction"),
        alpha0_indeterminate: true,
    }
}

/// Residuals of the boundary recovery against the input function.
#[derive(Debug, Clone)]
pub struct ResidualReport<T: Real> {
    pub max_abs: T,
    pub mean_abs: T,
    pub probes_used: usize,
    pub divergent_probes: usize,
    /// Max |full - reduced| boundary difference over the probes, reported
    /// when no deltas were removed (the two must then agree).
    pub full_vs_reduced_max: Option<T>,
}

/// Evaluate `|limit(tc_full) - f|` over the probe angles.
pub fn verify_roundtrip<T: Real>(
    res: &ReconstructionResult<T>,
    sf: &SectionedFunction<T>,
    probes: &[T],
    ladder: &RhoLadder<T>,
) -> ResidualReport<T> {
    let mut max_abs = T::zero();
    let mut sum = T::zero();
    let mut used = 0usize;
    let mut divergent = 0usize;
    let mut fr_max = T::zero();
    let compare_reduced = res.deltas_removed.is_empty();
    for &theta in probes {
        match limit_to_circle(&res.tc_full, theta, ladder) {
            BoundaryLimit::Value { value, .. } => {
                let target = lifted_target(sf, theta, res.lift);
                let r = (value - target).abs();
                max_abs = max_abs.max(r);
                sum += r;
                used += 1;
                if compare_reduced {
                    if let BoundaryLimit::Value { value: vr, .. } =
                        limit_to_circle(&res.tc_reduced, theta, ladder)
                    {
                        fr_max = fr_max.max((value - vr).abs());
                    }
                }
            }
            BoundaryLimit::Divergent => divergent += 1,
        }
    }
    ResidualReport {
        max_abs,
        mean_abs: if used > 0 { sum / T::of_usize(used) } else { T::zero() },
        probes_used: used,
        divergent_probes: divergent,
        full_vs_reduced_max: if compare_reduced { Some(fr_max) } else { None },
    }
}

/// `count` probe angles spread uniformly over the part of the circle that
/// keeps at least `min_dist` from every singular point.
pub fn uniform_probes<T: Real>(sf: &SectionedFunction<T>, count: usize, min_dist: T) -> Vec<T> {
    let two_pi = T::PI() + T::PI();
    let points = sf.points();
    let mut arcs: Vec<(T, T)> = Vec::new();
    let mut total = T::zero();
    for (i, &p) in points.iter().enumerate() {
        let next = if i + 1 < points.len() { points[i + 1] } else { points[0] + two_pi };
        let lo = p + min_dist;
        let hi = next - min_dist;
        if hi > lo {
            arcs.push((lo, hi - lo));
            total += hi - lo;
        }
    }
    let mut out = Vec::with_capacity(count);
    for m in 0..count {
        let mut s = total * (T::of_usize(m) + T::of(0.5)) / T::of_usize(count);
        for &(lo, len) in &arcs {
            if s <= len {
                out.push(normalize_angle(lo + s));
                break;
            }
            s -= len;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sections::square_wave;

    #[test]
    fn delta_taylor_at_origin() {
        let d = DeltaComponent { location: 0.0, order: 0, amplitude: 1.0 };
        let tc = delta_taylor(&d, 8);
        let pi = std::f64::consts::PI;
        assert!((tc.coeff(0).re - 0.5 / pi).abs() < 1e-15);
        for k in 1..=8 {
            assert!((tc.coeff(k).re - 1.0 / pi).abs() < 1e-15, "k={k}");
            assert!(tc.coeff(k).im.abs() < 1e-15);
        }
    }

    #[test]
    fn delta_taylor_phase_shift_at_pi() {
        let d = DeltaComponent { location: std::f64::consts::PI, order: 0, amplitude: 1.0 };
        let tc = delta_taylor(&d, 8);
        let pi = std::f64::consts::PI;
        for k in 1..=8usize {
            let expect = (-1.0f64).powi(k as i32) / pi;
            assert!((tc.coeff(k).re - expect).abs() < 1e-13, "k={k}");
            assert!(tc.coeff(k).im.abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn delta_taylor_first_derivative() {
        let d = DeltaComponent { location: 0.0, order: 1, amplitude: 1.0 };
        let tc = delta_taylor(&d, 8);
        let pi = std::f64::consts::PI;
        assert_eq!(tc.coeff(0), C::new(0.0, 0.0));
        for k in 1..=8usize {
            assert!((tc.coeff(k).im - k as f64 / pi).abs() < 1e-14, "k={k}");
            assert!(tc.coeff(k).re.abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn detect_deltas_on_square_wave() {
        let sf = square_wave::<f64>().to_sectioned();
        let ds = detect_deltas(&sf);
        assert_eq!(ds.len(), 2);
        assert!((ds[0].amplitude - 2.0).abs() < 1e-9);
        assert_eq!(ds[0].order, 0);
        assert!((ds[1].amplitude + 2.0).abs() < 1e-9);
    }

    #[test]
    fn detect_deltas_on_continuous_function() {
        let sf = SectionedFunction::from_global(vec![0.0_f64], |t: f64| t.cos()).unwrap();
        assert!(detect_deltas(&sf).is_empty());
    }

    #[test]
    fn detect_deltas_on_sawtooth() {
        let sf = crate::sections::sawtooth::<f64>().to_sectioned();
        let ds = detect_deltas(&sf);
        assert_eq!(ds.len(), 1);
        assert!((ds[0].amplitude + 2.0 * std::f64::consts::PI).abs() < 1e-9);
        assert!((ds[0].location - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn extended_fourier_identity_at_zero() {
        let fc = FourierCoefficients::new(3.0, vec![1.0, 2.0], vec![-1.0, 0.5]).unwrap();
        let e = extended_fourier(&fc, 0);
        assert!(!e.alpha0_indeterminate);
        assert_eq!(e.fc, fc);
    }

    #[test]
    fn extended_fourier_log_chain_n1() {
        // alpha_k^(-1) = -1/k, beta = 0, n = 1 (j = 0):
        // alpha_k = k * beta^(-1) = 0, beta_k = -k * alpha^(-1) = 1
        let order = 16;
        let alpha: Vec<f64> = (1..=order).map(|k| -1.0 / k as f64).collect();
        let fc = FourierCoefficients::new(0.0, alpha, vec![0.0; order]).unwrap();
        let e = extended_fourier(&fc, 1);
        assert!(e.alpha0_indeterminate);
        for k in 1..=order {
            assert_eq!(e.fc.alpha[k - 1], 0.0);
            assert!((e.fc.beta[k - 1] - 1.0).abs() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn extended_fourier_csc2_chain_n2() {
        // alpha_k^(-2) = 1/k, n = 2 (j = 1): alpha_k = -k^2 * (1/k) = -k
        let order = 16;
        let alpha: Vec<f64> = (1..=order).map(|k| 1.0 / k as f64).collect();
        let fc = FourierCoefficients::new(0.0, alpha, vec![0.0; order]).unwrap();
        let e = extended_fourier(&fc, 2);
        for k in 1..=order {
            assert!((e.fc.alpha[k - 1] + k as f64).abs() < 1e-12, "k={k}");
            assert_eq!(e.fc.beta[k - 1], 0.0);
        }
    }

    #[test]
    fn extended_fourier_matches_derivative_route_bitwise() {
        let order = 64;
        let alpha: Vec<f64> = (1..=order).map(|k| ((k * 7) as f64 * 0.13).sin()).collect();
        let beta: Vec<f64> = (1..=order).map(|k| ((k * 3) as f64 * 0.41).cos()).collect();
        let fc = FourierCoefficients::new(0.4, alpha, beta).unwrap();
        for n in 1..=4u32 {
            let via_ext = extended_fourier(&fc, n).fc;
            let via_deriv = fc.to_taylor().angular_derivative(n).to_fourier().unwrap();
            for k in 0..order {
                assert_eq!(
                    via_ext.alpha[k].to_bits(),
                    via_deriv.alpha[k].to_bits(),
                    "alpha n={n} k={}",
                    k + 1
                );
                assert_eq!(
                    via_ext.beta[k].to_bits(),
                    via_deriv.beta[k].to_bits(),
                    "beta n={n} k={}",
                    k + 1
                );
            }
        }
    }

    #[test]
    fn probes_respect_min_distance() {
        let sf = SectionedFunction::from_global(vec![0.0_f64, 2.0], |t: f64| t).unwrap();
        let probes = uniform_probes(&sf, 64, 0.3);
        assert_eq!(probes.len(), 64);
        for &p in &probes {
            assert!(crate::circle_distance(p, 0.0) >= 0.3 - 1e-12);
            assert!(crate::circle_distance(p, 2.0) >= 0.3 - 1e-12);
        }
    }
}
