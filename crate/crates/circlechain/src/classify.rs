//! Numeric classification of singular points: soft (with degree of
//! softness), borderline hard (degree of hardness zero), or hard with the
//! degree of hardness defined by the number of sectional integrations that
//! render the point integrable.

use thiserror::Error;

use crate::sections::{sectional_integrate, QuadratureConfig, SectionedFunction, SectionsError};
use crate::{circle_distance, CircleFunction, Real};

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("theta = {0} is not a declared singular point")]
    NotASingularPoint(f64),
    #[error("degree not determined within nmax = {nmax} at theta = {point}")]
    ExceedsNmax { point: f64, nmax: usize },
    #[error("unclassifiable singular behavior at theta = {0} (no stable growth fit)")]
    Unclassifiable(f64),
    #[error(transparent)]
    Sections(#[from] SectionsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityKind {
    /// No defect detectable up to the probe depth: a marker point, or a soft
    /// singularity of degree beyond `nmax`.
    Regular,
    /// Finite equal lateral limits with a continuity/differentiability
    /// defect; `degree` counts derivatives until the defect.
    Soft,
    /// No finite two-sided limit, but integrable: divergent laterals with
    /// growth exponent above -1 (or log-type), or a finite jump. Degree of
    /// hardness zero.
    BorderlineHard,
    /// Non-integrable; `degree` is the number of sectional integrations
    /// until the point becomes integrable.
    Hard,
}

impl SingularityKind {
    pub fn label(&self) -> &'static str {
        match self {
            SingularityKind::Regular => "none",
            SingularityKind::Soft => "soft",
            SingularityKind::BorderlineHard => "borderline_hard",
            SingularityKind::Hard => "hard",
        }
    }
}

/// Numerical evidence backing a classification.
#[derive(Debug, Clone, PartialEq)]
pub struct Evidence<T: Real> {
    pub left_limit: Option<T>,
    pub right_limit: Option<T>,
    /// Local growth exponent from the log-log fit, when laterals diverge.
    pub p_hat: Option<T>,
    /// The log model `A + B ln d` fit the divergence better than a power.
    pub log_type: bool,
    /// Sectional integrations needed to reach integrability (hard points).
    pub integrations: Option<usize>,
    /// The soft-degree probe hit `nmax` without finding a defect.
    pub capped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularityRecord<T: Real> {
    pub location: T,
    pub kind: SingularityKind,
    /// Softness degree for soft records, hardness degree for hard records,
    /// zero for borderline and regular ones.
    pub degree: usize,
    pub evidence: Evidence<T>,
}

/// Approach-sequence parameters: `delta = 0.1` rad with 12 dyadic halvings,
/// clamped inside the adjacent sections.
const APPROACH_DELTA: f64 = 0.1;
const APPROACH_STEPS: usize = 12;
/// Lateral limits above this magnitude are never reported as finite.
const FINITE_CAP: f64 = 1e6;
/// Growth exponents above this are integrable (the paper's boundary is -1;
/// finite-precision fits within ~0.05 of it are ambiguous by nature).
const INTEGRABLE_EXPONENT: f64 = -0.95;

pub(crate) enum Lateral<T: Real> {
    Finite { limit: T },
    Divergent { samples: Vec<(T, T)> },
    Oscillatory,
}

/// Lateral limit of `f` at `point` from one side (`side = +1` approaches
/// from the right). Dyadic approach samples are accelerated by Neville
/// extrapolation in the distance; the limit is declared finite when the
/// extrapolants settle to `1e-6 * (1 + |value|)`.
pub(crate) fn lateral<T: Real, F: CircleFunction<T> + ?Sized>(f: &F, point: T, side: T) -> Lateral<T> {
    let points = f.singular_points();
    let gap = points
        .iter()
        .map(|&p| {
            let d = circle_distance(p, point);
            if d > T::of(1e-9) { d } else { T::PI() + T::PI() }
        })
        .fold(T::PI() + T::PI(), |a, b| a.min(b));
    let delta = T::of(APPROACH_DELTA).min(gap * T::of(0.25));
    let half = T::of(0.5);
    let mut samples = Vec::with_capacity(APPROACH_STEPS);
    let mut d = delta;
    for _ in 0..APPROACH_STEPS {
        samples.push((d, f.eval(point + side * d)));
        d = d * half;
    }
    if samples.iter().any(|(_, v)| !v.is_finite()) {
        return Lateral::Divergent { samples };
    }
    // Neville extrapolation to d = 0 on the finest six samples
    let tail = &samples[samples.len() - 6..];
    let (est, settle) = neville_to_zero(tail);
    let tol = T::of(1e-6) * (T::one() + est.abs());
    if settle <= tol && est.abs() <= T::of(FINITE_CAP) {
        return Lateral::Finite { limit: est };
    }
    let grow = samples
        .windows(2)
        .all(|w| w[1].1.abs() >= w[0].1.abs() * T::of(0.999));
    if grow {
        Lateral::Divergent { samples }
    } else {
        Lateral::Oscillatory
    }
}

fn neville_to_zero<T: Real>(samples: &[(T, T)]) -> (T, T) {
    let n = samples.len();
    let mut t: Vec<T> = samples.iter().map(|&(_, v)| v).collect();
    let x: Vec<T> = samples.iter().map(|&(d, _)| d).collect();
    let mut diag = t[n - 1];
    let mut prev = diag;
    for m in 1..n {
        for j in 0..n - m {
            t[j] = (x[j] * t[j + 1] - x[j + m] * t[j]) / (x[j] - x[j + m]);
        }
        prev = diag;
        diag = t[n - m - 1];
    }
    (diag, (diag - prev).abs())
}

/// Fit of the divergence profile: power exponent `p_hat` and whether the
/// `A + B ln d` model beats the pure power `C d^p` model.
fn divergence_fit<T: Real>(samples: &[(T, T)]) -> Option<(T, bool)> {
    let finite: Vec<(T, T)> = samples.iter().copied().filter(|(_, v)| v.is_finite()).collect();
    if finite.len() < 4 {
        return None;
    }
    let xs: Vec<T> = finite.iter().map(|&(d, _)| d.ln()).collect();
    let mags: Vec<T> = finite.iter().map(|&(_, v)| v.abs().max(T::of(1e-280)).ln()).collect();
    let (p_hat, _, pow_resid) = affine(&xs, &mags);
    // log model fitted on the raw signed values
    let raw: Vec<T> = finite.iter().map(|&(_, v)| v).collect();
    let (_, _, log_resid) = affine(&xs, &raw);
    let scale = raw.iter().fold(T::zero(), |a, &v| a + v.abs()) / T::of_usize(raw.len());
    // residuals compared in relative terms; the power residual lives in log
    // space already
    let log_rel = if scale > T::zero() { log_resid / scale } else { log_resid };
    let log_wins = log_rel < pow_resid;
    // wild fits on both models mean oscillatory behavior
    if pow_resid > T::of(1.0) && log_rel > T::of(1.0) {
        return None;
    }
    Some((p_hat, log_wins))
}

fn affine<T: Real>(x: &[T], y: &[T]) -> (T, T, T) {
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
    (slope, intercept, (ss / n).sqrt())
}

/// m-th lateral derivative limit at `point +- d` offsets, by central
/// differences inside the section and Neville acceleration in the offset.
fn lateral_derivative<T: Real, F: CircleFunction<T> + ?Sized>(
    f: &F,
    point: T,
    side: T,
    m: usize,
) -> Option<T> {
    let steps = if m <= 2 { 6 } else { 3 };
    let start = T::of(0.1);
    let half = T::of(0.5);
    let mut d = start;
    let mut samples = Vec::with_capacity(steps);
    for _ in 0..steps {
        let center = point + side * d;
        let h = d / T::of_usize(2 * m + 2);
        let v = central_difference(f, center, h, m);
        if !v.is_finite() {
            return None;
        }
        samples.push((d, v));
        d = d * half;
    }
    let (est, settle) = neville_to_zero(&samples);
    let tol = T::of(2e-3) * (T::one() + est.abs());
    if settle <= tol && est.abs() <= T::of(FINITE_CAP) {
        Some(est)
    } else {
        None
    }
}

fn central_difference<T: Real, F: CircleFunction<T> + ?Sized>(f: &F, center: T, h: T, m: usize) -> T {
    // m-th central difference: sum_r (-1)^r C(m,r) f(center + (m/2 - r) h)
    let mut acc = T::zero();
    let mut binom = T::one();
    for r in 0..=m {
        let offset = (T::of_usize(m) / (T::one() + T::one())) - T::of_usize(r);
        acc += binom * f.eval(center + offset * h);
        binom = binom * -T::one() * T::of_usize(m - r) / T::of_usize(r + 1);
    }
    acc / h.powi(m as i32)
}

/// Classify one declared singular point of `sf`, searching degrees up to
/// `nmax`.
pub fn classify_point<T: Real>(
    sf: &SectionedFunction<T>,
    point: T,
    nmax: usize,
) -> Result<SingularityRecord<T>, ClassifyError> {
    classify_point_with(sf, point, nmax, &QuadratureConfig::default())
}

pub fn classify_point_with<T: Real>(
    sf: &SectionedFunction<T>,
    point: T,
    nmax: usize,
    qc: &QuadratureConfig<T>,
) -> Result<SingularityRecord<T>, ClassifyError> {
    let point = crate::normalize_angle(point);
    let pf = point.to_f64().unwrap_or(f64::NAN);
    if !sf
        .points()
        .iter()
        .any(|&p| circle_distance(p, point) < T::of(1e-9))
    {
        return Err(ClassifyError::NotASingularPoint(pf));
    }
    let right = lateral(sf, point, T::one());
    let left = lateral(sf, point, -T::one());

    match (&left, &right) {
        (Lateral::Finite { limit: l }, Lateral::Finite { limit: r }) => {
            let jump_tol = T::of(1e-6) * (T::one() + l.abs().max(r.abs()));
            let evidence = Evidence {
                left_limit: Some(*l),
                right_limit: Some(*r),
                p_hat: None,
                log_type: false,
                integrations: None,
                capped: false,
            };
            if (*l - *r).abs() > jump_tol {
                // a finite jump: no two-sided limit, yet integrable
                return Ok(SingularityRecord {
                    location: point,
                    kind: SingularityKind::BorderlineHard,
                    degree: 0,
                    evidence,
                });
            }
            // soft: count derivatives that stay continuous across the point
            for m in 1..=nmax {
                let dl = lateral_derivative(sf, point, -T::one(), m);
                let dr = lateral_derivative(sf, point, T::one(), m);
                let defect = match (dl, dr) {
                    (Some(a), Some(b)) => {
                        (a - b).abs() > T::of(5e-3) * (T::one() + a.abs().max(b.abs()))
                    }
                    _ => true,
                };
                if defect {
                    return Ok(SingularityRecord {
                        location: point,
                        kind: SingularityKind::Soft,
                        degree: m,
                        evidence,
                    });
                }
            }
            let mut evidence = evidence;
            evidence.capped = true;
            Ok(SingularityRecord {
                location: point,
                kind: SingularityKind::Regular,
                degree: 0,
                evidence,
            })
        }
        (Lateral::Oscillatory, _) | (_, Lateral::Oscillatory) => {
            Err(ClassifyError::Unclassifiable(pf))
        }
        _ => {
            // at least one divergent side: fit the growth profile there
            let mut p_hat: Option<T> = None;
            let mut log_type = false;
            for lat in [&left, &right] {
                if let Lateral::Divergent { samples } = lat {
                    match divergence_fit(samples) {
                        Some((p, lt)) => {
                            p_hat = Some(match p_hat {
                                Some(q) => q.min(p),
                                None => p,
                            });
                            log_type |= lt;
                        }
                        None => return Err(ClassifyError::Unclassifiable(pf)),
                    }
                }
            }
            let p = p_hat.expect("at least one divergent side");
            let lateral_value = |lat: &Lateral<T>| match lat {
                Lateral::Finite { limit } => Some(*limit),
                _ => None,
            };
            let mut evidence = Evidence {
                left_limit: lateral_value(&left),
                right_limit: lateral_value(&right),
                p_hat: Some(p),
                log_type,
                integrations: None,
                capped: false,
            };
            if p > T::of(INTEGRABLE_EXPONENT) || log_type {
                return Ok(SingularityRecord {
                    location: point,
                    kind: SingularityKind::BorderlineHard,
                    degree: 0,
                    evidence,
                });
            }
            // non-integrable: count sectional integrations to integrability
            let prim = sectional_integrate(sf, nmax, qc)?;
            for l in 1..=nmax {
                let view = prim.level_view(l);
                if level_is_integrable(view, point) {
                    evidence.integrations = Some(l);
                    return Ok(SingularityRecord {
                        location: point,
                        kind: SingularityKind::Hard,
                        degree: l,
                        evidence,
                    });
                }
            }
            Err(ClassifyError::ExceedsNmax { point: pf, nmax })
        }
    }
}

fn level_is_integrable<T: Real>(view: &SectionedFunction<T>, point: T) -> bool {
    for side in [T::one(), -T::one()] {
        match lateral(view, point, side) {
            Lateral::Finite { .. } => {}
            Lateral::Divergent { samples } => match divergence_fit(&samples) {
                Some((p, log_type)) => {
                    if !(p > T::of(INTEGRABLE_EXPONENT) || log_type) {
                        return false;
                    }
                }
                None => return false,
            },
            Lateral::Oscillatory => return false,
        }
    }
    true
}

/// Classification records for every declared singular point.
pub fn classify_all<T: Real>(
    sf: &SectionedFunction<T>,
    nmax: usize,
) -> Result<Vec<SingularityRecord<T>>, ClassifyError> {
    sf.points()
        .iter()
        .map(|&p| classify_point(sf, p, nmax))
        .collect()
}

/// Maximum degree of hardness over all singular points (0 when none are
/// hard). Errors propagate from any point that cannot be classified within
/// `nmax`.
pub fn max_hardness<T: Real>(sf: &SectionedFunction<T>, nmax: usize) -> Result<usize, ClassifyError> {
    Ok(classify_all(sf, nmax)?
        .iter()
        .map(|r| if r.kind == SingularityKind::Hard { r.degree } else { 0 })
        .max()
        .unwrap_or(0))
}
