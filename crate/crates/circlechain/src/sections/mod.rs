//! Sectionally defined real functions on the circle, n-fold sectional
//! integration, and Fourier coefficients of integrable functions by
//! quadrature.
//!
//! A function with singular points `theta_1 < ... < theta_N` lives on the `N`
//! open arcs between them (cyclically; section `i` is named by the point at
//! its left end). Each level of sectional integration anchors at the section
//! midpoint and is materialized as cumulative integrals cached on a graded
//! node set: interior Chebyshev spacing plus geometric refinement toward both
//! endpoints, where primitives of hard functions blow up. Evaluation between
//! nodes integrates the level below over the short bracket with a fixed
//! Kronrod rule, so nested levels stay cheap and accurate arbitrarily close
//! to the singular points.

mod poly;
mod quad;

use std::sync::Arc;

use thiserror::Error;

use crate::coeffs::FourierCoefficients;
use crate::{normalize_angle, CircleFunction, Real};

pub use poly::{sawtooth, square_wave, JumpRecord, PiecewisePolynomial};
pub use quad::{adaptive_integrate, QuadError, QuadratureConfig};

#[derive(Debug, Error)]
pub enum SectionsError {
    #[error("singular points must be distinct after normalization (min separation 1e-9)")]
    InvalidPoints,
    #[error("need at least one singular point to delimit sections")]
    NoPoints,
    #[error("{points} singular points require {points} sections, got {sections}")]
    SectionCountMismatch { points: usize, sections: usize },
    #[error("quadrature failed in section {section}: {source}")]
    Quadrature {
        section: usize,
        #[source]
        source: QuadError,
    },
    #[error("not integrable at theta = {point}: local growth exponent {p_hat:.3} <= -1")]
    NotIntegrable { point: f64, p_hat: f64 },
    #[error("sectional integration level must be >= 1")]
    ZeroLevel,
    #[error("injected polynomial must share the singular points of the primitive")]
    InjectionMismatch,
}

pub(crate) fn validate_points<T: Real>(points: Vec<T>) -> Result<Vec<T>, SectionsError> {
    if points.is_empty() {
        return Err(SectionsError::NoPoints);
    }
    let mut pts: Vec<T> = points.into_iter().map(normalize_angle).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));
    for w in pts.windows(2) {
        if w[1] - w[0] < T::of(1e-9) {
            return Err(SectionsError::InvalidPoints);
        }
    }
    let two_pi = T::PI() + T::PI();
    if pts.len() > 1 && (pts[0] + two_pi) - *pts.last().unwrap() < T::of(1e-9) {
        return Err(SectionsError::InvalidPoints);
    }
    Ok(pts)
}

/// Section evaluator in the unwrapped angle `u in (theta_i, theta_i + len_i)`.
pub type SectionEval<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// A real function given by one evaluator per open arc between singular
/// points.
#[derive(Clone)]
pub struct SectionedFunction<T: Real> {
    points: Vec<T>,
    sections: Vec<SectionEval<T>>,
}

impl<T: Real> std::fmt::Debug for SectionedFunction<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SectionedFunction")
            .field("points", &self.points)
            .field("sections", &self.sections.len())
            .finish()
    }
}

impl<T: Real> SectionedFunction<T> {
    /// Build from explicit per-section evaluators (unwrapped-angle contract).
    pub fn new(points: Vec<T>, sections: Vec<SectionEval<T>>) -> Result<Self, SectionsError> {
        let points = validate_points(points)?;
        if sections.len() != points.len() {
            return Err(SectionsError::SectionCountMismatch {
                points: points.len(),
                sections: sections.len(),
            });
        }
        Ok(Self { points, sections })
    }

    /// Build from a single global evaluator of the normalized angle; each
    /// section wraps it with normalization.
    pub fn from_global<F>(points: Vec<T>, f: F) -> Result<Self, SectionsError>
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        let points = validate_points(points)?;
        let f = Arc::new(f);
        let sections = (0..points.len())
            .map(|_| {
                let f = f.clone();
                Arc::new(move |u: T| f(normalize_angle(u))) as SectionEval<T>
            })
            .collect();
        Ok(Self { points, sections })
    }

    pub(crate) fn from_parts(points: Vec<T>, sections: Vec<SectionEval<T>>) -> Self {
        Self { points, sections }
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn section_count(&self) -> usize {
        self.points.len()
    }

    /// Left endpoint and length of section `i` in unwrapped coordinates.
    pub fn section_span(&self, i: usize) -> (T, T) {
        let two_pi = T::PI() + T::PI();
        let a = self.points[i];
        let b = if i + 1 < self.points.len() {
            self.points[i + 1]
        } else {
            self.points[0] + two_pi
        };
        (a, b - a)
    }

    pub(crate) fn section_eval(&self, i: usize) -> SectionEval<T> {
        self.sections[i].clone()
    }

    /// Section index and unwrapped coordinate for a circle angle.
    pub fn locate(&self, theta: T) -> (usize, T) {
        let two_pi = T::PI() + T::PI();
        let phi = normalize_angle(theta);
        let i = self.points.partition_point(|&p| p <= phi);
        if i == 0 {
            (self.points.len() - 1, phi + two_pi)
        } else {
            (i - 1, phi)
        }
    }

    pub fn eval(&self, theta: T) -> T {
        let (i, u) = self.locate(theta);
        (self.sections[i])(u)
    }
}

impl<T: Real> CircleFunction<T> for SectionedFunction<T> {
    fn eval(&self, theta: T) -> T {
        SectionedFunction::eval(self, theta)
    }

    fn singular_points(&self) -> &[T] {
        &self.points
    }
}

/// Number of interior Chebyshev-spaced cache nodes per section.
const CACHE_CHEB_NODES: usize = 129;

/// Cumulative integrals of one section's integrand, anchored at the section
/// midpoint, on the graded node set.
struct SectionCache<T: Real> {
    nodes: Vec<T>,
    cum: Vec<T>,
    integrand: SectionEval<T>,
}

impl<T: Real> SectionCache<T> {
    fn build(
        integrand: SectionEval<T>,
        a: T,
        len: T,
        qc: &QuadratureConfig<T>,
        section: usize,
    ) -> Result<Self, SectionsError> {
        let half = T::of(0.5);
        let b = a + len;
        let mid = a + len * half;
        let guard = len * T::of(0.125);
        let mut nodes: Vec<T> = Vec::with_capacity(CACHE_CHEB_NODES + 64);
        // interior Chebyshev extrema on [a+guard, b-guard]
        let span_mid = (a + guard + b - guard) * half;
        let span_half = (len - guard - guard) * half;
        for j in 0..CACHE_CHEB_NODES {
            let t = T::PI() * T::of_usize(j) / T::of_usize(CACHE_CHEB_NODES - 1);
            nodes.push(span_mid - span_half * t.cos());
        }
        // geometric ladders toward both endpoints, down to the exclusion floor
        let floor = qc.endpoint_eps;
        let mut d = guard * half;
        while d > floor {
            nodes.push(a + d);
            nodes.push(b - d);
            d = d * half;
        }
        nodes.push(a + floor);
        nodes.push(b - floor);
        nodes.push(mid);
        nodes.sort_by(|x, y| x.partial_cmp(y).expect("finite nodes"));
        let min_gap = len * T::of(1e-13);
        nodes.dedup_by(|x, y| (*x - *y).abs() < min_gap);

        let mut cum = vec![T::zero(); nodes.len()];
        for i in 1..nodes.len() {
            let piece = adaptive_integrate(integrand.as_ref(), nodes[i - 1], nodes[i], qc)
                .map_err(|source| SectionsError::Quadrature { section, source })?;
            cum[i] = cum[i - 1] + piece;
        }
        // anchor: value 0 at the reference point (midpoint)
        let ref_idx = nodes
            .iter()
            .enumerate()
            .min_by(|(_, x), (_, y)| {
                (**x - mid).abs().partial_cmp(&(**y - mid).abs()).expect("finite")
            })
            .map(|(i, _)| i)
            .expect("nonempty nodes");
        let shift = cum[ref_idx];
        for v in &mut cum {
            *v -= shift;
        }
        Ok(Self { nodes, cum, integrand })
    }

    /// Primitive value at `u`: nearest cached node plus a short bracket
    /// integral of the level below.
    fn eval(&self, u: T) -> T {
        let i = self.nodes.partition_point(|&x| x <= u);
        if i == 0 {
            let (q, _) = quad::kronrod15(self.integrand.as_ref(), self.nodes[0], u);
            self.cum[0] + q
        } else if i == self.nodes.len() {
            let last = self.nodes.len() - 1;
            let (q, _) = quad::kronrod15(self.integrand.as_ref(), self.nodes[last], u);
            self.cum[last] + q
        } else {
            // integrate from the closer bracket node
            let (lo, hi) = (i - 1, i);
            let from = if u - self.nodes[lo] <= self.nodes[hi] - u { lo } else { hi };
            let (q, _) = quad::kronrod15(self.integrand.as_ref(), self.nodes[from], u);
            self.cum[from] + q
        }
    }
}

/// An n-fold sectional primitive `f^(-n)` of a sectioned function, with every
/// intermediate level retained (delta detection inspects them while walking
/// back up the chain) and an optional injected piecewise polynomial on the
/// top level.
pub struct PiecewisePrimitive<T: Real> {
    base: SectionedFunction<T>,
    stages: Vec<SectionedFunction<T>>,
    injected: Option<PiecewisePolynomial<T>>,
    reference_points: Vec<T>,
}

impl<T: Real> PiecewisePrimitive<T> {
    /// Integration level `m` (number of sectional integrations applied).
    pub fn level(&self) -> usize {
        self.stages.len()
    }

    pub fn base(&self) -> &SectionedFunction<T> {
        &self.base
    }

    /// Per-section reference points (section midpoints) where every level
    /// vanishes by construction.
    pub fn reference_points(&self) -> &[T] {
        &self.reference_points
    }

    /// The sectioned view of `f^(-l)`; `l = 0` is the base function. Does not
    /// include the injected polynomial.
    pub fn level_view(&self, l: usize) -> &SectionedFunction<T> {
        if l == 0 {
            &self.base
        } else {
            &self.stages[l - 1]
        }
    }

    pub fn injected(&self) -> Option<&PiecewisePolynomial<T>> {
        self.injected.as_ref()
    }

    /// Add a per-section polynomial to the top level (the arbitrary
    /// `P_(n-1)` of the general piecewise primitive; defaults to zero).
    pub fn inject_polynomial(&mut self, pp: PiecewisePolynomial<T>) -> Result<(), SectionsError> {
        if pp.points().len() != self.base.points.len()
            || pp
                .points()
                .iter()
                .zip(&self.base.points)
                .any(|(a, b)| (*a - *b).abs() > T::of(1e-12))
        {
            return Err(SectionsError::InjectionMismatch);
        }
        self.injected = Some(pp);
        Ok(())
    }
}

impl<T: Real> CircleFunction<T> for PiecewisePrimitive<T> {
    fn eval(&self, theta: T) -> T {
        let top = self.stages.last().unwrap_or(&self.base);
        let v = top.eval(theta);
        match &self.injected {
            Some(pp) => v + pp.eval(theta),
            None => v,
        }
    }

    fn singular_points(&self) -> &[T] {
        &self.base.points
    }
}

/// Iterated sectional integration: `n` cumulative-quadrature levels, each
/// anchored at the section midpoints. Added polynomials default to zero (the
/// reconstruction pipeline eliminates them again); `inject_polynomial`
/// installs a nonzero one.
///
/// The section set is kept constant across levels even when singularities
/// soften before the top level.
pub fn sectional_integrate<T: Real>(
    sf: &SectionedFunction<T>,
    n: usize,
    qc: &QuadratureConfig<T>,
) -> Result<PiecewisePrimitive<T>, SectionsError> {
    if n == 0 {
        return Err(SectionsError::ZeroLevel);
    }
    let half = T::of(0.5);
    let reference_points: Vec<T> = (0..sf.section_count())
        .map(|i| {
            let (a, len) = sf.section_span(i);
            normalize_angle(a + len * half)
        })
        .collect();
    let mut stages = Vec::with_capacity(n);
    let mut prev = sf.clone();
    for _ in 0..n {
        let mut sections = Vec::with_capacity(prev.section_count());
        for i in 0..prev.section_count() {
            let (a, len) = prev.section_span(i);
            let cache = Arc::new(SectionCache::build(prev.section_eval(i), a, len, qc, i)?);
            sections.push(Arc::new(move |u: T| cache.eval(u)) as SectionEval<T>);
        }
        let stage = SectionedFunction::from_parts(sf.points.clone(), sections);
        stages.push(stage.clone());
        prev = stage;
    }
    Ok(PiecewisePrimitive {
        base: sf.clone(),
        stages,
        injected: None,
        reference_points,
    })
}

/// Samples used by the endpoint growth fit and the endpoint-mass models.
const ENDPOINT_FIT_SAMPLES: usize = 6;
/// Local growth exponents at or below this are treated as non-integrable.
const INTEGRABILITY_MARGIN: f64 = -0.95;

/// Fit `A + B ln d` and `C d^p` to samples of `f` at distances
/// `eps * 4^s` from the endpoint, keep the better fit, and return the
/// integrated mass over `[0, eps]`. Errors with the offending point and
/// exponent when the growth is non-integrable.
fn endpoint_model<T: Real>(
    f: &dyn Fn(T) -> T,
    end_u: T,
    inward: T,
    eps: T,
) -> Result<T, (f64, f64)> {
    let four = T::of(4.0);
    let mut ds = Vec::with_capacity(ENDPOINT_FIT_SAMPLES);
    let mut vs = Vec::with_capacity(ENDPOINT_FIT_SAMPLES);
    let mut d = eps;
    for _ in 0..ENDPOINT_FIT_SAMPLES {
        ds.push(d);
        vs.push(f(end_u + inward * d));
        d = d * four;
    }
    // growth exponent on |v|
    let xs: Vec<T> = ds.iter().map(|&d| d.ln()).collect();
    let ys: Vec<T> = vs.iter().map(|&v| (v.abs() + T::of(1e-300)).ln()).collect();
    let (p_hat, pow_resid) = slope_resid(&xs, &ys);
    if p_hat <= T::of(INTEGRABILITY_MARGIN) {
        return Err((
            normalize_angle(end_u).to_f64().unwrap_or(f64::NAN),
            p_hat.to_f64().unwrap_or(f64::NAN),
        ));
    }
    // log model A + B ln d (least squares on the raw values)
    let (b_log, a_log, log_resid) = affine_fit(&xs, &vs);
    let log_mass = a_log * eps + b_log * eps * (eps.ln() - T::one());
    // power model C d^p, valid only when the samples share a sign
    let same_sign = vs.iter().all(|&v| v > T::zero()) || vs.iter().all(|&v| v < T::zero());
    let mass = if same_sign && pow_resid < log_resid {
        let sign = if vs[0] > T::zero() { T::one() } else { -T::one() };
        let (p, lnc, _) = affine_fit_xy(&xs, &ys);
        sign * lnc.exp() * eps.powf(p + T::one()) / (p + T::one())
    } else {
        log_mass
    };
    Ok(mass)
}

fn slope_resid<T: Real>(x: &[T], y: &[T]) -> (T, T) {
    let (slope, _, resid) = affine_fit_xy(x, y);
    (slope, resid)
}

/// Least squares `y ~ slope * x + intercept`; returns (slope, intercept, rms).
fn affine_fit_xy<T: Real>(x: &[T], y: &[T]) -> (T, T, T) {
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

fn affine_fit<T: Real>(x: &[T], y: &[T]) -> (T, T, T) {
    let (s, i, r) = affine_fit_xy(x, y);
    (s, i, r)
}

/// Fourier coefficients `alpha_0, alpha_k, beta_k (k <= order)` of an
/// integrable circle function by composite Kronrod panels on each smooth
/// sub-arc: uniform interior panels sized to resolve the `k = order`
/// oscillation, geometric refinement toward the singular endpoints down to
/// `endpoint_eps`, and a fitted log/power endpoint-mass model for the
/// remaining slivers.
///
/// Functions with non-integrable endpoint growth (estimated local exponent
/// at or below -1) are rejected.
pub fn fourier_numeric<T: Real, F: CircleFunction<T> + ?Sized>(
    f: &F,
    order: usize,
    qc: &QuadratureConfig<T>,
) -> Result<FourierCoefficients<T>, SectionsError> {
    let points = f.singular_points().to_vec();
    let two_pi = T::PI() + T::PI();
    let n = points.len();
    let mut raw_a0 = T::zero();
    let mut raw_a = vec![T::zero(); order];
    let mut raw_b = vec![T::zero(); order];

    for i in 0..n {
        let a = points[i];
        let b = if i + 1 < n { points[i + 1] } else { points[0] + two_pi };
        let len = b - a;
        let eps = qc.endpoint_eps;
        let eval = |u: T| f.eval(u);

        // endpoint masses and integrability check
        for (end_u, inward) in [(a, T::one()), (b, -T::one())] {
            let mass = endpoint_model(&eval, end_u, inward, eps)
                .map_err(|(point, p_hat)| SectionsError::NotIntegrable { point, p_hat })?;
            raw_a0 += mass;
            for k in 1..=order {
                let ku = T::of_usize(k) * end_u;
                raw_a[k - 1] += mass * ku.cos();
                raw_b[k - 1] += mass * ku.sin();
            }
        }

        // composite panel edges on [a + eps, b - eps]
        let interior = (T::of_usize(order.max(16)) * len / T::PI())
            .ceil()
            .to_usize()
            .unwrap_or(64)
            .clamp(32, 1 << 16);
        let w0 = len / T::of_usize(interior);
        let mut edges: Vec<T> = Vec::with_capacity(interior + 96);
        let two = T::of(2.0);
        let mut d = eps;
        while d * two < w0 {
            edges.push(a + d);
            d = d * two;
        }
        let left_inner = a + d;
        let mut right_edges: Vec<T> = Vec::new();
        d = eps;
        while d * two < w0 {
            right_edges.push(b - d);
            d = d * two;
        }
        let right_inner = b - d;
        let inner_span = right_inner - left_inner;
        let inner_panels = (inner_span / w0).ceil().to_usize().unwrap_or(interior).max(1);
        for j in 0..=inner_panels {
            edges.push(left_inner + inner_span * T::of_usize(j) / T::of_usize(inner_panels));
        }
        right_edges.reverse();
        edges.extend(right_edges);

        // per panel: one refinement check on the plain integrand, then
        // project every mode on the Kronrod nodes
        for w in edges.windows(2) {
            project_panel(&eval, w[0], w[1], order, qc, 4, i, &mut raw_a0, &mut raw_a, &mut raw_b)?;
        }
    }

    let pi = T::PI();
    FourierCoefficients::new(
        raw_a0 / pi,
        raw_a.into_iter().map(|v| v / pi).collect(),
        raw_b.into_iter().map(|v| v / pi).collect(),
    )
    .map_err(|_| SectionsError::Quadrature {
        section: 0,
        source: QuadError::NonFinite(f64::NAN),
    })
}

#[allow(clippy::too_many_arguments)]
fn project_panel<T: Real>(
    eval: &dyn Fn(T) -> T,
    lo: T,
    hi: T,
    order: usize,
    qc: &QuadratureConfig<T>,
    depth: u32,
    section: usize,
    raw_a0: &mut T,
    raw_a: &mut [T],
    raw_b: &mut [T],
) -> Result<(), SectionsError> {
    let (q, err) = quad::kronrod15(eval, lo, hi);
    if !q.is_finite() {
        return Err(SectionsError::Quadrature {
            section,
            source: QuadError::NonFinite(lo.to_f64().unwrap_or(f64::NAN)),
        });
    }
    if err > qc.abs_tol.max(qc.rel_tol * q.abs()) && depth > 0 {
        let mid = (lo + hi) * T::of(0.5);
        project_panel(eval, lo, mid, order, qc, depth - 1, section, raw_a0, raw_a, raw_b)?;
        project_panel(eval, mid, hi, order, qc, depth - 1, section, raw_a0, raw_a, raw_b)?;
        return Ok(());
    }
    for (u, wgt) in quad::panel_nodes(lo, hi) {
        let fv = eval(u);
        let fw = fv * wgt;
        *raw_a0 += fw;
        // cos/sin(k u) by simultaneous recurrence
        let (su, cu) = u.sin_cos();
        let mut ck = cu;
        let mut sk = su;
        for k in 0..order {
            raw_a[k] += fw * ck;
            raw_b[k] += fw * sk;
            let c_next = ck * cu - sk * su;
            sk = sk * cu + ck * su;
            ck = c_next;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn qc() -> QuadratureConfig<f64> {
        QuadratureConfig::default()
    }

    fn whole_circle<F: Fn(f64) -> f64 + Send + Sync + 'static>(
        marker: f64,
        f: F,
    ) -> SectionedFunction<f64> {
        SectionedFunction::from_global(vec![marker], f).unwrap()
    }

    #[test]
    fn locate_and_eval_across_wrap() {
        let sf = SectionedFunction::from_global(vec![0.0_f64, 2.0], |t| t).unwrap();
        assert_eq!(sf.section_count(), 2);
        let (i, u) = sf.locate(1.0);
        assert_eq!(i, 0);
        assert!((u - 1.0).abs() < 1e-15);
        // -1.0 lies in the wrapped section named by point 2.0
        let (i, u) = sf.locate(-1.0);
        assert_eq!(i, 1);
        assert!((u - (-1.0 + 2.0 * std::f64::consts::PI)).abs() < 1e-12);
        assert!((sf.eval(-1.0) - (-1.0)).abs() < 1e-12);
    }

    #[test]
    fn integrate_constant_once() {
        // f = 1 with one singular point at 0: level-1 primitive is
        // theta - theta_ref per section
        let sf = whole_circle(0.0, |_| 1.0);
        let pp = sectional_integrate(&sf, 1, &qc()).unwrap();
        let refp = pp.reference_points()[0];
        for &t in &[0.4, 1.0, 2.4, -2.0, 3.0] {
            let expect = normalize_angle(t) - refp
                + if normalize_angle(t) < 0.0 { 2.0 * std::f64::consts::PI } else { 0.0 }
                - if refp < 0.0 { 0.0 } else { 0.0 };
            // unwrapped distance along the section from the reference
            let (_, u) = pp.level_view(1).locate(t);
            let expect_u = u - (refp + if refp <= 0.0 { 2.0 * std::f64::consts::PI } else { 0.0 });
            let got = pp.eval(t);
            // one of the two unwrappings applies depending on position
            assert!(
                (got - expect).abs() < 1e-10 || (got - expect_u).abs() < 1e-10,
                "t={t} got={got} expect={expect}/{expect_u}"
            );
        }
    }

    #[test]
    fn integrate_csc2_gives_minus_half_cot() {
        // f = csc^2(theta/2)/4, point at 0; primitive = -cot(theta/2)/2 + C,
        // with C = cot(pi/2)/2 = 0 at the midpoint reference
        let sf = whole_circle(0.0, |t: f64| 0.25 / (0.5 * t).sin().powi(2));
        let pp = sectional_integrate(&sf, 1, &qc()).unwrap();
        for &t in &[0.3, 0.7, 1.2, 2.0, -0.5, -2.4] {
            let expect = -0.5 / (0.5 * t as f64).tan();
            assert!((pp.eval(t) - expect).abs() < 1e-8, "t={t}: {} vs {expect}", pp.eval(t));
        }
    }

    #[test]
    fn integrate_csc2_twice_gives_minus_log() {
        let sf = whole_circle(0.0, |t: f64| 0.25 / (0.5 * t).sin().powi(2));
        let pp = sectional_integrate(&sf, 2, &qc()).unwrap();
        // second primitive: -ln(2 sin(theta/2)) + ln 2 (both references at pi)
        for &t in &[0.3, 0.7, 1.2, 2.0, -0.5] {
            let tt = if t > 0.0 { t } else { t + 2.0 * std::f64::consts::PI };
            let expect = -((2.0 * (0.5 * tt).sin()).ln()) + 2.0f64.ln();
            assert!((pp.eval(t) - expect).abs() < 1e-7, "t={t}: {} vs {expect}", pp.eval(t));
        }
    }

    #[test]
    fn primitive_differentiates_back_to_base() {
        let sf = whole_circle(0.0, |t: f64| (2.0 * t).cos() + 0.3 * t.sin());
        let pp = sectional_integrate(&sf, 1, &qc()).unwrap();
        let h = 1e-5;
        for &t in &[0.5, 1.5, 2.5, -1.0, -2.5] {
            let d = (pp.eval(t + h) - pp.eval(t - h)) / (2.0 * h);
            let base = sf.eval(t);
            assert!(
                (d - base).abs() <= 1e-5 * (1.0 + base.abs()),
                "t={t}: {d} vs {base}"
            );
        }
    }

    #[test]
    fn fourier_of_cosine_is_orthonormal() {
        let sf = whole_circle(std::f64::consts::PI, |t: f64| t.cos());
        let fc = fourier_numeric(&sf, 8, &qc()).unwrap();
        assert!((fc.alpha[0] - 1.0).abs() < 1e-10);
        assert!(fc.alpha0.abs() < 1e-10);
        for k in 2..=8 {
            assert!(fc.alpha[k - 1].abs() < 1e-10, "k={k}");
        }
        for k in 1..=8 {
            assert!(fc.beta[k - 1].abs() < 1e-10, "k={k}");
        }
    }

    #[test]
    fn fourier_of_log_2sin() {
        // ln|2 sin(theta/2)| has alpha_k = -1/k, alpha0 = 0
        let sf = whole_circle(0.0, |t: f64| (2.0 * (0.5 * t).sin().abs()).ln());
        let fc = fourier_numeric(&sf, 64, &qc()).unwrap();
        assert!(fc.alpha0.abs() < 1e-8, "alpha0 = {}", fc.alpha0);
        for k in 1..=64usize {
            assert!(
                (fc.alpha[k - 1] + 1.0 / k as f64).abs() < 1e-6,
                "k={k}: {}",
                fc.alpha[k - 1]
            );
            assert!(fc.beta[k - 1].abs() < 1e-8, "k={k}");
        }
    }

    #[test]
    fn fourier_of_abs_theta() {
        // |theta|: alpha0 = pi, alpha_k = 2((-1)^k - 1)/(pi k^2)
        let sf = SectionedFunction::from_global(vec![0.0_f64, std::f64::consts::PI], |t: f64| t.abs())
            .unwrap();
        let fc = fourier_numeric(&sf, 32, &qc()).unwrap();
        assert!((fc.alpha0 - std::f64::consts::PI).abs() < 1e-8);
        for k in 1..=32usize {
            let expect = 2.0 * ((-1.0f64).powi(k as i32) - 1.0) / (std::f64::consts::PI * (k * k) as f64);
            assert!((fc.alpha[k - 1] - expect).abs() < 1e-8, "k={k}");
            assert!(fc.beta[k - 1].abs() < 1e-8, "k={k}");
        }
    }

    #[test]
    fn fourier_rejects_nonintegrable() {
        let sf = whole_circle(0.0, |t: f64| 0.5 / (0.5 * t).tan());
        let r = fourier_numeric(&sf, 8, &qc());
        assert!(matches!(r, Err(SectionsError::NotIntegrable { .. })), "{r:?}");
    }

    #[test]
    fn injection_requires_matching_points() {
        let sf = whole_circle(0.0, |_| 1.0);
        let mut pp = sectional_integrate(&sf, 1, &qc()).unwrap();
        let bad = PiecewisePolynomial::new(vec![1.0_f64], vec![vec![1.0]]).unwrap();
        assert!(pp.inject_polynomial(bad).is_err());
        let good = PiecewisePolynomial::new(vec![0.0_f64], vec![vec![1.0]]).unwrap();
        pp.inject_polynomial(good).unwrap();
        assert!((pp.eval(1.0) - (pp.level_view(1).eval(1.0) + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn section_evaluators_get_unwrapped_coordinate() {
        let seen = Arc::new(std::sync::Mutex::new(Vec::new()));
        let seen2 = seen.clone();
        let sf = SectionedFunction::new(
            vec![std::f64::consts::PI],
            vec![Arc::new(move |u: f64| {
                seen2.lock().unwrap().push(u);
                u
            })],
        )
        .unwrap();
        sf.eval(-2.0);
        let u = seen.lock().unwrap()[0];
        assert!(u > std::f64::consts::PI && u < 3.0 * std::f64::consts::PI);
    }
}
