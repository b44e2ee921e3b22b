//! Multifractal spectra of harmonic measure near conformally invariant
//! boundaries: τ(n), D(n), f(α), their rotation and wedge forms, poly-spectra,
//! and a numeric Legendre transform.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::algebra::{gamma_of_c, Branch};
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub alpha: f64,
    pub f: f64,
    pub lambda: Option<f64>,
    pub theta: f64,
}

impl SpectrumPoint {
    pub fn new(alpha: f64, f: f64, lambda: Option<f64>) -> Self {
        Self { alpha, f, lambda, theta: PI / alpha }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentOrder {
    pub n: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    pub y: f64,
    pub dy: f64,
}

/// Samples of a function with strictly increasing abscissas.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Curve {
    points: Vec<CurvePoint>,
}

impl Curve {
    pub fn new(points: Vec<CurvePoint>) -> Result<Self> {
        if let Some(i) = points.windows(2).position(|w| !(w[0].x < w[1].x)) {
            return Err(domain(format!("curve abscissas must increase strictly (sample {})", i + 1)));
        }
        Ok(Self { points })
    }

    /// Samples `f` on the given abscissas; derivatives are left as NaN.
    pub fn sample<F>(xs: &[f64], f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let points = xs
            .iter()
            .map(|&x| Ok(CurvePoint { x, y: f(x)?, dy: f64::NAN }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// RFC 4180 CSV with a header row.
    pub fn to_csv(&self, headers: [&str; 3]) -> String {
        let mut out = headers.join(",");
        out.push('\n');
        for p in &self.points {
            out.push_str(&format!("{},{},{}\n", crate::fmt17(p.x), crate::fmt17(p.y), crate::fmt17(p.dy)));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolyKind {
    Generic,
    BrownianCut,
    SawStar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypicalSingularities {
    pub alphas: Vec<f64>,
    pub thetas: Vec<f64>,
    pub d_m: f64,
}

fn check_c(c: f64) -> Result<()> {
    if !(c <= 1.0) {
        return Err(domain(format!("central charge must be ≤ 1, got {c}")));
    }
    Ok(())
}

/// `b = (25−c)/12`.
pub fn b_of_c(c: f64) -> f64 {
    (25.0 - c) / 12.0
}

/// Lowest admissible moment order `n* = −(1−c)/24`.
pub fn moment_threshold(c: f64) -> f64 {
    -(1.0 - c) / 24.0
}

fn check_order(c: f64, n: f64) -> Result<()> {
    check_c(c)?;
    let threshold = moment_threshold(c);
    if !(n >= threshold) {
        return Err(Error::MomentOutOfRange { n, threshold });
    }
    Ok(())
}

fn root(c: f64, n: f64) -> f64 {
    ((24.0 * n + 1.0 - c) / (25.0 - c)).max(0.0).sqrt()
}

pub fn mf_tau(c: f64, n: f64) -> Result<f64> {
    check_order(c, n)?;
    Ok(0.5 * (n - 1.0) + (25.0 - c) / 24.0 * (root(c, n) - 1.0))
}

/// Harmonic exponent `x(n) = τ(n) + 2`.
pub fn harmonic_exponent(c: f64, n: f64) -> Result<f64> {
    Ok(mf_tau(c, n)? + 2.0)
}

pub fn mf_dimension(c: f64, n: f64) -> Result<f64> {
    check_order(c, n)?;
    Ok(0.5 + 1.0 / (root(c, n) + 1.0))
}

pub fn mf_alpha(c: f64, n: f64) -> Result<f64> {
    check_order(c, n)?;
    let s = root(c, n);
    if s == 0.0 {
        return Err(Error::MomentOutOfRange { n, threshold: moment_threshold(c) });
    }
    Ok(0.5 + 0.5 / s)
}

/// Order n′ paired with n by `(2α−1)(2α′−1) = 1`, so that `D(n) + D(n′) = 2`.
pub fn dual_order(c: f64, n: f64) -> Result<f64> {
    check_order(c, n)?;
    let s2 = (24.0 * n + 1.0 - c) / (25.0 - c);
    if s2 == 0.0 {
        return Err(Error::MomentOutOfRange { n, threshold: moment_threshold(c) });
    }
    Ok(((25.0 - c) / s2 - 1.0 + c) / 24.0)
}

pub fn mf_spectrum(c: f64, alpha: f64) -> Result<f64> {
    mixed_spectrum(c, alpha, 0.0)
}

pub fn mixed_spectrum(c: f64, alpha: f64, lambda: f64) -> Result<f64> {
    check_c(c)?;
    let edge = 1.0 + lambda * lambda;
    if !(2.0 * alpha > edge) || !alpha.is_finite() {
        return Err(domain(format!("need α > ½(1+λ²), got α = {alpha}, λ = {lambda}")));
    }
    let b = b_of_c(c);
    Ok(alpha + b - b * alpha * alpha / (2.0 * alpha - edge))
}

pub fn mixed_tau(c: f64, n: f64, p: f64) -> Result<f64> {
    let tau = mf_tau(c, n)?;
    let denom = tau + b_of_c(c);
    if !(denom > 0.0) {
        return Err(domain(format!("τ(n) + b must be positive, got {denom}")));
    }
    Ok(tau - 0.25 * p * p / denom)
}

/// Dimension of the accessible frontier, optionally restricted to points
/// winding at rate λ.
pub fn ep_dimension(c: f64, lambda: f64) -> Result<f64> {
    check_c(c)?;
    let d = 1.5 - (1.0 - c).sqrt() * ((25.0 - c).sqrt() - (1.0 - c).sqrt()) / 24.0;
    let l2 = lambda * lambda;
    Ok((1.0 + l2) * d - b_of_c(c) * l2)
}

/// Spectrum in terms of the equivalent wedge angle θ = π/α.
pub fn wedge_spectrum(c: f64, theta: f64, lambda: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < 2.0 * PI / (1.0 + lambda * lambda)) {
        return Err(domain(format!("need 0 < θ < 2π/(1+λ²), got θ = {theta}, λ = {lambda}")));
    }
    if lambda == 0.0 {
        check_c(c)?;
        let b = b_of_c(c);
        return Ok(PI / theta - b * (PI - theta).powi(2) / (theta * (2.0 * PI - theta)));
    }
    mixed_spectrum(c, PI / theta, lambda)
}

/// Weight of the dressing on the m arms in the poly-spectrum numerator.
fn dressing(m: usize, kind: PolyKind, c: f64) -> Result<f64> {
    let m = m as f64;
    match kind {
        PolyKind::Generic => Ok(0.5 * m),
        PolyKind::SawStar | PolyKind::BrownianCut if c != 0.0 => {
            Err(domain(format!("{kind:?} spectra exist only at c = 0, got c = {c}")))
        }
        PolyKind::SawStar => Ok(0.5 * m),
        PolyKind::BrownianCut => Ok(0.75 * m),
    }
}

/// Joint spectrum `f_m(α_1, …, α_m; λ)` of the potential between the arms of
/// an m-star.
pub fn poly_spectrum(c: f64, alphas: &[f64], lambda: f64, kind: PolyKind) -> Result<f64> {
    check_c(c)?;
    if alphas.is_empty() {
        return Err(domain("at least one arm is required"));
    }
    if alphas.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
        return Err(domain("Hölder exponents must be positive and finite"));
    }
    let gamma = gamma_of_c(c, Branch::Negative)?;
    let weight = dressing(alphas.len(), kind, c)?;
    let margin = 1.0 / (1.0 + lambda * lambda) - alphas.iter().map(|a| 0.5 / a).sum::<f64>();
    if !(margin > 0.0) {
        return Err(domain(format!("outside the poly-spectrum domain: 1/(1+λ²) − Σ1/(2α) = {margin}")));
    }
    let b = b_of_c(c);
    let sum: f64 = alphas.iter().sum();
    Ok(b - weight * weight / (2.0 * (1.0 - gamma)) / margin - (1.0 - c) / 24.0 * sum)
}

/// `D_m = sup f_m = (2−γ)²/(2(1−γ)) − (1−γ)m²/8`.
pub fn poly_dimension(c: f64, m: usize) -> Result<f64> {
    let gamma = gamma_of_c(c, Branch::Negative)?;
    let m = m as f64;
    Ok((2.0 - gamma).powi(2) / (2.0 * (1.0 - gamma)) - (1.0 - gamma) * m * m / 8.0)
}

/// The common Hölder exponent at which the generic f_m reaches its supremum.
pub fn typical_singularities(c: f64, m: usize) -> Result<TypicalSingularities> {
    check_c(c)?;
    if m == 0 {
        return Err(domain("at least one arm is required"));
    }
    let gamma = gamma_of_c(c, Branch::Negative)?;
    if gamma == 0.0 {
        return Err(domain("typical singularities diverge at c = 1"));
    }
    let alpha = 0.5 * m as f64 * (1.0 - 1.0 / gamma);
    Ok(TypicalSingularities {
        alphas: vec![alpha; m],
        thetas: vec![PI / alpha; m],
        d_m: poly_dimension(c, m)?,
    })
}

/// `(n*, τ*)` with `τ* = 1 + n*`, the exponent of `N(H) ≈ H^{−τ*}`.
pub fn rare_site_exponent(c: f64) -> Result<(f64, f64)> {
    check_c(c)?;
    let n_star = moment_threshold(c);
    Ok((n_star, 1.0 + n_star))
}

/// Relative probability of Hölder exponent α at scale ratio R, peak 1.
pub fn alpha_density(c: f64, alpha: f64, ratio: f64) -> Result<f64> {
    check_c(c)?;
    if !(alpha > 0.5) || !(ratio > 1.0) {
        return Err(domain(format!("need α > ½ and R > 1, got α = {alpha}, R = {ratio}")));
    }
    let w = (alpha - 0.5).sqrt();
    let t = (1.0 - c).sqrt() * w - (25.0 - c).sqrt() / (2.0 * w);
    Ok((-ratio.ln() / 24.0 * t * t).exp())
}

/// Geometric grid of `count` orders with `n − n*` spanning `[lo, hi]`.
pub fn order_grid(c: f64, lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let n_star = moment_threshold(c);
    let step = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|i| n_star + lo * (step * i as f64).exp()).collect()
}

/// The default grid for numeric Legendre transforms: 257 points with
/// `n − n*` in `[1e−4, 1e3]`.
pub fn default_order_grid(c: f64) -> Vec<f64> {
    order_grid(c, 1e-4, 1e3, 257)
}

const STENCIL: usize = 5;
const CONVEXITY_TOL: f64 = 1e-9;

/// Derivative at `xs[k]` of the interpolating polynomial through `xs`, `ys`.
fn lagrange_slope(xs: &[f64], ys: &[f64], k: usize) -> f64 {
    let xk = xs[k];
    let mut slope = 0.0;
    for j in 0..xs.len() {
        let weight = if j == k {
            (0..xs.len()).filter(|&m| m != k).map(|m| 1.0 / (xk - xs[m])).sum()
        } else {
            let num: f64 = (0..xs.len()).filter(|&m| m != j && m != k).map(|m| xk - xs[m]).product();
            let den: f64 = (0..xs.len()).filter(|&m| m != j).map(|m| xs[j] - xs[m]).product();
            num / den
        };
        slope += weight * ys[j];
    }
    slope
}

/// Fourth-order finite-difference slopes on a non-uniform grid.
pub fn slopes(curve: &Curve) -> Result<Vec<f64>> {
    let n = curve.len();
    if n < STENCIL {
        return Err(Error::InsufficientData(format!("need at least {STENCIL} samples, got {n}")));
    }
    let xs: Vec<f64> = curve.points.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = curve.points.iter().map(|p| p.y).collect();
    Ok((0..n)
        .map(|i| {
            let start = i.saturating_sub(STENCIL / 2).min(n - STENCIL);
            lagrange_slope(&xs[start..start + STENCIL], &ys[start..start + STENCIL], i - start)
        })
        .collect())
}

/// Legendre transform of sampled τ(n): returns points (α, f(α), n) with
/// `α = τ′(n)` and `f = αn − τ`, sorted by α. Coincident α merge.
pub fn legendre_numeric(curve: &Curve) -> Result<Curve> {
    if curve.len() < 9 {
        return Err(Error::InsufficientData(format!("need at least 9 samples, got {}", curve.len())));
    }
    let slopes = slopes(curve)?;
    let increasing = slopes[slopes.len() - 1] >= slopes[0];
    for (i, w) in slopes.windows(2).enumerate() {
        let step = if increasing { w[1] - w[0] } else { w[0] - w[1] };
        if step < -CONVEXITY_TOL * w[0].abs().max(1.0) {
            return Err(Error::Convexity { index: i + 1, drop: -step });
        }
    }
    let mut points: Vec<CurvePoint> = curve
        .points
        .iter()
        .zip(&slopes)
        .map(|(p, &alpha)| CurvePoint { x: alpha, y: alpha * p.x - p.y, dy: p.x })
        .collect();
    points.sort_by(|a, b| a.x.total_cmp(&b.x));
    let mut merged: Vec<CurvePoint> = Vec::with_capacity(points.len());
    for p in points {
        match merged.last() {
            Some(last) if p.x - last.x <= CONVEXITY_TOL * p.x.abs().max(1.0) => {}
            _ => merged.push(p),
        }
    }
    Curve::new(merged)
}

#[cfg(test)]
mod tests {
    use super::*;

    macro_rules! assert_close {
        ($a:expr, $b:expr) => {
            assert_close!($a, $b, 1e-12)
        };
        ($a:expr, $b:expr, $tol:expr) => {{
            let (a, b): (f64, f64) = ($a, $b);
            assert!((a - b).abs() <= $tol * b.abs().max(1.0), "{} = {a} but expected {b}", stringify!($a));
        }};
    }

    const CS: [f64; 4] = [-2.0, 0.0, 0.5, 1.0];

    #[test]
    fn tau_values() {
        assert_eq!(mf_tau(0.0, 1.0).unwrap(), 0.0);
        assert_close!(mf_tau(0.0, 2.0).unwrap(), 11.0 / 12.0);
        assert_close!(mf_tau(1.0, 4.0).unwrap(), 2.5);
        assert!(matches!(mf_tau(0.0, -0.05), Err(Error::MomentOutOfRange { .. })));
        for n in [0.0, 0.3, 2.0, 9.0] {
            assert_close!(mf_tau(1.0, n).unwrap(), 0.5 * (n - 1.0) + n.sqrt() - 1.0);
        }
    }

    #[test]
    fn dimension_values() {
        assert_close!(mf_dimension(0.0, 0.0).unwrap(), 4.0 / 3.0);
        assert_close!(mf_dimension(0.0, 1e12).unwrap(), 0.5, 1e-5);
        assert_close!(mf_dimension(0.0, -1.0 / 24.0).unwrap(), 1.5);
        for c in CS {
            assert_eq!(mf_dimension(c, 1.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn spectrum_values() {
        for c in CS {
            assert_close!(mf_spectrum(c, 1.0).unwrap(), 1.0);
        }
        assert_close!(mf_spectrum(0.0, 3.0).unwrap(), 4.0 / 3.0);
        assert!(mf_spectrum(0.0, 0.5).is_err());
        let half = |a: f64| {
            let b = b_of_c(0.5);
            a + b - b * a * a / (2.0 * a - 1.0)
        };
        assert_close!(mf_spectrum(0.5, 2.7).unwrap(), half(2.7));
        assert_close!(ep_dimension(0.5, 0.0).unwrap(), 11.0 / 8.0);
    }

    #[test]
    fn spectrum_supremum_is_ep_dimension() {
        for c in [-2.0, 0.0, 0.5] {
            let peak = mf_alpha(c, 0.0).unwrap();
            assert_close!(mf_spectrum(c, peak).unwrap(), ep_dimension(c, 0.0).unwrap());
            for da in [-1e-3, 1e-3] {
                assert!(mf_spectrum(c, peak + da).unwrap() < mf_spectrum(c, peak).unwrap());
            }
        }
    }

    #[test]
    fn alpha_values() {
        assert_eq!(mf_alpha(0.0, 1.0).unwrap(), 1.0);
        assert_close!(mf_alpha(0.0, 0.0).unwrap(), 3.0);
        assert_close!(mf_alpha(1.0, 0.25).unwrap(), 1.5);
        assert!(mf_alpha(0.0, 0.5).unwrap() > mf_alpha(0.0, 0.6).unwrap());
    }

    #[test]
    fn mixed_values() {
        assert_close!(mixed_spectrum(0.0, 3.0, 0.0).unwrap(), 4.0 / 3.0);
        for n in [0.0, 1.0, 3.5] {
            assert_eq!(mixed_tau(0.5, n, 0.0).unwrap(), mf_tau(0.5, n).unwrap());
        }
        for lambda in [0.0, 0.5, 1.0] {
            let far = mixed_spectrum(1.0, 1e9, lambda).unwrap();
            assert_close!(far, 1.5 - 0.5 * lambda * lambda, 1e-7);
        }
        assert!(mixed_spectrum(0.0, 0.9, 1.0).is_err());
    }

    #[test]
    fn ep_values() {
        assert_close!(ep_dimension(0.0, 0.0).unwrap(), 4.0 / 3.0);
        assert_close!(ep_dimension(1.0, 0.0).unwrap(), 1.5);
        assert_close!(ep_dimension(0.0, 1.0).unwrap(), 7.0 / 12.0);
    }

    #[test]
    fn wedge_values() {
        for c in CS {
            assert_close!(wedge_spectrum(c, PI, 0.0).unwrap(), 1.0);
            for theta in [0.3, 1.0, 2.0, 5.0] {
                assert_close!(wedge_spectrum(c, theta, 0.0).unwrap(), mf_spectrum(c, PI / theta).unwrap());
            }
        }
        assert_close!(wedge_spectrum(0.0, PI / 3.0, 0.0).unwrap(), 4.0 / 3.0);
        assert_close!(wedge_spectrum(1.0, 1e-9, 0.0).unwrap(), 1.5, 1e-6);
        assert_close!(wedge_spectrum(0.0, 1.0, 0.5).unwrap(), mixed_spectrum(0.0, PI, 0.5).unwrap());
        assert!(wedge_spectrum(0.0, 2.0 * PI, 0.0).is_err());
        assert!(wedge_spectrum(0.0, 4.0, 1.0).is_err());
    }

    #[test]
    fn poly_values() {
        let d2 = poly_dimension(0.0, 2).unwrap();
        assert_close!(d2, 4.0 / 3.0);
        assert_close!(poly_spectrum(0.0, &[3.0, 3.0], 0.0, PolyKind::Generic).unwrap(), d2);
        assert_close!(poly_dimension(0.0, 1).unwrap(), 25.0 / 12.0 - 3.0 / 16.0);
        let saw = poly_spectrum(0.0, &[2.0, 5.0], 0.0, PolyKind::SawStar).unwrap();
        let expected = 25.0 / 12.0 - (1.0 / 3.0) / (1.0 - 0.25 - 0.1) - 7.0 / 24.0;
        assert_close!(saw, expected);
        assert!(poly_spectrum(0.5, &[2.0, 5.0], 0.0, PolyKind::BrownianCut).is_err());
        assert!(poly_spectrum(0.0, &[0.6, 0.6], 0.0, PolyKind::Generic).is_err());
    }

    #[test]
    fn typical() {
        let t = typical_singularities(0.0, 2).unwrap();
        assert_close!(t.alphas[0], 3.0);
        assert_close!(t.d_m, 4.0 / 3.0);
        for c in [-2.0, 0.0, 0.5, 0.9] {
            for m in 1..=5 {
                let t = typical_singularities(c, m).unwrap();
                assert_close!(poly_spectrum(c, &t.alphas, 0.0, PolyKind::Generic).unwrap(), t.d_m);
            }
        }
        assert!(typical_singularities(1.0, 2).is_err());
    }

    #[test]
    fn rare_sites() {
        assert_close!(rare_site_exponent(0.0).unwrap().1, 23.0 / 24.0);
        assert_close!(rare_site_exponent(1.0).unwrap().1, 1.0);
        assert_close!(rare_site_exponent(-2.0).unwrap().1, 21.0 / 24.0);
    }

    #[test]
    fn density() {
        for c in [-2.0, 0.0, 0.5] {
            let peak = mf_alpha(c, 0.0).unwrap();
            assert_close!(alpha_density(c, peak, 1e3).unwrap(), 1.0);
            assert!(alpha_density(c, peak * 1.1, 1e3).unwrap() < 1.0);
        }
        let w: f64 = 0.5;
        let expected = (-(w.sqrt() - 2.5 / w.sqrt()).powi(2)).exp();
        assert_close!(alpha_density(0.0, 1.0, 24f64.exp()).unwrap(), expected);
        assert!(alpha_density(0.0, 0.4, 10.0).is_err());
    }

    #[test]
    fn legendre_of_line() {
        let xs: Vec<f64> = (0..20).map(|i| 0.5 * i as f64).collect();
        let line = Curve::sample(&xs, |n| Ok(n - 1.0)).unwrap();
        let out = legendre_numeric(&line).unwrap();
        assert_eq!(out.len(), 1);
        assert_close!(out.points()[0].x, 1.0, 1e-10);
        assert_close!(out.points()[0].y, 1.0, 1e-10);
    }

    #[test]
    fn legendre_matches_closed_form() {
        for c in CS {
            let grid = default_order_grid(c);
            let tau = Curve::sample(&grid, |n| mf_tau(c, n)).unwrap();
            let spec = legendre_numeric(&tau).unwrap();
            let mut checked = 0;
            for p in spec.points().iter().filter(|p| (0.6..=10.0).contains(&p.x)) {
                assert_close!(p.y, mf_spectrum(c, p.x).unwrap(), 1e-6);
                checked += 1;
            }
            assert!(checked > 50);
        }
    }

    #[test]
    fn legendre_rejects_wiggles() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let wiggle = Curve::sample(&xs, |x| Ok((x * 1.3).sin())).unwrap();
        assert!(matches!(legendre_numeric(&wiggle), Err(Error::Convexity { .. })));
    }

    #[test]
    fn curve_requires_increasing_abscissas() {
        assert!(Curve::sample(&[0.0, 1.0, 1.0], Ok).is_err());
    }
}
