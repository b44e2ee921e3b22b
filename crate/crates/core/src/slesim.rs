//! Chordal SLE traces from discretised Loewner evolution, winding-angle
//! statistics about the tip and box-counting dimensions.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{fit_line, FitResult, Weights};
use crate::rng::{stream, Domain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DriveMode {
    Binomial,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoewnerDrive {
    pub dt: f64,
    pub kappa: f64,
    pub increments: Vec<f64>,
    pub seed: u64,
    pub mode: DriveMode,
}

impl LoewnerDrive {
    pub fn steps(&self) -> usize {
        self.increments.len()
    }

    /// Driving values W₁ … W_N after each increment.
    pub fn values(&self) -> Vec<f64> {
        self.increments
            .iter()
            .scan(0.0, |w, dw| {
                *w += dw;
                Some(*w)
            })
            .collect()
    }

    /// Drive with the given increments, for deterministic constructions.
    pub fn from_increments(dt: f64, kappa: f64, increments: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) || increments.is_empty() {
            return Err(Error::Config(format!("need dt > 0 and at least one step, got dt = {dt}")));
        }
        Ok(Self { dt, kappa, increments, seed: 0, mode: DriveMode::Binomial })
    }

    /// Drive with `λ`-scaled increments and `λ²dt`.
    pub fn rescaled(&self, factor: f64) -> Self {
        Self {
            dt: self.dt * factor * factor,
            increments: self.increments.iter().map(|d| d * factor).collect(),
            ..self.clone()
        }
    }

    pub fn reflected(&self) -> Self {
        Self { increments: self.increments.iter().map(|d| -d).collect(), ..self.clone() }
    }
}

/// Driving increments of variance κ·dt, either ±√(κdt) or Gaussian.
pub fn sample_drive(kappa: f64, dt: f64, steps: usize, seed: u64, mode: DriveMode) -> Result<LoewnerDrive> {
    sample_drive_indexed(kappa, dt, steps, seed, 0, mode)
}

pub fn sample_drive_indexed(
    kappa: f64,
    dt: f64,
    steps: usize,
    seed: u64,
    index: u64,
    mode: DriveMode,
) -> Result<LoewnerDrive> {
    if !(dt > 0.0) || steps == 0 {
        return Err(Error::Config(format!("need dt > 0 and steps ≥ 1, got dt = {dt}, steps = {steps}")));
    }
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(Error::Domain(format!("κ must be finite and non-negative, got {kappa}")));
    }
    let mut rng = stream(seed, Domain::Drive, index);
    let amplitude = (kappa * dt).sqrt();
    let increments = match mode {
        DriveMode::Binomial => {
            (0..steps).map(|_| if rng.random::<bool>() { amplitude } else { -amplitude }).collect()
        }
        DriveMode::Gaussian => {
            let normal = Normal::new(0.0, 1.0).expect("unit normal");
            (0..steps).map(|_| amplitude * normal.sample(&mut rng)).collect()
        }
    };
    Ok(LoewnerDrive { dt, kappa, increments, seed, mode })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    /// γ(t_k) for k = 0 … N, with γ(0) = 0.
    pub points: Vec<Complex64>,
    pub capacities: Vec<f64>,
}

impl Trace {
    pub fn tip(&self) -> Complex64 {
        *self.points.last().expect("traces are non-empty")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,re,im\n");
        for (t, z) in self.capacities.iter().zip(&self.points) {
            out.push_str(&format!("{},{},{}\n", crate::fmt17(*t), crate::fmt17(z.re), crate::fmt17(z.im)));
        }
        out
    }
}

const HALF_PLANE_SLACK: f64 = 1e-9;

/// Square root of `u² − a` continued from `u` at infinity: the result lies in
/// the closed upper half-plane when `u` does.
#[inline(always)]
fn slit_sqrt(ux: f64, uy: f64, a: f64) -> (f64, f64) {
    let x = ux * ux - uy * uy - a;
    let y = 2.0 * ux * uy;
    let m = (x * x + y * y).sqrt();
    let t = (0.5 * (m + x.abs())).sqrt();
    let other = y.abs() / (2.0 * t).max(f64::MIN_POSITIVE);
    let (re, im) = if x >= 0.0 { (t, other) } else { (other, t) };
    // the sign of y carries the sign of ux, including on the real axis
    (re.copysign(y), im)
}

/// Trace points by backward composition of vertical-slit maps
/// `f_j(z) = W_j + √((z − W_j)² − 4dt)`.
pub fn trace_from_drive(drive: &LoewnerDrive) -> Result<Trace> {
    let times: Vec<f64> = (1..=drive.steps()).map(|k| k as f64 * drive.dt).collect();
    trace_from_knots(&times, &drive.values())
}

/// Trace for a piecewise-constant drive taking value `values[k]` on the
/// capacity interval `(times[k-1], times[k]]`, with `times[-1] = 0`.
pub fn trace_from_knots(times: &[f64], values: &[f64]) -> Result<Trace> {
    let n = times.len();
    if n == 0 || values.len() != n {
        return Err(Error::Config("need matching, non-empty knot times and drive values".into()));
    }
    let steps: Vec<f64> = times.iter().scan(0.0, |prev, &t| {
        let dt = t - *prev;
        *prev = t;
        Some(dt)
    }).collect();
    if steps.iter().any(|&dt| !(dt > 0.0)) {
        return Err(Error::Config("knot times must increase from 0".into()));
    }
    // xs[k], ys[k] hold the partially composed image of point k + 1
    let mut xs: Vec<f64> = values.to_vec();
    let mut ys: Vec<f64> = steps.iter().map(|dt| 2.0 * dt.sqrt()).collect();
    for j in (0..n.saturating_sub(1)).rev() {
        let (wj, a) = (values[j], 4.0 * steps[j]);
        let (tail_x, tail_y) = (&mut xs[j + 1..], &mut ys[j + 1..]);
        for (x, y) in tail_x.iter_mut().zip(tail_y.iter_mut()) {
            let (re, im) = slit_sqrt(*x - wj, *y, a);
            *x = wj + re;
            *y = im;
        }
    }
    let mut points = Vec::with_capacity(n + 1);
    points.push(Complex64::new(0.0, 0.0));
    for (x, y) in xs.into_iter().zip(ys) {
        if y < -HALF_PLANE_SLACK || !x.is_finite() || !y.is_finite() {
            return Err(Error::Numerical(format!("trace point left the half-plane: {x} + {y}i")));
        }
        points.push(Complex64::new(x, y.max(0.0)));
    }
    let mut capacities = Vec::with_capacity(n + 1);
    capacities.push(0.0);
    capacities.extend_from_slice(times);
    Ok(Trace { points, capacities })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SleConfig {
    pub kappa: f64,
    pub steps: usize,
    pub traces: usize,
    pub seed: u64,
    pub mode: DriveMode,
}

impl SleConfig {
    /// 2¹⁴ binomial steps over unit capacity.
    pub fn new(kappa: f64, traces: usize, seed: u64) -> Self {
        Self { kappa, steps: 1 << 14, traces, seed, mode: DriveMode::Binomial }
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.steps as f64
    }
}

pub fn sample_traces(config: &SleConfig) -> Result<Vec<Trace>> {
    (0..config.traces)
        .into_par_iter()
        .map(|i| {
            let drive = sample_drive_indexed(config.kappa, config.dt(), config.steps, config.seed, i as u64, config.mode)?;
            trace_from_drive(&drive)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindingSeries {
    /// Dyadic distances from the tip, decreasing.
    pub scales: Vec<f64>,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
    pub samples: usize,
    /// Slope of variance against ln(1/s).
    pub fit: FitResult,
    /// Slope of mean winding against ln(1/s).
    pub mean_slope: f64,
}

pub const MIN_TRACES: usize = 30;

/// Unwrapped angle of `γ_j − tip` walking back from the tip, sampled when the
/// walk first reaches each distance in `scales` (decreasing order of index).
/// Returns `None` if the trace never reaches the largest scale.
pub fn tip_winding(points: &[Complex64], scales: &[f64]) -> Option<Vec<f64>> {
    let tip = *points.last()?;
    let mut out = vec![f64::NAN; scales.len()];
    // scales sorted decreasing; we meet small ones first
    let mut next = scales.len();
    let mut angle = 0.0;
    let mut last: Option<f64> = None;
    for p in points.iter().rev().skip(1) {
        let d = p - tip;
        let r = d.norm();
        if r == 0.0 {
            continue;
        }
        let phase = d.arg();
        if let Some(prev) = last {
            let mut step = phase - prev;
            if step > std::f64::consts::PI {
                step -= 2.0 * std::f64::consts::PI;
            } else if step < -std::f64::consts::PI {
                step += 2.0 * std::f64::consts::PI;
            }
            angle += step;
        }
        last = Some(phase);
        while next > 0 && r >= scales[next - 1] {
            out[next - 1] = angle;
            next -= 1;
        }
        if next == 0 {
            return Some(out);
        }
    }
    None
}

/// Dyadic scales from `largest` down to `smallest`.
pub fn dyadic_scales(largest: f64, smallest: f64) -> Vec<f64> {
    std::iter::successors(Some(largest), |s| Some(s / 2.0)).take_while(|&s| s >= smallest * (1.0 - 1e-12)).collect()
}

/// Default scales for unit capacity: from 1/2 down to one elementary slit
/// height 2√dt.
pub fn default_winding_scales(dt: f64) -> Vec<f64> {
    dyadic_scales(0.5, 2.0 * dt.sqrt())
}

/// Ensemble statistics of the tip winding relative to the largest scale.
pub fn winding_statistics(traces: &[Trace], scales: &[f64]) -> Result<WindingSeries> {
    if traces.len() < MIN_TRACES {
        return Err(Error::InsufficientData(format!("need at least {MIN_TRACES} traces, got {}", traces.len())));
    }
    if scales.len() < 3 {
        return Err(Error::InsufficientData(format!("need at least 3 scales, got {}", scales.len())));
    }
    let rows: Vec<Vec<f64>> = traces
        .iter()
        .filter_map(|t| tip_winding(&t.points, scales))
        .map(|row| row.iter().map(|v| v - row[0]).collect())
        .collect();
    if rows.len() < MIN_TRACES {
        return Err(Error::InsufficientData(format!("only {} traces reach scale {}", rows.len(), scales[0])));
    }
    let m = rows.len() as f64;
    let means: Vec<f64> = (0..scales.len()).map(|k| rows.iter().map(|r| r[k]).sum::<f64>() / m).collect();
    let variances: Vec<f64> = (0..scales.len())
        .map(|k| rows.iter().map(|r| (r[k] - means[k]).powi(2)).sum::<f64>() / (m - 1.0))
        .collect();
    let logs: Vec<f64> = scales.iter().map(|s| (scales[0] / s).ln()).collect();
    let line = fit_line(&logs, &variances, Weights::Uniform)?;
    let mean_line = fit_line(&logs, &means, Weights::Uniform)?;
    Ok(WindingSeries {
        scales: scales.to_vec(),
        means,
        variances,
        samples: rows.len(),
        fit: FitResult {
            exponent: line.slope,
            stderr: line.slope_stderr,
            window: (scales[scales.len() - 1], scales[0]),
            r_squared: line.r_squared,
            points: scales.len(),
        },
        mean_slope: mean_line.slope,
    })
}

/// Number of boxes of side `size` met by the polyline.
pub fn box_count(points: &[Complex64], size: f64) -> usize {
    let mut boxes = rustc_hash::FxHashSet::default();
    let cell = |z: Complex64| ((z.re / size).floor() as i64, (z.im / size).floor() as i64);
    if let Some(&first) = points.first() {
        boxes.insert(cell(first));
    }
    for w in points.windows(2) {
        let d = w[1] - w[0];
        let pieces = ((d.norm() / (0.25 * size)).ceil() as usize).max(1);
        for k in 1..=pieces {
            boxes.insert(cell(w[0] + d * (k as f64 / pieces as f64)));
        }
    }
    boxes.len()
}

/// Box-counting dimension over dyadic sizes, averaged over traces:
/// slope of ln⟨N(ε)⟩ against ln(1/ε).
pub fn trace_dimension(traces: &[Trace], sizes: &[f64]) -> Result<FitResult> {
    if traces.is_empty() {
        return Err(Error::InsufficientData("no traces".into()));
    }
    if sizes.len() < 4 {
        return Err(Error::InsufficientData(format!("need at least 4 box sizes, got {}", sizes.len())));
    }
    let smallest = sizes.iter().cloned().fold(f64::INFINITY, f64::min);
    let largest = sizes.iter().cloned().fold(0.0, f64::max);
    if largest / smallest < 100.0 * (1.0 - 1e-12) {
        return Err(Error::InsufficientData("box sizes must span at least two decades".into()));
    }
    let counts: Vec<Vec<f64>> = traces
        .par_iter()
        .map(|t| sizes.iter().map(|&s| box_count(&t.points, s) as f64).collect())
        .collect();
    let m = counts.len() as f64;
    let xs: Vec<f64> = sizes.iter().map(|s| -s.ln()).collect();
    let means: Vec<f64> = (0..sizes.len()).map(|k| counts.iter().map(|c| c[k]).sum::<f64>() / m).collect();
    let ys: Vec<f64> = means.iter().map(|v| v.ln()).collect();
    let line = fit_line(&xs, &ys, Weights::Uniform)?;
    Ok(FitResult {
        exponent: line.slope,
        stderr: line.slope_stderr,
        window: (smallest, largest),
        r_squared: line.r_squared,
        points: sizes.len(),
    })
}

/// Box sizes for unit-capacity traces: eight dyadic sizes from 1/2 down,
/// spanning 2.1 decades.
pub fn default_box_sizes() -> Vec<f64> {
    dyadic_scales(0.5, 0.5 / 128.0)
}

/// Minimum distance between trace points whose indices differ by at least
/// `gap`.
pub fn min_separation(points: &[Complex64], gap: usize) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in (i + gap)..points.len() {
            best = best.min((points[i] - points[j]).norm());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_kappa_drive() {
        let d = sample_drive(0.0, 0.01, 100, 1, DriveMode::Gaussian).unwrap();
        assert!(d.increments.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn binomial_variance_is_exact() {
        let d = sample_drive(3.0, 0.01, 1000, 5, DriveMode::Binomial).unwrap();
        let sum_sq: f64 = d.increments.iter().map(|x| x * x).sum();
        assert!((sum_sq - 3.0 * 0.01 * 1000.0).abs() < 1e-9);
    }

    #[test]
    fn gaussian_variance() {
        let d = sample_drive(2.0, 0.5, 1_000_000, 9, DriveMode::Gaussian).unwrap();
        let n = d.steps() as f64;
        let var = d.increments.iter().map(|x| x * x).sum::<f64>() / n;
        // sample variance of a Gaussian has relative error √(2/n)
        assert!((var - 1.0).abs() < 3.0 * (2.0 / n).sqrt(), "{var}");
    }

    #[test]
    fn drive_errors() {
        assert!(sample_drive(1.0, 0.0, 10, 0, DriveMode::Binomial).is_err());
        assert!(sample_drive(1.0, 0.1, 0, 0, DriveMode::Binomial).is_err());
        assert!(sample_drive(-1.0, 0.1, 10, 0, DriveMode::Binomial).is_err());
    }

    #[test]
    fn straight_slit() {
        let d = sample_drive(0.0, 1.0 / 256.0, 256, 0, DriveMode::Binomial).unwrap();
        let t = trace_from_drive(&d).unwrap();
        for (k, z) in t.points.iter().enumerate() {
            assert!(z.re.abs() < 1e-9);
            assert!((z.im - 2.0 * (k as f64 / 256.0).sqrt()).abs() < 1e-9, "{k} {z}");
        }
    }

    #[test]
    fn constant_drive_translates() {
        let mut inc = vec![0.0; 64];
        inc[0] = 0.7;
        let d = LoewnerDrive::from_increments(1.0 / 64.0, 1.0, inc).unwrap();
        let t = trace_from_drive(&d).unwrap();
        for (k, z) in t.points.iter().enumerate().skip(1) {
            assert!((z.re - 0.7).abs() < 1e-9);
            assert!((z.im - 2.0 * (k as f64 / 64.0).sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn single_step() {
        let d = LoewnerDrive::from_increments(0.09, 1.0, vec![-0.4]).unwrap();
        let t = trace_from_drive(&d).unwrap();
        assert_eq!(t.points.len(), 2);
        assert!((t.points[1] - Complex64::new(-0.4, 0.6)).norm() < 1e-12);
    }

    #[test]
    fn traces_stay_in_half_plane() {
        for kappa in [2.0, 6.0, 8.0] {
            let d = sample_drive(kappa, 1.0 / 1024.0, 1024, 3, DriveMode::Gaussian).unwrap();
            let t = trace_from_drive(&d).unwrap();
            assert_eq!(t.points[0], Complex64::new(0.0, 0.0));
            assert!(t.points.iter().all(|z| z.im >= 0.0));
        }
    }

    #[test]
    fn scale_covariance() {
        let d = sample_drive(4.0, 1.0 / 512.0, 512, 2, DriveMode::Binomial).unwrap();
        let base = trace_from_drive(&d).unwrap();
        let scaled = trace_from_drive(&d.rescaled(3.0)).unwrap();
        for (a, b) in base.points.iter().zip(&scaled.points) {
            assert!((a * 3.0 - b).norm() < 1e-9);
        }
    }

    #[test]
    fn reflection_symmetry() {
        let d = sample_drive(6.0, 1.0 / 512.0, 512, 4, DriveMode::Binomial).unwrap();
        let base = trace_from_drive(&d).unwrap();
        let mirror = trace_from_drive(&d.reflected()).unwrap();
        for (a, b) in base.points.iter().zip(&mirror.points) {
            assert_eq!(a.re, -b.re);
            assert_eq!(a.im, b.im);
        }
    }

    #[test]
    fn straight_traces_do_not_wind() {
        let traces: Vec<Trace> = (0..MIN_TRACES)
            .map(|_| trace_from_drive(&sample_drive(0.0, 1.0 / 1024.0, 1024, 0, DriveMode::Binomial).unwrap()).unwrap())
            .collect();
        let series = winding_statistics(&traces, &dyadic_scales(0.5, 0.05)).unwrap();
        assert!(series.variances.iter().all(|&v| v == 0.0));
        assert_eq!(series.fit.exponent, 0.0);
        assert!(winding_statistics(&traces[..5], &series.scales).is_err());
    }

    fn spiral(rate: f64, phase: f64) -> Trace {
        // r = e^{-u}, angle = rate·u; tip at the origin, traversed inwards
        let points: Vec<Complex64> = (0..=20_000)
            .map(|k| {
                let u = k as f64 * 1e-3;
                Complex64::from_polar((-u).exp(), rate * u + phase)
            })
            .chain(std::iter::once(Complex64::new(0.0, 0.0)))
            .collect();
        let capacities = (0..points.len()).map(|k| k as f64).collect();
        Trace { points, capacities }
    }

    #[test]
    fn logarithmic_spiral_oracle() {
        let rate = 1.5;
        let traces: Vec<Trace> = (0..MIN_TRACES).map(|k| spiral(rate, k as f64 * 0.2)).collect();
        let scales = dyadic_scales(0.5, 1e-6);
        let series = winding_statistics(&traces, &scales).unwrap();
        assert!(series.variances.iter().all(|&v| v < 1e-20));
        assert!((series.mean_slope - rate).abs() < 1e-2, "{}", series.mean_slope);
    }

    #[test]
    fn straight_dimension() {
        let d = sample_drive(0.0, 1.0 / 4096.0, 4096, 0, DriveMode::Binomial).unwrap();
        let t = trace_from_drive(&d).unwrap();
        let fit = trace_dimension(&[t], &dyadic_scales(0.2, 0.001)).unwrap();
        assert!((fit.exponent - 1.0).abs() < 0.02, "{fit:?}");
    }

    fn koch_trace(level: u32) -> Trace {
        let mut pts = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        let rot = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3);
        for _ in 0..level {
            let mut next = vec![pts[0]];
            for w in pts.windows(2) {
                let d = (w[1] - w[0]) / 3.0;
                let p1 = w[0] + d;
                next.extend([p1, p1 + d * rot, w[0] + d * 2.0, w[1]]);
            }
            pts = next;
        }
        let capacities = (0..pts.len()).map(|k| k as f64).collect();
        Trace { points: pts, capacities }
    }

    #[test]
    fn koch_box_dimension() {
        let t = koch_trace(8);
        let sizes: Vec<f64> = (2..=7).map(|k| 3f64.powi(-k)).collect();
        let fit = trace_dimension(&[t], &sizes).unwrap();
        let target = 4f64.ln() / 3f64.ln();
        assert!((fit.exponent - target).abs() < 0.02, "{fit:?}");
    }

    #[test]
    fn dimension_needs_two_decades() {
        let t = koch_trace(3);
        assert!(trace_dimension(&[t], &[0.1, 0.05, 0.025, 0.0125]).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let config = SleConfig { kappa: 6.0, steps: 256, traces: 4, seed: 17, mode: DriveMode::Binomial };
        assert_eq!(sample_traces(&config).unwrap(), sample_traces(&config).unwrap());
    }
}
