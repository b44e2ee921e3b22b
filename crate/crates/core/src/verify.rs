//! The acceptance suite: eight exact-algebra criteria and seven seeded Monte
//! Carlo criteria, each reported as a list of numeric checks.

use std::collections::HashMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::algebra::{kpz_inverse, Frame, Locus};
use crate::error::Result;
use crate::harmonic::{ep_harmonic_campaign, moments, EpHarmonicConfig, HitHistogram};
use crate::models::{
    brownian_zeta, cpa_beta, geometry_dims, model_point, packet_zeta, perc_crossing, sle_star_moment, watermelon,
    ModelSpec, PottsKind,
};
use crate::percsim::{run_campaign, PercConfig};
use crate::rng::{stream, Domain};
use crate::slesim::{default_box_sizes, default_winding_scales, sample_traces, trace_dimension, winding_statistics, SleConfig};
use crate::spectra::{
    b_of_c, default_order_grid, dual_order, ep_dimension, legendre_numeric, mf_dimension, mf_spectrum, mf_tau,
    mixed_spectrum, rare_site_exponent, Curve,
};
use crate::walksim::{death_times, default_window, exact_survival, fit_exponent, survival_from_deaths, Geometry, WalkConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Exact,
    Mc,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Budget {
    /// The stated sample sizes and tolerances.
    Full,
    /// Reduced samples; tolerances widened by √(full/fast samples).
    Fast,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Condition {
    Within { target: f64, tolerance: f64 },
    AtLeast { bound: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub condition: Condition,
    pub passed: bool,
}

impl Check {
    pub fn within(label: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        let passed = (value - target).abs() <= tolerance;
        Self { label: label.into(), value, condition: Condition::Within { target, tolerance }, passed }
    }

    pub fn at_least(label: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { label: label.into(), value, condition: Condition::AtLeast { bound }, passed: value >= bound }
    }

    fn exact(label: impl Into<String>, value: f64, target: f64) -> Self {
        Self::within(label, value, target, EXACT_TOL * target.abs().max(1.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u32,
    pub title: String,
    pub monte_carlo: bool,
    pub checks: Vec<Check>,
    pub error: Option<String>,
    pub passed: bool,
    pub seconds: f64,
}

impl CriterionReport {
    /// One line: id, verdict, title and the worst check.
    pub fn summary(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let detail = match (&self.error, self.checks.iter().find(|c| !c.passed)) {
            (Some(e), _) => format!("error: {e}"),
            (None, Some(c)) => describe(c),
            (None, None) if self.checks.len() == 1 => "1 check".to_string(),
            (None, None) => format!("{} checks", self.checks.len()),
        };
        format!("criterion {:>2} {verdict} {} [{detail}] ({:.1} s)", self.id, self.title, self.seconds)
    }
}

fn describe(c: &Check) -> String {
    match c.condition {
        Condition::Within { target, tolerance } => {
            format!("{}: {:.6} vs {:.6} ± {:.3e}", c.label, c.value, target, tolerance)
        }
        Condition::AtLeast { bound } => format!("{}: {:.6} < {:.6}", c.label, c.value, bound),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub budget: Budget,
    pub criteria: Vec<CriterionReport>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn table(&self) -> String {
        self.criteria.iter().map(|c| c.summary() + "\n").collect()
    }
}

const EXACT_TOL: f64 = 1e-12;
pub const DEFAULT_SEED: u64 = 42;

/// (id, title, Monte Carlo?)
pub const CRITERIA: [(u32, &str, bool); 15] = [
    (1, "Table 1 reproduction", false),
    (2, "Brownian landmarks", false),
    (3, "percolation crossings", false),
    (4, "harmonic spectrum landmarks", false),
    (5, "duality battery", false),
    (6, "bulk-boundary relations", false),
    (7, "Legendre consistency", false),
    (8, "mixed-spectrum scaling law", false),
    (9, "percolation hull dimension", true),
    (10, "accessible perimeter dimension", true),
    (11, "harmonic measure on percolation EP", true),
    (12, "random-walk non-intersection", true),
    (13, "SLE winding variance", true),
    (14, "SLE trace dimension", true),
    (15, "oracle equivalence", true),
];

pub fn selected(tier: Tier) -> Vec<u32> {
    CRITERIA
        .iter()
        .filter(|(_, _, mc)| match tier {
            Tier::Exact => !mc,
            Tier::Mc => *mc,
            Tier::All => true,
        })
        .map(|c| c.0)
        .collect()
}

pub fn verify(tier: Tier, budget: Budget, seed: u64) -> VerifyReport {
    verify_each(tier, budget, seed, |_| {})
}

/// As [`verify`], calling `on_report` as each criterion finishes.
pub fn verify_each(tier: Tier, budget: Budget, seed: u64, mut on_report: impl FnMut(&CriterionReport)) -> VerifyReport {
    let mut suite = Suite::new(budget, seed);
    let criteria = selected(tier)
        .into_iter()
        .map(|id| {
            let report = suite.run(id);
            on_report(&report);
            report
        })
        .collect();
    VerifyReport { seed, budget, criteria }
}

pub fn run_criterion(id: u32, budget: Budget, seed: u64) -> CriterionReport {
    Suite::new(budget, seed).run(id)
}

/// Sample budgets for the Monte Carlo criteria.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Plan {
    perc_clusters: usize,
    harmonic_fields: usize,
    harmonic_walkers: u64,
    bulk_samples: u64,
    half_plane_samples: u64,
    sle_traces: usize,
    oracle_samples: u64,
}

const FULL: Plan = Plan {
    perc_clusters: 200,
    harmonic_fields: 20,
    harmonic_walkers: 1_000_000,
    bulk_samples: 1_000_000,
    half_plane_samples: 10_000_000,
    sle_traces: 200,
    oracle_samples: 1_000_000,
};

const FAST: Plan = Plan {
    perc_clusters: 40,
    harmonic_fields: 5,
    harmonic_walkers: 200_000,
    bulk_samples: 100_000,
    half_plane_samples: 1_000_000,
    sle_traces: 40,
    oracle_samples: 200_000,
};

impl Plan {
    fn of(budget: Budget) -> Self {
        match budget {
            Budget::Full => FULL,
            Budget::Fast => FAST,
        }
    }
}

fn widen(full: f64, fast: f64) -> f64 {
    (full / fast).sqrt()
}

struct SleStats {
    winding: Result<f64>,
    dimension: Result<f64>,
}

struct Suite {
    budget: Budget,
    plan: Plan,
    seed: u64,
    perc: Option<Result<(f64, f64, f64, f64)>>,
    sle: HashMap<u64, SleStats>,
}

impl Suite {
    fn new(budget: Budget, seed: u64) -> Self {
        Self { budget, plan: Plan::of(budget), seed, perc: None, sle: HashMap::new() }
    }

    /// Tolerance multiplier for a Monte Carlo sample count.
    fn scale(&self, full: f64, fast: f64) -> f64 {
        match self.budget {
            Budget::Full => 1.0,
            Budget::Fast => widen(full, fast),
        }
    }

    fn run(&mut self, id: u32) -> CriterionReport {
        let (_, title, monte_carlo) = CRITERIA[(id - 1) as usize];
        let start = Instant::now();
        let outcome = match id {
            1 => table_one(),
            2 => brownian_landmarks(),
            3 => percolation_crossings(),
            4 => spectrum_landmarks(),
            5 => duality_battery(),
            6 => bulk_boundary(),
            7 => legendre_consistency(),
            8 => mixed_scaling(),
            9 => self.hull(),
            10 => self.perimeter(),
            11 => self.harmonic(),
            12 => self.walks(),
            13 => self.winding(),
            14 => self.sle_dimension(),
            15 => self.oracles(),
            _ => unreachable!("criteria are numbered 1 to 15"),
        };
        let (checks, error) = match outcome {
            Ok(checks) => (checks, None),
            Err(e) => (Vec::new(), Some(e.to_string())),
        };
        let passed = error.is_none() && !checks.is_empty() && checks.iter().all(|c| c.passed);
        CriterionReport {
            id,
            title: title.to_string(),
            monte_carlo,
            checks,
            error,
            passed,
            seconds: start.elapsed().as_secs_f64(),
        }
    }

    fn percolation(&mut self) -> Result<(f64, f64, f64, f64)> {
        if self.perc.is_none() {
            let config = PercConfig::new(1024, self.plan.perc_clusters, self.seed);
            self.perc = Some(run_campaign(&config).map(|c| (c.hull_fit.exponent, c.hull_fit.stderr, c.ep_fit.exponent, c.ep_fit.stderr)));
        }
        self.perc.clone().expect("filled above")
    }

    fn hull(&mut self) -> Result<Vec<Check>> {
        let (hull, _, _, _) = self.percolation()?;
        let tol = 0.05 * self.scale(FULL.perc_clusters as f64, FAST.perc_clusters as f64);
        Ok(vec![Check::within("D_H", hull, 1.75, tol)])
    }

    fn perimeter(&mut self) -> Result<Vec<Check>> {
        let (hull, hull_err, ep, ep_err) = self.percolation()?;
        let tol = 0.05 * self.scale(FULL.perc_clusters as f64, FAST.perc_clusters as f64);
        let separation = (hull - ep) / hull_err.hypot(ep_err);
        Ok(vec![Check::within("D_EP", ep, 4.0 / 3.0, tol), Check::at_least("(D_H − D_EP)/σ", separation, 3.0)])
    }

    fn harmonic(&mut self) -> Result<Vec<Check>> {
        let config = EpHarmonicConfig::new(1024, self.plan.harmonic_fields, self.plan.harmonic_walkers, self.seed);
        let campaign = ep_harmonic_campaign(&config)?;
        let full = FULL.harmonic_fields as f64 * FULL.harmonic_walkers as f64;
        let fast = FAST.harmonic_fields as f64 * FAST.harmonic_walkers as f64;
        let tol = 0.03 * self.scale(full, fast);
        let mut checks = Vec::new();
        for n in [2.0, 4.0, 6.0, 8.0] {
            let fit = campaign.fits.iter().find(|f| f.order == n).expect("default orders include 2, 4, 6, 8");
            let measured = fit.dimension.expect("n ≠ 1");
            checks.push(Check::within(format!("D({n})"), measured, mf_dimension(0.0, n)?, tol));
        }
        Ok(checks)
    }

    fn walks(&mut self) -> Result<Vec<Check>> {
        let bulk = WalkConfig::new(vec![1, 1], Geometry::Plane, 100_000, self.plan.bulk_samples, self.seed)?;
        let deaths = death_times(&bulk)?;
        let fit = fit_exponent(&survival_from_deaths(&deaths, bulk.max_time), default_window(bulk.max_time))?;
        let half = WalkConfig::new(vec![1, 1], Geometry::HalfPlane, 1024, self.plan.half_plane_samples, self.seed)?;
        let deaths = death_times(&half)?;
        let half_fit = fit_exponent(&survival_from_deaths(&deaths, half.max_time), (16.0, 1024.0))?;
        let bulk_tol = 0.06 * self.scale(FULL.bulk_samples as f64, FAST.bulk_samples as f64);
        let half_tol = 0.15 * self.scale(FULL.half_plane_samples as f64, FAST.half_plane_samples as f64);
        Ok(vec![
            Check::within("ζ₂", fit.exponent, brownian_zeta(2.0, Locus::Bulk)?, bulk_tol),
            Check::within("ζ̃₂ half-plane time exponent", half_fit.exponent, brownian_zeta(2.0, Locus::Boundary)? / 2.0, half_tol),
        ])
    }

    fn sle(&mut self, kappa: f64) -> &SleStats {
        let traces = self.plan.sle_traces;
        let seed = self.seed;
        self.sle.entry(kappa.to_bits()).or_insert_with(|| {
            let config = SleConfig::new(kappa, traces, seed);
            match sample_traces(&config) {
                Ok(traces) => SleStats {
                    winding: winding_statistics(&traces, &default_winding_scales(config.dt())).map(|w| w.fit.exponent),
                    dimension: trace_dimension(&traces, &default_box_sizes()).map(|f| f.exponent),
                },
                Err(e) => SleStats { winding: Err(e.clone()), dimension: Err(e) },
            }
        })
    }

    fn winding(&mut self) -> Result<Vec<Check>> {
        let widen = self.scale(FULL.sle_traces as f64, FAST.sle_traces as f64);
        let mut checks = Vec::new();
        for kappa in [2.0, 8.0 / 3.0, 6.0] {
            let slope = self.sle(kappa).winding.clone()?;
            checks.push(Check::within(format!("variance slope κ={kappa:.4}"), slope, kappa, 0.15 * kappa * widen));
        }
        Ok(checks)
    }

    fn sle_dimension(&mut self) -> Result<Vec<Check>> {
        let widen = self.scale(FULL.sle_traces as f64, FAST.sle_traces as f64);
        let mut checks = Vec::new();
        for kappa in [8.0 / 3.0, 6.0] {
            let dim = self.sle(kappa).dimension.clone()?;
            checks.push(Check::within(format!("box dimension κ={kappa:.4}"), dim, 1.0 + kappa / 8.0, 0.10 * widen));
        }
        Ok(checks)
    }

    fn oracles(&mut self) -> Result<Vec<Check>> {
        let mut checks = Vec::new();
        let cases: [(&[u32], Geometry); 3] =
            [(&[1, 1], Geometry::Plane), (&[2, 1], Geometry::Plane), (&[1, 1], Geometry::HalfPlane)];
        for (case, (packets, geometry)) in cases.into_iter().enumerate() {
            let exact = exact_survival(packets, geometry, 4)?;
            let config = WalkConfig::new(packets.to_vec(), geometry, 4, self.plan.oracle_samples, self.seed.wrapping_add(case as u64))?;
            let deaths = death_times(&config)?;
            let total = deaths.len() as f64;
            for (t, &p) in exact.iter().enumerate() {
                let t = t as u64 + 1;
                let alive = deaths.iter().filter(|&&d| d > t).count() as f64 / total;
                let sigma = (p * (1.0 - p) / total).sqrt().max(1.0 / total);
                checks.push(Check::within(format!("survival {packets:?} {geometry:?} t={t}"), alive, p, 3.0 * sigma));
            }
        }
        checks.extend(moment_oracle(self.seed)?);
        checks.extend(legendre_checks()?);
        Ok(checks)
    }
}

fn table_one() -> Result<Vec<Check>> {
    let rows = [
        (0.0, 5.0 / 4.0, 2.0, 5.0 / 4.0),
        (1.0, 4.0 / 3.0, 7.0 / 4.0, 3.0 / 4.0),
        (2.0, 11.0 / 8.0, 5.0 / 3.0, 13.0 / 24.0),
        (3.0, 17.0 / 12.0, 8.0 / 5.0, 7.0 / 20.0),
        (4.0, 1.5, 1.5, 0.0),
    ];
    let mut checks = Vec::new();
    for (q, ep, hull, sc) in rows {
        let dims = geometry_dims(&model_point(ModelSpec::Potts { q, kind: PottsKind::Critical })?);
        checks.push(Check::exact(format!("D_EP Q={q}"), dims.d_ep, ep));
        checks.push(Check::exact(format!("D_H Q={q}"), dims.d_hull, hull));
        checks.push(Check::exact(format!("D_SC Q={q}"), dims.d_sc, sc));
    }
    Ok(checks)
}

fn brownian_landmarks() -> Result<Vec<Check>> {
    Ok(vec![
        Check::exact("ζ₁", brownian_zeta(1.0, Locus::Bulk)?, 1.0 / 8.0),
        Check::exact("ζ̃₁", brownian_zeta(1.0, Locus::Boundary)?, 1.0),
        Check::exact("ζ_{3/2}", brownian_zeta(1.5, Locus::Bulk)?, 1.0 / 3.0),
        Check::exact("ζ(2,1)", packet_zeta(&[2.0, 1.0], Locus::Bulk)?, 1.0),
        Check::exact("frontier dimension", 2.0 - 2.0 * brownian_zeta(1.5, Locus::Bulk)?, 4.0 / 3.0),
    ])
}

fn percolation_crossings() -> Result<Vec<Check>> {
    let mut checks = vec![
        Check::exact("x̃₁", perc_crossing(1, Locus::Boundary)?, 1.0 / 3.0),
        Check::exact("x̃₂", perc_crossing(2, Locus::Boundary)?, 1.0),
        Check::exact("x̃₃", perc_crossing(3, Locus::Boundary)?, 2.0),
        Check::exact("x₂", perc_crossing(2, Locus::Bulk)?, 0.25),
        Check::exact("x₃", perc_crossing(3, Locus::Bulk)?, 2.0 / 3.0),
    ];
    for l in 1..=3 {
        checks.push(Check::exact(
            format!("2ζ_{l} = x_{}", 2 * l),
            2.0 * brownian_zeta(l as f64, Locus::Bulk)?,
            perc_crossing(2 * l, Locus::Bulk)?,
        ));
    }
    Ok(checks)
}

fn spectrum_landmarks() -> Result<Vec<Check>> {
    let mut checks = vec![
        Check::exact("D(2; c=0)", mf_dimension(0.0, 2.0)?, 11.0 / 12.0),
        Check::exact("D(0; c=0)", mf_dimension(0.0, 0.0)?, 4.0 / 3.0),
        Check::exact("β", cpa_beta(0.0)?, 11.0 / 16.0),
        Check::exact("τ*", rare_site_exponent(0.0)?.1, 23.0 / 24.0),
        Check::exact("f(3; c=0)", mf_spectrum(0.0, 3.0)?, 4.0 / 3.0),
    ];
    for c in [-2.0, 0.0, 0.5, 1.0] {
        checks.push(Check::exact(format!("f(1; c={c})"), mf_spectrum(c, 1.0)?, 1.0));
    }
    Ok(checks)
}

fn duality_battery() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for kappa in [16.0 / 3.0, 6.0, 8.0] {
        let dims = geometry_dims(&model_point(ModelSpec::Kappa(kappa))?);
        checks.push(Check::exact(format!("(D_EP−1)(D_H−1) κ={kappa:.4}"), (dims.d_ep - 1.0) * (dims.d_hull - 1.0), 0.25));
        for n in [0.0, 0.5, 1.0, 2.0, 5.0] {
            let dense = sle_star_moment(kappa, 2, n, Locus::Bulk, false)?;
            let dilute = sle_star_moment(16.0 / kappa, 2, n, Locus::Bulk, false)?;
            checks.push(Check::exact(format!("x(2∧{n}) κ={kappa:.4} vs 16/κ"), dense, dilute));
        }
    }
    Ok(checks)
}

/// Quantum-gravity watermelon weights recovered from planar ones by the
/// inverse KPZ map, then compared across bulk and boundary.
fn bulk_boundary() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for kappa in [2.0, 8.0 / 3.0, 6.0, 8.0] {
        let model = model_point(ModelSpec::Kappa(kappa))?;
        let gamma = model.gamma;
        for legs in 1..=6 {
            let boundary = watermelon(&model, legs, Locus::Boundary, Frame::Planar)?.value;
            let bulk = watermelon(&model, legs, Locus::Bulk, Frame::Planar)?.value;
            let qg_boundary = kpz_inverse(gamma, boundary)?;
            let qg_bulk = kpz_inverse(gamma, 0.5 * bulk)?;
            let predicted = if kappa <= 4.0 { 2.0 * qg_bulk - gamma } else { 2.0 * qg_bulk };
            checks.push(Check::exact(format!("Δ̃_{legs} κ={kappa:.4}"), qg_boundary, predicted));
        }
    }
    Ok(checks)
}

fn legendre_checks() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for c in [-2.0, 0.0, 0.5, 1.0] {
        let tau = Curve::sample(&default_order_grid(c), |n| mf_tau(c, n))?;
        let spectrum = legendre_numeric(&tau)?;
        let worst = spectrum
            .points()
            .iter()
            .filter(|p| (0.6..=10.0).contains(&p.x))
            .map(|p| mf_spectrum(c, p.x).map(|f| (p.y - f).abs()))
            .try_fold(0.0f64, |acc, d| d.map(|d| acc.max(d)))?;
        checks.push(Check::within(format!("numeric Legendre c={c}"), worst, 0.0, 1e-6));
    }
    Ok(checks)
}

fn legendre_consistency() -> Result<Vec<Check>> {
    let mut checks = legendre_checks()?;
    for c in [-2.0, 0.0, 0.5, 1.0] {
        for alpha in [0.6, 0.8, 1.5, 3.0, 7.0] {
            let dual = alpha / (2.0 * alpha - 1.0);
            let lhs = mf_spectrum(c, alpha)? - alpha;
            let rhs = mf_spectrum(c, dual)? - dual;
            checks.push(Check::within(format!("f(α)−α symmetry c={c} α={alpha}"), lhs, rhs, 1e-9));
        }
        for n in [0.25, 0.5, 1.0, 2.0, 8.0] {
            let sum = mf_dimension(c, n)? + mf_dimension(c, dual_order(c, n)?)?;
            checks.push(Check::within(format!("D(n)+D(n′) c={c} n={n}"), sum, 2.0, 1e-9));
        }
    }
    Ok(checks)
}

/// Maximum of a unimodal function on `[lo, hi]` by golden-section search.
fn golden_max(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    for _ in 0..200 {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = f(b)?;
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = f(a)?;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(fa.max(fb))
}

fn mixed_scaling() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for c in [-2.0, 0.0, 0.5, 1.0] {
        let b = b_of_c(c);
        for lambda in [0.0, 0.3, 0.7, 1.2] {
            let stretch = 1.0 + lambda * lambda;
            for ratio in [0.55, 0.8, 1.0, 2.0, 5.0, 20.0] {
                let alpha = ratio * stretch;
                let lhs = mixed_spectrum(c, alpha, lambda)?;
                let rhs = stretch * mf_spectrum(c, alpha / stretch)? - b * lambda * lambda;
                checks.push(Check::within(format!("f(α,λ) c={c} λ={lambda} α={alpha:.3}"), lhs, rhs, 1e-10));
            }
            // at c = 1 the supremum is approached only as α → ∞
            if c == 1.0 {
                continue;
            }
            let sup = golden_max(|a| mixed_spectrum(c, a, lambda), 0.5 * stretch + 1e-9, 1e4)?;
            checks.push(Check::within(format!("sup_α f(α,λ) c={c} λ={lambda}"), sup, ep_dimension(c, lambda)?, 1e-9));
        }
    }
    Ok(checks)
}

/// Z_n of a random histogram against a direct sum over an independently
/// built ball partition.
fn moment_oracle(seed: u64) -> Result<Vec<Check>> {
    use rand::Rng;
    let mut rng = stream(seed, Domain::Oracle, 0);
    let sites: Vec<(i32, i32)> = (0..400).map(|k| (k % 20 * 2, k / 20 * 2)).collect();
    let counts: Vec<u64> = (0..400).map(|_| rng.random_range(0..40)).collect();
    let hist = HitHistogram::from_counts(sites.clone(), counts.clone())?;
    let orders = [0.5, 2.0, 3.0, 6.0];
    let radii = [2.0, 3.5, 7.0];
    let table = moments(&hist, &radii, &orders)?;
    let total: u64 = counts.iter().sum();
    let mut checks = Vec::new();
    for (r_idx, &r) in radii.iter().enumerate() {
        let mut claimed = vec![false; sites.len()];
        let mut masses = Vec::new();
        for i in 0..sites.len() {
            if claimed[i] {
                continue;
            }
            let p = crate::percsim::position(sites[i]);
            let mut mass = 0;
            for j in 0..sites.len() {
                let q = crate::percsim::position(sites[j]);
                if !claimed[j] && (p.0 - q.0).powi(2) + (p.1 - q.1).powi(2) < r * r {
                    claimed[j] = true;
                    mass += counts[j];
                }
            }
            masses.push(mass);
        }
        for (n_idx, &n) in orders.iter().enumerate() {
            let direct: f64 = masses.iter().filter(|&&m| m > 0).map(|&m| (m as f64 / total as f64).powf(n)).sum();
            checks.push(Check::within(format!("Z_{n}(r={r})"), table.values[r_idx][n_idx], direct, 0.0));
        }
    }
    Ok(checks)
}
