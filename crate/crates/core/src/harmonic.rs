//! Harmonic measure of a lattice absorber by first-hit random walkers, and
//! its multifractal moments.
//!
//! Walkers live on the triangular lattice of [`crate::percsim`]. Far from the
//! absorber they jump to a uniform point on the largest circle that cannot
//! reach it; within a few lattice units they take nearest-neighbour steps.

use std::collections::VecDeque;
use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{fit_line, FitResult, Weights};
use crate::percsim::{conditioned_clusters, position, PercConfig, Site, NEIGHBORS};
use crate::rng::{stream, Domain};

const SQRT3_2: f64 = 0.866_025_403_784_438_6;
/// Lattice margin around the absorber covered by the distance map.
const WINDOW_MARGIN: i32 = 32;
/// Slack for rounding a continuum point to the nearest site.
const ROUNDING_SLACK: f64 = 1.5;
/// Smallest jump worth taking instead of a lattice step.
const MIN_JUMP: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicConfig {
    pub walkers: u64,
    pub seed: u64,
    /// Distinguishes absorbers sampled under one seed.
    pub stream: u64,
    pub launch_factor: f64,
    pub kill_factor: f64,
    /// Moves after which a walker is censored.
    pub max_moves: u64,
}

impl HarmonicConfig {
    pub fn new(walkers: u64, seed: u64) -> Self {
        Self { walkers, seed, stream: 0, launch_factor: 2.0, kill_factor: 8.0, max_moves: 1_000_000 }
    }

    fn validate(&self) -> Result<()> {
        if self.walkers == 0 {
            return Err(Error::Config("at least one walker is required".into()));
        }
        if !(self.launch_factor >= 1.0 && self.kill_factor > self.launch_factor) {
            return Err(Error::Config(format!(
                "need 1 ≤ launch factor < kill factor, got {} and {}",
                self.launch_factor, self.kill_factor
            )));
        }
        if self.stream >= 1 << 24 {
            return Err(Error::Config("absorber stream index must be below 2^24".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HitHistogram {
    /// Absorber sites in their given order.
    pub sites: Vec<Site>,
    pub counts: Vec<u64>,
    pub walkers: u64,
    pub absorbed: u64,
    pub censored: u64,
    pub launch_radius: f64,
    pub set_radius: f64,
    pub center: (f64, f64),
}

impl HitHistogram {
    /// Histogram with given counts, for synthetic checks.
    pub fn from_counts(sites: Vec<Site>, counts: Vec<u64>) -> Result<Self> {
        if sites.len() != counts.len() || sites.is_empty() {
            return Err(Error::Config("sites and counts must be non-empty and of equal length".into()));
        }
        let absorbed = counts.iter().sum();
        let (center, set_radius) = extent(&sites);
        Ok(Self { sites, counts, walkers: absorbed, absorbed, censored: 0, launch_radius: 2.0 * set_radius, set_radius, center })
    }

    pub fn censor_rate(&self) -> f64 {
        self.censored as f64 / self.walkers as f64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,hits\n");
        for (s, c) in self.sites.iter().zip(&self.counts) {
            out.push_str(&format!("{},{},{}\n", s.0, s.1, c));
        }
        out
    }
}

fn extent(sites: &[Site]) -> ((f64, f64), f64) {
    let n = sites.len() as f64;
    let center = sites.iter().map(|&s| position(s)).fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
    let radius = sites
        .iter()
        .map(|&s| {
            let p = position(s);
            ((p.0 - center.0).powi(2) + (p.1 - center.1).powi(2)).sqrt()
        })
        .fold(0.0, f64::max);
    (center, radius)
}

/// Absorber geometry shared by all walkers.
struct Target {
    i0: i32,
    j0: i32,
    width: i32,
    height: i32,
    /// Hex distance to the nearest absorber site.
    distance: Vec<u16>,
    /// Absorber index per window slot, `u32::MAX` elsewhere.
    slot_index: Vec<u32>,
    bbox: (i32, i32, i32, i32),
    center: (f64, f64),
    set_radius: f64,
}

impl Target {
    fn new(sites: &[Site]) -> Result<Self> {
        let imin = sites.iter().map(|s| s.0).min().unwrap();
        let imax = sites.iter().map(|s| s.0).max().unwrap();
        let jmin = sites.iter().map(|s| s.1).min().unwrap();
        let jmax = sites.iter().map(|s| s.1).max().unwrap();
        let (i0, j0) = (imin - WINDOW_MARGIN, jmin - WINDOW_MARGIN);
        let width = imax - imin + 2 * WINDOW_MARGIN + 1;
        let height = jmax - jmin + 2 * WINDOW_MARGIN + 1;
        if width as i64 * height as i64 > 1 << 26 {
            return Err(Error::Config("absorber too large for the distance map".into()));
        }
        let len = (width * height) as usize;
        let mut distance = vec![u16::MAX; len];
        let mut slot_index = vec![u32::MAX; len];
        let mut queue = VecDeque::new();
        for (k, &s) in sites.iter().enumerate() {
            let slot = ((s.1 - j0) * width + (s.0 - i0)) as usize;
            if slot_index[slot] != u32::MAX {
                return Err(Error::Config(format!("absorber site {s:?} is repeated")));
            }
            slot_index[slot] = k as u32;
            distance[slot] = 0;
            queue.push_back((s.0 - i0, s.1 - j0));
        }
        while let Some((a, b)) = queue.pop_front() {
            let d = distance[(b * width + a) as usize];
            for (di, dj) in NEIGHBORS {
                let (na, nb) = (a + di, b + dj);
                if (0..width).contains(&na) && (0..height).contains(&nb) {
                    let k = (nb * width + na) as usize;
                    if distance[k] == u16::MAX {
                        distance[k] = d.saturating_add(1);
                        queue.push_back((na, nb));
                    }
                }
            }
        }
        let (center, set_radius) = extent(sites);
        Ok(Self { i0, j0, width, height, distance, slot_index, bbox: (imin, imax, jmin, jmax), center, set_radius })
    }

    fn slot(&self, s: Site) -> Option<usize> {
        let (a, b) = (s.0 - self.i0, s.1 - self.j0);
        ((0..self.width).contains(&a) && (0..self.height).contains(&b)).then(|| (b * self.width + a) as usize)
    }

    /// Lower bound on the Euclidean distance from `s` to the absorber.
    fn clearance(&self, s: Site, radial: f64) -> f64 {
        match self.slot(s) {
            Some(k) => self.distance[k] as f64 * SQRT3_2,
            None => {
                let (imin, imax, jmin, jmax) = self.bbox;
                let excess = (imin - s.0).max(s.0 - imax).max(jmin - s.1).max(s.1 - jmax).max(0);
                (excess as f64 * SQRT3_2).max(radial - self.set_radius)
            }
        }
    }
}

/// Lattice site nearest to a Euclidean point.
fn nearest_site(x: f64, y: f64) -> Site {
    let jf = y / SQRT3_2;
    let if_ = x - 0.5 * jf;
    let (jb, ib) = (jf.floor() as i32, if_.floor() as i32);
    let mut best = (ib, jb);
    let mut best_d = f64::INFINITY;
    for dj in 0..=1 {
        for di in 0..=1 {
            let s = (ib + di, jb + dj);
            let p = position(s);
            let d = (p.0 - x).powi(2) + (p.1 - y).powi(2);
            if d < best_d {
                best_d = d;
                best = s;
            }
        }
    }
    best
}

/// Angle on the circle of radius `inner` at which Brownian motion started at
/// radius `outer` and angle `phi` first hits it: a wrapped Cauchy law.
pub fn exterior_hit_angle(phi: f64, inner: f64, outer: f64, uniform: f64) -> f64 {
    let ratio = inner / outer;
    phi + 2.0 * (((1.0 - ratio) / (1.0 + ratio)) * (PI * (uniform - 0.5)).tan()).atan()
}

enum Fate {
    Absorbed(u32),
    Censored,
}

fn run_walker<R: Rng>(target: &Target, launch: f64, kill: f64, max_moves: u64, rng: &mut R) -> Fate {
    let (cx, cy) = target.center;
    let theta = 2.0 * PI * rng.random::<f64>();
    let mut site = nearest_site(cx + launch * theta.cos(), cy + launch * theta.sin());
    for _ in 0..max_moves {
        let p = position(site);
        let (dx, dy) = (p.0 - cx, p.1 - cy);
        let radial = dx.hypot(dy);
        if radial >= kill {
            let angle = exterior_hit_angle(dy.atan2(dx), launch, radial, rng.random::<f64>());
            site = nearest_site(cx + launch * angle.cos(), cy + launch * angle.sin());
            continue;
        }
        if let Some(k) = target.slot(site) {
            let hit = target.slot_index[k];
            if hit != u32::MAX {
                return Fate::Absorbed(hit);
            }
        }
        let jump = target.clearance(site, radial) - ROUNDING_SLACK;
        if jump >= MIN_JUMP {
            let angle = 2.0 * PI * rng.random::<f64>();
            site = nearest_site(p.0 + jump * angle.cos(), p.1 + jump * angle.sin());
        } else {
            let (di, dj) = NEIGHBORS[rng.random_range(0..6)];
            site = (site.0 + di, site.1 + dj);
        }
    }
    Fate::Censored
}

const WALKER_CHUNK: u64 = 4096;

/// First-hit distribution of walkers launched uniformly on the circle of
/// radius `launch_factor·R` about the absorber centroid, `R` being the
/// absorber radius. Walkers beyond `kill_factor·R` are returned to the
/// launch circle with the exterior Poisson kernel.
pub fn first_hit_sampling(absorber: &[Site], config: &HarmonicConfig) -> Result<HitHistogram> {
    config.validate()?;
    if absorber.is_empty() {
        return Err(Error::Config("the absorber must be non-empty".into()));
    }
    let target = Target::new(absorber)?;
    let set_radius = target.set_radius.max(1.0);
    let launch = config.launch_factor * set_radius + 2.0;
    let kill = config.kill_factor * set_radius + 2.0;
    let chunks = config.walkers.div_ceil(WALKER_CHUNK);
    let (counts, censored) = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut counts = vec![0u64; absorber.len()];
            let mut censored = 0u64;
            let end = ((chunk + 1) * WALKER_CHUNK).min(config.walkers);
            for walker in chunk * WALKER_CHUNK..end {
                let mut rng = stream(config.seed, Domain::Harmonic, config.stream << 40 | walker);
                match run_walker(&target, launch, kill, config.max_moves, &mut rng) {
                    Fate::Absorbed(k) => counts[k as usize] += 1,
                    Fate::Censored => censored += 1,
                }
            }
            (counts, censored)
        })
        .reduce(
            || (vec![0u64; absorber.len()], 0),
            |(mut a, ca), (b, cb)| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                (a, ca + cb)
            },
        );
    Ok(HitHistogram {
        sites: absorber.to_vec(),
        absorbed: counts.iter().sum(),
        counts,
        walkers: config.walkers,
        censored,
        launch_radius: launch,
        set_radius: target.set_radius,
        center: target.center,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub radii: Vec<f64>,
    pub orders: Vec<f64>,
    /// `values[r][n]` is Z_n at radius `radii[r]`.
    pub values: Vec<Vec<f64>>,
    /// Covering centres per radius, as indices into the histogram sites.
    pub covering: Vec<Vec<usize>>,
}

impl MomentTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,n,Z_n\n");
        for (r, row) in self.radii.iter().zip(&self.values) {
            for (n, z) in self.orders.iter().zip(row) {
                out.push_str(&format!("{},{},{}\n", crate::fmt17(*r), crate::fmt17(*n), crate::fmt17(*z)));
            }
        }
        out
    }
}

/// Partition of the points into balls: the first unclaimed point in order
/// becomes a centre and claims every unclaimed point closer than `radius`.
fn greedy_covering(points: &[(f64, f64)], radius: f64) -> (Vec<usize>, Vec<usize>) {
    let cell = radius.max(1e-9);
    let key = |p: (f64, f64)| ((p.0 / cell).floor() as i64, (p.1 / cell).floor() as i64);
    let mut grid: FxHashMap<(i64, i64), Vec<usize>> = FxHashMap::default();
    for (idx, &p) in points.iter().enumerate() {
        grid.entry(key(p)).or_default().push(idx);
    }
    let mut centers = Vec::new();
    let mut owner = vec![usize::MAX; points.len()];
    for (idx, &p) in points.iter().enumerate() {
        if owner[idx] != usize::MAX {
            continue;
        }
        let ball = centers.len();
        centers.push(idx);
        let (kx, ky) = key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for &q in grid.get(&(kx + dx, ky + dy)).map(|v| v.as_slice()).unwrap_or(&[]) {
                    let d = (points[q].0 - p.0).powi(2) + (points[q].1 - p.1).powi(2);
                    if owner[q] == usize::MAX && d < radius * radius {
                        owner[q] = ball;
                    }
                }
            }
        }
    }
    (centers, owner)
}

/// Moments Z_n(r) = Σ_balls H^n with H the fraction of absorbed walkers
/// whose first hit lies in the ball. Balls cover the whole absorber, centres
/// taken greedily in absorber order; balls never hit are left out of the sum.
pub fn moments(hist: &HitHistogram, radii: &[f64], orders: &[f64]) -> Result<MomentTable> {
    if radii.iter().any(|&r| !(r >= 2.0)) {
        return Err(Error::Config("ball radii must be at least 2 lattice units".into()));
    }
    if let Some(n) = orders.iter().find(|&&n| !(n >= MIN_ORDER)) {
        return Err(Error::Config(format!(
            "order {n} is below {MIN_ORDER}: low orders weight sites hardly ever hit and cannot be estimated by counting"
        )));
    }
    if hist.absorbed == 0 {
        return Err(Error::InsufficientData("no walker was absorbed".into()));
    }
    let points: Vec<(f64, f64)> = hist.sites.iter().map(|&s| position(s)).collect();
    let total = hist.absorbed as f64;
    let mut values = Vec::with_capacity(radii.len());
    let mut covering = Vec::with_capacity(radii.len());
    for &r in radii {
        let (centers, owner) = greedy_covering(&points, r);
        let mut mass = vec![0u64; centers.len()];
        for (slot, &ball) in owner.iter().enumerate() {
            mass[ball] += hist.counts[slot];
        }
        let row = orders
            .iter()
            .map(|&n| mass.iter().filter(|&&m| m > 0).map(|&m| (m as f64 / total).powf(n)).sum())
            .collect();
        values.push(row);
        covering.push(centers);
    }
    Ok(MomentTable { radii: radii.to_vec(), orders: orders.to_vec(), values, covering })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderFit {
    pub order: f64,
    /// τ(n): slope of ln Z_n against ln r.
    pub tau: FitResult,
    /// D(n) = τ(n)/(n − 1), absent at n = 1.
    pub dimension: Option<f64>,
    pub dimension_stderr: Option<f64>,
}

/// Per-order fits of ln⟨Z_n⟩ against ln r, with Z_n averaged over tables.
/// Errors come from a delete-one jackknife over tables when there are
/// several, from the regression otherwise.
pub fn tau_fit(tables: &[MomentTable]) -> Result<Vec<OrderFit>> {
    let first = tables.first().ok_or_else(|| Error::InsufficientData("no moment tables".into()))?;
    if tables.iter().any(|t| t.radii != first.radii || t.orders != first.orders) {
        return Err(Error::Config("moment tables must share radii and orders".into()));
    }
    let radii = &first.radii;
    let (lo, hi) = radii.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    if radii.len() < 4 || hi / lo < 10.0 * (1.0 - 1e-12) {
        return Err(Error::InsufficientData("need at least 4 radii spanning a decade".into()));
    }
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let slope = |order: usize, skip: Option<usize>| -> Result<crate::fit::LineFit> {
        let ys: Vec<f64> = (0..radii.len())
            .map(|r| {
                let (sum, count) = tables
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| Some(*k) != skip)
                    .fold((0.0, 0.0), |(s, c), (_, t)| (s + t.values[r][order], c + 1.0));
                (sum / count).ln()
            })
            .collect();
        fit_line(&xs, &ys, Weights::Uniform)
    };
    first
        .orders
        .iter()
        .enumerate()
        .map(|(idx, &order)| {
            let line = slope(idx, None)?;
            let stderr = if tables.len() > 1 {
                let m = tables.len() as f64;
                let loo: Vec<f64> = (0..tables.len()).map(|k| slope(idx, Some(k)).map(|l| l.slope)).collect::<Result<_>>()?;
                let mean = loo.iter().sum::<f64>() / m;
                ((m - 1.0) / m * loo.iter().map(|s| (s - mean).powi(2)).sum::<f64>()).sqrt()
            } else {
                line.slope_stderr
            };
            let tau = FitResult { exponent: line.slope, stderr, window: (lo, hi), r_squared: line.r_squared, points: radii.len() };
            let (dimension, dimension_stderr) = if (order - 1.0).abs() > 1e-12 {
                (Some(tau.exponent / (order - 1.0)), Some(stderr / (order - 1.0).abs()))
            } else {
                (None, None)
            };
            Ok(OrderFit { order, tau, dimension, dimension_stderr })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RareSiteFit {
    /// (H at bin centre, sites per unit H) for non-empty bins.
    pub bins: Vec<(f64, f64)>,
    /// τ*: minus the slope of ln N(H) against ln H.
    pub tau_star: FitResult,
}

pub const MIN_RARE_WALKERS: u64 = 1_000_000;
const BINS_PER_DECADE: usize = 4;

/// Power law of the number of sites per unit harmonic measure over the two
/// smallest decades of hit sites.
pub fn rare_site_histogram(hist: &HitHistogram) -> Result<RareSiteFit> {
    if hist.walkers < MIN_RARE_WALKERS {
        return Err(Error::InsufficientData(format!("need at least {MIN_RARE_WALKERS} walkers, got {}", hist.walkers)));
    }
    rare_site_fit(&hist.counts, hist.absorbed)
}

/// Log-binned site density over counts in `[c_min, 100·c_min]`; bin widths
/// are the number of integers they contain.
pub fn rare_site_fit(counts: &[u64], absorbed: u64) -> Result<RareSiteFit> {
    let smallest = counts.iter().copied().filter(|&c| c > 0).min().ok_or_else(|| Error::InsufficientData("no hits".into()))?;
    let total = absorbed as f64;
    let edges: Vec<f64> =
        (0..=2 * BINS_PER_DECADE).map(|k| smallest as f64 * 10f64.powf(k as f64 / BINS_PER_DECADE as f64)).collect();
    let mut bins = Vec::new();
    for w in edges.windows(2) {
        let (lo, hi) = (w[0].ceil() as u64, (w[1].ceil() as u64).saturating_sub(1));
        if hi < lo {
            continue;
        }
        let sites = counts.iter().filter(|&&c| c >= lo && c <= hi).count();
        if sites == 0 {
            continue;
        }
        let width = (hi - lo + 1) as f64 / total;
        let centre = ((lo as f64) * (hi as f64)).sqrt() / total;
        bins.push((centre, sites as f64 / width));
    }
    if bins.len() < 4 {
        return Err(Error::InsufficientData(format!("only {} non-empty bins; no power law", bins.len())));
    }
    let xs: Vec<f64> = bins.iter().map(|b| b.0.ln()).collect();
    let ys: Vec<f64> = bins.iter().map(|b| b.1.ln()).collect();
    let line = fit_line(&xs, &ys, Weights::Uniform)?;
    let tau_star = FitResult {
        exponent: -line.slope,
        stderr: line.slope_stderr,
        window: (bins[0].0, bins[bins.len() - 1].0),
        r_squared: line.r_squared,
        points: bins.len(),
    };
    Ok(RareSiteFit { bins, tau_star })
}

/// Ball radii for absorbers from side-1024 fields.
/// Lowest order estimated from hit counts.
pub const MIN_ORDER: f64 = 0.25;
pub const DEFAULT_RADII: [f64; 5] = [2.0, 4.0, 8.0, 16.0, 32.0];
pub const DEFAULT_ORDERS: [f64; 11] = [0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpHarmonicConfig {
    /// Field ensemble; one conditioned cluster is taken per field.
    pub perc: PercConfig,
    pub absorbers: usize,
    pub walkers: u64,
    pub radii: Vec<f64>,
    pub orders: Vec<f64>,
}

impl EpHarmonicConfig {
    pub fn new(side: usize, absorbers: usize, walkers: u64, seed: u64) -> Self {
        Self {
            perc: PercConfig::new(side, absorbers, seed),
            absorbers,
            walkers,
            radii: DEFAULT_RADII.to_vec(),
            orders: DEFAULT_ORDERS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsorberSummary {
    pub field: usize,
    pub ep_sites: usize,
    pub absorbed: u64,
    pub censored: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpHarmonicCampaign {
    pub absorbers: Vec<AbsorberSummary>,
    pub tables: Vec<MomentTable>,
    pub fits: Vec<OrderFit>,
}

/// Harmonic moments of accessible perimeters of conditioned percolation
/// clusters, one cluster per field.
pub fn ep_harmonic_campaign(config: &EpHarmonicConfig) -> Result<EpHarmonicCampaign> {
    if config.absorbers == 0 {
        return Err(Error::Config("at least one absorber is required".into()));
    }
    let mut absorbers = Vec::with_capacity(config.absorbers);
    let mut tables = Vec::with_capacity(config.absorbers);
    let mut field = 0;
    while tables.len() < config.absorbers {
        if field >= config.perc.max_fields {
            return Err(Error::InsufficientData(format!("only {} conditioned clusters in {field} fields", tables.len())));
        }
        if let Some((_, _, ep)) = conditioned_clusters(&config.perc, field)?.into_iter().next() {
            let walk = HarmonicConfig { stream: tables.len() as u64, ..HarmonicConfig::new(config.walkers, config.perc.seed) };
            let hist = first_hit_sampling(&ep.sites, &walk)?;
            tables.push(moments(&hist, &config.radii, &config.orders)?);
            absorbers.push(AbsorberSummary { field, ep_sites: ep.sites.len(), absorbed: hist.absorbed, censored: hist.censored });
        }
        field += 1;
    }
    let fits = tau_fit(&tables)?;
    Ok(EpHarmonicCampaign { absorbers, tables, fits })
}
