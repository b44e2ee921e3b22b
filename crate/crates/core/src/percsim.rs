//! Site percolation on the triangular lattice: clusters, hulls traced on the
//! hexagonal dual, accessible perimeters and sandbox dimension fits.
//!
//! Sites use axial coordinates `(i, j)` with Euclidean position
//! `(i + j/2, j·√3/2)`; the field is the rhombus `0 ≤ i, j < side`.

use std::collections::VecDeque;

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{fit_line, FitResult, Weights};
use crate::rng::{stream, Domain};

pub type Site = (i32, i32);

/// Neighbour offsets in counter-clockwise order.
pub const NEIGHBORS: [Site; 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

const SQRT3_2: f64 = 0.866_025_403_784_438_6;

pub fn position(site: Site) -> (f64, f64) {
    (site.0 as f64 + 0.5 * site.1 as f64, SQRT3_2 * site.1 as f64)
}

fn add(a: Site, d: Site) -> Site {
    (a.0 + d.0, a.1 + d.1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercField {
    pub side: usize,
    pub occupancy: Vec<u64>,
    pub seed: u64,
    pub p: f64,
}

impl PercField {
    pub fn empty(side: usize) -> Self {
        Self { side, occupancy: vec![0; (side * side).div_ceil(64)], seed: 0, p: 0.0 }
    }

    pub fn from_sites(side: usize, sites: &[Site]) -> Result<Self> {
        let mut field = Self::empty(side);
        for &s in sites {
            if !field.contains(s) {
                return Err(Error::Config(format!("site {s:?} lies outside a field of side {side}")));
            }
            let k = field.index(s);
            field.occupancy[k / 64] |= 1 << (k % 64);
        }
        Ok(field)
    }

    pub fn contains(&self, s: Site) -> bool {
        let side = self.side as i32;
        (0..side).contains(&s.0) && (0..side).contains(&s.1)
    }

    fn index(&self, s: Site) -> usize {
        s.1 as usize * self.side + s.0 as usize
    }

    pub fn is_occupied(&self, s: Site) -> bool {
        if !self.contains(s) {
            return false;
        }
        let k = self.index(s);
        self.occupancy[k / 64] >> (k % 64) & 1 == 1
    }

    pub fn on_edge(&self, s: Site) -> bool {
        let last = self.side as i32 - 1;
        s.0 == 0 || s.1 == 0 || s.0 == last || s.1 == last
    }

    pub fn occupied_count(&self) -> u64 {
        self.occupancy.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// FNV-1a digest of the occupancy words.
    pub fn checksum(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for w in &self.occupancy {
            for b in w.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        }
        h
    }

    /// Plain portable bitmap (P1) of the occupancy, row j = 0 first.
    pub fn to_pbm(&self) -> String {
        let mut out = format!("P1\n{} {}\n", self.side, self.side);
        for j in 0..self.side as i32 {
            let row: Vec<&str> = (0..self.side as i32).map(|i| if self.is_occupied((i, j)) { "1" } else { "0" }).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Field with i.i.d. occupation at the triangular-lattice threshold p = ½.
pub fn sample_field(side: usize, seed: u64) -> Result<PercField> {
    sample_field_with_p(side, seed, 0.5)
}

pub fn sample_field_with_p(side: usize, seed: u64, p: f64) -> Result<PercField> {
    if side < 8 {
        return Err(Error::Config(format!("field side must be at least 8, got {side}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Config(format!("occupation probability must lie in [0, 1], got {p}")));
    }
    let mut rng = stream(seed, Domain::Field, 0);
    let words = (side * side).div_ceil(64);
    let mut occupancy: Vec<u64> = if p == 0.5 {
        (0..words).map(|_| rng.next_u64()).collect()
    } else {
        (0..words)
            .map(|_| (0..64).fold(0u64, |w, b| w | (rng.random_bool(p) as u64) << b))
            .collect()
    };
    let spare = words * 64 - side * side;
    if spare > 0 {
        occupancy[words - 1] &= u64::MAX >> spare;
    }
    Ok(PercField { side, occupancy, seed, p })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub sites: Vec<Site>,
    pub touches_edge: bool,
}

impl Cluster {
    pub fn radius_of_gyration(&self) -> f64 {
        radius_of_gyration(self.sites.iter().map(|&s| position(s)))
    }
}

pub fn radius_of_gyration(points: impl Iterator<Item = (f64, f64)> + Clone) -> f64 {
    let (n, sx, sy) = points.clone().fold((0.0, 0.0, 0.0), |(n, x, y), p| (n + 1.0, x + p.0, y + p.1));
    if n == 0.0 {
        return 0.0;
    }
    let (cx, cy) = (sx / n, sy / n);
    (points.map(|p| (p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sum::<f64>() / n).sqrt()
}

/// Occupied cluster containing `anchor`, found breadth-first.
pub fn cluster_of(field: &PercField, anchor: Site) -> Result<Cluster> {
    if !field.is_occupied(anchor) {
        return Err(Error::Config(format!("anchor {anchor:?} is not occupied")));
    }
    let mut seen = vec![false; field.side * field.side];
    Ok(grow(field, anchor, &mut seen))
}

fn grow(field: &PercField, anchor: Site, seen: &mut [bool]) -> Cluster {
    let mut sites = vec![anchor];
    seen[field.index(anchor)] = true;
    let mut touches_edge = false;
    let mut head = 0;
    while head < sites.len() {
        let s = sites[head];
        head += 1;
        touches_edge |= field.on_edge(s);
        for d in NEIGHBORS {
            let t = add(s, d);
            if field.is_occupied(t) && !seen[field.index(t)] {
                seen[field.index(t)] = true;
                sites.push(t);
            }
        }
    }
    Cluster { sites, touches_edge }
}

/// Every cluster with at least `min_size` sites, in order of first site.
pub fn clusters(field: &PercField, min_size: usize) -> Vec<Cluster> {
    let side = field.side;
    let stride = side + 2;
    // padded copy: 0 empty, 1 occupied, 2 labelled
    let mut grid = vec![0u8; stride * stride];
    for j in 0..side {
        for i in 0..side {
            let k = j * side + i;
            grid[(j + 1) * stride + i + 1] = (field.occupancy[k / 64] >> (k % 64) & 1) as u8;
        }
    }
    let offsets: [isize; 6] = NEIGHBORS.map(|(di, dj)| dj as isize * stride as isize + di as isize);
    let mut queue: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    for start in 0..grid.len() {
        if grid[start] != 1 {
            continue;
        }
        queue.clear();
        queue.push(start);
        grid[start] = 2;
        let mut head = 0;
        while head < queue.len() {
            let s = queue[head];
            head += 1;
            for off in offsets {
                let t = s.wrapping_add_signed(off);
                if grid[t] == 1 {
                    grid[t] = 2;
                    queue.push(t);
                }
            }
        }
        if queue.len() >= min_size {
            let sites: Vec<Site> = queue.iter().map(|&k| ((k % stride) as i32 - 1, (k / stride) as i32 - 1)).collect();
            let touches_edge = sites.iter().any(|&s| field.on_edge(s));
            out.push(Cluster { sites, touches_edge });
        }
    }
    out
}

/// Outer boundary of a cluster: the empty sites met by a wall follower on
/// the hexagonal dual, in traversal order, first site repeated at the end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullPath {
    pub sites: Vec<Site>,
    pub closed: bool,
    /// Number of dual edges walked.
    pub edges: usize,
    pub anchor: Site,
}

impl HullPath {
    /// Distinct hull sites in order of first visit.
    pub fn distinct_sites(&self) -> Vec<Site> {
        let mut seen = rustc_hash::FxHashSet::default();
        self.sites.iter().copied().filter(|s| seen.insert(*s)).collect()
    }
}

/// Bounding box around a cluster with a membership mask; sites outside the
/// box are empty.
struct Window {
    i0: i32,
    j0: i32,
    width: i32,
    height: i32,
    mask: Vec<bool>,
}

impl Window {
    fn around(sites: &[Site], margin: i32) -> Self {
        let i0 = sites.iter().map(|s| s.0).min().unwrap() - margin;
        let j0 = sites.iter().map(|s| s.1).min().unwrap() - margin;
        let width = sites.iter().map(|s| s.0).max().unwrap() + margin - i0 + 1;
        let height = sites.iter().map(|s| s.1).max().unwrap() + margin - j0 + 1;
        let mut w = Self { i0, j0, width, height, mask: vec![false; (width * height) as usize] };
        for &s in sites {
            let k = w.slot(s).unwrap();
            w.mask[k] = true;
        }
        w
    }

    fn slot(&self, s: Site) -> Option<usize> {
        let (a, b) = (s.0 - self.i0, s.1 - self.j0);
        ((0..self.width).contains(&a) && (0..self.height).contains(&b)).then(|| (b * self.width + a) as usize)
    }

    fn member(&self, s: Site) -> bool {
        self.slot(s).is_some_and(|k| self.mask[k])
    }
}

/// Traces the outer hull of the cluster containing `anchor`.
pub fn trace_hull(field: &PercField, anchor: Site) -> Result<HullPath> {
    let cluster = cluster_of(field, anchor)?;
    if cluster.touches_edge {
        return Err(Error::OpenCluster);
    }
    let window = Window::around(&cluster.sites, 1);
    let start_site = *cluster.sites.iter().min_by_key(|s| (s.0, s.1)).unwrap();
    // the site to the left of the leftmost cluster site lies outside
    let start = (start_site, 3usize);
    let limit = 6 * field.side * field.side;
    let (mut c, mut k) = start;
    let mut sites = vec![add(c, NEIGHBORS[k])];
    let mut edges = 0;
    loop {
        let x = add(c, NEIGHBORS[(k + 1) % 6]);
        if window.member(x) {
            c = x;
            k = (k + 5) % 6;
        } else {
            k = (k + 1) % 6;
        }
        edges += 1;
        let e = add(c, NEIGHBORS[k]);
        if sites.last() != Some(&e) {
            sites.push(e);
        }
        if (c, k) == start {
            break;
        }
        if edges > limit {
            return Err(Error::Numerical("hull walk failed to close".into()));
        }
    }
    Ok(HullPath { sites, closed: true, edges, anchor })
}

/// Hull sites reachable from far away when passing between two cluster sites
/// at next-nearest-neighbour distance is forbidden.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerimeterSet {
    pub sites: Vec<Site>,
    pub rule: String,
}

pub const ACCESS_RULE: &str = "next-nearest-neighbour necks closed";

pub fn accessible_perimeter(field: &PercField, hull: &HullPath) -> Result<PerimeterSet> {
    if !hull.closed {
        return Err(Error::Config("the hull must be closed".into()));
    }
    let cluster = cluster_of(field, hull.anchor)?;
    let window = Window::around(&cluster.sites, 2);
    let mut reached = vec![false; window.mask.len()];
    let mut queue = VecDeque::new();
    for b in 0..window.height {
        for a in 0..window.width {
            if a == 0 || b == 0 || a == window.width - 1 || b == window.height - 1 {
                let k = (b * window.width + a) as usize;
                reached[k] = true;
                queue.push_back((a + window.i0, b + window.j0));
            }
        }
    }
    while let Some(s) = queue.pop_front() {
        for dir in 0..6 {
            let t = add(s, NEIGHBORS[dir]);
            let Some(k) = window.slot(t) else { continue };
            if reached[k] || window.mask[k] {
                continue;
            }
            let left = add(s, NEIGHBORS[(dir + 1) % 6]);
            let right = add(s, NEIGHBORS[(dir + 5) % 6]);
            if window.member(left) && window.member(right) {
                continue;
            }
            reached[k] = true;
            queue.push_back(t);
        }
    }
    let sites = hull
        .distinct_sites()
        .into_iter()
        .filter(|&s| window.slot(s).is_some_and(|k| reached[k]))
        .collect();
    Ok(PerimeterSet { sites, rule: ACCESS_RULE.to_string() })
}

/// Points bucketed on a square grid for radius queries.
struct Buckets<'a> {
    points: &'a [(f64, f64)],
    cell: f64,
    origin: (f64, f64),
    cols: i64,
    rows: i64,
    start: Vec<usize>,
    order: Vec<usize>,
}

impl<'a> Buckets<'a> {
    fn new(points: &'a [(f64, f64)], cell: f64) -> Self {
        let minx = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let miny = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let maxx = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        let maxy = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        let cols = ((maxx - minx) / cell) as i64 + 1;
        let rows = ((maxy - miny) / cell) as i64 + 1;
        let cell_of = |p: &(f64, f64)| {
            let cx = ((p.0 - minx) / cell) as i64;
            let cy = ((p.1 - miny) / cell) as i64;
            (cy * cols + cx) as usize
        };
        let mut counts = vec![0usize; (cols * rows) as usize + 1];
        for p in points {
            counts[cell_of(p) + 1] += 1;
        }
        for k in 1..counts.len() {
            counts[k] += counts[k - 1];
        }
        let mut fill = counts.clone();
        let mut order = vec![0; points.len()];
        for (idx, p) in points.iter().enumerate() {
            let c = cell_of(p);
            order[fill[c]] = idx;
            fill[c] += 1;
        }
        Self { points, cell, origin: (minx, miny), cols, rows, start: counts, order }
    }

    /// Adds to `counts[k]` the number of points within `radii[k]` of `center`.
    fn count_within(&self, center: (f64, f64), radii: &[f64], counts: &mut [f64]) {
        let r_max = radii.iter().cloned().fold(0.0, f64::max);
        let squared: Vec<f64> = radii.iter().map(|r| r * r).collect();
        let lo_x = (((center.0 - r_max - self.origin.0) / self.cell).floor() as i64).max(0);
        let hi_x = (((center.0 + r_max - self.origin.0) / self.cell).floor() as i64).min(self.cols - 1);
        let lo_y = (((center.1 - r_max - self.origin.1) / self.cell).floor() as i64).max(0);
        let hi_y = (((center.1 + r_max - self.origin.1) / self.cell).floor() as i64).min(self.rows - 1);
        for cy in lo_y..=hi_y {
            for cx in lo_x..=hi_x {
                let c = (cy * self.cols + cx) as usize;
                for &idx in &self.order[self.start[c]..self.start[c + 1]] {
                    let p = self.points[idx];
                    let d2 = (p.0 - center.0).powi(2) + (p.1 - center.1).powi(2);
                    for (k, &r2) in squared.iter().enumerate() {
                        if d2 <= r2 {
                            counts[k] += 1.0;
                        }
                    }
                }
            }
        }
    }
}

/// Centres per point set used by [`mass_radius_fit`].
pub const SANDBOX_CENTERS: usize = 400;

/// Mean number of points within each radius of a centre, per point set.
/// Centres are set points whose balls of the largest radius stay inside the
/// set's extent around its centroid.
pub fn sandbox_counts(points: &[(f64, f64)], radii: &[f64]) -> Option<Vec<f64>> {
    if points.is_empty() {
        return None;
    }
    let r_max = radii.iter().cloned().fold(0.0, f64::max);
    let n = points.len() as f64;
    let centroid = points.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
    let dist = |p: &(f64, f64)| ((p.0 - centroid.0).powi(2) + (p.1 - centroid.1).powi(2)).sqrt();
    let extent = points.iter().map(dist).fold(0.0, f64::max);
    let eligible: Vec<&(f64, f64)> = points.iter().filter(|p| dist(p) <= extent - r_max).collect();
    if eligible.is_empty() {
        return None;
    }
    let stride = eligible.len().div_ceil(SANDBOX_CENTERS);
    let buckets = Buckets::new(points, r_max.max(1.0));
    let mut counts = vec![0.0; radii.len()];
    let mut used = 0.0;
    for center in eligible.iter().step_by(stride) {
        buckets.count_within(**center, radii, &mut counts);
        used += 1.0;
    }
    Some(counts.into_iter().map(|c| c / used).collect())
}

/// Sandbox dimension: slope of ln⟨M(r)⟩ against ln r, with ⟨M⟩ averaged over
/// point sets. The error is a delete-one jackknife over sets when there are
/// several, the regression error otherwise.
pub fn mass_radius_fit(point_sets: &[Vec<(f64, f64)>], radii: &[f64]) -> Result<FitResult> {
    let table: Vec<Vec<f64>> = point_sets.iter().filter_map(|p| sandbox_counts(p, radii)).collect();
    fit_sandbox_table(&table, radii)
}

/// Fit from per-set mean counts as returned by [`sandbox_counts`].
pub fn fit_sandbox_table(table: &[Vec<f64>], radii: &[f64]) -> Result<FitResult> {
    if radii.len() < 4 {
        return Err(Error::InsufficientData(format!("need at least 4 radii, got {}", radii.len())));
    }
    if table.is_empty() {
        return Err(Error::InsufficientData("no point set admits a sandbox centre".into()));
    }
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let slope_of = |rows: &mut dyn Iterator<Item = &Vec<f64>>| -> Result<(f64, FitResultParts)> {
        let mut sum = vec![0.0; radii.len()];
        let mut n = 0.0;
        for row in rows {
            for (s, v) in sum.iter_mut().zip(row) {
                *s += v;
            }
            n += 1.0;
        }
        let ys: Vec<f64> = sum.iter().map(|s| (s / n).ln()).collect();
        let line = fit_line(&xs, &ys, Weights::Uniform)?;
        Ok((line.slope, FitResultParts { stderr: line.slope_stderr, r_squared: line.r_squared }))
    };
    let (slope, parts) = slope_of(&mut table.iter())?;
    let stderr = if table.len() > 1 {
        let m = table.len() as f64;
        let loo: Vec<f64> = (0..table.len())
            .map(|skip| slope_of(&mut table.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, r)| r)).map(|s| s.0))
            .collect::<Result<_>>()?;
        let mean = loo.iter().sum::<f64>() / m;
        ((m - 1.0) / m * loo.iter().map(|s| (s - mean).powi(2)).sum::<f64>()).sqrt()
    } else {
        parts.stderr
    };
    Ok(FitResult {
        exponent: slope,
        stderr,
        window: (radii[0], radii[radii.len() - 1]),
        r_squared: parts.r_squared,
        points: radii.len(),
    })
}

struct FitResultParts {
    stderr: f64,
    r_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercConfig {
    pub side: usize,
    /// Number of conditioned clusters to collect.
    pub samples: usize,
    pub seed: u64,
    /// Accepted radius-of-gyration range, in lattice units.
    pub rg_range: (f64, f64),
    pub radii: Vec<f64>,
    pub max_fields: usize,
}

impl PercConfig {
    /// Clusters with radius of gyration in `[side/8, side/4]`.
    pub fn new(side: usize, samples: usize, seed: u64) -> Self {
        Self {
            side,
            samples,
            seed,
            rg_range: (side as f64 / 8.0, side as f64 / 4.0),
            radii: default_radii(side),
            max_fields: 100 * samples.max(1),
        }
    }
}

/// Dyadic sandbox radii from 4 up to side/16.
pub fn default_radii(side: usize) -> Vec<f64> {
    std::iter::successors(Some(4.0), |r| Some(r * 2.0)).take_while(|&r| r <= side as f64 / 16.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRecord {
    pub sample_id: usize,
    pub field: usize,
    pub anchor: Site,
    pub mass: usize,
    pub radius_of_gyration: f64,
    pub hull_length: usize,
    pub hull_sites: usize,
    pub ep_length: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercCampaign {
    pub records: Vec<ClusterRecord>,
    pub fields_used: usize,
    pub radii: Vec<f64>,
    pub hull_counts: Vec<Vec<f64>>,
    pub ep_counts: Vec<Vec<f64>>,
    pub hull_fit: FitResult,
    pub ep_fit: FitResult,
    pub rule: String,
}

struct Harvest {
    record: ClusterRecord,
    hull_counts: Option<Vec<f64>>,
    ep_counts: Option<Vec<f64>>,
}

/// Conditioned clusters of one field with their hulls and perimeters.
pub fn conditioned_clusters(config: &PercConfig, field_index: usize) -> Result<Vec<(ClusterRecord, HullPath, PerimeterSet)>> {
    let field = sample_field(config.side, config.seed.wrapping_add(field_index as u64))?;
    let min_mass = (config.rg_range.0 * config.rg_range.0) as usize / 8;
    let mut out = Vec::new();
    for cluster in clusters(&field, min_mass.max(1)) {
        if cluster.touches_edge {
            continue;
        }
        let rg = cluster.radius_of_gyration();
        if rg < config.rg_range.0 || rg > config.rg_range.1 {
            continue;
        }
        let anchor = cluster.sites[0];
        let hull = trace_hull(&field, anchor)?;
        let ep = accessible_perimeter(&field, &hull)?;
        let record = ClusterRecord {
            sample_id: 0,
            field: field_index,
            anchor,
            mass: cluster.sites.len(),
            radius_of_gyration: rg,
            hull_length: hull.edges,
            hull_sites: hull.sites.len() - 1,
            ep_length: ep.sites.len(),
        };
        out.push((record, hull, ep));
    }
    Ok(out)
}

fn harvest_field(config: &PercConfig, field_index: usize) -> Result<Vec<Harvest>> {
    Ok(conditioned_clusters(config, field_index)?
        .into_iter()
        .map(|(record, hull, ep)| {
            let hull_points: Vec<(f64, f64)> = hull.distinct_sites().into_iter().map(position).collect();
            let ep_points: Vec<(f64, f64)> = ep.sites.iter().copied().map(position).collect();
            Harvest {
                record,
                hull_counts: sandbox_counts(&hull_points, &config.radii),
                ep_counts: sandbox_counts(&ep_points, &config.radii),
            }
        })
        .collect())
}

const FIELD_BATCH: usize = 8;

/// Samples fields until `config.samples` conditioned clusters are collected,
/// then fits the hull and accessible-perimeter sandbox dimensions.
pub fn run_campaign(config: &PercConfig) -> Result<PercCampaign> {
    if config.samples == 0 {
        return Err(Error::Config("at least one cluster is required".into()));
    }
    let mut harvest: Vec<Harvest> = Vec::new();
    let mut next_field = 0;
    while harvest.len() < config.samples {
        if next_field >= config.max_fields {
            return Err(Error::InsufficientData(format!(
                "only {} conditioned clusters in {} fields",
                harvest.len(),
                next_field
            )));
        }
        let batch: Vec<usize> = (next_field..(next_field + FIELD_BATCH).min(config.max_fields)).collect();
        next_field += batch.len();
        let results: Vec<Result<Vec<Harvest>>> = batch.par_iter().map(|&f| harvest_field(config, f)).collect();
        for r in results {
            harvest.extend(r?);
        }
    }
    harvest.truncate(config.samples);
    let fields_used = harvest.last().map_or(0, |h| h.record.field + 1);
    let mut records = Vec::with_capacity(harvest.len());
    let mut hull_counts = Vec::new();
    let mut ep_counts = Vec::new();
    for (id, h) in harvest.into_iter().enumerate() {
        records.push(ClusterRecord { sample_id: id, ..h.record });
        hull_counts.extend(h.hull_counts);
        ep_counts.extend(h.ep_counts);
    }
    let hull_fit = fit_sandbox_table(&hull_counts, &config.radii)?;
    let ep_fit = fit_sandbox_table(&ep_counts, &config.radii)?;
    Ok(PercCampaign {
        records,
        fields_used,
        radii: config.radii.clone(),
        hull_counts,
        ep_counts,
        hull_fit,
        ep_fit,
        rule: ACCESS_RULE.to_string(),
    })
}

impl PercCampaign {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sample_id,radius_of_gyration,hull_length,ep_length\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.sample_id,
                crate::fmt17(r.radius_of_gyration),
                r.hull_length,
                r.ep_length
            ));
        }
        out
    }
}
