//! Survival of packets of simple random walks on Z² whose ranges must not
//! meet. Walks inside one packet are transparent to each other.

use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{fit_line, FitResult, Weights};
use crate::rng::{stream, Domain};

pub type Site = (i32, i32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    Plane,
    /// Walks start on the row y = 1 and die on reaching y = 0.
    HalfPlane,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub packet_counts: Vec<u32>,
    pub geometry: Geometry,
    pub max_time: u64,
    pub samples: u64,
    pub seed: u64,
    pub origin_offsets: Vec<Site>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub times: Vec<u64>,
    pub alive_counts: Vec<u64>,
    pub total: u64,
}

const MAX_PACKETS: usize = 64;
const MAX_WALKS: u32 = 256;
/// Death time recorded for samples that survive to the horizon.
pub const SURVIVED: u64 = u64::MAX;

/// Distinct nearest-neighbour start sites, one per packet: around the
/// plaquette centred at (½, ½) in the plane, along the row y = 1 otherwise.
pub fn default_origins(packets: usize, geometry: Geometry) -> Vec<Site> {
    match geometry {
        Geometry::HalfPlane => (0..packets as i32).map(|x| (x, 1)).collect(),
        Geometry::Plane => {
            let ring = [(0, 0), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (2, -1), (2, 0), (2, 1), (2, 2)];
            let mut sites: Vec<Site> = ring.iter().copied().take(packets).collect();
            let mut x = 3;
            while sites.len() < packets {
                sites.push((x, 0));
                x += 1;
            }
            sites
        }
    }
}

impl WalkConfig {
    pub fn new(packet_counts: Vec<u32>, geometry: Geometry, max_time: u64, samples: u64, seed: u64) -> Result<Self> {
        let origin_offsets = default_origins(packet_counts.len(), geometry);
        let config = Self { packet_counts, geometry, max_time, samples, seed, origin_offsets };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.packet_counts.is_empty() || self.packet_counts.len() > MAX_PACKETS {
            return fail(format!("between 1 and {MAX_PACKETS} packets are supported"));
        }
        if self.packet_counts.contains(&0) {
            return fail("every packet needs at least one walk".into());
        }
        if self.packet_counts.iter().sum::<u32>() > MAX_WALKS {
            return fail(format!("at most {MAX_WALKS} walks are supported"));
        }
        if self.samples == 0 || self.max_time == 0 {
            return fail("samples and max_time must be at least 1".into());
        }
        if self.origin_offsets.len() != self.packet_counts.len() {
            return fail("one origin per packet is required".into());
        }
        for (i, a) in self.origin_offsets.iter().enumerate() {
            if self.origin_offsets[..i].contains(a) {
                return fail(format!("origin {a:?} is used twice"));
            }
            if self.geometry == Geometry::HalfPlane && a.1 <= 0 {
                return fail(format!("origin {a:?} is not inside the half-plane"));
            }
        }
        Ok(())
    }

    pub fn walk_count(&self) -> u32 {
        self.packet_counts.iter().sum()
    }
}

/// Powers of two up to `max_time`, plus `max_time` itself.
pub fn checkpoints(max_time: u64) -> Vec<u64> {
    let mut times: Vec<u64> = std::iter::successors(Some(1u64), |t| t.checked_mul(2))
        .take_while(|&t| t <= max_time)
        .collect();
    if times.last() != Some(&max_time) {
        times.push(max_time);
    }
    times
}

/// Default fit window `[t_max/64, t_max]`.
pub fn default_window(max_time: u64) -> (f64, f64) {
    (max_time as f64 / 64.0, max_time as f64)
}

struct Walker {
    pos: Site,
    bit: u64,
    rng: ChaCha8Rng,
    bits: u64,
    left: u32,
}

impl Walker {
    fn step(&mut self) {
        if self.left == 0 {
            self.bits = self.rng.next_u64();
            self.left = 32;
        }
        let dir = self.bits & 3;
        self.bits >>= 2;
        self.left -= 1;
        match dir {
            0 => self.pos.0 += 1,
            1 => self.pos.0 -= 1,
            2 => self.pos.1 += 1,
            _ => self.pos.1 -= 1,
        }
    }
}

fn key(site: Site) -> u64 {
    ((site.0 as u32 as u64) << 32) | site.1 as u32 as u64
}

fn stream_index(sample: u64, walk: u32) -> u64 {
    sample * MAX_WALKS as u64 + walk as u64
}

/// Time step at which sample `sample` first violates the constraints, or
/// [`SURVIVED`]. Walk `w` of every sample uses its own random stream, so
/// adding packets leaves the existing walks unchanged.
fn death_time(config: &WalkConfig, sample: u64, visited: &mut FxHashMap<u64, u64>) -> u64 {
    visited.clear();
    let mut walkers = Vec::with_capacity(config.walk_count() as usize);
    let mut index = 0;
    for (packet, (&count, &origin)) in config.packet_counts.iter().zip(&config.origin_offsets).enumerate() {
        for _ in 0..count {
            walkers.push(Walker {
                pos: origin,
                bit: 1 << packet,
                rng: stream(config.seed, Domain::Walk, stream_index(sample, index)),
                bits: 0,
                left: 0,
            });
            index += 1;
        }
        *visited.entry(key(origin)).or_insert(0) |= 1 << packet;
    }
    let constrained = config.packet_counts.len() > 1;
    let half_plane = config.geometry == Geometry::HalfPlane;
    if !constrained && !half_plane {
        return SURVIVED;
    }
    for t in 1..=config.max_time {
        for w in walkers.iter_mut() {
            w.step();
            if half_plane && w.pos.1 <= 0 {
                return t;
            }
            if constrained {
                let mask = visited.entry(key(w.pos)).or_insert(0);
                if *mask & !w.bit != 0 {
                    return t;
                }
                *mask |= w.bit;
            }
        }
    }
    SURVIVED
}

/// Per-sample death times, in sample order.
pub fn death_times(config: &WalkConfig) -> Result<Vec<u64>> {
    config.validate()?;
    Ok((0..config.samples)
        .into_par_iter()
        .map_init(FxHashMap::default, |visited, sample| death_time(config, sample, visited))
        .collect())
}

pub fn survival_from_deaths(deaths: &[u64], max_time: u64) -> SurvivalCurve {
    let times = checkpoints(max_time);
    let alive_counts = times
        .iter()
        .map(|&t| deaths.iter().filter(|&&d| d > t).count() as u64)
        .collect();
    SurvivalCurve { times, alive_counts, total: deaths.len() as u64 }
}

pub fn simulate_survival(config: &WalkConfig) -> Result<SurvivalCurve> {
    Ok(survival_from_deaths(&death_times(config)?, config.max_time))
}

impl SurvivalCurve {
    pub fn fractions(&self) -> Vec<f64> {
        self.alive_counts.iter().map(|&a| a as f64 / self.total as f64).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,survivors,total\n");
        for (t, a) in self.times.iter().zip(&self.alive_counts) {
            out.push_str(&format!("{t},{a},{}\n", self.total));
        }
        out
    }
}

/// Weighted least squares of ln P against ln t over checkpoints inside
/// `window`; the exponent is the decay rate −d ln P / d ln t.
pub fn fit_exponent(curve: &SurvivalCurve, window: (f64, f64)) -> Result<FitResult> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut w = Vec::new();
    for (&t, &alive) in curve.times.iter().zip(&curve.alive_counts) {
        let t = t as f64;
        if t < window.0 || t > window.1 || alive == 0 {
            continue;
        }
        x.push(t.ln());
        y.push((alive as f64 / curve.total as f64).ln());
        // Var ln P ≈ (1 − P)/(N P) for binomial counts
        let p = alive as f64 / curve.total as f64;
        w.push(alive as f64 / (1.0 - p + 1.0 / curve.total as f64));
    }
    if x.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "need 4 populated checkpoints in [{}, {}], found {}",
            window.0,
            window.1,
            x.len()
        )));
    }
    let line = fit_line(&x, &y, Weights::InverseVariance(&w))?;
    Ok(FitResult {
        exponent: -line.slope,
        stderr: line.slope_stderr,
        window: (x[0].exp(), x[x.len() - 1].exp()),
        r_squared: line.r_squared,
        points: x.len(),
    })
}

/// Exact survival fractions at t = 1..=max_time by enumerating every step
/// sequence of every walk. Feasible only for `4^(walks·t)` up to about 10⁸.
pub fn exact_survival(packet_counts: &[u32], geometry: Geometry, max_time: u32) -> Result<Vec<f64>> {
    let config = WalkConfig::new(packet_counts.to_vec(), geometry, max_time as u64, 1, 0)?;
    let walks = config.walk_count();
    if (walks * max_time) as f64 * 4f64.ln() > 1e8f64.ln() + 1e-9 {
        return Err(Error::Config("enumeration too large".into()));
    }
    let bits: Vec<u64> = config
        .packet_counts
        .iter()
        .enumerate()
        .flat_map(|(p, &n)| std::iter::repeat(1u64 << p).take(n as usize))
        .collect();
    let starts: Vec<Site> = config
        .packet_counts
        .iter()
        .zip(&config.origin_offsets)
        .flat_map(|(&n, &o)| std::iter::repeat(o).take(n as usize))
        .collect();
    let mut visited: Vec<(Site, u64)> = Vec::new();
    for (&s, &b) in starts.iter().zip(&bits) {
        match visited.iter_mut().find(|(site, _)| *site == s) {
            Some(entry) => entry.1 |= b,
            None => visited.push((s, b)),
        }
    }
    let mut alive = vec![0u64; max_time as usize + 1];
    let constrained = packet_counts.len() > 1;
    enumerate(&starts, &bits, &mut visited, 0, max_time, geometry, constrained, &mut alive);
    Ok((1..=max_time as usize)
        .map(|d| alive[d] as f64 / 4f64.powi((walks as usize * d) as i32))
        .collect())
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    pos: &[Site],
    bits: &[u64],
    visited: &mut Vec<(Site, u64)>,
    depth: u32,
    max_time: u32,
    geometry: Geometry,
    constrained: bool,
    alive: &mut [u64],
) {
    alive[depth as usize] += 1;
    if depth == max_time {
        return;
    }
    let walks = pos.len();
    let moves = 4usize.pow(walks as u32);
    const DIRS: [Site; 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
    for code in 0..moves {
        let mark = visited.len();
        let mut changed: Vec<(usize, u64)> = Vec::new();
        let mut next = pos.to_vec();
        let mut ok = true;
        let mut c = code;
        for w in 0..walks {
            let d = DIRS[c % 4];
            c /= 4;
            next[w] = (pos[w].0 + d.0, pos[w].1 + d.1);
            if geometry == Geometry::HalfPlane && next[w].1 <= 0 {
                ok = false;
                break;
            }
            if !constrained {
                continue;
            }
            match visited.iter().position(|(s, _)| *s == next[w]) {
                Some(i) => {
                    if visited[i].1 & !bits[w] != 0 {
                        ok = false;
                        break;
                    }
                    changed.push((i, visited[i].1));
                    visited[i].1 |= bits[w];
                }
                None => visited.push((next[w], bits[w])),
            }
        }
        if ok {
            enumerate(&next, bits, visited, depth + 1, max_time, geometry, constrained, alive);
        }
        for (i, old) in changed.into_iter().rev() {
            visited[i].1 = old;
        }
        visited.truncate(mark);
    }
}
