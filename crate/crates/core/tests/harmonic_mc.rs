use kpzlab_core::fit::{fit_line, Weights};
use kpzlab_core::harmonic::{first_hit_sampling, moments, tau_fit, HarmonicConfig, HitHistogram, DEFAULT_RADII};
use kpzlab_core::percsim::{conditioned_clusters, position, PercConfig, Site};
use rustc_hash::FxHashSet;

const ORDERS: [f64; 10] = [0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0];

fn perimeter() -> Vec<Site> {
    let config = PercConfig::new(512, 1, 11);
    (0..config.max_fields)
        .find_map(|field| conditioned_clusters(&config, field).unwrap().into_iter().next())
        .map(|(_, _, ep)| ep.sites)
        .expect("a conditioned cluster")
}

fn sample(absorber: &[Site], walkers: u64) -> HitHistogram {
    first_hit_sampling(absorber, &HarmonicConfig::new(walkers, 5)).unwrap()
}

#[test]
fn doubling_walkers_stays_within_error() {
    let absorber = perimeter();
    let fits: Vec<_> = [100_000, 200_000]
        .into_iter()
        .map(|walkers| {
            let table = moments(&sample(&absorber, walkers), &DEFAULT_RADII, &ORDERS).unwrap();
            tau_fit(&[table]).unwrap()
        })
        .collect();
    for (few, many) in fits[0].iter().zip(&fits[1]) {
        let shift = (many.tau.exponent - few.tau.exponent).abs();
        assert!(shift <= few.tau.stderr.max(1e-12), "n = {}: τ moved by {shift}, stderr {}", few.order, few.tau.stderr);
    }
}

/// Slope of ln N against ln r, with its regression error.
fn log_slope(radii: &[f64], counts: &[f64]) -> (f64, f64) {
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|c| c.ln()).collect();
    let line = fit_line(&xs, &ys, Weights::Uniform).unwrap();
    (line.slope, line.slope_stderr)
}

#[test]
fn support_dimension_matches_mass_radius() {
    let absorber = perimeter();
    let hist = sample(&absorber, 200_000);
    let support: Vec<(f64, f64)> =
        hist.sites.iter().zip(&hist.counts).filter(|(_, &c)| c > 0).map(|(&s, _)| position(s)).collect();
    // radius 2 sits at the lattice cutoff, where boxes undercount
    let radii = [4.0, 8.0, 16.0, 32.0];

    let boxes: Vec<f64> = radii
        .iter()
        .map(|&r| {
            let cells: FxHashSet<(i64, i64)> =
                support.iter().map(|p| ((p.0 / r).floor() as i64, (p.1 / r).floor() as i64)).collect();
            cells.len() as f64
        })
        .collect();
    let (slope, box_err) = log_slope(&radii, &boxes);
    let box_dimension = -slope;

    let stride = (support.len() / 200).max(1);
    let mass: Vec<f64> = radii
        .iter()
        .map(|&r| {
            let centres = support.iter().step_by(stride);
            let total: usize = centres
                .clone()
                .map(|c| support.iter().filter(|p| (p.0 - c.0).powi(2) + (p.1 - c.1).powi(2) < r * r).count())
                .sum();
            total as f64 / centres.count() as f64
        })
        .collect();
    let (mass_dimension, mass_err) = log_slope(&radii, &mass);

    let combined = (box_err * box_err + mass_err * mass_err).sqrt();
    assert!(
        (box_dimension - mass_dimension).abs() < 2.0 * combined,
        "box {box_dimension} ± {box_err}, mass-radius {mass_dimension} ± {mass_err}"
    );
}
