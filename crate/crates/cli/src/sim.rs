use std::path::Path;

use kpzlab_core::harmonic::{ep_harmonic_campaign, EpHarmonicConfig};
use kpzlab_core::models::{geometry_dims, model_point, packet_zeta, ModelSpec, PottsKind};
use kpzlab_core::percsim::{run_campaign, PercConfig};
use kpzlab_core::slesim::{default_box_sizes, default_winding_scales, sample_traces, trace_dimension, winding_statistics, SleConfig};
use kpzlab_core::spectra::mf_dimension;
use kpzlab_core::walksim::{default_window, fit_exponent, simulate_survival, Geometry, WalkConfig};
use kpzlab_core::Locus;
use serde_json::{json, Value};

use crate::args::{Format, GeometryArg, SimArgs, SimKind, SimParams};
use crate::error::{io_error, usage, CliError, CliResult};
use crate::output::{numeric_csv, Report};

fn load_config(path: &Path) -> CliResult<SimParams> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn run(args: &SimArgs, seed: u64) -> CliResult<Report> {
    let file = match &args.config {
        Some(path) => load_config(path)?,
        None => SimParams::default(),
    };
    let mut params = args.params.clone().over(file);
    let (name, json, csv) = match args.kind {
        SimKind::Walk => walk(&mut params, seed)?,
        SimKind::Perc => perc(&mut params, seed)?,
        SimKind::Sle => sle(&mut params, seed)?,
        SimKind::Harmonic => harmonic(&mut params, seed)?,
    };
    let mut parameters = serde_json::to_value(&params).expect("parameters serialize");
    parameters["seed"] = json!(seed);
    let mut json = json;
    json["parameters"] = parameters.clone();
    Ok(Report {
        command: format!("sim {name}"),
        seeds: vec![seed],
        parameters,
        json,
        csv,
        default_format: Format::Json,
        text: None,
    })
}

fn residual(measured: f64, theory: f64) -> Value {
    json!({ "measured": measured, "theory": theory, "residual": measured - theory })
}

fn walk(params: &mut SimParams, seed: u64) -> CliResult<(&'static str, Value, String)> {
    let packets = params.packets.get_or_insert_with(|| vec![1, 1]).clone();
    let max_time = *params.tmax.get_or_insert(100_000);
    let samples = *params.samples.get_or_insert(100_000);
    let geometry = Geometry::from(*params.geometry.get_or_insert(GeometryArg::Plane));
    let config = WalkConfig::new(packets.clone(), geometry, max_time, samples, seed)?;
    let default = default_window(max_time);
    let window = (*params.window_from.get_or_insert(default.0), *params.window_to.get_or_insert(default.1));
    let curve = simulate_survival(&config)?;
    let fit = fit_exponent(&curve, window)?;
    let counts: Vec<f64> = packets.iter().map(|&n| n as f64).collect();
    let theory = match geometry {
        Geometry::Plane => packet_zeta(&counts, Locus::Bulk)?,
        Geometry::HalfPlane => 0.5 * packet_zeta(&counts, Locus::Boundary)?,
    };
    let json = json!({
        "kind": "walk",
        "fits": { "survival": fit },
        "theory": { "survival": residual(fit.exponent, theory) },
        "survival": { "times": curve.times, "alive": curve.alive_counts, "total": curve.total },
    });
    Ok(("walk", json, curve.to_csv()))
}

fn perc(params: &mut SimParams, seed: u64) -> CliResult<(&'static str, Value, String)> {
    let side = *params.side.get_or_insert(1024);
    let samples = *params.samples.get_or_insert(200) as usize;
    let campaign = run_campaign(&PercConfig::new(side, samples, seed))?;
    let dims = geometry_dims(&model_point(ModelSpec::Potts { q: 1.0, kind: PottsKind::Critical })?);
    let json = json!({
        "kind": "perc",
        "fits": { "hull": campaign.hull_fit, "accessible_perimeter": campaign.ep_fit },
        "theory": {
            "hull": residual(campaign.hull_fit.exponent, dims.d_hull),
            "accessible_perimeter": residual(campaign.ep_fit.exponent, dims.d_ep),
        },
        "fields_used": campaign.fields_used,
        "clusters": campaign.records.len(),
        "radii": campaign.radii,
        "rule": campaign.rule,
    });
    Ok(("perc", json, campaign.to_csv()))
}

fn sle(params: &mut SimParams, seed: u64) -> CliResult<(&'static str, Value, String)> {
    let kappa = params.kappa.ok_or_else(|| usage("sim sle needs --kappa"))?;
    let mut config = SleConfig::new(kappa, *params.traces.get_or_insert(200), seed);
    config.steps = *params.steps.get_or_insert(config.steps);
    let traces = sample_traces(&config)?;
    let winding = winding_statistics(&traces, &default_winding_scales(config.dt()))?;
    let dimension = trace_dimension(&traces, &default_box_sizes())?;
    let csv = numeric_csv(
        &["scale", "mean_angle", "angle_variance"],
        winding.scales.iter().zip(&winding.means).zip(&winding.variances).map(|((&s, &m), &v)| vec![s, m, v]),
    );
    let json = json!({
        "kind": "sle",
        "fits": { "winding": winding.fit, "dimension": dimension },
        "theory": {
            "winding": residual(winding.fit.exponent, kappa),
            "dimension": residual(dimension.exponent, (1.0 + kappa / 8.0).min(2.0)),
        },
        "winding_mean_slope": winding.mean_slope,
        "traces": winding.samples,
        "steps": config.steps,
    });
    Ok(("sle", json, csv))
}

fn harmonic(params: &mut SimParams, seed: u64) -> CliResult<(&'static str, Value, String)> {
    let side = *params.side.get_or_insert(1024);
    let fields = *params.fields.get_or_insert(20);
    let walkers = *params.walkers.get_or_insert(1_000_000);
    let config = EpHarmonicConfig::new(side, fields, walkers, seed);
    let campaign = ep_harmonic_campaign(&config)?;
    let orders = campaign
        .fits
        .iter()
        .map(|fit| {
            let theory = mf_dimension(0.0, fit.order)?;
            Ok(json!({
                "order": fit.order,
                "tau": fit.tau,
                "dimension": fit.dimension,
                "dimension_stderr": fit.dimension_stderr,
                "theory_dimension": theory,
                "residual": fit.dimension.map(|d| d - theory),
            }))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let count = campaign.tables.len() as f64;
    let mut rows = Vec::new();
    for (ri, &r) in config.radii.iter().enumerate() {
        for (ni, &n) in config.orders.iter().enumerate() {
            let mean = campaign.tables.iter().map(|t| t.values[ri][ni]).sum::<f64>() / count;
            rows.push(vec![r, n, mean]);
        }
    }
    let json = json!({
        "kind": "harmonic",
        "fits": orders,
        "absorbers": campaign.absorbers,
        "radii": config.radii,
        "orders": config.orders,
    });
    Ok(("harmonic", json, numeric_csv(&["r", "n", "Z_n"], rows)))
}
