use std::f64::consts::PI;

use kpzlab_core::spectra::{
    alpha_density, ep_dimension, mf_dimension, mf_spectrum, mf_tau, mixed_spectrum, moment_threshold, poly_spectrum,
    wedge_spectrum, CurvePoint, PolyKind,
};
use serde_json::json;

use crate::args::{Format, SpectraArgs, SpectrumKind};
use crate::error::{usage, CliError, CliResult};
use crate::output::{numeric_csv, Report};

/// Width of the default grid above the lower edge of the α-type domains.
const ALPHA_SPAN: f64 = 10.0;
const ORDER_MAX: f64 = 10.0;

struct Layout {
    name: &'static str,
    abscissa: &'static str,
    columns: [&'static str; 3],
    /// Exclusive lower edge of the domain.
    lower: f64,
    upper: Option<f64>,
    single: Option<f64>,
}

fn layout(args: &SpectraArgs, c: f64) -> CliResult<Layout> {
    let edge = 0.5 * (1.0 + args.lambda * args.lambda);
    let (name, abscissa, columns, lower, upper, single, single_flag) = match args.kind {
        SpectrumKind::Tau => ("tau", "n", ["n", "tau", "dtau_dn"], moment_threshold(c), None, args.n, "--n"),
        SpectrumKind::D => ("D", "n", ["n", "D", "dD_dn"], moment_threshold(c), None, args.n, "--n"),
        SpectrumKind::F => ("f", "alpha", ["alpha", "f", "df_dalpha"], 0.5, None, args.alpha, "--alpha"),
        SpectrumKind::Mixed => ("mixed", "alpha", ["alpha", "f", "df_dalpha"], edge, None, args.alpha, "--alpha"),
        SpectrumKind::Wedge => {
            ("wedge", "theta", ["theta", "f", "df_dtheta"], 0.0, Some(PI / edge), args.theta, "--theta")
        }
        SpectrumKind::Poly => {
            ("poly", "alpha", ["alpha", "f_m", "df_m_dalpha"], args.m as f64 * edge, None, args.alpha, "--alpha")
        }
        SpectrumKind::Density => {
            ("density", "alpha", ["alpha", "density", "ddensity_dalpha"], 0.5, None, args.alpha, "--alpha")
        }
    };
    let stray = [("--n", args.n), ("--alpha", args.alpha), ("--theta", args.theta)]
        .into_iter()
        .find(|&(flag, value)| value.is_some() && flag != single_flag);
    if let Some((flag, _)) = stray {
        return Err(usage(format!("spectra {name} takes {single_flag}, not {flag}")));
    }
    if args.kind == SpectrumKind::F && args.lambda != 0.0 {
        return Err(usage("spectra f is the λ = 0 spectrum; use spectra mixed for --lambda"));
    }
    Ok(Layout { name, abscissa, columns, lower, upper, single })
}

fn grid(args: &SpectraArgs, layout: &Layout) -> CliResult<Vec<f64>> {
    if let Some(x) = layout.single {
        return Ok(vec![x]);
    }
    let points = args.points;
    if points == 0 {
        return Err(usage("--points must be at least 1"));
    }
    let default_to = match (layout.upper, layout.abscissa) {
        (Some(upper), _) => upper * points as f64 / (points + 1) as f64,
        (None, "n") => ORDER_MAX,
        (None, _) => layout.lower + ALPHA_SPAN,
    };
    let to = args.to.unwrap_or(default_to);
    match args.from {
        Some(from) => {
            if points < 2 || !(from < to) {
                return Err(usage("an explicit grid needs --from < --to and --points ≥ 2"));
            }
            let step = (to - from) / (points - 1) as f64;
            Ok((0..points).map(|i| if i + 1 == points { to } else { from + step * i as f64 }).collect())
        }
        None => {
            if !(layout.lower < to) {
                return Err(usage(format!("--to must exceed the lower edge {}", layout.lower)));
            }
            let span = to - layout.lower;
            Ok((1..=points).map(|i| layout.lower + span * i as f64 / points as f64).collect())
        }
    }
}

fn derivative(f: &dyn Fn(f64) -> kpzlab_core::Result<f64>, x: f64, y: f64) -> f64 {
    let h = 1e-5 * x.abs().max(1.0);
    match (f(x + h), f(x - h)) {
        (Ok(up), Ok(down)) => (up - down) / (2.0 * h),
        (Ok(up), Err(_)) => (up - y) / h,
        (Err(_), Ok(down)) => (y - down) / h,
        (Err(_), Err(_)) => f64::NAN,
    }
}

pub fn run(args: &SpectraArgs) -> CliResult<Report> {
    let c = args.model.central_charge(args.phase)?;
    let layout = layout(args, c)?;
    let lambda = args.lambda;
    let arms = args.m;
    let poly_kind = PolyKind::from(args.poly_kind);
    let ratio = args.ratio;
    let function: Box<dyn Fn(f64) -> kpzlab_core::Result<f64>> = match args.kind {
        SpectrumKind::Tau => Box::new(move |n| mf_tau(c, n)),
        SpectrumKind::D => Box::new(move |n| mf_dimension(c, n)),
        SpectrumKind::F => Box::new(move |a| mf_spectrum(c, a)),
        SpectrumKind::Mixed => Box::new(move |a| mixed_spectrum(c, a, lambda)),
        SpectrumKind::Wedge => Box::new(move |t| wedge_spectrum(c, t, lambda)),
        SpectrumKind::Poly => Box::new(move |a| poly_spectrum(c, &vec![a; arms], lambda, poly_kind)),
        SpectrumKind::Density => Box::new(move |a| alpha_density(c, a, ratio)),
    };
    let points = grid(args, &layout)?
        .into_iter()
        .map(|x| {
            let y = function(x).map_err(|source| CliError::AtParameter { name: layout.abscissa, value: x, source })?;
            Ok(CurvePoint { x, y, dy: derivative(&*function, x, y) })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let max = points.iter().filter(|p| p.y.is_finite()).max_by(|a, b| a.y.total_cmp(&b.y));
    let supremum = match args.kind {
        SpectrumKind::F | SpectrumKind::Mixed | SpectrumKind::Wedge => Some(ep_dimension(c, lambda)?),
        _ => None,
    };
    let parameters = json!({
        "kind": layout.name, "c": c, "from": args.from, "to": args.to, "points": args.points,
        "n": args.n, "alpha": args.alpha, "theta": args.theta, "lambda": lambda, "m": arms,
        "poly_kind": poly_kind, "ratio": ratio,
    });
    let mut doc = json!({
        "kind": layout.name,
        "c": c,
        "columns": layout.columns,
        "points": points,
        "max": max.map(|p| json!({ "x": p.x, "y": p.y })),
        "supremum": supremum,
        "parameters": parameters,
    });
    if layout.single.is_some() {
        doc["value"] = json!(points[0].y);
    }
    let csv = numeric_csv(&layout.columns, points.iter().map(|p| vec![p.x, p.y, p.dy]));
    Ok(Report {
        command: format!("spectra {}", layout.name),
        seeds: Vec::new(),
        parameters: doc["parameters"].clone(),
        json: doc,
        csv,
        default_format: Format::Csv,
        text: None,
    })
}
