use kpzlab_core::algebra::{kac_weight_kappa, sde_exponent};
use kpzlab_core::models::{
    brownian_zeta, copolymer_star, cpa_beta, geometry_dims, packet_zeta, perc_crossing, sle_disconnection,
    sle_double_sided, sle_star_moment, watermelon, watermelon_dual, winding_variance_coeff, Sides, StarSpec,
};
use kpzlab_core::{fmt17, Frame, KacIndex, Locus, Phase};
use serde_json::{json, Map, Value};

use crate::args::{ExponentArgs, ExponentSelector, Format};
use crate::error::{usage, CliResult};
use crate::output::{text_csv, Report};

fn need<T>(value: Option<T>, flag: &str, selector: &str) -> CliResult<T> {
    value.ok_or_else(|| usage(format!("exponents {selector} needs {flag}")))
}

fn whole(value: f64, flag: &str) -> CliResult<u32> {
    if value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
        Ok(value as u32)
    } else {
        Err(usage(format!("{flag} must be a non-negative integer here, got {value}")))
    }
}

fn selector_name(selector: ExponentSelector) -> String {
    clap::ValueEnum::to_possible_value(&selector).expect("no skipped variants").get_name().to_string()
}

/// `n` or `n:m` entries.
fn parse_packets(entries: &[String]) -> CliResult<Vec<(f64, f64)>> {
    entries
        .iter()
        .map(|e| {
            let number = |s: &str| s.trim().parse::<f64>().map_err(|_| usage(format!("bad packet entry {e:?}")));
            match e.split_once(':') {
                Some((n, m)) => Ok((number(n)?, number(m)?)),
                None => Ok((number(e)?, 0.0)),
            }
        })
        .collect()
}

struct Evaluation {
    values: Vec<(&'static str, f64)>,
    formula: String,
    model: Option<Value>,
}

impl Evaluation {
    fn single(name: &'static str, value: f64, formula: impl Into<String>) -> Self {
        Self { values: vec![(name, value)], formula: formula.into(), model: None }
    }
}

fn evaluate(args: &ExponentArgs, name: &str) -> CliResult<Evaluation> {
    let locus = Locus::from(args.locus);
    let boundary = locus == Locus::Boundary;
    let kappa = || -> CliResult<f64> { Ok(args.model.point(args.phase)?.kappa) };
    let legs = || -> CliResult<u32> { whole(need(args.legs, "--L", name)?, "--L") };
    let planar_map = |inner: &str| if boundary { format!("𝒰_κ({inner})") } else { format!("2𝒱_κ({inner})") };
    Ok(match args.selector {
        ExponentSelector::Zeta => {
            let l = need(args.legs, "--L", name)?;
            let formula = if boundary { "2ζ̃_L = L(2L + 1)/3" } else { "ζ_L = (4L² − 1)/24" };
            Evaluation::single("zeta", brownian_zeta(l, locus)?, formula)
        }
        ExponentSelector::Packet => {
            let packets = parse_packets(&args.packets)?;
            if packets.is_empty() || packets.iter().any(|&(_, m)| m != 0.0) {
                return Err(usage("exponents packet needs --packets n1,n2,... (Brownian counts only)"));
            }
            let counts: Vec<f64> = packets.iter().map(|&(n, _)| n).collect();
            let outer = if boundary { "U" } else { "V" };
            Evaluation::single(
                "zeta",
                packet_zeta(&counts, locus)?,
                format!("{outer}_γ(Σ U_γ⁻¹(n_i)) with γ = −1/2"),
            )
        }
        ExponentSelector::Copolymer => {
            let packets = parse_packets(&args.packets)?;
            let star = StarSpec::new(args.strands, packets, locus)?;
            let outer = if boundary { "U" } else { "V" };
            Evaluation::single(
                "exponent",
                copolymer_star(&star, locus)?,
                format!("{outer}_γ(k U_γ⁻¹(5/8) + Σ U_γ⁻¹(n_i + 5m_i/8)) with γ = −1/2"),
            )
        }
        ExponentSelector::Perc => {
            let formula = if boundary { "x̃_L = L(L + 1)/6" } else { "x_L = (L² − 1)/12" };
            Evaluation::single("x", perc_crossing(legs()?, locus)?, formula)
        }
        ExponentSelector::Watermelon => {
            let model = args.model.point(args.phase)?;
            let frame = Frame::from(args.frame);
            let legs = legs()?;
            let weight = watermelon(&model, legs, locus, frame)?;
            let formula = match (frame, locus, model.phase) {
                (Frame::Planar, Locus::Boundary, _) => "x̃_L = L(2L + 4 − κ)/(2κ)",
                (Frame::Planar, Locus::Bulk, _) => "x_L = (4L² − (4 − κ)²)/(8κ)",
                (Frame::QuantumGravity, Locus::Boundary, Phase::Dilute) => "Δ̃_L = L(1 − γ)/2",
                (Frame::QuantumGravity, Locus::Boundary, Phase::Dense) => "Δ̃_L = γ + L/2",
                (Frame::QuantumGravity, Locus::Bulk, Phase::Dilute) => "Δ_L = γ/2 + L(1 − γ)/4",
                (Frame::QuantumGravity, Locus::Bulk, Phase::Dense) => "Δ_L = γ/2 + L/4",
            };
            let mut values = vec![("weight", weight.value)];
            if frame == Frame::QuantumGravity {
                values.push(("dual_weight", watermelon_dual(&model, legs, locus)?.value));
            }
            Evaluation { values, formula: formula.into(), model: Some(json!(model)) }
        }
        ExponentSelector::Dims => {
            let model = args.model.point(args.phase)?;
            let dims = geometry_dims(&model);
            Evaluation {
                values: vec![("d_hull", dims.d_hull), ("d_ep", dims.d_ep), ("d_sc", dims.d_sc)],
                formula: "D_H = 1 + 1/(2g), D_EP = 1 + min(g, 1/g)/2, D_SC = 1 + 1/(2g) − 3g/2".into(),
                model: Some(json!(model)),
            }
        }
        ExponentSelector::SleMoment => {
            let n = need(args.n, "--n", name)?;
            let value = sle_star_moment(kappa()?, legs()?, n, locus, args.subtracted)?;
            let mut formula = planar_map("2L/κ + 𝒰_κ⁻¹(n)");
            if args.subtracted {
                formula.push_str(" minus the L-leg watermelon");
            }
            Evaluation::single("x", value, formula)
        }
        ExponentSelector::Disconnection => {
            let sides = Sides::from(args.sides);
            let body = match (sides, locus) {
                (Sides::One, Locus::Boundary) => "L(1 − 4/κ)",
                (Sides::One, Locus::Bulk) => "(L − 1)(1 − 4/κ)/2 + (κ − 4)/8",
                (Sides::Two, Locus::Boundary) => "(4L + κ − 4)(1 − 4/κ)/2",
                (Sides::Two, Locus::Bulk) => "(2L + κ − 4)(1 − 4/κ)/2",
            };
            let value = sle_disconnection(kappa()?, legs()?, sides, locus)?;
            Evaluation::single("x", value, format!("{body} for κ > 4, 0 for κ ≤ 4"))
        }
        ExponentSelector::DoubleSided => {
            let n1 = need(args.n1, "--n1", name)?;
            let n2 = need(args.n2, "--n2", name)?;
            let value = sle_double_sided(kappa()?, legs()?, n1, n2, locus)?;
            Evaluation::single("x", value, planar_map("𝒰_κ⁻¹(n₁) + 2L/κ + 𝒰_κ⁻¹(n₂)"))
        }
        ExponentSelector::Winding => {
            let k = need(args.k, "--k", name)?;
            let j = args.j.unwrap_or(0);
            Evaluation::single("winding", winding_variance_coeff(kappa()?, k, j)?, "κ/(k + j·max(κ/2 − 2, 0))²")
        }
        ExponentSelector::Sde => {
            let xa = need(args.xa, "--xa", name)?;
            let xb = need(args.xb, "--xb", name)?;
            let formula = if boundary {
                "(κ/2) 𝒰_κ⁻¹(x̃_A) 𝒰_κ⁻¹(x̃_B)"
            } else {
                "(κ/4) 𝒰_κ⁻¹(x̃_A) 𝒰_κ⁻¹(x̃_B) + (κ − 4)²/(8κ)"
            };
            Evaluation::single("x", sde_exponent(kappa()?, xa, xb, locus)?, formula)
        }
        ExponentSelector::Kac => {
            let index = KacIndex::new(need(args.p, "--p", name)?, need(args.q, "--q", name)?);
            let model = args.model.point(args.phase)?;
            Evaluation {
                values: vec![("h", kac_weight_kappa(model.kappa, index)?)],
                formula: "h_{p,q} = ((4p − κq)² − (κ − 4)²)/(16κ)".into(),
                model: Some(json!(model)),
            }
        }
        ExponentSelector::Cpa => {
            let c = args.model.central_charge(args.phase)?;
            Evaluation::single("beta", cpa_beta(c)?, "β = D(2)/D(0)")
        }
    })
}

fn parameter_echo(args: &ExponentArgs) -> Value {
    let m = &args.model;
    json!({
        "c": m.c, "kappa": m.kappa, "g": m.g, "Q": m.q_potts, "N": m.n_loop,
        "phase": args.phase.map(|p| format!("{p:?}").to_lowercase()),
        "L": args.legs, "locus": format!("{:?}", args.locus).to_lowercase(),
        "frame": format!("{:?}", args.frame).to_lowercase(),
        "packets": args.packets, "strands": args.strands,
        "n": args.n, "n1": args.n1, "n2": args.n2,
        "sides": format!("{:?}", args.sides).to_lowercase(), "subtracted": args.subtracted,
        "k": args.k, "j": args.j, "xa": args.xa, "xb": args.xb, "p": args.p, "q": args.q,
    })
}

pub fn run(args: &ExponentArgs) -> CliResult<Report> {
    let name = selector_name(args.selector);
    let eval = evaluate(args, &name)?;
    let mut doc = Map::new();
    doc.insert("selector".into(), json!(name));
    for &(key, value) in &eval.values {
        doc.insert(key.into(), json!(value));
    }
    doc.insert("formula".into(), json!(eval.formula));
    if let Some(model) = eval.model {
        doc.insert("model".into(), model);
    }
    let parameters = parameter_echo(args);
    doc.insert("parameters".into(), parameters.clone());
    let csv = text_csv(
        &["quantity", "value"],
        eval.values.iter().map(|&(key, value)| vec![key.to_string(), fmt17(value)]),
    );
    Ok(Report {
        command: format!("exponents {name}"),
        seeds: Vec::new(),
        parameters,
        json: Value::Object(doc),
        csv,
        default_format: Format::Json,
        text: None,
    })
}
