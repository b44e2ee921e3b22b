//! Named exponent families: Brownian intersections, copolymer stars,
//! percolation crossings, O(N)/Potts watermelons, SLE star, disconnection and
//! winding exponents, and the fractal dimensions of cluster boundaries.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::algebra::{
    c_of_gamma, check_kappa, dual_weight, gamma_of_c, kpz_inverse, kpz_map, kpz_v, sle_bulk, sle_kpz,
    Branch, Frame, Locus, ModelPoint, Phase, Weight,
};
use crate::error::{Error, Result};
use crate::spectra;

/// String susceptibility of the c = 0 theories (Brownian paths, SAWs).
const GAMMA_C0: f64 = -0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PottsKind {
    Critical,
    Tricritical,
}

/// The ways a universality class can be named.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSpec {
    CentralCharge(f64),
    CentralChargeInPhase(f64, Phase),
    Gamma(f64),
    GammaInPhase(f64, Phase),
    Coupling(f64),
    Kappa(f64),
    Loop { n: f64, phase: Phase },
    Potts { q: f64, kind: PottsKind },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sides {
    One,
    Two,
}

/// A star of `strands` mutually-avoiding strands plus packets of
/// `(n_brownian, m_saw)` legs; legs in one packet are transparent to each
/// other, distinct packets avoid each other.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarSpec {
    pub strands: u32,
    pub packets: Vec<(f64, f64)>,
    pub locus: Locus,
    pub pinched_pairs: u32,
}

impl StarSpec {
    pub fn new(strands: u32, packets: Vec<(f64, f64)>, locus: Locus) -> Result<Self> {
        let spec = Self { strands, packets, locus, pinched_pairs: 0 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.packets.iter().any(|&(n, m)| !(n >= 0.0 && m >= 0.0)) {
            return Err(Error::Range("packet counts must be non-negative".into()));
        }
        if 2 * self.pinched_pairs > self.strands {
            return Err(Error::Range(format!(
                "{} pinched pairs need at least {} strands",
                self.pinched_pairs,
                2 * self.pinched_pairs
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryDims {
    pub d_hull: f64,
    pub d_ep: f64,
    pub d_sc: f64,
}

fn range(msg: impl Into<String>) -> Error {
    Error::Range(msg.into())
}

pub fn model_point(spec: ModelSpec) -> Result<ModelPoint> {
    match spec {
        ModelSpec::Kappa(kappa) => from_kappa(kappa),
        ModelSpec::Coupling(g) => {
            if !(g.is_finite() && g > 0.0) {
                return Err(range(format!("coupling g must be > 0, got {g}")));
            }
            from_kappa(4.0 / g)
        }
        ModelSpec::CentralCharge(c) => {
            if c == 1.0 {
                return from_kappa(4.0);
            }
            Err(Error::Ambiguity(format!(
                "c = {c} is shared by a dilute and a dense model; give the phase as well"
            )))
        }
        ModelSpec::CentralChargeInPhase(c, phase) => {
            if !(c <= 1.0) {
                return Err(range(format!("central charge must be ≤ 1, got {c}")));
            }
            let gamma = gamma_of_c(c, Branch::Negative)?;
            from_gamma(gamma, phase)
        }
        ModelSpec::Gamma(gamma) => {
            if gamma == 0.0 {
                return from_kappa(4.0);
            }
            Err(Error::Ambiguity(format!(
                "γ = {gamma} is shared by a dilute and a dense model; give the phase as well"
            )))
        }
        ModelSpec::GammaInPhase(gamma, phase) => {
            if !(gamma <= 0.0) {
                return Err(range(format!("γ must be ≤ 0, got {gamma}")));
            }
            from_gamma(gamma, phase)
        }
        ModelSpec::Loop { n, phase } => {
            if !(-2.0..=2.0).contains(&n) {
                return Err(range(format!("loop fugacity N must lie in [-2, 2], got {n}")));
            }
            let theta = (-0.5 * n).acos() / PI;
            let g = match phase {
                Phase::Dense => theta,
                Phase::Dilute => 2.0 - theta,
            };
            if g == 0.0 {
                return Err(range("N = -2 in the dense phase has no finite κ"));
            }
            let mut point = from_kappa(4.0 / g)?;
            point.n_loop = Some(n);
            point.q_potts = potts_of(g, n);
            Ok(point)
        }
        ModelSpec::Potts { q, kind } => {
            if !(0.0..=4.0).contains(&q) {
                return Err(range(format!("Potts Q must lie in [0, 4], got {q}")));
            }
            let phase = match kind {
                PottsKind::Critical => Phase::Dense,
                PottsKind::Tricritical => Phase::Dilute,
            };
            let mut point = model_point(ModelSpec::Loop { n: q.sqrt(), phase })?;
            point.q_potts = Some(q);
            Ok(point)
        }
    }
}

fn from_gamma(gamma: f64, phase: Phase) -> Result<ModelPoint> {
    let kappa = match phase {
        Phase::Dilute => 4.0 / (1.0 - gamma),
        Phase::Dense => 4.0 * (1.0 - gamma),
    };
    let mut point = from_kappa(kappa)?;
    point.gamma = gamma;
    point.c = c_of_gamma(gamma)?;
    Ok(point)
}

fn potts_of(g: f64, n: f64) -> Option<f64> {
    (0.5..=1.5).contains(&g).then_some(n * n)
}

fn from_kappa(kappa: f64) -> Result<ModelPoint> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(range(format!("kappa must be > 0, got {kappa}")));
    }
    let g = 4.0 / kappa;
    let (phase, gamma) = if kappa <= 4.0 {
        (Phase::Dilute, 1.0 - 4.0 / kappa)
    } else {
        (Phase::Dense, 1.0 - kappa / 4.0)
    };
    let gamma_dual = -gamma / (1.0 - gamma);
    let n_loop = (g <= 2.0).then(|| -2.0 * (PI * g).cos());
    Ok(ModelPoint {
        c: c_of_gamma(gamma)?,
        gamma,
        gamma_dual,
        g,
        kappa,
        phase,
        n_loop,
        q_potts: n_loop.and_then(|n| potts_of(g, n)),
    })
}

/// Brownian intersection exponent of `l` paths. `Bulk` gives ζ_L; `Boundary`
/// gives the half-plane dimension 2ζ̃_L, normalized so that a single path has 1.
pub fn brownian_zeta(l: f64, locus: Locus) -> Result<f64> {
    if !(l >= 0.0) {
        return Err(range(format!("number of paths must be ≥ 0, got {l}")));
    }
    Ok(match locus {
        Locus::Bulk => (4.0 * l * l - 1.0) / 24.0,
        Locus::Boundary => l * (1.0 + 2.0 * l) / 3.0,
    })
}

/// Exponent of mutually-avoiding packets of transparent Brownian paths.
pub fn packet_zeta(packet_counts: &[f64], locus: Locus) -> Result<f64> {
    let packets: Vec<(f64, f64)> = packet_counts.iter().map(|&n| (n, 0.0)).collect();
    copolymer_star(&StarSpec::new(0, packets, locus)?, locus)
}

/// Planar weight of a c = 0 copolymer star. Every extra strand counts as one
/// self-avoiding leg; a SAW weighs as 5/8 of a Brownian path.
pub fn copolymer_star(star: &StarSpec, locus: Locus) -> Result<f64> {
    star.validate()?;
    let saw = kpz_inverse(GAMMA_C0, 5.0 / 8.0)?;
    let qg = star.packets.iter().try_fold(star.strands as f64 * saw, |acc, &(n, m)| {
        Ok::<_, Error>(acc + kpz_inverse(GAMMA_C0, n + 0.625 * m)?)
    })?;
    Ok(match locus {
        Locus::Boundary => kpz_map(GAMMA_C0, qg),
        Locus::Bulk => kpz_v(GAMMA_C0, qg),
    })
}

/// Bichromatic ℓ-path crossing exponent of critical percolation.
pub fn perc_crossing(paths: u32, locus: Locus) -> Result<f64> {
    if paths == 0 {
        return Err(range("at least one crossing path is required"));
    }
    let half = 0.5 * paths as f64;
    Ok(match locus {
        Locus::Boundary => kpz_map(GAMMA_C0, half),
        Locus::Bulk => 2.0 * kpz_v(GAMMA_C0, half),
    })
}

/// L-leg watermelon weight in the planar or quantum-gravity frame.
pub fn watermelon(model: &ModelPoint, legs: u32, locus: Locus, frame: Frame) -> Result<Weight> {
    if legs == 0 {
        return Err(range("a watermelon needs at least one leg"));
    }
    let l = legs as f64;
    let kappa = model.kappa;
    let gamma = model.gamma;
    let value = match (frame, locus) {
        (Frame::Planar, Locus::Boundary) => l * (2.0 * l + 4.0 - kappa) / (2.0 * kappa),
        (Frame::Planar, Locus::Bulk) => (4.0 * l * l - (4.0 - kappa).powi(2)) / (8.0 * kappa),
        (Frame::QuantumGravity, Locus::Boundary) => match model.phase {
            Phase::Dilute => 0.5 * l * (1.0 - gamma),
            Phase::Dense => gamma + 0.5 * l,
        },
        (Frame::QuantumGravity, Locus::Bulk) => match model.phase {
            Phase::Dilute => 0.5 * gamma + 0.25 * l * (1.0 - gamma),
            Phase::Dense => 0.5 * gamma + 0.25 * l,
        },
    };
    Ok(Weight::new(value, frame, locus))
}

/// Quantum-gravity watermelon weight in the dual frame `(Δ−γ)/(1−γ)`.
pub fn watermelon_dual(model: &ModelPoint, legs: u32, locus: Locus) -> Result<Weight> {
    let w = watermelon(model, legs, locus, Frame::QuantumGravity)?;
    let (_, value) = dual_weight(model.gamma, w.value)?;
    Ok(Weight { value, ..w })
}

pub fn geometry_dims(model: &ModelPoint) -> GeometryDims {
    let g = model.g;
    GeometryDims {
        d_hull: 1.0 + 0.5 / g,
        d_ep: 1.0 + 0.5 * g.min(1.0 / g),
        d_sc: 1.0 + 0.5 / g - 1.5 * g,
    }
}

fn moment_threshold(kappa: f64) -> f64 {
    -(kappa - 4.0).powi(2) / (16.0 * kappa)
}

fn check_moment(kappa: f64, n: f64) -> Result<()> {
    let threshold = moment_threshold(kappa);
    if !(n >= threshold) {
        return Err(Error::MomentOutOfRange { n, threshold });
    }
    Ok(())
}

fn moment_preimage(kappa: f64, n: f64) -> Result<f64> {
    check_moment(kappa, n)?;
    // the radicand may round below zero at n = n*
    let k4 = kappa - 4.0;
    let s = (16.0 * kappa * n + k4 * k4).max(0.0).sqrt();
    Ok(if k4 < 0.0 { 8.0 * n / (s - k4) } else { (s + k4) / (2.0 * kappa) })
}

fn final_map(kappa: f64, preimage: f64, locus: Locus) -> Result<f64> {
    match locus {
        Locus::Boundary => sle_kpz(kappa, preimage),
        Locus::Bulk => sle_bulk(kappa, preimage),
    }
}

fn planar_watermelon(kappa: f64, legs: u32, locus: Locus) -> Result<f64> {
    let model = model_point(ModelSpec::Kappa(kappa))?;
    Ok(watermelon(&model, legs, locus, Frame::Planar)?.value)
}

/// Exponent of L SLE strands dressed by n-th moment harmonic measure,
/// x̃(L∧n) or x(L∧n); `subtracted` removes the bare L-leg watermelon.
pub fn sle_star_moment(kappa: f64, legs: u32, n: f64, locus: Locus, subtracted: bool) -> Result<f64> {
    check_kappa(kappa)?;
    if legs == 0 {
        return Err(range("at least one strand is required"));
    }
    let preimage = 2.0 * legs as f64 / kappa + moment_preimage(kappa, n)?;
    let x = final_map(kappa, preimage, locus)?;
    Ok(if subtracted { x - planar_watermelon(kappa, legs, locus)? } else { x })
}

/// Generalized disconnection exponents; they vanish in the simple phase κ ≤ 4.
pub fn sle_disconnection(kappa: f64, legs: u32, sides: Sides, locus: Locus) -> Result<f64> {
    check_kappa(kappa)?;
    if legs == 0 {
        return Err(range("at least one strand is required"));
    }
    if kappa <= 4.0 {
        return Ok(0.0);
    }
    let l = legs as f64;
    let slope = 1.0 - 4.0 / kappa;
    Ok(match (sides, locus) {
        (Sides::One, Locus::Boundary) => l * slope,
        (Sides::One, Locus::Bulk) => 0.5 * (l - 1.0) * slope + (kappa - 4.0) / 8.0,
        (Sides::Two, Locus::Boundary) => 0.5 * (4.0 * l + kappa - 4.0) * slope,
        (Sides::Two, Locus::Bulk) => 0.5 * (2.0 * l + kappa - 4.0) * slope,
    })
}

/// x̃(n₁∧L∧n₂) or x(n₁∧L∧n₂): L strands dressed on both sides.
pub fn sle_double_sided(kappa: f64, legs: u32, n1: f64, n2: f64, locus: Locus) -> Result<f64> {
    check_kappa(kappa)?;
    if legs == 0 {
        return Err(range("at least one strand is required"));
    }
    let preimage = moment_preimage(kappa, n1)? + 2.0 * legs as f64 / kappa + moment_preimage(kappa, n2)?;
    final_map(kappa, preimage, locus)
}

/// Coefficient of ln R in the winding-angle variance of k strands with j
/// pinched pairs.
pub fn winding_variance_coeff(kappa: f64, strands: u32, pinched_pairs: u32) -> Result<f64> {
    check_kappa(kappa)?;
    if strands == 0 || 2 * pinched_pairs > strands {
        return Err(range(format!("need k ≥ 1 and 2j ≤ k, got k = {strands}, j = {pinched_pairs}")));
    }
    let effective = strands as f64 + pinched_pairs as f64 * (0.5 * kappa - 2.0).max(0.0);
    Ok(kappa / (effective * effective))
}

/// Constant-phase-angle exponent β = D(2)/D(0).
pub fn cpa_beta(c: f64) -> Result<f64> {
    Ok(spectra::mf_dimension(c, 2.0)? / spectra::mf_dimension(c, 0.0)?)
}
