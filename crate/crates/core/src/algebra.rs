//! KPZ maps between quantum-gravity and planar conformal weights.
//!
//! Weights live in one of two frames: on a fluctuating random surface
//! (quantum gravity) or in the Euclidean plane / half-plane. `U_γ` maps the
//! former to the latter; the κ-parametrized forms `𝒰_κ`, `𝒱_κ` cover both
//! SLE phases at once.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Dilute,
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    QuantumGravity,
    Planar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Locus {
    Bulk,
    Boundary,
}

/// Root of `c = 1 − 6γ²/(1−γ)`: `Negative` yields γ ≤ 0, `Positive` the dual γ′ ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Negative,
    Positive,
}

/// One universality class, every parametrization filled in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    pub c: f64,
    pub gamma: f64,
    pub gamma_dual: f64,
    pub g: f64,
    pub kappa: f64,
    pub phase: Phase,
    pub n_loop: Option<f64>,
    pub q_potts: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    pub value: f64,
    pub frame: Frame,
    pub locus: Locus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KacIndex {
    pub p: f64,
    pub q: f64,
}

impl KacIndex {
    pub fn new(p: f64, q: f64) -> Self {
        Self { p, q }
    }

    pub fn transposed(self) -> Self {
        Self { p: self.q, q: self.p }
    }
}

/// Boundary weight of the empty configuration and the correlation-length
/// exponent on the random surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseData {
    pub delta0_boundary: f64,
    pub nu: f64,
}

impl PhaseData {
    pub fn new(phase: Phase, gamma: f64) -> Self {
        match phase {
            Phase::Dilute => Self { delta0_boundary: 0.0, nu: 1.0 },
            Phase::Dense => Self { delta0_boundary: gamma, nu: 1.0 / (1.0 - gamma) },
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !gamma.is_finite() || gamma >= 1.0 {
        return Err(domain(format!("string susceptibility must be finite and < 1, got {gamma}")));
    }
    Ok(())
}

pub(crate) fn check_kappa(kappa: f64) -> Result<()> {
    if !kappa.is_finite() || kappa <= 0.0 {
        return Err(domain(format!("kappa must be finite and > 0, got {kappa}")));
    }
    Ok(())
}

pub fn c_of_gamma(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(1.0 - 6.0 * gamma * gamma / (1.0 - gamma))
}

pub fn gamma_of_c(c: f64, branch: Branch) -> Result<f64> {
    if !c.is_finite() || c > 1.0 {
        return Err(domain(format!("central charge must be ≤ 1, got {c}")));
    }
    // 6γ² + (1−c)γ − (1−c) = 0
    let a = 1.0 - c;
    if a == 0.0 {
        return Ok(0.0);
    }
    let s = (a * a + 24.0 * a).sqrt();
    Ok(match branch {
        Branch::Negative => (-a - s) / 12.0,
        // (s − a)/12 rewritten to avoid cancellation for c → 1
        Branch::Positive => 2.0 * a / (s + a),
    })
}

/// Central charge of SLE_κ: `1 − 3(κ−4)²/(2κ)`.
pub fn c_of_kappa(kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    Ok(1.0 - 1.5 * (kappa - 4.0).powi(2) / kappa)
}

/// `U_γ(Δ) = Δ(Δ−γ)/(1−γ)`.
pub fn kpz_map(gamma: f64, delta: f64) -> f64 {
    delta * (delta - gamma) / (1.0 - gamma)
}

/// Positive inverse of [`kpz_map`].
pub fn kpz_inverse(gamma: f64, x: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let radicand = 4.0 * (1.0 - gamma) * x + gamma * gamma;
    if radicand < 0.0 || radicand.is_nan() {
        return Err(domain(format!("U⁻¹ radicand is negative at x = {x}, γ = {gamma}")));
    }
    let s = radicand.sqrt();
    if gamma < 0.0 {
        Ok(2.0 * (1.0 - gamma) * x / (s - gamma))
    } else {
        Ok(0.5 * (s + gamma))
    }
}

/// `V_γ(x) = U_γ(½(x+γ)) = ¼(x²−γ²)/(1−γ)`.
pub fn kpz_v(gamma: f64, x: f64) -> f64 {
    0.25 * (x - gamma) * (x + gamma) / (1.0 - gamma)
}

/// Planar bulk scaling dimension `2V_γ(Δ̃)` of a star with boundary weight Δ̃.
pub fn bulk_from_boundary_qg(gamma: f64, delta_boundary: f64) -> f64 {
    2.0 * kpz_v(gamma, delta_boundary)
}

/// Dual exponent and weight: `γ′ = −γ/(1−γ)`, `Δ′ = (Δ−γ)/(1−γ)`.
pub fn dual_weight(gamma: f64, delta: f64) -> Result<(f64, f64)> {
    check_gamma(gamma)?;
    let gamma_dual = -gamma / (1.0 - gamma);
    Ok((gamma_dual, (delta - gamma) / (1.0 - gamma)))
}

/// Kač weight `h_{p,q} = ([(1−γ)p − q]² − γ²)/(4(1−γ))`.
pub fn kac_weight(gamma: f64, idx: KacIndex) -> Result<f64> {
    check_gamma(gamma)?;
    let d = (1.0 - gamma) * idx.p - idx.q;
    Ok((d - gamma) * (d + gamma) / (4.0 * (1.0 - gamma)))
}

/// Kač weight in the κ parametrization: `((4p − κq)² − (κ−4)²)/(16κ)`.
pub fn kac_weight_kappa(kappa: f64, idx: KacIndex) -> Result<f64> {
    check_kappa(kappa)?;
    let d = 4.0 * idx.p - kappa * idx.q;
    let k4 = kappa - 4.0;
    Ok((d - k4) * (d + k4) / (16.0 * kappa))
}

/// `𝒰_κ(Δ) = ¼Δ(κΔ + 4 − κ)`.
pub fn sle_kpz(kappa: f64, delta: f64) -> Result<f64> {
    check_kappa(kappa)?;
    Ok(0.25 * delta * (kappa * delta + 4.0 - kappa))
}

/// Positive inverse of [`sle_kpz`].
pub fn sle_kpz_inverse(kappa: f64, x: f64) -> Result<f64> {
    check_kappa(kappa)?;
    let k4 = kappa - 4.0;
    let radicand = 16.0 * kappa * x + k4 * k4;
    if radicand < 0.0 || radicand.is_nan() {
        return Err(domain(format!("𝒰⁻¹ radicand is negative at x = {x}, κ = {kappa}")));
    }
    let s = radicand.sqrt();
    if k4 < 0.0 {
        Ok(8.0 * x / (s - k4))
    } else {
        Ok((s + k4) / (2.0 * kappa))
    }
}

/// `𝒱_κ(Δ) = (κ²Δ² − (κ−4)²)/(16κ)`.
pub fn sle_v(kappa: f64, delta: f64) -> Result<f64> {
    check_kappa(kappa)?;
    let kd = kappa * delta;
    let k4 = kappa - 4.0;
    Ok((kd - k4) * (kd + k4) / (16.0 * kappa))
}

/// Planar bulk dimension `2𝒱_κ(Δ)`.
pub fn sle_bulk(kappa: f64, delta: f64) -> Result<f64> {
    Ok(2.0 * sle_v(kappa, delta)?)
}

/// Sum of `𝒰_κ⁻¹` preimages of a list of planar boundary weights.
pub fn boundary_preimage_sum(kappa: f64, weights: &[f64]) -> Result<f64> {
    weights.iter().try_fold(0.0, |acc, &x| Ok(acc + sle_kpz_inverse(kappa, x)?))
}

/// Planar boundary weight of mutually-avoiding sets: `𝒰_κ(Σ 𝒰_κ⁻¹(x̃_i))`.
pub fn fuse_boundary(kappa: f64, weights: &[f64]) -> Result<f64> {
    if let [single] = weights {
        check_kappa(kappa)?;
        return Ok(*single);
    }
    sle_kpz(kappa, boundary_preimage_sum(kappa, weights)?)
}

/// Planar bulk dimension of mutually-avoiding sets: `2𝒱_κ(Σ 𝒰_κ⁻¹(x̃_i))`.
pub fn fuse_bulk(kappa: f64, weights: &[f64]) -> Result<f64> {
    sle_bulk(kappa, boundary_preimage_sum(kappa, weights)?)
}

/// Short-distance exponent of two boundary operators brought together.
pub fn sde_exponent(kappa: f64, xa: f64, xb: f64, locus: Locus) -> Result<f64> {
    let product = sle_kpz_inverse(kappa, xa)? * sle_kpz_inverse(kappa, xb)?;
    Ok(match locus {
        Locus::Boundary => 0.5 * kappa * product,
        Locus::Bulk => 0.25 * kappa * product + (kappa - 4.0).powi(2) / (8.0 * kappa),
    })
}

impl Weight {
    pub fn new(value: f64, frame: Frame, locus: Locus) -> Self {
        Self { value, frame, locus }
    }

    /// The weight in the dual quantum-gravity frame at the same central charge.
    pub fn dual(self, gamma: f64) -> Result<Self> {
        if self.frame != Frame::QuantumGravity {
            return Err(Error::Domain("only quantum-gravity weights have a dual".into()));
        }
        let (_, value) = dual_weight(gamma, self.value)?;
        Ok(Self { value, ..self })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    macro_rules! assert_close {
        ($a:expr, $b:expr) => {
            assert_close!($a, $b, 1e-12)
        };
        ($a:expr, $b:expr, $tol:expr) => {{
            let (a, b) = ($a, $b);
            assert!(close(a, b, $tol), "{} = {a} but expected {b}", stringify!($a));
        }};
    }

    #[test]
    fn central_charge_of_susceptibility() {
        assert_close!(c_of_gamma(-0.5).unwrap(), 0.0);
        assert_close!(c_of_gamma(0.0).unwrap(), 1.0);
        assert_close!(c_of_gamma(-1.0).unwrap(), -2.0);
        assert!(matches!(c_of_gamma(1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn susceptibility_roots() {
        assert_close!(gamma_of_c(0.0, Branch::Negative).unwrap(), -0.5);
        assert_close!(gamma_of_c(0.0, Branch::Positive).unwrap(), 1.0 / 3.0);
        assert_eq!(gamma_of_c(1.0, Branch::Negative).unwrap(), 0.0);
        assert_eq!(gamma_of_c(1.0, Branch::Positive).unwrap(), 0.0);
        assert!(gamma_of_c(1.5, Branch::Negative).is_err());
        for c in [-2.0, -0.7, 0.0, 0.5, 0.9, 1.0 - 1e-9] {
            let g = gamma_of_c(c, Branch::Negative).unwrap();
            let gd = gamma_of_c(c, Branch::Positive).unwrap();
            assert_close!((1.0 - g) * (1.0 - gd), 1.0);
            assert_close!(c_of_gamma(g).unwrap(), c);
            assert_close!(c_of_gamma(gd).unwrap(), c);
        }
    }

    #[test]
    fn kpz_map_values() {
        assert_close!(kpz_map(-0.5, 0.75), 5.0 / 8.0);
        assert_eq!(kpz_map(-0.3, 0.0), 0.0);
        assert_close!(kpz_map(-0.5, 1.5), 2.0);
        assert_close!(kpz_inverse(-0.5, 1.0).unwrap(), 1.0);
        assert_close!(kpz_inverse(-0.5, 3.0).unwrap(), (73f64.sqrt() - 1.0) / 4.0);
        assert_eq!(kpz_inverse(-0.5, 0.0).unwrap(), 0.0);
        assert!(kpz_inverse(-0.5, -1.0).is_err());
    }

    #[test]
    fn bulk_from_boundary_values() {
        assert_close!(bulk_from_boundary_qg(-0.5, 1.5), 2.0 / 3.0);
        assert_close!(bulk_from_boundary_qg(-0.5, 0.5), 0.0);
        assert_close!(bulk_from_boundary_qg(-0.5, 2.0), 1.25);
    }

    #[test]
    fn dual_weight_values() {
        let (gd, d) = dual_weight(-0.5, -0.5).unwrap();
        assert_close!(gd, 1.0 / 3.0);
        assert_close!(d, 0.0);
        assert_close!(dual_weight(-0.5, 1.0).unwrap().1, 1.0);
        let (gd, d) = dual_weight(-0.5, 1.5).unwrap();
        assert_close!(d, 4.0 / 3.0);
        assert_close!(1.5 * d, kpz_map(-0.5, 1.5));
        let (g, back) = dual_weight(gd, d).unwrap();
        assert_close!(g, -0.5);
        assert_close!(back, 1.5);
    }

    #[test]
    fn kac_values() {
        assert_close!(kac_weight(-0.5, KacIndex::new(1.0, 4.0)).unwrap(), 1.0);
        assert_close!(kac_weight(-0.3, KacIndex::new(1.0, 1.0)).unwrap(), 0.0);
        assert_close!(kac_weight(-0.5, KacIndex::new(0.0, 2.0)).unwrap(), 5.0 / 8.0);
    }

    #[test]
    fn kac_transposition() {
        for gamma in [-2.0, -1.0, -0.5, -0.25] {
            let gd = dual_weight(gamma, 0.0).unwrap().0;
            for p in 1..=6 {
                for q in 1..=6 {
                    let idx = KacIndex::new(p as f64, q as f64);
                    assert_close!(kac_weight(gd, idx).unwrap(), kac_weight(gamma, idx.transposed()).unwrap());
                }
            }
        }
    }

    #[test]
    fn sle_forms() {
        assert_close!(sle_kpz_inverse(6.0, 0.0).unwrap(), 1.0 / 3.0);
        assert_eq!(sle_kpz_inverse(3.0, 0.0).unwrap(), 0.0);
        assert_eq!(sle_kpz_inverse(4.0, 0.0).unwrap(), 0.0);
        assert_close!(sle_kpz(8.0 / 3.0, 2.0).unwrap(), 10.0 / 3.0);
        assert_close!(sle_bulk(8.0 / 3.0, 2.0).unwrap(), 1.25);
        assert_close!(sle_bulk(6.0, 1.0 / 3.0).unwrap(), 0.0);
        assert_close!(sle_bulk(6.0, 2.0 / 3.0).unwrap(), 0.25);
        assert!(sle_kpz(0.0, 1.0).is_err());
    }

    #[test]
    fn sle_forms_match_gamma_forms() {
        for kappa in [2.0, 8.0 / 3.0, 3.0, 4.0] {
            let gamma = 1.0 - 4.0 / kappa;
            for d in [0.0, 0.3, 1.0, 2.5] {
                assert_close!(sle_kpz(kappa, d).unwrap(), kpz_map(gamma, d));
            }
        }
        for kappa in [4.0, 6.0, 8.0] {
            let gamma_dual = 1.0 - 4.0 / kappa;
            for d in [0.0, 0.3, 1.0, 2.5] {
                assert_close!(sle_kpz(kappa, d).unwrap(), kpz_map(gamma_dual, d));
            }
        }
    }

    #[test]
    fn fusion() {
        assert_close!(fuse_boundary(8.0 / 3.0, &[1.0, 1.0]).unwrap(), 10.0 / 3.0);
        assert_eq!(fuse_boundary(6.0, &[0.7]).unwrap(), 0.7);
        assert_close!(fuse_boundary(6.0, &[0.0, 0.0]).unwrap(), 1.0 / 3.0);
        assert_close!(fuse_bulk(8.0 / 3.0, &[1.0, 1.0]).unwrap(), 1.25);
        assert_close!(fuse_bulk(8.0 / 3.0, &[1.0, 1.0, 1.0]).unwrap(), 35.0 / 12.0);
        assert_close!(fuse_bulk(6.0, &[0.0, 0.0, 0.0]).unwrap(), 2.0 / 3.0);
        assert!(fuse_boundary(6.0, &[1.0, -5.0]).is_err());
    }

    #[test]
    fn sde() {
        assert_close!(sde_exponent(6.0, 1.0 / 3.0, 1.0 / 3.0, Locus::Boundary).unwrap(), 4.0 / 3.0);
        assert_eq!(sde_exponent(3.0, 0.0, 0.9, Locus::Boundary).unwrap(), 0.0);
        assert_close!(sde_exponent(6.0, 0.0, 0.0, Locus::Bulk).unwrap(), 0.25);
        for kappa in [2.0, 8.0 / 3.0, 6.0, 8.0] {
            let shift = sde_exponent(kappa, 0.0, 0.0, Locus::Bulk).unwrap()
                - 0.25 * kappa * sle_kpz_inverse(kappa, 0.0).unwrap().powi(2);
            assert_close!(shift, (1.0 - c_of_kappa(kappa).unwrap()) / 12.0);
        }
    }

    #[test]
    fn shift_relation() {
        for gamma in [-2.0f64, -1.0, -0.5, -0.25, 0.0] {
            for x in [0.0, 0.1, 1.0, 7.5] {
                let direct = 0.5 * (4.0 * (1.0 - gamma) * x + gamma * gamma).sqrt() + 0.5 * gamma;
                assert_close!(kpz_inverse(gamma, x).unwrap(), direct);
            }
        }
    }

    #[test]
    fn phase_data() {
        for (phase, gamma) in [(Phase::Dilute, -0.5), (Phase::Dense, -0.5), (Phase::Dense, -1.0)] {
            let pd = PhaseData::new(phase, gamma);
            assert_close!(1.0 / pd.nu, 1.0 - pd.delta0_boundary);
        }
    }
}
