//! Exact KPZ / SLE exponent algebra, multifractal spectra of harmonic
//! measure, and Monte Carlo kernels that check them on lattices.

pub mod algebra;
pub mod error;
pub mod fit;
pub mod harmonic;
pub mod models;
pub mod percsim;
pub mod rng;
pub mod slesim;
pub mod spectra;
pub mod verify;
pub mod walksim;

pub use algebra::{Branch, Frame, KacIndex, Locus, ModelPoint, Phase, PhaseData, Weight};
pub use error::{Error, Result};
pub use fit::FitResult;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Formats a float with 17 significant digits, the round-trip precision of
/// binary64. Non-finite values print as `NaN`, `inf` or `-inf`.
pub fn fmt17(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.0000000000000000".to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-5..16).contains(&exponent) {
        let decimals = (16 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.16e}")
    }
}

#[cfg(test)]
mod tests {
    use super::fmt17;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt17(0.625), "0.62500000000000000");
        assert_eq!(fmt17(11.0 / 12.0), "0.91666666666666663");
        assert_eq!(fmt17(1.0), "1.0000000000000000");
        assert_eq!(fmt17(-2.5), "-2.5000000000000000");
        assert_eq!(fmt17(1e20), "1.0000000000000000e20");
        for x in [0.1, 1.0 / 3.0, 123456.789, 3e-7, -7.25e300] {
            assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
        }
    }
}
