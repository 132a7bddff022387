//! Spectral and energy efficiency derived from the system outage.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// What "transmit power" divides the spectral efficiency by.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PowerBasis {
    /// The common per-user transmit power.
    #[default]
    PerUser,
    /// The sum of both users' transmit powers.
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyPoint {
    /// bit/s/Hz
    pub se: f64,
    /// bit/s/Hz per watt
    pub ee: f64,
    /// W
    pub p_tx: f64,
}

/// `(1 − p_out)·R₁`: the two exchanged messages each take half the frame.
pub fn spectral_efficiency(p_out: f64, r1: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_out) {
        return Err(domain(
            "p_out",
            p_out,
            "outage probability must lie in [0, 1]",
        ));
    }
    Ok((1.0 - p_out) * r1 * 2.0 * 0.5)
}

pub fn energy_efficiency(se: f64, p_tx: f64) -> Result<f64> {
    if !(p_tx > 0.0) {
        return Err(domain("p_tx", p_tx, "transmit power must be positive"));
    }
    Ok(se / p_tx)
}

/// Efficiency of one operating point with users transmitting `p1`, `p2`.
pub fn efficiency_point(
    p_out: f64,
    r1: f64,
    p1: f64,
    p2: f64,
    basis: PowerBasis,
) -> Result<EfficiencyPoint> {
    let p_tx = match basis {
        PowerBasis::PerUser => p1,
        PowerBasis::Sum => p1 + p2,
    };
    let se = spectral_efficiency(p_out, r1)?;
    Ok(EfficiencyPoint {
        se,
        ee: energy_efficiency(se, p_tx)?,
        p_tx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_examples() {
        assert_eq!(spectral_efficiency(0.0, 0.9).unwrap(), 0.9);
        assert_eq!(spectral_efficiency(1.0, 0.9).unwrap(), 0.0);
        assert!((spectral_efficiency(0.444, 0.9).unwrap() - 0.5).abs() < 1e-3);
        assert!(spectral_efficiency(1.1, 0.9).is_err());
        assert!(spectral_efficiency(-0.1, 0.9).is_err());
        assert!(spectral_efficiency(f64::NAN, 0.9).is_err());
    }

    #[test]
    fn energy_examples() {
        assert!((energy_efficiency(0.9, 1.5).unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(energy_efficiency(0.0, 3.0).unwrap(), 0.0);
        assert!(energy_efficiency(0.5, 0.0).is_err());
    }

    #[test]
    fn se_decreasing_and_ee_vanishing() {
        let mut prev = f64::INFINITY;
        for i in 0..=10 {
            let se = spectral_efficiency(i as f64 / 10.0, 0.9).unwrap();
            assert!(se < prev);
            prev = se;
        }
        let ee = energy_efficiency(0.9, 1e12).unwrap();
        assert!(ee < 1e-11);
    }

    #[test]
    fn power_basis() {
        let a = efficiency_point(0.2, 0.9, 1.5, 1.5, PowerBasis::PerUser).unwrap();
        let b = efficiency_point(0.2, 0.9, 1.5, 1.5, PowerBasis::Sum).unwrap();
        assert_eq!(a.se, b.se);
        assert!((a.ee - 2.0 * b.ee).abs() < 1e-15);
        assert_eq!(a.ee, a.se / a.p_tx);
    }
}
