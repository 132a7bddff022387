//! Closed-form outage probabilities for PSR and TSR.
//!
//! A decode link fails when `γ/(1+I) < u` with `γ ~ Exp(γ̄)` the SNR and
//! `I ~ Exp(μ̄)` the INR at the relay. Conditioning on `I` gives the success
//! probability `e^{−u/γ̄}·γ̄/(γ̄+uμ̄)`.
//!
//! The broadcast succeeds when `X·L ≥ u_bc`, where `X` is the harvested relay
//! power (an [`ExpMixture`]) and `L ~ Exp(rate λ_L)`. Hence
//! `Pr = E_X[e^{−λ_L u_bc / X}]`, and each mixture component integrates to
//! `wᵢ·zᵢK₁(zᵢ)` with `zᵢ = 2√(λ_L u_bc rᵢ)`.

use crate::error::{domain, Error, Result};
use crate::model::{
    dest_min_rate_coeff, harvest_mixture_psr, harvest_mixture_tsr, link_stats_psr, link_stats_tsr,
    tsr_thresholds, ExpMixture, LinkStats, PsrConfig, Relaying, SystemConfig, TsrConfig, User,
};
use crate::specfun::scaled_bessel_k1;

/// Past this `λ_L·u_bc·rᵢ` a broadcast term is dropped as zero.
pub const BESSEL_TERM_CUTOFF: f64 = 1400.0;

/// Per-link and combined outage probabilities of one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageBreakdown {
    pub out_u1r: f64,
    pub out_u2r: f64,
    pub out_bc: f64,
    pub out_system: f64,
}

impl OutageBreakdown {
    /// Combines the three link outages; the system fails if any link fails.
    pub fn from_links(out_u1r: f64, out_u2r: f64, out_bc: f64) -> Self {
        Self {
            out_u1r,
            out_u2r,
            out_bc,
            out_system: 1.0 - (1.0 - out_u1r) * (1.0 - out_u2r) * (1.0 - out_bc),
        }
    }

    pub fn fields(&self) -> [(&'static str, f64); 4] {
        [
            ("out_u1r", self.out_u1r),
            ("out_u2r", self.out_u2r),
            ("out_bc", self.out_bc),
            ("out_system", self.out_system),
        ]
    }

    pub fn link(&self, user: User) -> f64 {
        match user {
            User::One => self.out_u1r,
            User::Two => self.out_u2r,
        }
    }
}

/// Which closed form to use for the decode-link outage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LinkFormula {
    /// The typeset closed form `e^{1/μ̄}/(γ̄(1/γ̄ + 1/(uμ̄)))`, clamped to
    /// `[0, 1]`. Kept for comparison only.
    PaperPrinted,
    /// Success region `v ≥ u` carried through the conditional integral.
    #[default]
    Rederived,
}

fn check_link(stats: &LinkStats) -> Result<()> {
    if !(stats.threshold > 0.0) {
        return Err(domain(
            "threshold",
            stats.threshold,
            "decode threshold must be positive",
        ));
    }
    if !(stats.mean_snr > 0.0 && stats.mean_snr.is_finite()) {
        return Err(domain(
            "mean_snr",
            stats.mean_snr,
            "mean SNR must be finite and positive",
        ));
    }
    if !(stats.mean_inr >= 0.0 && stats.mean_inr.is_finite()) {
        return Err(domain(
            "mean_inr",
            stats.mean_inr,
            "mean INR must be finite and non-negative",
        ));
    }
    Ok(())
}

/// `Pr[γ/(1+I) ≥ u] = e^{−u/γ̄}/(1 + uμ̄/γ̄)`.
///
/// Kept separate from [`link_outage`] because the success probability stays
/// resolvable where the outage has rounded to 1.
pub fn link_success(stats: &LinkStats) -> Result<f64> {
    check_link(stats)?;
    let t = stats.threshold / stats.mean_snr;
    let s = stats.threshold * stats.mean_inr / stats.mean_snr;
    if t.is_infinite() || s.is_infinite() {
        return Ok(0.0);
    }
    Ok((-t).exp() / (1.0 + s))
}

pub fn link_outage(stats: &LinkStats, formula: LinkFormula) -> Result<f64> {
    check_link(stats)?;
    match formula {
        LinkFormula::Rederived => {
            let t = stats.threshold / stats.mean_snr;
            let s = stats.threshold * stats.mean_inr / stats.mean_snr;
            if t.is_infinite() || s.is_infinite() {
                return Ok(1.0);
            }
            // 1 − e^{−t}/(1+s) without cancellation for small t and s
            Ok((-(-t).exp_m1() + s) / (1.0 + s))
        }
        LinkFormula::PaperPrinted => {
            let raw = paper_printed_link_outage_raw(stats);
            Ok(if raw.is_nan() {
                1.0
            } else {
                raw.clamp(0.0, 1.0)
            })
        }
    }
}

/// The typeset decode-link closed form evaluated verbatim, unclamped. May be
/// above 1, infinite, or NaN (at `μ̄ = 0` it is `∞/∞`).
pub fn paper_printed_link_outage_raw(stats: &LinkStats) -> f64 {
    let (g, m, u) = (stats.mean_snr, stats.mean_inr, stats.threshold);
    (1.0 / m).exp() / (g * (1.0 / g + 1.0 / (u * m)))
}

/// `Pr[X·L ≥ u_bc]` for harvested power `X` and `L ~ Exp(rate λ_L)`.
pub fn broadcast_success(mix: &ExpMixture, lambda_l: f64, u_bc: f64) -> Result<f64> {
    if !(lambda_l > 0.0 && lambda_l.is_finite()) {
        return Err(domain("lambda_l", lambda_l, "must be finite and positive"));
    }
    if !(u_bc > 0.0 && u_bc.is_finite()) {
        return Err(domain("u_bc", u_bc, "must be finite and positive"));
    }
    let mut total = 0.0;
    for (rate, weight) in mix.components() {
        let c = lambda_l * u_bc * rate;
        if c > BESSEL_TERM_CUTOFF {
            continue;
        }
        total += weight * scaled_bessel_k1(2.0 * c.sqrt())?;
    }
    if !total.is_finite() {
        return Err(Error::Numerical(format!(
            "broadcast success evaluated to {total}"
        )));
    }
    Ok(total.clamp(0.0, 1.0))
}

pub fn system_outage_psr(
    cfg: &SystemConfig,
    psr: &PsrConfig,
    formula: LinkFormula,
) -> Result<OutageBreakdown> {
    let s1 = link_stats_psr(cfg, psr, User::One)?;
    let s2 = link_stats_psr(cfg, psr, User::Two)?;
    let (_, u_bc) = psr.frame.thresholds(cfg.target_rate);
    let mix = harvest_mixture_psr(cfg, psr)?;
    let bc = broadcast_success(&mix, dest_min_rate_coeff(cfg), u_bc)?;
    Ok(OutageBreakdown::from_links(
        link_outage(&s1, formula)?,
        link_outage(&s2, formula)?,
        1.0 - bc,
    ))
}

pub fn system_outage_tsr(
    cfg: &SystemConfig,
    tsr: &TsrConfig,
    formula: LinkFormula,
) -> Result<OutageBreakdown> {
    let s1 = link_stats_tsr(cfg, tsr, User::One)?;
    let s2 = link_stats_tsr(cfg, tsr, User::Two)?;
    let (_, _, u_bc) = tsr_thresholds(cfg.target_rate, tsr);
    let mix = harvest_mixture_tsr(cfg, tsr)?;
    let bc = broadcast_success(&mix, dest_min_rate_coeff(cfg), u_bc)?;
    Ok(OutageBreakdown::from_links(
        link_outage(&s1, formula)?,
        link_outage(&s2, formula)?,
        1.0 - bc,
    ))
}

pub fn system_outage(
    cfg: &SystemConfig,
    relaying: &Relaying,
    formula: LinkFormula,
) -> Result<OutageBreakdown> {
    match relaying {
        Relaying::Psr(p) => system_outage_psr(cfg, p, formula),
        Relaying::Tsr(t) => system_outage_tsr(cfg, t, formula),
    }
}

/// Per-user decode-link statistics for either scheme.
pub fn link_stats(cfg: &SystemConfig, relaying: &Relaying, user: User) -> Result<LinkStats> {
    match relaying {
        Relaying::Psr(p) => link_stats_psr(cfg, p, user),
        Relaying::Tsr(t) => link_stats_tsr(cfg, t, user),
    }
}
