//! Physical parameters of the two-way relay, the PSR/TSR frame structures and
//! the per-link constants derived from them.
//!
//! Conventions used throughout:
//! * every `omega_*` is the mean of a squared channel gain (Rayleigh fading,
//!   so the squared gain is exponential with that mean);
//! * co-channel interference is a single knob, the interference-to-noise
//!   ratio `inr_db` at the relay. The mean received interference power is
//!   `cci_power() = σ²_ref · 10^{INR/10}` with `σ²_ref` the mean of the two
//!   decode-path noise powers, and the fading of the interferer link is
//!   `|β_c|² ~ Exp(mean omega_bc)`;
//! * the relay harvests from signal and interference, never from noise.

mod mixture;

pub use mixture::{ExpMixture, DEGENERACY_SPLIT, DEGENERACY_TOLERANCE};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Which user a per-link quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum User {
    One,
    Two,
}

impl User {
    pub const BOTH: [User; 2] = [User::One, User::Two];
}

/// All physical parameters shared by both relaying schemes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    /// Transmit power of User₁ (W).
    pub p1_tx: f64,
    /// Transmit power of User₂ (W).
    pub p2_tx: f64,
    /// User₁–User₂ separation (m).
    pub user_distance: f64,
    /// User₁–relay distance d₁ (m); d₂ is the remainder.
    pub relay_offset: f64,
    pub pathloss_exp: f64,
    /// RF-to-DC conversion efficiency.
    pub eta: f64,
    /// Total decode-path noise at the relay for User₁'s slot (W).
    pub noise_decode_1: f64,
    pub noise_decode_2: f64,
    /// Total noise at destination User₁ during the broadcast (W).
    pub noise_dest_1: f64,
    pub noise_dest_2: f64,
    /// Target rate R₁ on every link (bit/s/Hz).
    pub target_rate: f64,
    /// Interference-to-noise ratio at the relay (dB); `-inf` disables CCI.
    pub inr_db: f64,
    pub omega_h1: f64,
    pub omega_h2: f64,
    pub omega_g1: f64,
    pub omega_g2: f64,
    pub omega_bc: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            p1_tx: 1.5,
            p2_tx: 1.5,
            user_distance: 14.0,
            relay_offset: 7.0,
            pathloss_exp: 2.7,
            eta: 0.8,
            noise_decode_1: 1e-6,
            noise_decode_2: 1e-6,
            noise_dest_1: 1e-6,
            noise_dest_2: 1e-6,
            target_rate: 0.9,
            inr_db: 10.0,
            omega_h1: 1.0,
            omega_h2: 1.0,
            omega_g1: 1.0,
            omega_g2: 1.0,
            omega_bc: 1.0,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "{name} must be finite and > 0, got {v}"
        )))
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("p1_tx", self.p1_tx),
            ("p2_tx", self.p2_tx),
            ("user_distance", self.user_distance),
            ("noise_decode_1", self.noise_decode_1),
            ("noise_decode_2", self.noise_decode_2),
            ("noise_dest_1", self.noise_dest_1),
            ("noise_dest_2", self.noise_dest_2),
            ("target_rate", self.target_rate),
            ("omega_h1", self.omega_h1),
            ("omega_h2", self.omega_h2),
            ("omega_g1", self.omega_g1),
            ("omega_g2", self.omega_g2),
            ("omega_bc", self.omega_bc),
        ] {
            positive(name, v)?;
        }
        if !(self.relay_offset > 0.0 && self.relay_offset < self.user_distance) {
            return Err(Error::InvalidConfig(format!(
                "relay_offset must lie in (0, {}), got {}",
                self.user_distance, self.relay_offset
            )));
        }
        if !(self.pathloss_exp >= 2.0 && self.pathloss_exp.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "pathloss_exp must be >= 2, got {}",
                self.pathloss_exp
            )));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "eta must lie in (0, 1], got {}",
                self.eta
            )));
        }
        if self.inr_db.is_nan() || self.inr_db == f64::INFINITY {
            return Err(Error::InvalidConfig(format!(
                "inr_db must be finite or -inf, got {}",
                self.inr_db
            )));
        }
        Ok(())
    }

    pub fn d1(&self) -> f64 {
        self.relay_offset
    }

    pub fn d2(&self) -> f64 {
        self.user_distance - self.relay_offset
    }

    pub fn distance(&self, user: User) -> f64 {
        match user {
            User::One => self.d1(),
            User::Two => self.d2(),
        }
    }

    pub fn tx_power(&self, user: User) -> f64 {
        match user {
            User::One => self.p1_tx,
            User::Two => self.p2_tx,
        }
    }

    pub fn noise_decode(&self, user: User) -> f64 {
        match user {
            User::One => self.noise_decode_1,
            User::Two => self.noise_decode_2,
        }
    }

    pub fn noise_dest(&self, user: User) -> f64 {
        match user {
            User::One => self.noise_dest_1,
            User::Two => self.noise_dest_2,
        }
    }

    pub fn omega_h(&self, user: User) -> f64 {
        match user {
            User::One => self.omega_h1,
            User::Two => self.omega_h2,
        }
    }

    pub fn omega_g(&self, user: User) -> f64 {
        match user {
            User::One => self.omega_g1,
            User::Two => self.omega_g2,
        }
    }

    /// Path-loss factor `d_k^ν`.
    pub fn path_loss(&self, user: User) -> f64 {
        self.distance(user).powf(self.pathloss_exp)
    }

    /// Mean received interference power at the relay (W) when `|β_c|²` has
    /// unit mean; zero when `inr_db` is `-inf`.
    pub fn cci_power(&self) -> f64 {
        0.5 * (self.noise_decode_1 + self.noise_decode_2) * db_to_linear(self.inr_db)
    }

    /// `10·log₁₀(P₁ᵀ/σ²_{1,r})`.
    pub fn normalized_power_db(&self) -> f64 {
        10.0 * (self.p1_tx / self.noise_decode_1).log10()
    }

    /// Both users transmit at `σ²_{1,r}·10^{db/10}`.
    pub fn with_normalized_power_db(&self, db: f64) -> Self {
        let p = self.noise_decode_1 * db_to_linear(db);
        Self {
            p1_tx: p,
            p2_tx: p,
            ..self.clone()
        }
    }

    pub fn with_tx_power(&self, p: f64) -> Self {
        Self {
            p1_tx: p,
            p2_tx: p,
            ..self.clone()
        }
    }

    pub fn without_cci(&self) -> Self {
        Self {
            inr_db: f64::NEG_INFINITY,
            ..self.clone()
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `2^{bits} − 1`, accurate for small `bits`.
pub fn rate_threshold(bits: f64) -> f64 {
    (bits * std::f64::consts::LN_2).exp_m1()
}

/// Slot layout of a PSR frame of length T.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsrFrame {
    /// Two user slots of T/4 and a broadcast slot of T/2.
    #[default]
    Standard,
    /// Three slots of T/3, used for the interference-free reference system.
    EqualThirds,
}

impl PsrFrame {
    /// Fraction of T given to each user's uplink slot.
    pub fn user_slot(self) -> f64 {
        match self {
            PsrFrame::Standard => 0.25,
            PsrFrame::EqualThirds => 1.0 / 3.0,
        }
    }

    /// Fraction of T given to the relay broadcast.
    pub fn broadcast_slot(self) -> f64 {
        match self {
            PsrFrame::Standard => 0.5,
            PsrFrame::EqualThirds => 1.0 / 3.0,
        }
    }

    /// `(u_link, u_bc)` for target rate `r1`.
    pub fn thresholds(self, r1: f64) -> (f64, f64) {
        (
            rate_threshold(r1 / self.user_slot()),
            rate_threshold(r1 / self.broadcast_slot()),
        )
    }
}

/// Power-splitting factors: `α_k` of the received power goes to decoding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsrConfig {
    pub alpha1: f64,
    pub alpha2: f64,
    pub frame: PsrFrame,
}

impl Default for PsrConfig {
    fn default() -> Self {
        Self::symmetric(0.14)
    }
}

impl PsrConfig {
    pub fn symmetric(alpha: f64) -> Self {
        Self {
            alpha1: alpha,
            alpha2: alpha,
            frame: PsrFrame::Standard,
        }
    }

    pub fn alpha(&self, user: User) -> f64 {
        match user {
            User::One => self.alpha1,
            User::Two => self.alpha2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, a) in [("alpha1", self.alpha1), ("alpha2", self.alpha2)] {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must lie in (0, 1), got {a}"
                )));
            }
        }
        Ok(())
    }
}

/// Time-switching factors: user `l` decodes during `ρ_l·T/2`, the relay
/// harvests during `(1−ρ₁−ρ₂)·T/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TsrConfig {
    pub rho1: f64,
    pub rho2: f64,
}

impl Default for TsrConfig {
    fn default() -> Self {
        Self::symmetric(0.32)
    }
}

impl TsrConfig {
    pub fn symmetric(rho: f64) -> Self {
        Self {
            rho1: rho,
            rho2: rho,
        }
    }

    pub fn rho(&self, user: User) -> f64 {
        match user {
            User::One => self.rho1,
            User::Two => self.rho2,
        }
    }

    /// Fraction of the first half-frame spent harvesting.
    pub fn harvest_fraction(&self) -> f64 {
        1.0 - self.rho1 - self.rho2
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho1 > 0.0 && self.rho2 > 0.0 && self.rho1 + self.rho2 < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "need rho1, rho2 > 0 and rho1 + rho2 < 1, got ({}, {})",
                self.rho1, self.rho2
            )));
        }
        Ok(())
    }
}

/// A relaying scheme together with its splitting parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Relaying {
    Psr(PsrConfig),
    Tsr(TsrConfig),
}

impl Relaying {
    pub fn validate(&self) -> Result<()> {
        match self {
            Relaying::Psr(p) => p.validate(),
            Relaying::Tsr(t) => t.validate(),
        }
    }
}

/// Mean SNR, mean INR and decode threshold of one uplink.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkStats {
    pub mean_snr: f64,
    pub mean_inr: f64,
    pub threshold: f64,
}

/// Coefficients of the relay broadcast power `a|h₁|² + b|h₂|² + c|β_c|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarvestCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl HarvestCoefficients {
    /// Mean broadcast power.
    pub fn mean_power(&self, cfg: &SystemConfig) -> f64 {
        self.a * cfg.omega_h1 + self.b * cfg.omega_h2 + self.c * cfg.omega_bc
    }

    pub fn mixture(&self, cfg: &SystemConfig) -> Result<ExpMixture> {
        ExpMixture::from_scales(&[
            self.a * cfg.omega_h1,
            self.b * cfg.omega_h2,
            self.c * cfg.omega_bc,
        ])
    }
}

/// `p_tx·gain/d^ν`.
pub fn received_power(p_tx: f64, gain: f64, d: f64, nu: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(domain("d", d, "distance must be positive"));
    }
    if !(p_tx > 0.0) {
        return Err(domain("p_tx", p_tx, "transmit power must be positive"));
    }
    if !(gain >= 0.0) {
        return Err(domain("gain", gain, "gain must be non-negative"));
    }
    Ok(p_tx * gain / d.powf(nu))
}

/// `(2^{4R₁}−1, 2^{2R₁}−1)` for the standard PSR frame.
pub fn psr_thresholds(r1: f64) -> (f64, f64) {
    PsrFrame::Standard.thresholds(r1)
}

/// `(2^{2R₁/ρ₁}−1, 2^{2R₁/ρ₂}−1, 2^{2R₁}−1)`.
pub fn tsr_thresholds(r1: f64, tsr: &TsrConfig) -> (f64, f64, f64) {
    (
        rate_threshold(2.0 * r1 / tsr.rho1),
        rate_threshold(2.0 * r1 / tsr.rho2),
        rate_threshold(2.0 * r1),
    )
}

pub fn link_stats_psr(cfg: &SystemConfig, psr: &PsrConfig, user: User) -> Result<LinkStats> {
    cfg.validate()?;
    psr.validate()?;
    let alpha = psr.alpha(user);
    let noise = cfg.noise_decode(user);
    let (threshold, _) = psr.frame.thresholds(cfg.target_rate);
    Ok(LinkStats {
        mean_snr: alpha * cfg.tx_power(user) * cfg.omega_h(user) / (cfg.path_loss(user) * noise),
        mean_inr: alpha * cfg.cci_power() * cfg.omega_bc / noise,
        threshold,
    })
}

pub fn link_stats_tsr(cfg: &SystemConfig, tsr: &TsrConfig, user: User) -> Result<LinkStats> {
    cfg.validate()?;
    tsr.validate()?;
    let noise = cfg.noise_decode(user);
    Ok(LinkStats {
        mean_snr: cfg.tx_power(user) * cfg.omega_h(user) / (cfg.path_loss(user) * noise),
        mean_inr: cfg.cci_power() * cfg.omega_bc / noise,
        threshold: rate_threshold(2.0 * cfg.target_rate / tsr.rho(user)),
    })
}

/// Broadcast-power coefficients under PSR: each user slot's harvested energy
/// `η(1−α_k)(P_k^R + I)·T_user` is spent over the broadcast slot.
pub fn harvest_coefficients_psr(cfg: &SystemConfig, psr: &PsrConfig) -> HarvestCoefficients {
    let k = cfg.eta * psr.frame.user_slot() / psr.frame.broadcast_slot();
    HarvestCoefficients {
        a: k * cfg.p1_tx * (1.0 - psr.alpha1) / cfg.path_loss(User::One),
        b: k * cfg.p2_tx * (1.0 - psr.alpha2) / cfg.path_loss(User::Two),
        c: k * cfg.cci_power() * (2.0 - psr.alpha1 - psr.alpha2),
    }
}

/// Broadcast-power coefficients under TSR: the harvest window
/// `(1−ρ₁−ρ₂)·T/2` feeds a broadcast of `T/2`.
pub fn harvest_coefficients_tsr(cfg: &SystemConfig, tsr: &TsrConfig) -> HarvestCoefficients {
    let k = cfg.eta * tsr.harvest_fraction();
    HarvestCoefficients {
        a: k * cfg.p1_tx / cfg.path_loss(User::One),
        b: k * cfg.p2_tx / cfg.path_loss(User::Two),
        c: k * cfg.cci_power(),
    }
}

pub fn harvest_mixture_psr(cfg: &SystemConfig, psr: &PsrConfig) -> Result<ExpMixture> {
    cfg.validate()?;
    psr.validate()?;
    harvest_coefficients_psr(cfg, psr).mixture(cfg)
}

pub fn harvest_mixture_tsr(cfg: &SystemConfig, tsr: &TsrConfig) -> Result<ExpMixture> {
    cfg.validate()?;
    tsr.validate()?;
    harvest_coefficients_tsr(cfg, tsr).mixture(cfg)
}

/// Rate `λ_L` of `L = min_k |g_k|²/(d_k^ν σ²_{sc,k})`, which is exponential
/// because each term is.
pub fn dest_min_rate_coeff(cfg: &SystemConfig) -> f64 {
    User::BOTH
        .iter()
        .map(|&u| cfg.path_loss(u) * cfg.noise_dest(u) / cfg.omega_g(u))
        .sum()
}
