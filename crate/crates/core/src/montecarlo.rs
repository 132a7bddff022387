//! Signal-level Monte Carlo simulation of the two-way relay.
//!
//! Each trial is one quasi-static frame: the five squared channel gains are
//! drawn, the relay's decode SINRs, harvested energy and broadcast rates are
//! computed from the frame timing, and each link is marked in outage when its
//! rate falls strictly below the target. None of the closed-form machinery in
//! [`crate::analytic`] is used here.
//!
//! Trial `i` under seed `s` always draws from ChaCha8 stream `i` keyed by `s`,
//! and trials are grouped into fixed blocks whose partial results are merged
//! in block order. Estimates are therefore a pure function of
//! `(config, trials, seed)` no matter how many rayon workers run them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::model::{LinkStats, PsrConfig, Relaying, SystemConfig, TsrConfig, User};

const BLOCK: u64 = 4096;

/// A Monte Carlo estimate of a probability or a mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

impl McEstimate {
    pub fn bernoulli(hits: u64, trials: u64, seed: u64) -> Self {
        let p = hits as f64 / trials as f64;
        Self {
            mean: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
            seed,
        }
    }

    /// `|value − mean| ≤ max(abs_floor, k·stderr)`.
    pub fn agrees_with(&self, value: f64, abs_floor: f64, k: f64) -> bool {
        (value - self.mean).abs() <= abs_floor.max(k * self.stderr)
    }
}

/// Monte Carlo counterpart of [`crate::analytic::OutageBreakdown`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McBreakdown {
    pub out_u1r: McEstimate,
    pub out_u2r: McEstimate,
    pub out_bc: McEstimate,
    pub out_system: McEstimate,
}

impl McBreakdown {
    pub fn fields(&self) -> [(&'static str, McEstimate); 4] {
        [
            ("out_u1r", self.out_u1r),
            ("out_u2r", self.out_u2r),
            ("out_bc", self.out_bc),
            ("out_system", self.out_system),
        ]
    }

    pub fn link(&self, user: User) -> McEstimate {
        match user {
            User::One => self.out_u1r,
            User::Two => self.out_u2r,
        }
    }
}

/// Squared channel gains of one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialDraw {
    pub g_h1: f64,
    pub g_h2: f64,
    pub g_g1: f64,
    pub g_g2: f64,
    /// Interferer → relay.
    pub g_bc: f64,
}

impl TrialDraw {
    pub fn sample<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Self {
        let mut exp = |mean: f64| mean * rng.sample::<f64, _>(Exp1);
        Self {
            g_h1: exp(cfg.omega_h1),
            g_h2: exp(cfg.omega_h2),
            g_g1: exp(cfg.omega_g1),
            g_g2: exp(cfg.omega_g2),
            g_bc: exp(cfg.omega_bc),
        }
    }
}

/// The generator for trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Numerical(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Link events and broadcast power of one simulated frame.
#[derive(Debug, Clone, Copy)]
struct FrameOutcome {
    fail_u1r: bool,
    fail_u2r: bool,
    fail_bc: bool,
    relay_power: f64,
}

/// Per-run constants of the frame simulation.
#[derive(Debug, Clone)]
struct Frame {
    cfg: SystemConfig,
    relaying: Relaying,
    path_loss: [f64; 2],
    cci_power: f64,
}

impl Frame {
    fn new(cfg: &SystemConfig, relaying: &Relaying) -> Result<Self> {
        cfg.validate()?;
        relaying.validate()?;
        Ok(Self {
            cfg: cfg.clone(),
            relaying: *relaying,
            path_loss: [cfg.path_loss(User::One), cfg.path_loss(User::Two)],
            cci_power: cfg.cci_power(),
        })
    }

    fn run(&self, draw: &TrialDraw) -> FrameOutcome {
        let cfg = &self.cfg;
        let interference = self.cci_power * draw.g_bc;
        let signal = [
            cfg.p1_tx * draw.g_h1 / self.path_loss[0],
            cfg.p2_tx * draw.g_h2 / self.path_loss[1],
        ];
        let noise = [cfg.noise_decode_1, cfg.noise_decode_2];

        let (uplink_rates, relay_power, broadcast_slot) = match &self.relaying {
            Relaying::Psr(psr) => psr_uplink(psr, &signal, &noise, interference, cfg.eta),
            Relaying::Tsr(tsr) => tsr_uplink(tsr, &signal, &noise, interference, cfg.eta),
        };

        let dest_snr = |g: f64, k: usize, noise: f64| relay_power * g / (self.path_loss[k] * noise);
        let bc_rate = (broadcast_slot * (1.0 + dest_snr(draw.g_g1, 0, cfg.noise_dest_1)).log2())
            .min(broadcast_slot * (1.0 + dest_snr(draw.g_g2, 1, cfg.noise_dest_2)).log2());

        let r1 = cfg.target_rate;
        FrameOutcome {
            fail_u1r: uplink_rates[0] < r1,
            fail_u2r: uplink_rates[1] < r1,
            fail_bc: bc_rate < r1,
            relay_power,
        }
    }
}

/// PSR: user `k` owns a slot of `user_slot·T`; `α_k` of the received power is
/// decoded and the rest (signal plus interference) harvested. The energy is
/// spent over the broadcast slot.
fn psr_uplink(
    psr: &PsrConfig,
    signal: &[f64; 2],
    noise: &[f64; 2],
    interference: f64,
    eta: f64,
) -> ([f64; 2], f64, f64) {
    let slot = psr.frame.user_slot();
    let alpha = [psr.alpha1, psr.alpha2];
    let mut rates = [0.0; 2];
    let mut energy = 0.0;
    for k in 0..2 {
        let sinr = alpha[k] * signal[k] / (noise[k] + alpha[k] * interference);
        rates[k] = slot * (1.0 + sinr).log2();
        energy += eta * (1.0 - alpha[k]) * (signal[k] + interference) * slot;
    }
    let bslot = psr.frame.broadcast_slot();
    (rates, energy / bslot, bslot)
}

/// TSR: the relay harvests both users and the interferer during
/// `(1−ρ₁−ρ₂)·T/2`, user `l` then decodes over `ρ_l·T/2` at full power, and
/// the broadcast takes `T/2`.
fn tsr_uplink(
    tsr: &TsrConfig,
    signal: &[f64; 2],
    noise: &[f64; 2],
    interference: f64,
    eta: f64,
) -> ([f64; 2], f64, f64) {
    let rho = [tsr.rho1, tsr.rho2];
    let mut rates = [0.0; 2];
    for k in 0..2 {
        let sinr = signal[k] / (noise[k] + interference);
        rates[k] = 0.5 * rho[k] * (1.0 + sinr).log2();
    }
    let harvest_time = 0.5 * (1.0 - rho[0] - rho[1]);
    let energy = eta * (signal[0] + signal[1] + interference) * harvest_time;
    (rates, energy / 0.5, 0.5)
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    u1r: u64,
    u2r: u64,
    bc: u64,
    system: u64,
    power_sum: f64,
    power_sq_sum: f64,
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(domain("trials", 0.0, "at least one trial is required"));
    }
    Ok(())
}

fn blocks(trials: u64) -> impl IndexedParallelIterator<Item = std::ops::Range<u64>> {
    let n = usize::try_from(trials.div_ceil(BLOCK)).expect("block count fits in usize");
    (0..n).into_par_iter().map(move |b| {
        let b = b as u64;
        (b * BLOCK)..((b + 1) * BLOCK).min(trials)
    })
}

fn tally(frame: &Frame, trials: u64, seed: u64) -> Tally {
    let partial: Vec<Tally> = blocks(trials)
        .map(|range| {
            let mut t = Tally::default();
            for i in range {
                let mut rng = trial_rng(seed, i);
                let draw = TrialDraw::sample(&frame.cfg, &mut rng);
                let o = frame.run(&draw);
                t.u1r += u64::from(o.fail_u1r);
                t.u2r += u64::from(o.fail_u2r);
                t.bc += u64::from(o.fail_bc);
                t.system += u64::from(o.fail_u1r || o.fail_u2r || o.fail_bc);
                t.power_sum += o.relay_power;
                t.power_sq_sum += o.relay_power * o.relay_power;
            }
            t
        })
        .collect();

    // block order, compensated
    let mut total = Tally::default();
    let (mut c1, mut c2) = (0.0, 0.0);
    for t in &partial {
        total.u1r += t.u1r;
        total.u2r += t.u2r;
        total.bc += t.bc;
        total.system += t.system;
        kahan_add(&mut total.power_sum, &mut c1, t.power_sum);
        kahan_add(&mut total.power_sq_sum, &mut c2, t.power_sq_sum);
    }
    total
}

fn kahan_add(sum: &mut f64, comp: &mut f64, x: f64) {
    let y = x - *comp;
    let t = *sum + y;
    *comp = (t - *sum) - y;
    *sum = t;
}

/// Outage and broadcast-power estimates from one pass over the trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McRun {
    pub outage: McBreakdown,
    pub harvest_power: McEstimate,
}

pub fn simulate_run(
    cfg: &SystemConfig,
    relaying: &Relaying,
    trials: u64,
    seed: u64,
) -> Result<McRun> {
    check_trials(trials)?;
    let frame = Frame::new(cfg, relaying)?;
    let t = tally(&frame, trials, seed);
    let est = |hits| McEstimate::bernoulli(hits, trials, seed);
    let n = trials as f64;
    let mean = t.power_sum / n;
    let var = if trials > 1 {
        ((t.power_sq_sum - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(McRun {
        outage: McBreakdown {
            out_u1r: est(t.u1r),
            out_u2r: est(t.u2r),
            out_bc: est(t.bc),
            out_system: est(t.system),
        },
        harvest_power: McEstimate {
            mean,
            stderr: (var / n).sqrt(),
            trials,
            seed,
        },
    })
}

pub fn simulate_outage(
    cfg: &SystemConfig,
    relaying: &Relaying,
    trials: u64,
    seed: u64,
) -> Result<McBreakdown> {
    Ok(simulate_run(cfg, relaying, trials, seed)?.outage)
}

pub fn simulate_outage_psr(
    cfg: &SystemConfig,
    psr: &PsrConfig,
    trials: u64,
    seed: u64,
) -> Result<McBreakdown> {
    simulate_outage(cfg, &Relaying::Psr(*psr), trials, seed)
}

pub fn simulate_outage_tsr(
    cfg: &SystemConfig,
    tsr: &TsrConfig,
    trials: u64,
    seed: u64,
) -> Result<McBreakdown> {
    simulate_outage(cfg, &Relaying::Tsr(*tsr), trials, seed)
}

/// Mean relay broadcast power (W) with its standard error.
pub fn simulate_harvest_power(
    cfg: &SystemConfig,
    relaying: &Relaying,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    Ok(simulate_run(cfg, relaying, trials, seed)?.harvest_power)
}

/// Relay broadcast power of trials `0..n`, in trial order.
pub fn sample_harvest_power(
    cfg: &SystemConfig,
    relaying: &Relaying,
    n: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    let frame = Frame::new(cfg, relaying)?;
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            frame
                .run(&TrialDraw::sample(&frame.cfg, &mut rng))
                .relay_power
        })
        .collect())
}

/// Single decode link in isolation: `γ ~ Exp(γ̄)`, `I ~ Exp(μ̄)`, outage when
/// `γ/(1+I) < u`.
pub fn simulate_link_outage(stats: &LinkStats, trials: u64, seed: u64) -> Result<McEstimate> {
    check_trials(trials)?;
    let LinkStats {
        mean_snr,
        mean_inr,
        threshold,
    } = *stats;
    let hits: u64 = blocks(trials)
        .map(|range| {
            range
                .filter(|&i| {
                    let mut rng = trial_rng(seed, i);
                    let snr = mean_snr * rng.sample::<f64, _>(Exp1);
                    let inr = mean_inr * rng.sample::<f64, _>(Exp1);
                    snr / (1.0 + inr) < threshold
                })
                .count() as u64
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    Ok(McEstimate::bernoulli(hits, trials, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{self, LinkFormula};
    use crate::model::harvest_coefficients_psr;

    #[test]
    fn single_link_matches_rederived_value() {
        let stats = LinkStats {
            mean_snr: 10.0,
            mean_inr: 1.0,
            threshold: 1.0,
        };
        let e = simulate_link_outage(&stats, 200_000, 7).unwrap();
        assert!(e.agrees_with(0.177_42, 0.0, 4.0), "{e:?}");
    }

    #[test]
    fn no_harvest_means_certain_outage() {
        let cfg = SystemConfig::default();
        let e = simulate_outage_psr(&cfg, &PsrConfig::symmetric(1.0 - 1e-12), 20_000, 1).unwrap();
        assert_eq!(e.out_system.mean, 1.0);
        assert_eq!(e.out_bc.mean, 1.0);
        let e = simulate_outage_tsr(
            &cfg,
            &TsrConfig {
                rho1: 0.5,
                rho2: 0.5 - 1e-13,
            },
            20_000,
            1,
        )
        .unwrap();
        assert_eq!(e.out_system.mean, 1.0);
        let p = simulate_harvest_power(
            &cfg,
            &Relaying::Psr(PsrConfig::symmetric(1.0 - 1e-15)),
            1000,
            3,
        )
        .unwrap();
        assert!(p.mean < 1e-15);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let cfg = SystemConfig {
            relay_offset: 4.0,
            ..Default::default()
        };
        let scheme = Relaying::Tsr(TsrConfig::default());
        let a = with_workers(1, || simulate_outage(&cfg, &scheme, 50_000, 11))
            .unwrap()
            .unwrap();
        let b = with_workers(8, || simulate_outage(&cfg, &scheme, 50_000, 11))
            .unwrap()
            .unwrap();
        assert_eq!(a, b);
        let a = with_workers(1, || simulate_harvest_power(&cfg, &scheme, 50_001, 11))
            .unwrap()
            .unwrap();
        let b = with_workers(5, || simulate_harvest_power(&cfg, &scheme, 50_001, 11))
            .unwrap()
            .unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    }

    #[test]
    fn exponential_sampler_mean() {
        let cfg = SystemConfig {
            omega_h1: 2.5,
            ..Default::default()
        };
        let n = 1_000_000u64;
        let sum: f64 = (0..n)
            .into_par_iter()
            .map(|i| TrialDraw::sample(&cfg, &mut trial_rng(5, i)).g_h1)
            .sum();
        let mean = sum / n as f64;
        // Exp(mean Ω) has standard deviation Ω
        assert!((mean - 2.5).abs() < 4.0 * 2.5 / (n as f64).sqrt(), "{mean}");
    }

    #[test]
    fn harvest_power_matches_mixture_mean() {
        let cfg = SystemConfig::default();
        let psr = PsrConfig::default();
        let e = simulate_harvest_power(&cfg, &Relaying::Psr(psr), 200_000, 2).unwrap();
        let h = harvest_coefficients_psr(&cfg, &psr);
        assert!(
            e.agrees_with(h.mean_power(&cfg), 0.0, 3.0),
            "{e:?} vs {}",
            h.mean_power(&cfg)
        );
        assert!((h.mean_power(&cfg) - (2.0 * 2.697e-3 + 7.44e-6)).abs() < 1e-5);
    }

    #[test]
    fn relay_near_a_user_harvests_more() {
        let mid = SystemConfig::default();
        let near = SystemConfig {
            relay_offset: 2.0,
            ..mid.clone()
        };
        let psr = Relaying::Psr(PsrConfig::default());
        let a = simulate_harvest_power(&near, &psr, 100_000, 4).unwrap();
        let b = simulate_harvest_power(&mid, &psr, 100_000, 4).unwrap();
        assert!(a.mean > b.mean);
    }

    #[test]
    fn marginals_agree_with_closed_form_at_table_ii() {
        let cfg = SystemConfig::default();
        for scheme in [
            Relaying::Psr(PsrConfig::default()),
            Relaying::Tsr(TsrConfig::default()),
        ] {
            let mc = simulate_outage(&cfg, &scheme, 200_000, 9).unwrap();
            let an = analytic::system_outage(&cfg, &scheme, LinkFormula::Rederived).unwrap();
            for ((name, e), (_, v)) in mc.fields().iter().zip(an.fields()).take(3) {
                assert!(
                    e.agrees_with(v, 0.01, 3.0),
                    "{scheme:?} {name}: {e:?} vs {v}"
                );
            }
            // decode success and harvested power share the uplink gains, so
            // the joint failure is never above the independent product
            assert!(mc.out_system.mean <= an.out_system + 3.0 * mc.out_system.stderr);
        }
        let psr = Relaying::Psr(PsrConfig::default());
        let mc = simulate_outage(&cfg, &psr, 200_000, 9).unwrap();
        let an = analytic::system_outage(&cfg, &psr, LinkFormula::Rederived).unwrap();
        assert!(mc.out_system.agrees_with(an.out_system, 0.01, 3.0));
    }

    #[test]
    fn stronger_interference_raises_decode_outage() {
        let c10 = SystemConfig::default();
        let c20 = SystemConfig {
            inr_db: 20.0,
            ..c10.clone()
        };
        let tsr = TsrConfig::default();
        let a = simulate_outage_tsr(&c10, &tsr, 100_000, 3).unwrap();
        let b = simulate_outage_tsr(&c20, &tsr, 100_000, 3).unwrap();
        assert!(b.out_u1r.mean > a.out_u1r.mean);
        assert!(b.out_u2r.mean > a.out_u2r.mean);
    }

    #[test]
    fn rejects_zero_trials() {
        let cfg = SystemConfig::default();
        assert!(simulate_outage_psr(&cfg, &PsrConfig::default(), 0, 1).is_err());
    }

    #[test]
    fn bernoulli_stderr() {
        let e = McEstimate::bernoulli(25, 100, 0);
        assert_eq!(e.mean, 0.25);
        assert!((e.stderr - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
    }
}
