//! One-dimensional parameter sweeps over the relay model.
//!
//! A sweep varies one of α (both users), ρ (both users), the normalized
//! transmit power, or the relay position, and evaluates every selected scheme
//! at each grid point: the closed-form outage breakdown, the Monte Carlo
//! system outage, or both. Grid points run concurrently; rows come out in
//! grid order (all PSR rows, then TSR, then the interference-free reference).

mod config;
pub mod discrepancy;
pub mod plot;
pub mod table;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::RunConfig;
pub use table::{find_optimum, Objective, Optimum, Table};

use crate::analytic::{self, LinkFormula, OutageBreakdown};
use crate::error::{Error, Result};
use crate::metrics::{efficiency_point, EfficiencyPoint, PowerBasis};
use crate::model::{PsrConfig, PsrFrame, Relaying, SystemConfig, TsrConfig};
use crate::montecarlo::{self, McEstimate};
use table::fmt_f64;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    #[default]
    Alpha,
    Rho,
    PowerDb,
    RelayOffset,
}

impl SweepVariable {
    pub fn column(self) -> &'static str {
        match self {
            SweepVariable::Alpha => "alpha",
            SweepVariable::Rho => "rho",
            SweepVariable::PowerDb => "power_db",
            SweepVariable::RelayOffset => "relay_offset",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeSelect {
    Psr,
    Tsr,
    #[default]
    Both,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Analytic,
    #[serde(alias = "montecarlo")]
    Mc,
    Both,
}

impl Mode {
    pub fn analytic(self) -> bool {
        matches!(self, Mode::Analytic | Mode::Both)
    }

    pub fn montecarlo(self) -> bool {
        matches!(self, Mode::Mc | Mode::Both)
    }
}

/// Row label of each evaluated system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeLabel {
    Psr,
    Tsr,
    /// PSR without interference, on [`SweepSpec::baseline_frame`].
    Baseline,
}

impl SchemeLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            SchemeLabel::Psr => "psr",
            SchemeLabel::Tsr => "tsr",
            SchemeLabel::Baseline => "baseline",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub scheme: SchemeSelect,
    pub mode: Mode,
    pub trials: u64,
    pub seed: u64,
    /// Add rows for the interference-free PSR reference system.
    pub baseline_no_cci: bool,
    pub baseline_frame: PsrFrame,
    pub power_basis: PowerBasis,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            variable: SweepVariable::Alpha,
            start: 0.02,
            stop: 0.98,
            steps: 49,
            scheme: SchemeSelect::Both,
            mode: Mode::Analytic,
            trials: 100_000,
            seed: 1,
            baseline_no_cci: false,
            baseline_frame: PsrFrame::EqualThirds,
            power_basis: PowerBasis::PerUser,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self, system: &SystemConfig) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return bad(format!(
                "sweep needs finite start < stop, got {}..{}",
                self.start, self.stop
            ));
        }
        if self.steps < 2 {
            return bad(format!("sweep needs at least 2 steps, got {}", self.steps));
        }
        if self.mode.montecarlo() && self.trials == 0 {
            return bad("Monte Carlo sweeps need trials >= 1".into());
        }
        let (lo, hi, what) = match self.variable {
            SweepVariable::Alpha => (0.0, 1.0, "alpha must stay inside (0, 1)"),
            SweepVariable::Rho => (
                0.0,
                0.5,
                "rho must stay inside (0, 0.5) so that rho1 + rho2 < 1",
            ),
            SweepVariable::RelayOffset => (
                0.0,
                system.user_distance,
                "relay_offset must stay inside (0, user_distance)",
            ),
            SweepVariable::PowerDb => (f64::NEG_INFINITY, f64::INFINITY, ""),
        };
        if !(self.start > lo && self.stop < hi) {
            return bad(format!("{what}, got {}..{}", self.start, self.stop));
        }
        Ok(())
    }

    /// Evenly spaced grid including both end points, rounded to 13
    /// significant digits.
    pub fn grid(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                // snap to 13 significant digits so 0.02 + 15·0.02 prints as 0.32
                let x = self.start + i as f64 * step;
                format!("{x:.12e}").parse().unwrap_or(x)
            })
            .collect()
    }

    pub fn schemes(&self) -> Vec<SchemeLabel> {
        let mut v = match self.scheme {
            SchemeSelect::Psr => vec![SchemeLabel::Psr],
            SchemeSelect::Tsr => vec![SchemeLabel::Tsr],
            SchemeSelect::Both => vec![SchemeLabel::Psr, SchemeLabel::Tsr],
        };
        if self.baseline_no_cci {
            v.push(SchemeLabel::Baseline);
        }
        v
    }
}

/// Everything computed at one grid point for one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub analytic: Option<OutageBreakdown>,
    pub mc_system: Option<McEstimate>,
    pub efficiency: EfficiencyPoint,
    pub harvest_power_mean: f64,
}

/// The system and relaying parameters of `label` with the swept variable set
/// to `value`.
pub fn configure_point(
    run: &RunConfig,
    label: SchemeLabel,
    variable: SweepVariable,
    value: f64,
) -> (SystemConfig, Relaying) {
    let mut system = run.system.clone();
    let mut psr = run.psr;
    let mut tsr = run.tsr;
    match variable {
        SweepVariable::Alpha => {
            psr = PsrConfig {
                alpha1: value,
                alpha2: value,
                ..psr
            }
        }
        SweepVariable::Rho => tsr = TsrConfig::symmetric(value),
        SweepVariable::PowerDb => system = system.with_normalized_power_db(value),
        SweepVariable::RelayOffset => system.relay_offset = value,
    }
    match label {
        SchemeLabel::Psr => (system, Relaying::Psr(psr)),
        SchemeLabel::Tsr => (system, Relaying::Tsr(tsr)),
        SchemeLabel::Baseline => (
            system.without_cci(),
            Relaying::Psr(PsrConfig {
                frame: run.sweep.baseline_frame,
                ..psr
            }),
        ),
    }
}

pub fn evaluate_point(
    system: &SystemConfig,
    relaying: &Relaying,
    spec: &SweepSpec,
) -> Result<PointResult> {
    let analytic = if spec.mode.analytic() {
        Some(analytic::system_outage(
            system,
            relaying,
            LinkFormula::Rederived,
        )?)
    } else {
        None
    };
    let mc = if spec.mode.montecarlo() {
        Some(montecarlo::simulate_run(
            system,
            relaying,
            spec.trials,
            spec.seed,
        )?)
    } else {
        None
    };
    let p_out = match (&analytic, &mc) {
        (Some(a), _) => a.out_system,
        (None, Some(m)) => m.outage.out_system.mean,
        (None, None) => unreachable!("every mode evaluates something"),
    };
    if !(0.0..=1.0).contains(&p_out) {
        return Err(Error::Numerical(format!(
            "system outage evaluated to {p_out}"
        )));
    }
    let harvest_power_mean = match (&analytic, &mc) {
        (Some(_), _) => match relaying {
            Relaying::Psr(p) => {
                crate::model::harvest_coefficients_psr(system, p).mean_power(system)
            }
            Relaying::Tsr(t) => {
                crate::model::harvest_coefficients_tsr(system, t).mean_power(system)
            }
        },
        (None, Some(m)) => m.harvest_power.mean,
        (None, None) => unreachable!(),
    };
    Ok(PointResult {
        analytic,
        mc_system: mc.map(|m| m.outage.out_system),
        efficiency: efficiency_point(
            p_out,
            system.target_rate,
            system.p1_tx,
            system.p2_tx,
            spec.power_basis,
        )?,
        harvest_power_mean,
    })
}

pub fn headers(spec: &SweepSpec) -> Vec<String> {
    let mut h = vec!["scheme".to_string(), spec.variable.column().to_string()];
    if spec.mode.analytic() {
        h.extend(["out_u1r", "out_u2r", "out_bc", "out_system"].map(String::from));
    }
    if spec.mode.montecarlo() {
        h.extend(["mc_mean", "mc_stderr"].map(String::from));
    }
    h.extend(["se", "ee", "harvest_power_mean"].map(String::from));
    h
}

fn row(label: SchemeLabel, value: f64, r: &PointResult) -> Vec<String> {
    let mut row = vec![label.as_str().to_string(), fmt_f64(value)];
    if let Some(a) = &r.analytic {
        row.extend(a.fields().iter().map(|(_, v)| fmt_f64(*v)));
    }
    if let Some(m) = &r.mc_system {
        row.push(fmt_f64(m.mean));
        row.push(fmt_f64(m.stderr));
    }
    row.push(fmt_f64(r.efficiency.se));
    row.push(fmt_f64(r.efficiency.ee));
    row.push(fmt_f64(r.harvest_power_mean));
    row
}

/// Runs the sweep described by `run.sweep` on the current rayon pool.
pub fn run_sweep(run: &RunConfig) -> Result<Table> {
    run.validate()?;
    let spec = &run.sweep;
    let grid = spec.grid();
    let jobs: Vec<(SchemeLabel, f64)> = spec
        .schemes()
        .into_iter()
        .flat_map(|s| grid.iter().map(move |&v| (s, v)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(label, value)| {
            let (system, relaying) = configure_point(run, label, spec.variable, value);
            evaluate_point(&system, &relaying, spec).map(|r| row(label, value, &r))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        headers: headers(spec),
        rows,
    })
}

/// Evaluates every selected scheme once at the configured operating point.
pub fn run_point(run: &RunConfig) -> Result<Table> {
    run.system.validate()?;
    run.psr.validate()?;
    run.tsr.validate()?;
    let spec = &run.sweep;
    if spec.mode.montecarlo() && spec.trials == 0 {
        return Err(Error::InvalidConfig(
            "Monte Carlo runs need trials >= 1".into(),
        ));
    }
    let mut headers = headers(spec);
    headers.remove(1);
    let rows = spec
        .schemes()
        .par_iter()
        .map(|&label| {
            let mut system = run.system.clone();
            let mut relaying = match label {
                SchemeLabel::Tsr => Relaying::Tsr(run.tsr),
                _ => Relaying::Psr(run.psr),
            };
            if let (SchemeLabel::Baseline, Relaying::Psr(p)) = (label, &mut relaying) {
                system = system.without_cci();
                p.frame = spec.baseline_frame;
            }
            evaluate_point(&system, &relaying, spec).map(|r| {
                let mut row = row(label, 0.0, &r);
                row.remove(1);
                row
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table { headers, rows })
}

/// [`run_sweep`] on a dedicated pool of `workers` threads.
pub fn run_sweep_with_workers(run: &RunConfig, workers: usize) -> Result<Table> {
    montecarlo::with_workers(workers, || run_sweep(run))?
}
