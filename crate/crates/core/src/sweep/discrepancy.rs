//! Side-by-side comparison of the typeset decode-link closed form, the
//! re-derived one, and signal-level simulation.

use rayon::prelude::*;

use crate::analytic::{link_outage, link_stats, paper_printed_link_outage_raw, LinkFormula};
use crate::error::Result;
use crate::model::{LinkStats, PsrConfig, Relaying, SystemConfig, TsrConfig, User};
use crate::montecarlo::{simulate_link_outage, simulate_outage, McEstimate};

use super::table::{fmt_f64, Table};

/// Operating points of the comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyGrid {
    pub powers: Vec<f64>,
    pub inrs_db: Vec<f64>,
    pub relay_offsets: Vec<f64>,
}

impl Default for DiscrepancyGrid {
    fn default() -> Self {
        Self {
            powers: vec![0.15, 1.5, 15.0],
            inrs_db: vec![f64::NEG_INFINITY, 10.0, 20.0],
            relay_offsets: vec![2.0, 7.0, 12.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyRow {
    /// `psr`, `tsr`, or `link` for stand-alone link checks.
    pub scheme: &'static str,
    pub p_tx: Option<f64>,
    pub inr_db: Option<f64>,
    pub relay_offset: Option<f64>,
    pub user: Option<User>,
    pub stats: LinkStats,
    pub paper_raw: f64,
    pub paper: f64,
    pub rederived: f64,
    pub mc: McEstimate,
}

impl DiscrepancyRow {
    /// The typeset form is NaN, infinite, or outside `[0, 1]`.
    pub fn paper_out_of_range(&self) -> bool {
        !(0.0..=1.0).contains(&self.paper_raw)
    }

    /// The typeset form is strictly farther from simulation than the
    /// re-derived one.
    pub fn paper_farther(&self) -> bool {
        (self.paper - self.mc.mean).abs() > (self.rederived - self.mc.mean).abs()
    }

    /// The re-derived form is no farther from simulation than the typeset one.
    pub fn rederived_at_least_as_close(&self) -> bool {
        (self.rederived - self.mc.mean).abs() <= (self.paper - self.mc.mean).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyReport {
    pub rows: Vec<DiscrepancyRow>,
}

fn build_row(
    scheme: &'static str,
    point: Option<(f64, f64, f64, User)>,
    stats: LinkStats,
    mc: McEstimate,
) -> Result<DiscrepancyRow> {
    Ok(DiscrepancyRow {
        scheme,
        p_tx: point.map(|p| p.0),
        inr_db: point.map(|p| p.1),
        relay_offset: point.map(|p| p.2),
        user: point.map(|p| p.3),
        stats,
        paper_raw: paper_printed_link_outage_raw(&stats),
        paper: link_outage(&stats, LinkFormula::PaperPrinted)?,
        rederived: link_outage(&stats, LinkFormula::Rederived)?,
        mc,
    })
}

/// Stand-alone link checks that accompany every report.
pub fn reference_links() -> Vec<LinkStats> {
    vec![
        LinkStats {
            mean_snr: 10.0,
            mean_inr: 1.0,
            threshold: 1.0,
        },
        LinkStats {
            mean_snr: 10.0,
            mean_inr: 0.0,
            threshold: 1.0,
        },
        LinkStats {
            mean_snr: 10.0,
            mean_inr: 0.05,
            threshold: 1.0,
        },
    ]
}

/// Compares both decode-link forms with simulation over `grid` for PSR and
/// TSR around `base`, plus the [`reference_links`].
pub fn discrepancy_report(
    base: &SystemConfig,
    psr: &PsrConfig,
    tsr: &TsrConfig,
    grid: &DiscrepancyGrid,
    trials: u64,
    seed: u64,
) -> Result<DiscrepancyReport> {
    let mut points = Vec::new();
    for (name, scheme) in [("psr", Relaying::Psr(*psr)), ("tsr", Relaying::Tsr(*tsr))] {
        for &p in &grid.powers {
            for &inr in &grid.inrs_db {
                for &d in &grid.relay_offsets {
                    points.push((name, scheme, p, inr, d));
                }
            }
        }
    }
    let grid_rows = points
        .par_iter()
        .map(|&(name, scheme, p, inr, d)| {
            let cfg = SystemConfig {
                relay_offset: d,
                inr_db: inr,
                ..base.with_tx_power(p)
            };
            let mc = simulate_outage(&cfg, &scheme, trials, seed)?;
            User::BOTH
                .iter()
                .map(|&u| {
                    build_row(
                        name,
                        Some((p, inr, d, u)),
                        link_stats(&cfg, &scheme, u)?,
                        mc.link(u),
                    )
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows: Vec<DiscrepancyRow> = grid_rows.into_iter().flatten().collect();
    for stats in reference_links() {
        let mc = simulate_link_outage(&stats, trials, seed)?;
        rows.push(build_row("link", None, stats, mc)?);
    }
    Ok(DiscrepancyReport { rows })
}

impl DiscrepancyReport {
    pub fn to_table(&self) -> Table {
        let headers = [
            "scheme",
            "p_tx",
            "inr_db",
            "relay_offset",
            "user",
            "mean_snr",
            "mean_inr",
            "threshold",
            "paper_raw",
            "paper",
            "rederived",
            "mc_mean",
            "mc_stderr",
            "paper_out_of_range",
            "paper_farther",
        ];
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        let mut t = Table::new(headers.iter().map(|s| s.to_string()).collect());
        for r in &self.rows {
            t.rows.push(vec![
                r.scheme.to_string(),
                opt(r.p_tx),
                opt(r.inr_db),
                opt(r.relay_offset),
                match r.user {
                    Some(User::One) => "1".into(),
                    Some(User::Two) => "2".into(),
                    None => String::new(),
                },
                fmt_f64(r.stats.mean_snr),
                fmt_f64(r.stats.mean_inr),
                fmt_f64(r.stats.threshold),
                fmt_f64(r.paper_raw),
                fmt_f64(r.paper),
                fmt_f64(r.rederived),
                fmt_f64(r.mc.mean),
                fmt_f64(r.mc.stderr),
                r.paper_out_of_range().to_string(),
                r.paper_farther().to_string(),
            ]);
        }
        t
    }

    pub fn summary(&self) -> String {
        let n = self.rows.len();
        let out_of_range = self.rows.iter().filter(|r| r.paper_out_of_range()).count();
        let farther = self.rows.iter().filter(|r| r.paper_farther()).count();
        let red_ok = self
            .rows
            .iter()
            .filter(|r| r.rederived_at_least_as_close())
            .count();
        let worst = |f: &dyn Fn(&DiscrepancyRow) -> f64| {
            self.rows
                .iter()
                .map(|r| (f(r) - r.mc.mean).abs())
                .fold(0.0, f64::max)
        };
        format!(
            "rows: {n}\n\
             typeset form outside [0,1] or undefined: {out_of_range}\n\
             typeset form farther from simulation than re-derived: {farther}\n\
             re-derived at least as close as typeset: {red_ok}/{n}\n\
             max |rederived - mc|: {:.3e}\n\
             max |typeset - mc|: {:.3e}\n",
            worst(&|r| r.rederived),
            worst(&|r| r.paper),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_report() {
        let grid = DiscrepancyGrid {
            powers: vec![1.5],
            inrs_db: vec![f64::NEG_INFINITY, 10.0],
            relay_offsets: vec![7.0],
        };
        let r = discrepancy_report(
            &SystemConfig::default(),
            &PsrConfig::default(),
            &TsrConfig::default(),
            &grid,
            20_000,
            3,
        )
        .unwrap();
        // 2 schemes × 2 INR × 2 users + 3 reference links
        assert_eq!(r.rows.len(), 11);

        let link = r
            .rows
            .iter()
            .find(|r| r.scheme == "link" && r.stats.mean_inr == 1.0)
            .unwrap();
        assert!((link.rederived - 0.177_42).abs() < 1e-5);
        assert!((link.mc.mean - 0.177).abs() < 0.01);

        // no CCI: the typeset form is ∞/∞
        let quiet = r
            .rows
            .iter()
            .find(|r| r.inr_db == Some(f64::NEG_INFINITY))
            .unwrap();
        assert!(quiet.paper_raw.is_nan());
        assert!(quiet.paper_out_of_range());
        let s = quiet.stats;
        assert!((quiet.rederived - (1.0 - (-s.threshold / s.mean_snr).exp())).abs() < 1e-15);

        let table = r.to_table();
        let text = table.to_csv_string().unwrap();
        let back = Table::parse(&text).unwrap();
        assert_eq!(back.rows.len(), 11);
        assert!(r.summary().contains("rows: 11"));
    }
}
