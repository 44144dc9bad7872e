use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

use super::config::{Scheme, Sweep, SweepConfig};
use super::stats::Estimate;
use super::trial::{run_generated_trial, SchemeMetrics, TrialConfig, TrialResult};

/// All trials of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub coords: Vec<String>,
    pub trials: Vec<TrialResult>,
}

impl PointResult {
    /// One metric of one scheme across trials, in trial order.
    pub fn samples(&self, scheme: Scheme, metric: impl Fn(&SchemeMetrics) -> f64) -> Vec<f64> {
        self.trials.iter().filter_map(|t| t.get(scheme).map(&metric)).collect()
    }

    pub fn estimate(&self, scheme: Scheme, metric: impl Fn(&SchemeMetrics) -> f64) -> Estimate {
        Estimate::from_samples(&self.samples(scheme, metric))
    }

    pub fn summary(&self, scheme: Scheme) -> SchemeSummary {
        SchemeSummary {
            rate_bps: self.estimate(scheme, |m| m.avg_rate_bps),
            cost: self.estimate(scheme, |m| m.avg_cost),
            demand_met: self.estimate(scheme, |m| m.demand_met_fraction),
            rounds: self.estimate(scheme, |m| m.rounds as f64),
            proposals: self.estimate(scheme, |m| m.proposals as f64),
            max_blocking_pairs: self.samples(scheme, |m| m.blocking_pairs as f64).into_iter().fold(0.0, f64::max)
                as usize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchemeSummary {
    pub rate_bps: Estimate,
    pub cost: Estimate,
    pub demand_met: Estimate,
    pub rounds: Estimate,
    pub proposals: Estimate,
    pub max_blocking_pairs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub coordinate_names: Vec<String>,
    pub schemes: Vec<Scheme>,
    pub points: Vec<PointResult>,
}

impl SweepResult {
    pub fn point(&self, coords: &[&str]) -> Option<&PointResult> {
        self.points.iter().find(|p| p.coords.iter().map(String::as_str).eq(coords.iter().copied()))
    }

    /// One row per (sweep point, scheme). Rates in bit/s, costs in price
    /// units, 95% confidence half-widths next to each mean.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<&str> = self.coordinate_names.iter().map(String::as_str).collect();
        header.extend([
            "scheme",
            "mean_rate_bps",
            "ci95_bps",
            "trials",
            "mean_cost",
            "ci95_cost",
            "mean_demand_met",
            "ci95_demand_met",
            "mean_rounds",
            "ci95_rounds",
            "mean_proposals",
            "ci95_proposals",
            "max_blocking_pairs",
        ]);
        w.write_record(&header)?;
        for point in &self.points {
            for &scheme in &self.schemes {
                let s = point.summary(scheme);
                let mut row = point.coords.clone();
                row.push(scheme.to_string());
                for v in [s.rate_bps.mean, s.rate_bps.ci95] {
                    row.push(v.to_string());
                }
                row.push(s.rate_bps.n.to_string());
                for e in [s.cost, s.demand_met, s.rounds, s.proposals] {
                    row.push(e.mean.to_string());
                    row.push(e.ci95.to_string());
                }
                row.push(s.max_blocking_pairs.to_string());
                w.write_record(&row)?;
            }
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// Runs every trial of every sweep point. Trials execute on a worker pool;
/// the result is identical for any pool width.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let mut schemes = cfg.schemes.clone();
    schemes.sort_unstable();
    schemes.dedup();
    let trial_cfg = TrialConfig { zeta_bps_per_unit: cfg.zeta_bps_per_unit, schemes: schemes.clone() };
    let points = cfg.sweep.points(&cfg.base);

    let work = || -> Result<Vec<PointResult>> {
        points
            .iter()
            .map(|point| {
                let trials = (0..cfg.trials as u64)
                    .into_par_iter()
                    .map(|i| run_generated_trial(&point.params, &trial_cfg, cfg.seed, i))
                    .collect::<Result<Vec<_>>>()?;
                Ok(PointResult { coords: point.coords.clone(), trials })
            })
            .collect()
    };
    let points = if cfg.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?
            .install(work)?
    } else {
        work()?
    };

    Ok(SweepResult {
        coordinate_names: cfg.sweep.coordinate_names().iter().map(|s| s.to_string()).collect(),
        schemes,
        points,
    })
}

fn expect_sweep(cfg: &SweepConfig, matches: fn(&Sweep) -> bool, name: &str) -> Result<()> {
    if matches(&cfg.sweep) {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("expected a '{name}' sweep, got '{}'", cfg.sweep.name())))
    }
}

/// Average rate per D-BS against the number of mmWave BRBs.
pub fn sweep_n1(cfg: &SweepConfig) -> Result<SweepResult> {
    expect_sweep(cfg, |s| matches!(s, Sweep::N1(_)), "n1")?;
    run_sweep(cfg)
}

/// Average rate per D-BS over a (budget, sub-6 price) grid.
pub fn sweep_budget_price(cfg: &SweepConfig) -> Result<SweepResult> {
    expect_sweep(cfg, |s| matches!(s, Sweep::BudgetPrice { .. }), "budget-price")?;
    run_sweep(cfg)
}

/// Rounds and proposals against the total number of stations.
pub fn sweep_k(cfg: &SweepConfig) -> Result<SweepResult> {
    expect_sweep(cfg, |s| matches!(s, Sweep::K { .. }), "k")?;
    run_sweep(cfg)
}
