use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::{blocking_pairs, run_matching_on, Market};
use crate::money::Money;
use crate::oracle::{brute_force_min_cost_on, check_constraints_on, verify_optimality};
use crate::propagation::realize_channels;
use crate::scenario::{generate_scenario, AnchorPrices, GenerationParams, PriceSchedule, Scenario};

use super::trial::trial_rng;

fn default_trials() -> usize {
    1000
}

fn default_zeta() -> f64 {
    1e6
}

/// Repeated matching runs checked for stability, convergence and budgets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    #[serde(default)]
    pub base: GenerationParams,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_zeta")]
    pub zeta_bps_per_unit: f64,
    pub seed: u64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            base: GenerationParams::default(),
            trials: default_trials(),
            zeta_bps_per_unit: default_zeta(),
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuditRecord {
    pub trial: u64,
    pub blocking_pairs: usize,
    pub proposals: usize,
    /// K2 times the total number of BRBs.
    pub proposal_bound: usize,
    pub rounds: usize,
    /// Total number of BRBs.
    pub round_bound: usize,
    /// Largest cost minus budget over all D-BSs, in price units.
    pub max_budget_excess: f64,
    pub budget_ok: bool,
    pub demand_met_fraction: f64,
}

impl AuditRecord {
    pub fn passed(&self) -> bool {
        self.blocking_pairs == 0
            && self.proposals <= self.proposal_bound
            && self.rounds <= self.round_bound
            && self.budget_ok
    }
}

fn audit_trial(cfg: &AuditConfig, index: u64) -> Result<AuditRecord> {
    let mut rng = trial_rng(cfg.seed, index);
    let layout_seed: u64 = rng.random();
    let s: Scenario = generate_scenario(&cfg.base, layout_seed)?;
    let ch = realize_channels(&s, &mut rng);
    let market = Market::new(&s, &ch);
    let m = run_matching_on(&market, cfg.zeta_bps_per_unit);
    let kd = market.num_demanding();
    let excess = (0..kd).map(|k2| m.cost[k2] - market.budget(k2)).max().unwrap_or(Money::ZERO);
    Ok(AuditRecord {
        trial: index,
        blocking_pairs: blocking_pairs(&m, &market, cfg.zeta_bps_per_unit)?.len(),
        proposals: m.proposals,
        proposal_bound: kd * market.num_brbs(),
        rounds: m.rounds,
        round_bound: market.num_brbs(),
        max_budget_excess: excess.units(),
        budget_ok: excess <= Money::ZERO,
        demand_met_fraction: (0..kd).filter(|&k2| m.meets_demand(k2, &market)).count() as f64 / kd as f64,
    })
}

/// Runs the matching on `cfg.trials` independent draws. Trial `i` uses the
/// same placement and channels as trial `i` of a sweep with the same seed.
pub fn stability_audit(cfg: &AuditConfig) -> Result<Vec<AuditRecord>> {
    if cfg.trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    (0..cfg.trials as u64).into_par_iter().map(|i| audit_trial(cfg, i)).collect()
}

/// Small random instance for exhaustive comparison: one or two anchors, up
/// to three D-BSs and at most six BRBs in a 300 m square, with per-anchor
/// prices and per-D-BS budgets and demands drawn independently.
pub fn micro_instance<R: Rng + ?Sized>(rng: &mut R) -> Scenario {
    let num_anchors = rng.random_range(1..=2);
    let num_demanding = rng.random_range(1..=3);
    let per_anchor = 6 / num_anchors;
    let total = rng.random_range(1..=per_anchor);
    let mmw = rng.random_range(0..=total);
    let params = GenerationParams {
        num_stations: num_anchors + num_demanding,
        num_anchors,
        area_side_m: 300.0,
        mmw_num_brbs: mmw,
        sub6_num_brbs: total - mmw,
        ..Default::default()
    };
    let mut s: Scenario = generate_scenario(&params, rng.random()).expect("micro parameters are valid");
    // Half-unit price steps make equal prices, and so ties, reasonably common.
    s.prices = PriceSchedule(
        (0..num_anchors)
            .map(|_| AnchorPrices {
                mmw: Money::from_units(0.5 * rng.random_range(1..=6) as f64),
                sub6: Money::from_units(rng.random_range(1..=6) as f64),
            })
            .collect(),
    );
    s.budget = (0..num_demanding).map(|_| Money::from_units(rng.random_range(1..=12) as f64)).collect();
    s.demand_bps = (0..num_demanding).map(|_| 1e6 * rng.random_range(1..=40) as f64).collect();
    s
}

fn default_instances() -> usize {
    200
}

/// Matching against the exhaustive optimum on random micro instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default = "default_zeta")]
    pub zeta_bps_per_unit: f64,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { instances: default_instances(), zeta_bps_per_unit: default_zeta(), seed: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleRecord {
    pub instance: u64,
    pub num_anchors: usize,
    pub num_demanding: usize,
    pub num_brbs: usize,
    pub feasible: bool,
    /// Minimum total cost; empty when no allocation is feasible.
    pub oracle_cost: Option<f64>,
    pub matching_cost: f64,
    /// Matching cost minus oracle cost when both meet every demand.
    pub gap: Option<f64>,
    pub matching_meets_demand: bool,
    /// Budget, per-anchor, quota and integrality constraints hold for the matching.
    pub constraints_ok: bool,
    /// A matching meeting every demand never beats the oracle.
    pub dominance_ok: bool,
    /// Independent re-enumeration confirmed the oracle optimum.
    pub oracle_verified: bool,
}

impl OracleRecord {
    pub fn passed(&self) -> bool {
        self.constraints_ok && self.dominance_ok && self.oracle_verified
    }
}

fn compare_instance(seed: u64, index: u64, zeta: f64) -> Result<OracleRecord> {
    let mut rng = trial_rng(seed, index);
    let s = micro_instance(&mut rng);
    let ch = realize_channels(&s, &mut rng);
    let market = Market::new(&s, &ch);
    let m = run_matching_on(&market, zeta);
    let sol = brute_force_min_cost_on(&market)?;
    let report = check_constraints_on(&m, &market);
    let meets = report.rate_satisfied();
    let matching_cost = m.total_cost();
    let dominance_ok = !meets || (sol.feasible && sol.total_cost <= matching_cost);
    Ok(OracleRecord {
        instance: index,
        num_anchors: s.num_anchors(),
        num_demanding: s.num_demanding(),
        num_brbs: market.num_brbs(),
        feasible: sol.feasible,
        oracle_cost: sol.feasible.then(|| sol.total_cost.units()),
        matching_cost: matching_cost.units(),
        gap: (meets && sol.feasible).then(|| (matching_cost - sol.total_cost).units()),
        matching_meets_demand: meets,
        constraints_ok: report.allocation_valid(),
        dominance_ok,
        oracle_verified: verify_optimality(&sol, &market)?,
    })
}

/// Compares the matching against the exhaustive optimum on `instances`
/// random micro instances.
pub fn oracle_compare(instances: usize, seed: u64, zeta_bps_per_unit: f64) -> Result<Vec<OracleRecord>> {
    (0..instances as u64).into_par_iter().map(|i| compare_instance(seed, i, zeta_bps_per_unit)).collect()
}

/// Writes serializable records as CSV with a header row.
pub fn write_records<W: Write, R: Serialize>(records: &[R], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Deterministic stand-alone generator for one micro instance.
pub fn micro_instance_from_seed(seed: u64) -> Scenario {
    micro_instance(&mut ChaCha8Rng::seed_from_u64(seed))
}
