use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::baselines::{best_effort_allocate_on, random_allocate_on};
use crate::error::Result;
use crate::matching::{blocking_pairs, run_matching_on, Market, Matching};
use crate::money::Money;
use crate::propagation::realize_channels;
use crate::scenario::{generate_scenario, GenerationParams, Scenario};

use super::config::Scheme;

/// Per-scheme outcome of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchemeMetrics {
    pub avg_rate_bps: f64,
    pub avg_cost: f64,
    pub demand_met_fraction: f64,
    /// D-BSs whose cost exceeds their budget.
    pub over_budget: usize,
    pub rounds: usize,
    pub proposals: usize,
    pub blocking_pairs: usize,
}

impl SchemeMetrics {
    pub fn measure(m: &Matching, market: &Market, zeta: f64) -> Result<Self> {
        let kd = market.num_demanding();
        if kd == 0 {
            return Ok(SchemeMetrics {
                avg_rate_bps: 0.0,
                avg_cost: 0.0,
                demand_met_fraction: 1.0,
                over_budget: 0,
                rounds: m.rounds,
                proposals: m.proposals,
                blocking_pairs: 0,
            });
        }
        let n = kd as f64;
        Ok(SchemeMetrics {
            avg_rate_bps: m.rate.iter().sum::<f64>() / n,
            avg_cost: m.cost.iter().sum::<Money>().units() / n,
            demand_met_fraction: (0..kd).filter(|&k2| m.meets_demand(k2, market)).count() as f64 / n,
            over_budget: (0..kd).filter(|&k2| m.cost[k2] > market.budget(k2)).count(),
            rounds: m.rounds,
            proposals: m.proposals,
            blocking_pairs: blocking_pairs(m, market, zeta)?.len(),
        })
    }
}

/// Metrics of every enabled scheme on one shared draw, in scheme order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub schemes: Vec<(Scheme, SchemeMetrics)>,
}

impl TrialResult {
    pub fn get(&self, scheme: Scheme) -> Option<&SchemeMetrics> {
        self.schemes.iter().find(|(s, _)| *s == scheme).map(|(_, m)| m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub zeta_bps_per_unit: f64,
    pub schemes: Vec<Scheme>,
}

/// Runs every enabled scheme, in scheme order, on one market. The random
/// baseline draws from its own generator seeded by `rng`, so enabling or
/// disabling schemes never shifts the other draws.
pub fn run_schemes<R: Rng + ?Sized>(market: &Market, cfg: &TrialConfig, rng: &mut R) -> Vec<(Scheme, Matching)> {
    let mut random_rng = ChaCha8Rng::seed_from_u64(rng.random());
    let mut order = cfg.schemes.clone();
    order.sort_unstable();
    order.dedup();
    order
        .into_iter()
        .map(|scheme| {
            let m = match scheme {
                Scheme::Matching => run_matching_on(market, cfg.zeta_bps_per_unit),
                Scheme::BestEffort => best_effort_allocate_on(market),
                Scheme::Random => random_allocate_on(market, &mut random_rng),
            };
            (scheme, m)
        })
        .collect()
}

/// Draws one channel realization for `s` and runs every scheme on it.
pub fn run_trial<R: Rng + ?Sized>(s: &Scenario, cfg: &TrialConfig, rng: &mut R) -> Result<TrialResult> {
    let ch = realize_channels(s, rng);
    let market = Market::new(s, &ch);
    let schemes = run_schemes(&market, cfg, rng)
        .into_iter()
        .map(|(scheme, m)| Ok((scheme, SchemeMetrics::measure(&m, &market, cfg.zeta_bps_per_unit)?)))
        .collect::<Result<_>>()?;
    Ok(TrialResult { schemes })
}

/// RNG stream for trial `index` of an experiment seeded with `seed`. Streams
/// depend only on (seed, index), never on which worker runs the trial.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Places stations, draws channels and runs the schemes for trial `index`.
/// Station placement depends only on (seed, index), so sweep points that
/// share a station count share layouts.
pub fn run_generated_trial(params: &GenerationParams, cfg: &TrialConfig, seed: u64, index: u64) -> Result<TrialResult> {
    let mut rng = trial_rng(seed, index);
    let layout_seed: u64 = rng.random();
    if params.num_stations == params.num_anchors {
        // No demanding station: nothing to allocate.
        let empty = SchemeMetrics {
            avg_rate_bps: 0.0,
            avg_cost: 0.0,
            demand_met_fraction: 1.0,
            over_budget: 0,
            rounds: 0,
            proposals: 0,
            blocking_pairs: 0,
        };
        let mut order = cfg.schemes.clone();
        order.sort_unstable();
        order.dedup();
        return Ok(TrialResult { schemes: order.into_iter().map(|s| (s, empty)).collect() });
    }
    let s: Scenario = generate_scenario(params, layout_seed)?;
    run_trial(&s, cfg, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(schemes: &[Scheme]) -> TrialConfig {
        TrialConfig { zeta_bps_per_unit: 1e6, schemes: schemes.to_vec() }
    }

    #[test]
    fn matching_trial_is_stable_and_seeded() {
        let p = GenerationParams::default();
        let a = run_generated_trial(&p, &cfg(&[Scheme::Matching]), 5, 0).unwrap();
        let b = run_generated_trial(&p, &cfg(&[Scheme::Matching]), 5, 0).unwrap();
        assert_eq!(a, b);
        let m = a.get(Scheme::Matching).unwrap();
        assert_eq!(m.blocking_pairs, 0);
        assert_eq!(m.over_budget, 0);
        assert!(m.rounds > 0);
    }

    #[test]
    fn fully_blocked_mmw_only_network_carries_nothing() {
        let p = GenerationParams { sub6_num_brbs: 0, mmw_blockage_probability: 1.0, ..Default::default() };
        let r = run_generated_trial(&p, &cfg(&Scheme::ALL), 9, 3).unwrap();
        for (_, m) in &r.schemes {
            assert_eq!(m.avg_rate_bps, 0.0);
        }
    }

    #[test]
    fn no_demanding_station_means_no_rounds() {
        let p = GenerationParams { num_stations: 2, ..Default::default() };
        let r = run_generated_trial(&p, &cfg(&[Scheme::Matching]), 1, 0).unwrap();
        assert_eq!(r.get(Scheme::Matching).unwrap().rounds, 0);
    }

    #[test]
    fn schemes_share_the_draw() {
        // Adding schemes must not perturb the matching result.
        let p = GenerationParams::default();
        let alone = run_generated_trial(&p, &cfg(&[Scheme::Matching]), 2, 4).unwrap();
        let all = run_generated_trial(&p, &cfg(&Scheme::ALL), 2, 4).unwrap();
        assert_eq!(alone.get(Scheme::Matching), all.get(Scheme::Matching));
    }
}
