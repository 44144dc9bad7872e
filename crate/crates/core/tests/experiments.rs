//! Behaviour of the Monte Carlo harness on the reference experiments.

use backhaul::experiments::{
    run_generated_trial, run_sweep, sweep_budget_price, sweep_k, sweep_n1, Estimate, PointResult, Scheme, Sweep,
    SweepConfig, TrialConfig,
};
use backhaul::GenerationParams;

fn paired_difference(a: &PointResult, b: &PointResult, scheme: Scheme) -> Estimate {
    let xa = a.samples(scheme, |m| m.avg_rate_bps);
    let xb = b.samples(scheme, |m| m.avg_rate_bps);
    let d: Vec<f64> = xa.iter().zip(&xb).map(|(x, y)| x - y).collect();
    Estimate::from_samples(&d)
}

#[test]
fn matching_trials_have_no_blocking_pairs() {
    let cfg = TrialConfig { zeta_bps_per_unit: 1e6, schemes: vec![Scheme::Matching] };
    for i in 0..50 {
        let r = run_generated_trial(&GenerationParams::default(), &cfg, 77, i).unwrap();
        assert_eq!(r.get(Scheme::Matching).unwrap().blocking_pairs, 0, "trial {i}");
        assert_eq!(r, run_generated_trial(&GenerationParams::default(), &cfg, 77, i).unwrap());
    }
}

#[test]
fn blocked_mmw_only_network_has_zero_rate_for_every_scheme() {
    let params = GenerationParams { mmw_blockage_probability: 1.0, sub6_num_brbs: 0, ..Default::default() };
    let cfg = TrialConfig { zeta_bps_per_unit: 1e6, schemes: Scheme::ALL.to_vec() };
    for i in 0..10 {
        let r = run_generated_trial(&params, &cfg, 3, i).unwrap();
        assert!(r.schemes.iter().all(|(_, m)| m.avg_rate_bps == 0.0));
    }
}

#[test]
fn rate_vs_n1_curves() {
    let r = sweep_n1(&SweepConfig::rate_vs_n1()).unwrap();
    for scheme in Scheme::ALL {
        for w in r.points.windows(2) {
            let (lo, hi) = (w[0].estimate(scheme, |m| m.avg_rate_bps), w[1].estimate(scheme, |m| m.avg_rate_bps));
            assert!(
                hi.mean >= lo.mean - (lo.ci95 + hi.ci95),
                "{scheme} drops from n1={} to n1={}",
                w[0].coords[0],
                w[1].coords[0]
            );
        }
    }
    for p in &r.points {
        let m = p.estimate(Scheme::Matching, |m| m.avg_rate_bps).mean;
        let rnd = p.estimate(Scheme::Random, |m| m.avg_rate_bps).mean;
        assert!(m >= rnd, "n1={}: matching {m} < random {rnd}", p.coords[0]);
        assert_eq!(p.summary(Scheme::Matching).max_blocking_pairs, 0);
    }
}

fn fig3_grid() -> SweepConfig {
    SweepConfig {
        sweep: Sweep::BudgetPrice {
            budgets: (1..=10).map(|b| 10.0 * b as f64).collect(),
            sub6_prices: vec![1.0, 10.0, 20.0],
        },
        ..SweepConfig::rate_vs_budget_price()
    }
}

#[test]
fn rate_does_not_fall_with_budget() {
    let r = sweep_budget_price(&fig3_grid()).unwrap();
    for price in ["1", "10", "20"] {
        let column: Vec<&PointResult> = r.points.iter().filter(|p| p.coords[1] == price).collect();
        for w in column.windows(2) {
            let d = paired_difference(w[1], w[0], Scheme::Matching);
            assert!(d.mean + d.ci95 >= 0.0, "price {price}: budget {} -> {}: {d:?}", w[0].coords[0], w[1].coords[0]);
        }
    }
}

#[test]
fn demand_is_met_at_the_lowest_price() {
    let r = sweep_budget_price(&fig3_grid()).unwrap();
    let met: Vec<f64> = r
        .points
        .iter()
        .filter(|p| p.coords[1] == "1")
        .map(|p| p.estimate(Scheme::Matching, |m| m.demand_met_fraction).mean)
        .collect();
    let almost_all = met.iter().filter(|&&f| f >= 0.9).count();
    assert!(almost_all >= 8, "demand-met fraction by budget at price 1: {met:?}");
}

#[test]
fn smaller_zeta_lowers_the_rate() {
    let point = Sweep::BudgetPrice { budgets: vec![60.0], sub6_prices: vec![10.0] };
    let mut low = SweepConfig { sweep: point, ..SweepConfig::rate_vs_budget_price() };
    low.zeta_bps_per_unit = 0.1e6;
    let mut high = low.clone();
    high.zeta_bps_per_unit = 1e6;
    let a = run_sweep(&low).unwrap();
    let b = run_sweep(&high).unwrap();
    let (ra, rb) = (
        a.points[0].estimate(Scheme::Matching, |m| m.avg_rate_bps).mean,
        b.points[0].estimate(Scheme::Matching, |m| m.avg_rate_bps).mean,
    );
    assert!(ra < rb, "zeta 0.1 Mbit/s: {ra}, zeta 1 Mbit/s: {rb}");
}

#[test]
fn no_demanding_station_means_no_rounds() {
    let cfg = SweepConfig {
        sweep: Sweep::K { num_stations: vec![2], demands_bps: vec![50e6, 100e6] },
        trials: 5,
        ..SweepConfig::rounds_vs_k()
    };
    let r = sweep_k(&cfg).unwrap();
    for p in &r.points {
        assert_eq!(p.estimate(Scheme::Matching, |m| m.rounds as f64).mean, 0.0);
    }
}

#[test]
fn confidence_width_shrinks_with_trials() {
    let base = SweepConfig { sweep: Sweep::N1(vec![96]), trials: 100, ..SweepConfig::rate_vs_n1() };
    let mut big = base.clone();
    big.trials = 400;
    let w = |cfg: &SweepConfig| run_sweep(cfg).unwrap().points[0].estimate(Scheme::Matching, |m| m.avg_rate_bps).ci95;
    let (small, large) = (w(&base), w(&big));
    assert!(large <= 0.6 * small, "ci95 at 100 trials {small}, at 400 trials {large}");
}

#[test]
fn trials_are_shared_across_sweep_points() {
    // Trial i draws from the same stream at every sweep point.
    let cfg = SweepConfig { sweep: Sweep::N1(vec![16, 16]), trials: 10, ..SweepConfig::rate_vs_n1() };
    let r = run_sweep(&cfg).unwrap();
    assert_eq!(r.points[0].trials, r.points[1].trials);
}
