use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::GenerationParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Matching,
    BestEffort,
    Random,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Matching, Scheme::BestEffort, Scheme::Random];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Matching => "matching",
            Scheme::BestEffort => "best_effort",
            Scheme::Random => "random",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The swept variable and its values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Sweep {
    /// mmWave BRBs per anchor.
    N1(Vec<usize>),
    /// Full grid of per-D-BS budget by sub-6 BRB price.
    BudgetPrice {
        budgets: Vec<f64>,
        sub6_prices: Vec<f64>,
    },
    /// Total station count, crossed with the per-D-BS demand levels.
    K {
        num_stations: Vec<usize>,
        demands_bps: Vec<f64>,
    },
    Demand(Vec<f64>),
}

impl Sweep {
    pub fn name(&self) -> &'static str {
        match self {
            Sweep::N1(_) => "n1",
            Sweep::BudgetPrice { .. } => "budget-price",
            Sweep::K { .. } => "k",
            Sweep::Demand(_) => "demand",
        }
    }

    /// Names of the coordinate columns identifying a sweep point.
    pub fn coordinate_names(&self) -> &'static [&'static str] {
        match self {
            Sweep::N1(_) => &["n1"],
            Sweep::BudgetPrice { .. } => &["budget", "price_sub6"],
            Sweep::K { .. } => &["k", "demand_bps"],
            Sweep::Demand(_) => &["demand_bps"],
        }
    }

    /// Concrete generation parameters for every sweep point, in output order.
    pub fn points(&self, base: &GenerationParams) -> Vec<SweepPoint> {
        let with = |coords: Vec<String>, f: &dyn Fn(&mut GenerationParams)| {
            let mut params = base.clone();
            f(&mut params);
            SweepPoint { coords, params }
        };
        match self {
            Sweep::N1(values) => {
                values.iter().map(|&n1| with(vec![n1.to_string()], &|p| p.mmw_num_brbs = n1)).collect()
            }
            Sweep::BudgetPrice { budgets, sub6_prices } => budgets
                .iter()
                .flat_map(|&b| sub6_prices.iter().map(move |&price| (b, price)))
                .map(|(b, price)| {
                    with(vec![b.to_string(), price.to_string()], &|p| {
                        p.budget = b;
                        p.price_sub6 = price;
                    })
                })
                .collect(),
            Sweep::K { num_stations, demands_bps } => demands_bps
                .iter()
                .flat_map(|&d| num_stations.iter().map(move |&k| (k, d)))
                .map(|(k, d)| {
                    with(vec![k.to_string(), d.to_string()], &|p| {
                        p.num_stations = k;
                        p.demand_bps = d;
                    })
                })
                .collect(),
            Sweep::Demand(values) => values.iter().map(|&d| with(vec![d.to_string()], &|p| p.demand_bps = d)).collect(),
        }
    }

    fn is_empty(&self) -> bool {
        match self {
            Sweep::N1(v) => v.is_empty(),
            Sweep::BudgetPrice { budgets, sub6_prices } => budgets.is_empty() || sub6_prices.is_empty(),
            Sweep::K { num_stations, demands_bps } => num_stations.is_empty() || demands_bps.is_empty(),
            Sweep::Demand(v) => v.is_empty(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub coords: Vec<String>,
    pub params: GenerationParams,
}

fn default_trials() -> usize {
    200
}

fn default_schemes() -> Vec<Scheme> {
    Scheme::ALL.to_vec()
}

/// A Monte Carlo experiment: base parameters, one swept variable, and the
/// schemes compared on identical draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub base: GenerationParams,
    pub sweep: Sweep,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Price weight in the D-BS utility, bit/s per price unit.
    pub zeta_bps_per_unit: f64,
    #[serde(default = "default_schemes")]
    pub schemes: Vec<Scheme>,
    pub seed: u64,
    /// Worker threads; 0 uses one per core. Results do not depend on it.
    #[serde(default)]
    pub workers: usize,
}

impl SweepConfig {
    /// Average rate against mmWave BRB count (zeta = 1 Mbit/s per unit).
    pub fn rate_vs_n1() -> Self {
        SweepConfig {
            base: GenerationParams::default(),
            sweep: Sweep::N1(vec![16, 48, 96, 144, 180]),
            trials: default_trials(),
            zeta_bps_per_unit: 1e6,
            schemes: default_schemes(),
            seed: 1,
            workers: 0,
        }
    }

    /// Rate over a budget by sub-6 price grid (zeta = 0.1 Mbit/s per unit).
    pub fn rate_vs_budget_price() -> Self {
        SweepConfig {
            base: GenerationParams::default(),
            sweep: Sweep::BudgetPrice {
                budgets: (1..=10).map(|b| 10.0 * b as f64).collect(),
                sub6_prices: (1..=20).map(f64::from).collect(),
            },
            trials: default_trials(),
            zeta_bps_per_unit: 0.1e6,
            schemes: vec![Scheme::Matching],
            seed: 1,
            workers: 0,
        }
    }

    /// Rounds against network size with two anchors, at two demand levels.
    pub fn rounds_vs_k() -> Self {
        SweepConfig {
            base: GenerationParams::default(),
            sweep: Sweep::K { num_stations: vec![4, 8, 12, 16, 20], demands_bps: vec![50e6, 100e6] },
            trials: default_trials(),
            zeta_bps_per_unit: 1e6,
            schemes: vec![Scheme::Matching],
            seed: 1,
            workers: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.sweep.is_empty() {
            return bad(format!("sweep '{}' has no values", self.sweep.name()));
        }
        if self.schemes.is_empty() {
            return bad("at least one scheme is required".into());
        }
        if !self.zeta_bps_per_unit.is_finite() || self.zeta_bps_per_unit < 0.0 {
            return bad(format!("zeta_bps_per_unit = {}", self.zeta_bps_per_unit));
        }
        for point in self.sweep.points(&self.base) {
            let p = &point.params;
            if p.num_anchors == 0 || p.num_anchors > p.num_stations {
                return bad(format!(
                    "sweep point {:?}: {} anchors for {} stations",
                    point.coords, p.num_anchors, p.num_stations
                ));
            }
            if p.area_side_m.is_nan() || p.area_side_m <= 0.0 {
                return bad(format!("area_side_m = {}", p.area_side_m));
            }
        }
        Ok(())
    }
}
