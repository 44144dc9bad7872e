//! Exhaustive minimum-cost allocation for tiny instances, and a constraint
//! auditor for any allocation.
//!
//! The global problem: minimize total price paid subject to every D-BS
//! reaching its demand (rate constraint) within its budget, each anchor
//! handing out at most its own BRBs, and each BRB serving at most one D-BS
//! with 0/1 assignment variables.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matching::{BrbId, Market, Matching};
use crate::money::Money;
use crate::num::Real;
use crate::propagation::ChannelRealization;
use crate::scenario::Scenario;

pub const MAX_ORACLE_BRBS: usize = 8;
pub const MAX_ORACLE_DEMANDING: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution<T = f64> {
    /// Cheapest feasible allocation, or the empty allocation when none exists.
    pub assignment: Matching<T>,
    pub total_cost: Money,
    pub feasible: bool,
    /// Number of allocations enumerated.
    pub explored: u64,
}

fn check_size<T: Real>(market: &Market<T>) -> Result<()> {
    let (nb, kd) = (market.num_brbs(), market.num_demanding());
    if nb > MAX_ORACLE_BRBS || kd > MAX_ORACLE_DEMANDING {
        return Err(Error::InstanceTooLarge {
            brbs: nb,
            demanding: kd,
            max_brbs: MAX_ORACLE_BRBS,
            max_demanding: MAX_ORACLE_DEMANDING,
        });
    }
    Ok(())
}

/// Decodes enumeration index `code` into a per-BRB choice: `None` or a D-BS.
/// BRB 0 is the most significant digit, and digit 0 means unassigned, so
/// increasing codes are lexicographic in `(unassigned, k2 ascending)`.
fn decode(mut code: u64, nb: usize, kd: usize, out: &mut [Option<usize>]) {
    let radix = kd as u64 + 1;
    for b in (0..nb).rev() {
        let digit = (code % radix) as usize;
        out[b] = digit.checked_sub(1);
        code /= radix;
    }
}

/// Total cost if `owners` is feasible.
fn evaluate<T: Real>(
    market: &Market<T>,
    owners: &[Option<usize>],
    rate: &mut [T],
    cost: &mut [Money],
) -> Option<Money> {
    rate.fill(T::zero());
    cost.fill(Money::ZERO);
    for (b, owner) in owners.iter().enumerate() {
        if let Some(k2) = *owner {
            rate[k2] += market.rate(b, k2);
            cost[k2] += market.brb(b).price;
        }
    }
    let ok = (0..market.num_demanding()).all(|k2| rate[k2] >= market.demand(k2) && cost[k2] <= market.budget(k2));
    ok.then(|| cost.iter().sum())
}

/// Enumerates every allocation and returns the cheapest feasible one. Ties
/// go to the first allocation in enumeration order.
pub fn brute_force_min_cost_on<T: Real>(market: &Market<T>) -> Result<OracleSolution<T>> {
    check_size(market)?;
    let (nb, kd) = (market.num_brbs(), market.num_demanding());
    let radix = kd as u64 + 1;
    let total = radix.pow(nb as u32);
    // One shard per choice for the leading BRB (or a single shard).
    let shards = if nb == 0 { 1 } else { radix };
    let shard_len = total / shards;

    let best = (0..shards)
        .into_par_iter()
        .filter_map(|shard| {
            let mut owners = vec![None; nb];
            let mut rate = vec![T::zero(); kd];
            let mut cost = vec![Money::ZERO; kd];
            let mut best: Option<(Money, u64)> = None;
            for code in shard * shard_len..(shard + 1) * shard_len {
                decode(code, nb, kd, &mut owners);
                if let Some(c) = evaluate(market, &owners, &mut rate, &mut cost) {
                    if best.is_none_or(|(bc, _)| c < bc) {
                        best = Some((c, code));
                    }
                }
            }
            best
        })
        .min();

    Ok(match best {
        Some((total_cost, code)) => {
            let mut owners = vec![None; nb];
            decode(code, nb, kd, &mut owners);
            OracleSolution {
                assignment: Matching::from_owners(owners, market),
                total_cost,
                feasible: true,
                explored: total,
            }
        }
        None => OracleSolution {
            assignment: Matching::empty(kd, nb),
            total_cost: Money::ZERO,
            feasible: false,
            explored: total,
        },
    })
}

pub fn brute_force_min_cost<T: Real>(s: &Scenario<T>, ch: &ChannelRealization<T>) -> Result<OracleSolution<T>> {
    brute_force_min_cost_on(&Market::new(s, ch))
}

/// Re-enumerates the instance depth-first and confirms that `sol` is
/// feasible when it claims to be and that no feasible allocation is cheaper.
pub fn verify_optimality<T: Real>(sol: &OracleSolution<T>, market: &Market<T>) -> Result<bool> {
    check_size(market)?;
    let kd = market.num_demanding();

    fn dfs<T: Real>(market: &Market<T>, b: usize, rate: &mut Vec<T>, cost: &mut Vec<Money>, best: &mut Option<Money>) {
        if b == market.num_brbs() {
            let feasible =
                (0..market.num_demanding()).all(|k2| rate[k2] >= market.demand(k2) && cost[k2] <= market.budget(k2));
            if feasible {
                let total: Money = cost.iter().sum();
                if best.is_none_or(|c| total < c) {
                    *best = Some(total);
                }
            }
            return;
        }
        dfs(market, b + 1, rate, cost, best);
        for k2 in 0..market.num_demanding() {
            let (r, p) = (market.rate(b, k2), market.brb(b).price);
            let saved = rate[k2];
            rate[k2] += r;
            cost[k2] += p;
            dfs(market, b + 1, rate, cost, best);
            rate[k2] = saved;
            cost[k2] -= p;
        }
    }

    let mut best = None;
    dfs(market, 0, &mut vec![T::zero(); kd], &mut vec![Money::ZERO; kd], &mut best);

    Ok(match best {
        None => !sol.feasible,
        Some(min) => {
            sol.feasible && sol.total_cost == min && check_constraints_on(&sol.assignment, market).all_satisfied()
        }
    })
}

/// Rate shortfall or surplus of one D-BS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSlack<T = f64> {
    pub rate_bps: T,
    pub demand_bps: T,
    /// `rate - demand`; negative when the demand is missed.
    pub slack_bps: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetSlack {
    pub cost: Money,
    pub budget: Money,
    /// `budget - cost`; negative when overspent.
    pub slack: Money,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnchorLoad {
    pub assigned: usize,
    pub limit: usize,
}

/// Outcome of auditing an allocation against every constraint family.
/// Rates and costs are recomputed from the listed BRBs, not taken from the
/// allocation's running totals.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintReport<T = f64> {
    pub rate: Vec<RateSlack<T>>,
    pub budget: Vec<BudgetSlack>,
    /// Assignments per anchor. With one D-BS per BRB this can never exceed
    /// the anchor's BRB count; it is reported for completeness.
    pub per_anchor: Vec<AnchorLoad>,
    /// BRBs held by more than one D-BS.
    pub quota_violations: Vec<BrbId>,
    /// (D-BS, BRB) entries that are not a 0/1 assignment of a known BRB:
    /// duplicates within one D-BS or ids outside the catalog.
    pub integrality_violations: Vec<(usize, BrbId)>,
}

impl<T: Real> ConstraintReport<T> {
    pub fn rate_satisfied(&self) -> bool {
        self.rate.iter().all(|r| r.slack_bps >= T::zero())
    }

    pub fn budget_satisfied(&self) -> bool {
        self.budget.iter().all(|b| b.slack >= Money::ZERO)
    }

    pub fn per_anchor_satisfied(&self) -> bool {
        self.per_anchor.iter().all(|a| a.assigned <= a.limit)
    }

    pub fn quota_satisfied(&self) -> bool {
        self.quota_violations.is_empty()
    }

    pub fn integrality_satisfied(&self) -> bool {
        self.integrality_violations.is_empty()
    }

    /// Every family except the rate demand.
    pub fn allocation_valid(&self) -> bool {
        self.budget_satisfied() && self.per_anchor_satisfied() && self.quota_satisfied() && self.integrality_satisfied()
    }

    pub fn all_satisfied(&self) -> bool {
        self.rate_satisfied() && self.allocation_valid()
    }

    pub fn unmet_demands(&self) -> Vec<usize> {
        (0..self.rate.len()).filter(|&k2| self.rate[k2].slack_bps < T::zero()).collect()
    }
}

pub fn check_constraints_on<T: Real>(m: &Matching<T>, market: &Market<T>) -> ConstraintReport<T> {
    let (kd, nb) = (market.num_demanding(), market.num_brbs());
    let num_anchors = market.brbs().iter().map(|b| b.owner + 1).max().unwrap_or(0);
    let mut per_anchor_limit = vec![0; num_anchors];
    for b in market.brbs() {
        per_anchor_limit[b.owner] += 1;
    }
    let mut per_anchor_count = vec![0; num_anchors];
    let mut holders = vec![0usize; nb];
    let mut integrality_violations = Vec::new();
    let mut rate = Vec::with_capacity(kd);
    let mut budget = Vec::with_capacity(kd);

    for k2 in 0..kd {
        let list = m.assigned.get(k2).map(Vec::as_slice).unwrap_or(&[]);
        let mut seen = vec![false; nb];
        let mut r = T::zero();
        let mut c = Money::ZERO;
        for &b in list {
            if b >= nb || seen[b] {
                integrality_violations.push((k2, b));
                if b >= nb {
                    continue;
                }
            }
            seen[b] = true;
            holders[b] += 1;
            per_anchor_count[market.brb(b).owner] += 1;
            r += market.rate(b, k2);
            c += market.brb(b).price;
        }
        rate.push(RateSlack { rate_bps: r, demand_bps: market.demand(k2), slack_bps: r - market.demand(k2) });
        budget.push(BudgetSlack { cost: c, budget: market.budget(k2), slack: market.budget(k2) - c });
    }
    for k2 in kd..m.assigned.len() {
        for &b in &m.assigned[k2] {
            integrality_violations.push((k2, b));
        }
    }

    ConstraintReport {
        rate,
        budget,
        per_anchor: per_anchor_count
            .into_iter()
            .zip(per_anchor_limit)
            .map(|(assigned, limit)| AnchorLoad { assigned, limit })
            .collect(),
        quota_violations: (0..nb).filter(|&b| holders[b] > 1).collect(),
        integrality_violations,
    }
}

pub fn check_constraints<T: Real>(m: &Matching<T>, s: &Scenario<T>, ch: &ChannelRealization<T>) -> ConstraintReport<T> {
    check_constraints_on(m, &Market::new(s, ch))
}
