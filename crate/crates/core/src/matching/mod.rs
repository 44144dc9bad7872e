//! One-to-many matching between demanding stations (D-BSs) and backhaul
//! resource blocks (BRBs).
//!
//! Every BRB takes at most one D-BS. A D-BS takes as many BRBs as it needs to
//! reach its rate demand, limited by its budget, so its quota is dynamic.
//! [`run_matching`] runs the proposal/acceptance rounds and
//! [`find_blocking_pairs`] verifies two-sided stability of any outcome.

mod engine;
mod stability;
mod utility;

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::money::Money;
use crate::num::Real;
use crate::propagation::{brb_rate, ChannelRealization, LinkTable};
use crate::scenario::{BandKind, Scenario};

pub use engine::{run_matching, run_matching_on, MatchingEngine};
pub use stability::{blocking_pairs, find_blocking_pairs, BlockingPair, BlockingReason};
pub use utility::{brb_utility, dbs_utility};

/// Position of a BRB in a [`Market`] catalog.
pub type BrbId = usize;

/// One backhaul resource block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Brb<T = f64> {
    /// Anchor position `k1`.
    pub owner: usize,
    pub band: BandKind,
    /// Index within the owner's band.
    pub index: usize,
    pub bandwidth_hz: T,
    pub price: Money,
}

/// Everything the allocation schemes need about one trial: the BRB catalog in
/// `(owner, band, index)` order and, per (BRB, D-BS), the SNR/SINR and rate.
#[derive(Debug, Clone)]
pub struct Market<T = f64> {
    brbs: Vec<Brb<T>>,
    num_demanding: usize,
    gamma: Vec<T>,
    rate: Vec<T>,
    budget: Vec<Money>,
    demand: Vec<T>,
}

impl<T: Real> Market<T> {
    pub fn new(s: &Scenario<T>, ch: &ChannelRealization<T>) -> Self {
        let links = LinkTable::new(s, ch);
        let (ka, _, kd) = ch.shape();
        let n1 = s.bands.mmw.num_brbs;
        let mut brbs = Vec::with_capacity(s.total_brbs());
        let mut gamma = Vec::with_capacity(s.total_brbs() * kd);
        let mut rate = Vec::with_capacity(s.total_brbs() * kd);
        for owner in 0..ka {
            for band in [BandKind::MmWave, BandKind::Sub6] {
                let spec = s.bands.get(band);
                for index in 0..spec.num_brbs {
                    let n = match band {
                        BandKind::MmWave => index,
                        BandKind::Sub6 => n1 + index,
                    };
                    brbs.push(Brb {
                        owner,
                        band,
                        index,
                        bandwidth_hz: spec.brb_bandwidth_hz,
                        price: s.prices.price(owner, band),
                    });
                    for k2 in 0..kd {
                        gamma.push(links.gamma(owner, n, k2));
                        rate.push(links.rate(owner, n, k2));
                    }
                }
            }
        }
        Market { brbs, num_demanding: kd, gamma, rate, budget: s.budget.clone(), demand: s.demand_bps.clone() }
    }

    /// Synthetic market from explicit link qualities, `gamma[brb][k2]`.
    /// BRBs are re-sorted into catalog order along with their rows.
    pub fn from_gammas(brbs: Vec<Brb<T>>, gamma: Vec<Vec<T>>, budget: Vec<Money>, demand: Vec<T>) -> Self {
        assert_eq!(brbs.len(), gamma.len(), "one gamma row per BRB");
        assert_eq!(budget.len(), demand.len(), "one budget per demand");
        let kd = demand.len();
        let mut rows: Vec<(Brb<T>, Vec<T>)> = brbs.into_iter().zip(gamma).collect();
        rows.sort_by_key(|(b, _)| (b.owner, b.band, b.index));
        let mut market = Market {
            brbs: Vec::with_capacity(rows.len()),
            num_demanding: kd,
            gamma: Vec::with_capacity(rows.len() * kd),
            rate: Vec::with_capacity(rows.len() * kd),
            budget,
            demand,
        };
        for (brb, g) in rows {
            assert_eq!(g.len(), kd, "one gamma per D-BS");
            for gk in g {
                market.gamma.push(gk);
                market.rate.push(brb_rate(brb.bandwidth_hz, gk));
            }
            market.brbs.push(brb);
        }
        market
    }

    pub fn brbs(&self) -> &[Brb<T>] {
        &self.brbs
    }

    pub fn brb(&self, id: BrbId) -> &Brb<T> {
        &self.brbs[id]
    }

    pub fn num_brbs(&self) -> usize {
        self.brbs.len()
    }

    pub fn num_demanding(&self) -> usize {
        self.num_demanding
    }

    pub fn gamma(&self, brb: BrbId, k2: usize) -> T {
        self.gamma[brb * self.num_demanding + k2]
    }

    /// Achievable rate of `brb` when serving `k2`.
    pub fn rate(&self, brb: BrbId, k2: usize) -> T {
        self.rate[brb * self.num_demanding + k2]
    }

    pub fn budget(&self, k2: usize) -> Money {
        self.budget[k2]
    }

    pub fn demand(&self, k2: usize) -> T {
        self.demand[k2]
    }

    pub fn budgets(&self) -> &[Money] {
        &self.budget
    }

    pub fn demands(&self) -> &[T] {
        &self.demand
    }
}

/// An allocation of BRBs to D-BSs with per-D-BS accumulated rate and cost.
///
/// `assigned` and `owner_of` are two views of the same assignment; the
/// schemes in this crate keep them consistent and `assigned` sorted.
/// Fields are public so that arbitrary (even invalid) allocations can be
/// audited by [`crate::oracle::check_constraints`].
#[derive(Debug, Clone, PartialEq)]
pub struct Matching<T = f64> {
    pub assigned: Vec<Vec<BrbId>>,
    pub owner_of: Vec<Option<usize>>,
    pub rate: Vec<T>,
    pub cost: Vec<Money>,
    /// Proposal rounds; zero for the non-iterative schemes.
    pub rounds: usize,
    pub proposals: usize,
}

impl<T: Real> Matching<T> {
    pub fn empty(num_demanding: usize, num_brbs: usize) -> Self {
        Matching {
            assigned: vec![Vec::new(); num_demanding],
            owner_of: vec![None; num_brbs],
            rate: vec![T::zero(); num_demanding],
            cost: vec![Money::ZERO; num_demanding],
            rounds: 0,
            proposals: 0,
        }
    }

    /// Builds the matching described by `owner_of`, with rates and costs
    /// summed in catalog order.
    pub fn from_owners(owner_of: Vec<Option<usize>>, market: &Market<T>) -> Self {
        assert_eq!(owner_of.len(), market.num_brbs());
        let mut m = Matching::empty(market.num_demanding(), market.num_brbs());
        for (brb, owner) in owner_of.iter().enumerate() {
            if let Some(k2) = *owner {
                m.assigned[k2].push(brb);
                m.rate[k2] += market.rate(brb, k2);
                m.cost[k2] += market.brb(brb).price;
            }
        }
        m.owner_of = owner_of;
        m
    }

    pub fn num_demanding(&self) -> usize {
        self.assigned.len()
    }

    /// Assigns a free BRB. Panics if it is already held.
    pub fn assign(&mut self, brb: BrbId, k2: usize, market: &Market<T>) {
        assert!(self.owner_of[brb].is_none(), "BRB {brb} already assigned");
        self.owner_of[brb] = Some(k2);
        let list = &mut self.assigned[k2];
        let at = list.partition_point(|&b| b < brb);
        list.insert(at, brb);
        self.rate[k2] += market.rate(brb, k2);
        self.cost[k2] += market.brb(brb).price;
    }

    /// Frees a held BRB and returns its previous holder.
    pub fn release(&mut self, brb: BrbId, market: &Market<T>) -> Option<usize> {
        let k2 = self.owner_of[brb].take()?;
        let list = &mut self.assigned[k2];
        if let Ok(at) = list.binary_search(&brb) {
            list.remove(at);
        }
        self.rate[k2] -= market.rate(brb, k2);
        self.cost[k2] -= market.brb(brb).price;
        Some(k2)
    }

    pub fn total_cost(&self) -> Money {
        self.cost.iter().sum()
    }

    /// Rate of `k2` summed from scratch over its BRBs.
    pub fn recomputed_rate(&self, k2: usize, market: &Market<T>) -> T {
        self.assigned[k2].iter().map(|&b| market.rate(b, k2)).sum()
    }

    pub fn recomputed_cost(&self, k2: usize, market: &Market<T>) -> Money {
        self.assigned[k2].iter().map(|&b| market.brb(b).price).sum()
    }

    pub fn meets_demand(&self, k2: usize, market: &Market<T>) -> bool {
        self.rate[k2] >= market.demand(k2)
    }

    /// Checks that `assigned` and `owner_of` describe the same assignment.
    pub fn check_consistency(&self) -> Result<()> {
        let nb = self.owner_of.len();
        let mut seen = vec![None; nb];
        for (k2, list) in self.assigned.iter().enumerate() {
            for &b in list {
                if b >= nb {
                    return Err(Error::InconsistentMatching(format!("D-BS {k2} holds unknown BRB {b}")));
                }
                if let Some(other) = seen[b].replace(k2) {
                    return Err(Error::InconsistentMatching(format!("BRB {b} listed for D-BS {other} and D-BS {k2}")));
                }
                if self.owner_of[b] != Some(k2) {
                    return Err(Error::InconsistentMatching(format!(
                        "BRB {b} listed for D-BS {k2} but owner_of says {:?}",
                        self.owner_of[b]
                    )));
                }
            }
        }
        for (b, owner) in self.owner_of.iter().enumerate() {
            if let Some(k2) = owner {
                if seen[b] != Some(*k2) {
                    return Err(Error::InconsistentMatching(format!(
                        "owner_of[{b}] = {k2} but the BRB is missing from its list"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Writes `k2,k1,band,n,gamma,rate_bps,price`, one row per assignment,
    /// sorted by `(k2, k1, band, n)`. `n` is the index within the band.
    pub fn write_csv<W: Write>(&self, market: &Market<T>, out: W) -> Result<()> {
        #[derive(Serialize)]
        struct Row {
            k2: usize,
            k1: usize,
            band: &'static str,
            n: usize,
            gamma: f64,
            rate_bps: f64,
            price: f64,
        }
        let mut w = csv::Writer::from_writer(out);
        for (k2, list) in self.assigned.iter().enumerate() {
            // Catalog order is already (k1, band, n).
            let mut list = list.clone();
            list.sort_unstable();
            for b in list {
                let brb = market.brb(b);
                w.serialize(Row {
                    k2,
                    k1: brb.owner,
                    band: brb.band.as_str(),
                    n: brb.index,
                    gamma: market.gamma(b, k2).as_f64(),
                    rate_bps: market.rate(b, k2).as_f64(),
                    price: brb.price.units(),
                })?;
            }
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    pub fn brb(owner: usize, band: BandKind, index: usize, bandwidth_hz: f64, price: f64) -> Brb {
        Brb { owner, band, index, bandwidth_hz, price: Money::from_units(price) }
    }

    pub fn money(v: &[f64]) -> Vec<Money> {
        v.iter().map(|&x| Money::from_units(x)).collect()
    }
}
