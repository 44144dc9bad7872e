//! Reference allocation schemes: rate-greedy best effort and uniform random.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::matching::{BrbId, Market, Matching};
use crate::num::Real;
use crate::propagation::ChannelRealization;
use crate::scenario::Scenario;

/// Greedy by link rate, blind to prices and budgets.
///
/// Repeatedly gives the globally best remaining (BRB, D-BS) link to that
/// D-BS, skipping D-BSs that already meet their demand and zero-rate links.
/// Costs are recorded and may exceed the budget.
pub fn best_effort_allocate_on<T: Real>(market: &Market<T>) -> Matching<T> {
    let (kd, nb) = (market.num_demanding(), market.num_brbs());
    let mut links: Vec<(BrbId, usize)> = (0..nb)
        .flat_map(|b| (0..kd).map(move |k2| (b, k2)))
        .filter(|&(b, k2)| market.rate(b, k2) > T::zero())
        .collect();
    // Stable sort keeps (brb, k2) order among equal rates.
    links.sort_by(|a, b| market.rate(b.0, b.1).partial_cmp(&market.rate(a.0, a.1)).unwrap_or(Ordering::Equal));

    let mut m = Matching::empty(kd, nb);
    let mut unmet = (0..kd).filter(|&k2| !m.meets_demand(k2, market)).count();
    for (b, k2) in links {
        if unmet == 0 {
            break;
        }
        if m.owner_of[b].is_some() || m.meets_demand(k2, market) {
            continue;
        }
        m.assign(b, k2, market);
        if m.meets_demand(k2, market) {
            unmet -= 1;
        }
    }
    m
}

pub fn best_effort_allocate<T: Real>(s: &Scenario<T>, ch: &ChannelRealization<T>) -> Matching<T> {
    best_effort_allocate_on(&Market::new(s, ch))
}

/// Walks the BRBs in random order and hands each to a uniformly chosen D-BS
/// among those still below demand that can afford it.
pub fn random_allocate_on<T: Real, R: Rng + ?Sized>(market: &Market<T>, rng: &mut R) -> Matching<T> {
    let (kd, nb) = (market.num_demanding(), market.num_brbs());
    let mut order: Vec<BrbId> = (0..nb).collect();
    order.shuffle(rng);
    let mut m = Matching::empty(kd, nb);
    let mut eligible = Vec::with_capacity(kd);
    for b in order {
        let price = market.brb(b).price;
        eligible.clear();
        eligible.extend((0..kd).filter(|&k2| !m.meets_demand(k2, market) && m.cost[k2] + price <= market.budget(k2)));
        if eligible.is_empty() {
            continue;
        }
        let k2 = eligible[rng.random_range(0..eligible.len())];
        m.assign(b, k2, market);
    }
    m
}

pub fn random_allocate<T: Real, R: Rng + ?Sized>(
    s: &Scenario<T>,
    ch: &ChannelRealization<T>,
    rng: &mut R,
) -> Matching<T> {
    random_allocate_on(&Market::new(s, ch), rng)
}
