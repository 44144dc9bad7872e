use crate::error::Result;
use crate::money::Money;
use crate::num::Real;
use crate::propagation::ChannelRealization;
use crate::scenario::Scenario;

use super::engine::dbs_values;
use super::{BrbId, Market, Matching};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockingReason {
    /// The D-BS is below demand and can afford the BRB on top of what it has.
    Addition,
    /// The D-BS would trade `replaced` for the BRB and can afford the trade.
    Swap { replaced: BrbId },
}

/// A (D-BS, BRB) pair outside the matching that both sides strictly prefer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockingPair {
    pub demanding: usize,
    pub brb: BrbId,
    pub reason: BlockingReason,
}

/// Lists all blocking pairs of `m`.
///
/// A pair `(k2, b)` with `b` not held by `k2` blocks when `b` is free or
/// strictly prefers `k2` to its holder, and `k2` strictly wants `b`: either it
/// is below demand and `b` fits in its remaining budget, or trading some held
/// BRB of lower D-BS utility for `b` stays within budget.
pub fn blocking_pairs<T: Real>(m: &Matching<T>, market: &Market<T>, zeta: T) -> Result<Vec<BlockingPair>> {
    m.check_consistency()?;
    let (kd, nb) = (market.num_demanding(), market.num_brbs());
    let values = dbs_values(market, zeta);
    let mut out = Vec::new();

    for k2 in 0..kd {
        let v = &values[k2 * nb..(k2 + 1) * nb];
        let budget = market.budget(k2);
        let cost = m.cost[k2];
        let can_add = m.rate[k2] < market.demand(k2);

        // Held BRBs by decreasing price, with the running minimum utility,
        // so "some held BRB at least this expensive with lower utility" is a
        // binary search.
        let mut held: Vec<(Money, T, BrbId)> = m.assigned[k2].iter().map(|&b| (market.brb(b).price, v[b], b)).collect();
        held.sort_by(|a, b| b.0.cmp(&a.0).then(a.2.cmp(&b.2)));
        let mut prefix_min: Vec<(T, BrbId)> = Vec::with_capacity(held.len());
        for &(_, val, b) in &held {
            let next = match prefix_min.last() {
                Some(&(best, bb)) if best <= val => (best, bb),
                _ => (val, b),
            };
            prefix_min.push(next);
        }

        for (b, &holder) in m.owner_of.iter().enumerate() {
            if holder == Some(k2) {
                continue;
            }
            let brb_prefers = match holder {
                None => true,
                Some(h) => market.rate(b, k2) > market.rate(b, h),
            };
            if !brb_prefers {
                continue;
            }
            let price = market.brb(b).price;
            if can_add && cost + price <= budget {
                out.push(BlockingPair { demanding: k2, brb: b, reason: BlockingReason::Addition });
                continue;
            }
            // Trade b' for b is affordable iff price(b') >= price(b) + cost - budget.
            let threshold = price + cost - budget;
            let eligible = held.partition_point(|e| e.0 >= threshold);
            if eligible > 0 {
                let (worst, replaced) = prefix_min[eligible - 1];
                if v[b] > worst {
                    out.push(BlockingPair { demanding: k2, brb: b, reason: BlockingReason::Swap { replaced } });
                }
            }
        }
    }
    Ok(out)
}

/// [`blocking_pairs`] for a scenario and channel realization.
pub fn find_blocking_pairs<T: Real>(
    m: &Matching<T>,
    s: &Scenario<T>,
    ch: &ChannelRealization<T>,
    zeta: T,
) -> Result<Vec<BlockingPair>> {
    blocking_pairs(m, &Market::new(s, ch), zeta)
}
