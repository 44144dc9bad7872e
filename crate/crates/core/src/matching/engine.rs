use std::cmp::Ordering;

use crate::money::Money;
use crate::num::Real;
use crate::propagation::ChannelRealization;
use crate::scenario::Scenario;

use super::utility::dbs_utility;
use super::{BrbId, Market, Matching};

/// D-BS utilities for every (D-BS, BRB), stored `[k2][brb]`.
pub(super) fn dbs_values<T: Real>(market: &Market<T>, zeta: T) -> Vec<T> {
    let (kd, nb) = (market.num_demanding(), market.num_brbs());
    let mut v = Vec::with_capacity(kd * nb);
    for k2 in 0..kd {
        for (b, brb) in market.brbs().iter().enumerate() {
            v.push(dbs_utility(brb, market.gamma(b, k2), zeta));
        }
    }
    v
}

/// Orders BRBs from most to least preferred by one D-BS. Ties go to the
/// lower price, then the mmWave band, then the lower (owner, index).
fn preference_order<T: Real>(market: &Market<T>, values: &[T]) -> Vec<BrbId> {
    let mut order: Vec<BrbId> = (0..market.num_brbs()).collect();
    order.sort_by(|&a, &b| {
        let (ba, bb) = (market.brb(a), market.brb(b));
        values[b]
            .partial_cmp(&values[a])
            .unwrap_or(Ordering::Equal)
            .then(ba.price.cmp(&bb.price))
            .then(ba.band.cmp(&bb.band))
            .then((ba.owner, ba.index).cmp(&(bb.owner, bb.index)))
    });
    order
}

/// Round-by-round state of the proposal algorithm.
///
/// Each call to [`step`](Self::step) is one round: every active D-BS applies
/// to its most preferred affordable BRB it has not applied to yet, then
/// every BRB that received applications keeps the best of its current
/// holder and the applicants, ranked by link rate. A D-BS is active while its
/// rate is below demand and some unapplied BRB fits in its remaining budget.
pub struct MatchingEngine<'a, T: Real> {
    market: &'a Market<T>,
    ranking: Vec<Vec<BrbId>>,
    applied: Vec<Vec<bool>>,
    /// First position in `ranking[k2]` that may still be unapplied.
    cursor: Vec<usize>,
    state: Matching<T>,
}

impl<'a, T: Real> MatchingEngine<'a, T> {
    pub fn new(market: &'a Market<T>, zeta: T) -> Self {
        let (kd, nb) = (market.num_demanding(), market.num_brbs());
        let values = dbs_values(market, zeta);
        let ranking = (0..kd).map(|k2| preference_order(market, &values[k2 * nb..(k2 + 1) * nb])).collect();
        MatchingEngine {
            market,
            ranking,
            applied: vec![vec![false; nb]; kd],
            cursor: vec![0; kd],
            state: Matching::empty(kd, nb),
        }
    }

    pub fn matching(&self) -> &Matching<T> {
        &self.state
    }

    pub fn into_matching(self) -> Matching<T> {
        self.state
    }

    pub fn has_applied(&self, k2: usize, brb: BrbId) -> bool {
        self.applied[k2][brb]
    }

    /// BRBs `k2` has not applied to yet, in preference order.
    pub fn unapplied(&self, k2: usize) -> impl Iterator<Item = BrbId> + '_ {
        self.ranking[k2][self.cursor[k2]..].iter().copied().filter(move |&b| !self.applied[k2][b])
    }

    fn remaining_budget(&self, k2: usize) -> Money {
        self.market.budget(k2) - self.state.cost[k2]
    }

    /// Most preferred unapplied BRB that `k2` can currently afford.
    pub fn next_proposal(&self, k2: usize) -> Option<BrbId> {
        let left = self.remaining_budget(k2);
        self.unapplied(k2).find(|&b| self.market.brb(b).price <= left)
    }

    pub fn is_active(&self, k2: usize) -> bool {
        self.state.rate[k2] < self.market.demand(k2) && self.next_proposal(k2).is_some()
    }

    /// Runs one round. Returns `false` without changing anything when no
    /// D-BS is active.
    pub fn step(&mut self) -> bool {
        let kd = self.market.num_demanding();
        let mut proposals: Vec<(BrbId, usize)> = (0..kd)
            .filter(|&k2| self.state.rate[k2] < self.market.demand(k2))
            .filter_map(|k2| self.next_proposal(k2).map(|b| (b, k2)))
            .collect();
        if proposals.is_empty() {
            return false;
        }
        self.state.rounds += 1;
        self.state.proposals += proposals.len();

        for &(b, k2) in &proposals {
            self.applied[k2][b] = true;
            let ranking = &self.ranking[k2];
            let applied = &self.applied[k2];
            let cur = &mut self.cursor[k2];
            while *cur < ranking.len() && applied[ranking[*cur]] {
                *cur += 1;
            }
        }

        // Applications are decided per BRB once all are in; each D-BS sent
        // one, so the order BRBs are processed in does not matter.
        proposals.sort_unstable();
        for group in proposals.chunk_by(|a, b| a.0 == b.0) {
            let brb = group[0].0;
            let best = group
                .iter()
                .map(|&(_, k2)| k2)
                .reduce(|best, k2| if self.market.rate(brb, k2) > self.market.rate(brb, best) { k2 } else { best })
                .expect("group is non-empty");
            let wins = match self.state.owner_of[brb] {
                None => true,
                Some(holder) => self.market.rate(brb, best) > self.market.rate(brb, holder),
            };
            if wins {
                self.state.release(brb, self.market);
                self.state.assign(brb, best, self.market);
            }
        }
        true
    }

    pub fn run(mut self) -> Matching<T> {
        while self.step() {}
        self.state
    }
}

/// Runs the algorithm to completion on a prepared market.
pub fn run_matching_on<T: Real>(market: &Market<T>, zeta: T) -> Matching<T> {
    MatchingEngine::new(market, zeta).run()
}

/// Matches the D-BSs of `s` to BRBs under channel realization `ch`, with
/// `zeta` (bit/s per price unit) weighting price against rate.
pub fn run_matching<T: Real>(s: &Scenario<T>, ch: &ChannelRealization<T>, zeta: T) -> Matching<T> {
    run_matching_on(&Market::new(s, ch), zeta)
}

#[cfg(test)]
mod tests {
    use super::super::test_support::{brb, money};
    use super::*;
    use crate::scenario::BandKind;

    #[test]
    fn single_affordable_brb_is_taken() {
        let market =
            Market::from_gammas(vec![brb(0, BandKind::MmWave, 0, 1e6, 0.1)], vec![vec![1.0]], money(&[1.0]), vec![5e6]);
        let m = run_matching_on(&market, 1e6);
        assert_eq!(m.assigned[0], vec![0]);
        assert_eq!(m.proposals, 1);
        assert_eq!(m.rounds, 1);
    }

    #[test]
    fn contested_brb_goes_to_the_better_link() {
        let market = Market::from_gammas(
            vec![brb(0, BandKind::Sub6, 0, 480e3, 1.0)],
            vec![vec![2.0, 5.0]],
            money(&[10.0, 10.0]),
            vec![1e9, 1e9],
        );
        let m = run_matching_on(&market, 1e5);
        assert_eq!(m.owner_of[0], Some(1));
        assert!(m.assigned[0].is_empty());
        assert_eq!(m.proposals, 2);
    }

    #[test]
    fn equal_rates_keep_the_incumbent_or_lower_id() {
        // D-BS 1 prefers BRB 0 and takes it in round one (D-BS 0 is busy
        // with BRB 1); D-BS 0's later equal-rate application loses.
        let market = Market::from_gammas(
            vec![brb(0, BandKind::MmWave, 0, 1e6, 0.1), brb(0, BandKind::MmWave, 1, 1e6, 0.1)],
            vec![vec![3.0, 3.0], vec![7.0, 0.0]],
            money(&[10.0, 10.0]),
            vec![1e9, 1e9],
        );
        let m = run_matching_on(&market, 0.0);
        assert_eq!(m.owner_of[0], Some(1));
        assert_eq!(m.owner_of[1], Some(0));

        let simultaneous = Market::from_gammas(
            vec![brb(0, BandKind::MmWave, 0, 1e6, 0.1)],
            vec![vec![3.0, 3.0]],
            money(&[10.0, 10.0]),
            vec![1e9, 1e9],
        );
        assert_eq!(run_matching_on(&simultaneous, 0.0).owner_of[0], Some(0));
    }

    #[test]
    fn unaffordable_brbs_are_skipped_not_consumed() {
        let market = Market::from_gammas(
            vec![brb(0, BandKind::MmWave, 0, 1e6, 0.5), brb(0, BandKind::Sub6, 0, 1e6, 5.0)],
            vec![vec![1.0], vec![100.0]],
            money(&[1.0]),
            vec![1e9],
        );
        let mut engine = MatchingEngine::new(&market, 0.0);
        assert_eq!(engine.next_proposal(0), Some(0));
        assert!(engine.step());
        assert!(!engine.step());
        assert!(!engine.has_applied(0, 1));
        assert_eq!(engine.unapplied(0).collect::<Vec<_>>(), vec![1]);
        assert!(!engine.is_active(0));
        let m = engine.into_matching();
        assert_eq!(m.cost[0], Money::from_units(0.5));
    }

    #[test]
    fn stops_once_demand_is_met() {
        let market = Market::from_gammas(
            (0..4).map(|i| brb(0, BandKind::MmWave, i, 1e6, 0.1)).collect(),
            vec![vec![1.0]; 4],
            money(&[60.0]),
            vec![2e6],
        );
        let m = run_matching_on(&market, 1e6);
        assert_eq!(m.assigned[0].len(), 2);
        assert_eq!(m.rate[0], 2e6);
    }

    #[test]
    fn displaced_station_resumes() {
        // Both want BRB 0 most; D-BS 1 wins it, D-BS 0 falls back to BRB 1.
        let market = Market::from_gammas(
            vec![brb(0, BandKind::MmWave, 0, 1e6, 0.1), brb(0, BandKind::MmWave, 1, 1e6, 0.1)],
            vec![vec![15.0, 31.0], vec![3.0, 1.0]],
            money(&[10.0, 10.0]),
            vec![3e6, 3e6],
        );
        let m = run_matching_on(&market, 1e6);
        assert_eq!(m.owner_of, vec![Some(1), Some(0)]);
        assert_eq!(m.rounds, 2);
        assert_eq!(m.proposals, 3);
    }
}
