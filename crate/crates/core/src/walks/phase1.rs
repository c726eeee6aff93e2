//! Coupon distribution: every node launches one short walk per incident edge.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::congest::{bits_for, Engine, Envelope, Payload};
use crate::graph::{NodeId, Round};
use crate::rng::{NodeStreams, Purpose};

use super::{Stepper, WalkError};

/// A short walk launched by `origin`, resting at `holder` once settled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coupon {
    pub origin: NodeId,
    /// 1-based, unique per origin.
    pub serial: u32,
    pub desired_length: u64,
    pub holder: NodeId,
    pub used: bool,
}

/// Where every coupon ended up, with the full path of each short walk.
#[derive(Clone, Debug)]
pub struct CouponPlacement {
    pub lambda_walk: u64,
    pub coupons: Vec<Coupon>,
    /// `paths[c]` lists the positions of coupon `c`, starting at its origin.
    pub paths: Vec<Vec<NodeId>>,
    /// `step_rounds[c][i]` is the round in which coupon `c` took step `i + 1`.
    pub step_rounds: Vec<Vec<Round>>,
    /// Index of the first coupon of each origin; origin `v` owns `first[v]..first[v + 1]`.
    first: Vec<usize>,
    /// Unused coupon indices per origin.
    unused: Vec<Vec<usize>>,
    /// Rounds completed before the phase began.
    pub start_round: Round,
    pub rounds: u64,
    /// Most coupons carried by one directed edge in one round.
    pub max_edge_coupons: u64,
}

impl CouponPlacement {
    pub fn coupons_of(&self, origin: NodeId) -> &[Coupon] {
        &self.coupons[self.first[origin.index()]..self.first[origin.index() + 1]]
    }

    pub fn unused_count(&self, origin: NodeId) -> usize {
        self.unused[origin.index()].len()
    }

    /// Serials of `origin`'s unused coupons, in the order a uniform index selects from.
    pub fn unused_serials(&self, origin: NodeId) -> Vec<u32> {
        self.unused[origin.index()]
            .iter()
            .map(|&c| self.coupons[c].serial)
            .collect()
    }

    /// Removes a uniformly chosen unused coupon of `origin`; `None` when exhausted.
    pub fn take_uniform<R: Rng + ?Sized>(&mut self, origin: NodeId, rng: &mut R) -> Option<usize> {
        let list = &mut self.unused[origin.index()];
        if list.is_empty() {
            return None;
        }
        let c = list.swap_remove(rng.gen_range(0..list.len()));
        assert!(!self.coupons[c].used, "coupon {c} sampled twice");
        self.coupons[c].used = true;
        Some(c)
    }

    /// Coupons resting at each node.
    pub fn held_counts(&self) -> Vec<usize> {
        let mut held = vec![0; self.first.len() - 1];
        for c in &self.coupons {
            held[c.holder.index()] += 1;
        }
        held
    }
}

/// Runs the coupon phase: `deg(v)` coupons per node, desired lengths `λ + r` with
/// `r` uniform in `[0, λ)`, forwarded one step per round until settled.
///
/// Lasts exactly `2λ` rounds when no coupon is delayed; under the queue policy it
/// continues until every coupon has settled.
pub fn phase1_distribute(
    engine: &mut Engine,
    lambda_walk: u64,
    stepper: Stepper,
) -> Result<CouponPlacement, WalkError> {
    assert!(lambda_walk >= 1, "short walks need positive length");
    let n = engine.n();
    let start = engine.round();
    let g1 = engine.next_snapshot()?;
    let mut streams = NodeStreams::new(engine.config().seed, Purpose::Phase1, start, n);

    let mut coupons = Vec::new();
    let mut first = Vec::with_capacity(n + 1);
    for v in 0..n {
        first.push(coupons.len());
        let node = NodeId::from(v);
        for serial in 1..=g1.degree(node) as u32 {
            let r = streams.get(v).gen_range(0..lambda_walk);
            coupons.push(Coupon {
                origin: node,
                serial,
                desired_length: lambda_walk + r,
                holder: node,
                used: false,
            });
        }
    }
    first.push(coupons.len());

    let mut enc = *engine.encoding();
    enc.length_bits = bits_for(2 * lambda_walk);
    enc.serial_bits = bits_for(g1.max_degree() as u64);
    engine.set_encoding(enc);

    let m = coupons.len();
    let mut paths: Vec<Vec<NodeId>> = coupons.iter().map(|c| vec![c.origin]).collect();
    let mut step_rounds: Vec<Vec<Round>> = vec![Vec::new(); m];
    let mut in_flight = vec![false; m];
    let mut unsettled = m;
    let mut i = 0;
    while i < 2 * lambda_walk || unsettled > 0 {
        i += 1;
        let g = engine.next_snapshot()?;
        let mut sends = Vec::new();
        let mut stayed = Vec::new();
        for (c, coupon) in coupons.iter().enumerate() {
            if in_flight[c] || (paths[c].len() as u64 - 1) >= coupon.desired_length {
                continue;
            }
            let v = coupon.holder;
            match stepper.step(streams.get(v.index()), v, g.neighbors(v))? {
                Some(u) => {
                    let payload = Payload::Coupon {
                        origin: coupon.origin,
                        serial: coupon.serial,
                        desired_length: coupon.desired_length,
                    };
                    sends.push(Envelope {
                        from: v,
                        to: u,
                        payload,
                        tag: c,
                    });
                    in_flight[c] = true;
                }
                None => stayed.push(c),
            }
        }
        let ex = engine.exchange(sends)?;
        let moves = stayed
            .into_iter()
            .map(|c| (c, coupons[c].holder))
            .chain(ex.delivered.iter().map(|msg| (msg.tag, msg.to)));
        for (c, to) in moves.collect::<Vec<_>>() {
            in_flight[c] = false;
            coupons[c].holder = to;
            paths[c].push(to);
            step_rounds[c].push(ex.round);
            if paths[c].len() as u64 - 1 == coupons[c].desired_length {
                unsettled -= 1;
            }
        }
        for msg in &ex.bounced {
            in_flight[msg.tag] = false;
        }
    }
    let rounds = engine.round() - start;
    let max_edge_coupons = engine.log().max_edge_msgs_in(start + 1, engine.round());
    let unused = (0..n).map(|v| (first[v]..first[v + 1]).collect()).collect();
    Ok(CouponPlacement {
        lambda_walk,
        coupons,
        paths,
        step_rounds,
        first,
        unused,
        start_round: start,
        rounds,
        max_edge_coupons,
    })
}
